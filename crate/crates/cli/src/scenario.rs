//! Scenario runners. Each writes its artifacts through an [`ArtifactWriter`].

use crate::acceptance::{self, Criterion};
use crate::config::{ScenarioConfig, ScenarioKind};
use crate::output::{fmt_f64, ArtifactWriter, Manifest};
use crate::table::{fit_table, KernelRow, TableFit};
use crate::validate::{validate, ValidationReport};
use analog_sqed::analog::{
    kg_deviation, locality_error, mass_relation, nonlocal_kernels, AnalogParams, KernelGrid,
};
use analog_sqed::bogoliubov::{
    amplitudes, build_hamiltonian_block, dispersion, symplectic_diagonalize,
};
use analog_sqed::calibrate::{coupling_plan, rabi_window, CouplingPlan, RabiWindow};
use analog_sqed::charge::{
    build_mode_hamiltonian, charge_commutator, charge_matrix, evolve, off_sector_norm,
    squeezing_oracle, vacuum_instability_scan, FockState, ScanRow,
};
use analog_sqed::fit::{fit_exponential, fit_power_law};
use analog_sqed::kernel::{
    closed_form_fg, consistency_1d_summary, fit_kernel, hankel_fg, kernel, ConversionCheck,
    Dimension, FgComparison, SweepFit,
};
use analog_sqed::Branch;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("configuration is invalid:\n{}", .0.render())]
    Invalid(ValidationReport),
    #[error("{scenario} scenario: {source}")]
    Module {
        scenario: &'static str,
        source: analog_sqed::Error,
    },
    #[error("writing artifacts: {0}")]
    Io(#[from] std::io::Error),
}

fn module(scenario: &'static str) -> impl Fn(analog_sqed::Error) -> RunError {
    move |source| RunError::Module { scenario, source }
}

fn dim_name(d: Dimension) -> &'static str {
    match d {
        Dimension::One => "1d",
        Dimension::Two => "2d",
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DispersionSummary {
    pub mass_ratio: f64,
    pub energy_scale: f64,
    pub gapless_energy_scale: f64,
    pub rest_energy: f64,
    pub healing_length: f64,
    pub max_symplectic_residual: f64,
    pub max_closed_form_deviation: f64,
}

pub fn run_dispersion(cfg: &ScenarioConfig, w: &mut ArtifactWriter) -> Result<DispersionSummary, RunError> {
    let err = module("dispersion");
    let spec = &cfg.condensate;
    let (mcs, mc2) = (spec.momentum_scale(), spec.energy_scale());
    let rows = cfg
        .grids
        .momenta()
        .par_iter()
        .map(|&ps| {
            let p = ps * mcs;
            let (e0, em) = dispersion(spec, p)?;
            let amp = amplitudes(spec, p, Branch::Massive)?;
            let sol = symplectic_diagonalize(&build_hamiltonian_block(spec, p)?)?;
            let dev = ((sol.energy(Branch::Gapless) - e0).abs() / e0)
                .max((sol.energy(Branch::Massive) - em).abs() / em);
            Ok((ps, e0 / mc2, em / mc2, amp.u, amp.v, kg_deviation(spec, p)?, sol.symplectic_residual(), dev))
        })
        .collect::<analog_sqed::Result<Vec<_>>>()
        .map_err(&err)?;
    w.csv(
        "dispersion.csv",
        &["p", "E0", "EM", "u", "v", "kg_dev"],
        rows.iter().map(|r| [r.0, r.1, r.2, r.3, r.4, r.5].map(fmt_f64).to_vec()),
    )?;
    let (_, rest) = dispersion(spec, 0.0).map_err(&err)?;
    let summary = DispersionSummary {
        mass_ratio: mass_relation(spec).map_err(&err)?,
        energy_scale: mc2,
        gapless_energy_scale: spec.gapless_energy_scale(),
        rest_energy: rest,
        healing_length: spec.healing_length(),
        max_symplectic_residual: rows.iter().fold(0.0, |m, r| r.6.max(m)),
        max_closed_form_deviation: rows.iter().fold(0.0, |m, r| r.7.max(m)),
    };
    w.json("dispersion.json", &summary)?;
    Ok(summary)
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelsSummary {
    pub healing_length: f64,
    pub support_radius_over_xi: f64,
    pub asymmetry: f64,
    pub edge_ratio: f64,
    pub quadrature_error: f64,
    /// `(bandwidth / m c_s, locality error)`.
    pub locality: Vec<(f64, f64)>,
}

pub fn run_kernels(cfg: &ScenarioConfig, w: &mut ArtifactWriter) -> Result<KernelsSummary, RunError> {
    let err = module("kernels");
    let spec = &cfg.condensate;
    let xi = spec.healing_length();
    let grid = KernelGrid::for_spec(spec).map_err(&err)?;
    let k = nonlocal_kernels(spec, &grid).map_err(&err)?;
    w.csv(
        "field_kernels.csv",
        &["x", "k_pi", "k_phi"],
        (0..k.x.len()).map(|i| vec![fmt_f64(k.x[i] / xi), fmt_f64(k.k_pi[i]), fmt_f64(k.k_phi[i])]),
    )?;
    let analog = AnalogParams::from_spec(spec).map_err(&err)?;
    let mcs = spec.momentum_scale();
    let locality: Vec<(f64, f64)> = cfg
        .grids
        .locality_bandwidths
        .par_iter()
        .map(|&b| (b, locality_error(&k, &analog, b * mcs)))
        .collect();

    let jobs: Vec<(Dimension, f64)> = [Dimension::One, Dimension::Two]
        .into_iter()
        .flat_map(|d| cfg.grids.alphas.iter().map(move |&a| (d, a)))
        .collect();
    let tables = jobs
        .par_iter()
        .map(|&(d, alpha)| {
            // Eight decay lengths of the naive scale alpha / sqrt(2).
            let span = 8.0 * std::f64::consts::SQRT_2 / alpha;
            (0..=80)
                .map(|i| {
                    let s = span * i as f64 / 80.0;
                    Ok(KernelRow { dimension: d, alpha, s, value: kernel(d, alpha, s)? })
                })
                .collect::<analog_sqed::Result<Vec<_>>>()
        })
        .collect::<analog_sqed::Result<Vec<_>>>()
        .map_err(&err)?;
    w.csv(
        "interaction_kernel.csv",
        &crate::table::HEADER,
        tables.iter().flatten().map(|r| {
            vec![dim_name(r.dimension).to_string(), fmt_f64(r.alpha), fmt_f64(r.s), fmt_f64(r.value)]
        }),
    )?;
    let summary = KernelsSummary {
        healing_length: xi,
        support_radius_over_xi: k.support_radius(1e-6) / xi,
        asymmetry: k.asymmetry(),
        edge_ratio: k.edge_ratio(),
        quadrature_error: k.quadrature_error,
        locality,
    };
    w.json("kernels.json", &summary)?;
    Ok(summary)
}

#[derive(Debug, Clone, Serialize)]
pub struct FockSummary {
    pub dimension: usize,
    pub commutator_norm: f64,
    pub off_sector_norm: f64,
    pub max_abs_charge: f64,
    pub max_nc_minus_nd: f64,
    pub max_norm_drift: f64,
    pub max_top_level_pop: f64,
    /// Largest `|n_c - oracle|` over samples with top-level population below 1e-6.
    pub max_oracle_deviation: f64,
    pub scan: Vec<ScanRow>,
}

pub fn run_fock(cfg: &ScenarioConfig, w: &mut ArtifactWriter) -> Result<FockSummary, RunError> {
    let err = module("fock");
    let fock = &cfg.fock;
    let h = build_mode_hamiltonian(fock).map_err(&err)?;
    let q = charge_matrix(fock).map_err(&err)?;
    let obs = evolve(fock, &FockState::vacuum(fock).map_err(&err)?).map_err(&err)?;
    let (ws, ls) = (fock.mode_frequencies(), fock.pair_couplings());
    let oracle: Vec<f64> = obs
        .time
        .iter()
        .map(|&t| ws.iter().zip(&ls).map(|(w, l)| squeezing_oracle(*w, *l, t)).sum())
        .collect();
    w.csv(
        "fock_trajectory.csv",
        &["t", "charge", "n_c", "n_d", "norm", "top_level_pop", "oracle_n_c"],
        (0..obs.time.len()).map(|i| {
            [obs.time[i], obs.charge[i], obs.n_c[i], obs.n_d[i], obs.norm[i], obs.top_level_pop[i], oracle[i]]
                .map(fmt_f64)
                .to_vec()
        }),
    )?;
    let e1 = fock.mode_energies[0];
    let lambdas: Vec<f64> = cfg.grids.scan_lambdas.iter().map(|l| l * e1).collect();
    let scan = vacuum_instability_scan(fock, &lambdas).map_err(&err)?;
    w.csv(
        "fock_scan.csv",
        &[
            "lambda",
            "frequency",
            "peak_n_c",
            "mean_n_c",
            "unstable",
            "max_top_level_pop",
            "truncation_warning",
            "monotone_until_truncation",
        ],
        scan.iter().map(|r| {
            vec![
                fmt_f64(r.lambda),
                fmt_f64(r.frequency),
                fmt_f64(r.peak_n_c),
                fmt_f64(r.mean_n_c),
                r.unstable.to_string(),
                fmt_f64(r.max_top_level_pop),
                r.truncation_warning.to_string(),
                r.monotone_until_truncation.to_string(),
            ]
        }),
    )?;
    let n = obs.time.len();
    let max_over = |f: &dyn Fn(usize) -> f64| (0..n).map(f).fold(0.0f64, f64::max);
    let summary = FockSummary {
        dimension: q.len(),
        commutator_norm: charge_commutator(&h, &q),
        off_sector_norm: off_sector_norm(&h, &q),
        max_abs_charge: max_over(&|i| obs.charge[i].abs()),
        max_nc_minus_nd: max_over(&|i| (obs.n_c[i] - obs.n_d[i]).abs()),
        max_norm_drift: max_over(&|i| (obs.norm[i] - 1.0).abs()),
        max_top_level_pop: obs.max_top_level_pop(),
        max_oracle_deviation: max_over(&|i| {
            if obs.top_level_pop[i] < 1e-6 {
                (obs.n_c[i] - oracle[i]).abs()
            } else {
                0.0
            }
        }),
        scan,
    };
    w.json("fock.json", &summary)?;
    Ok(summary)
}

#[derive(Debug, Clone, Serialize)]
pub struct CalibrationSummary {
    /// 2D kernel coefficients `(a, b)` at the ancilla's alpha.
    pub kernel_fit: (f64, f64),
    pub rabi_window: Option<RabiWindow>,
    pub plan: CouplingPlan,
}

pub fn run_calibrate(cfg: &ScenarioConfig, w: &mut ArtifactWriter) -> Result<CalibrationSummary, RunError> {
    let err = module("calibrate");
    let fit = fit_kernel(Dimension::Two, cfg.ancilla.alpha).map_err(&err)?;
    let ab = (fit.fit.a, fit.fit.b);
    let eps = mass_relation(&cfg.condensate).map_err(&err)?;
    let summary = CalibrationSummary {
        kernel_fit: ab,
        rabi_window: rabi_window(&cfg.condensate, eps).ok(),
        plan: coupling_plan(&cfg.condensate, &cfg.ancilla, ab, &cfg.gauge).map_err(&err)?,
    };
    w.json("coupling_plan.json", &summary)?;
    Ok(summary)
}

#[derive(Debug, Clone, Serialize)]
pub struct LawSummary {
    pub prefactor: f64,
    pub exponent: f64,
    pub r_squared: f64,
    pub exponent_half_width: f64,
    pub log_prefactor_half_width: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DimensionFit {
    pub dimension: Dimension,
    pub a: LawSummary,
    pub b: LawSummary,
    /// Amplitude prefactor including the explicit `4 pi` of the 2D integral.
    pub a_prefactor_with_4pi: f64,
    /// `(min, max)` of the exponents over the jitter refits.
    pub jitter_a_exponent: (f64, f64),
    pub jitter_b_exponent: (f64, f64),
}

#[derive(Debug, Clone, Serialize)]
pub struct FitSummary {
    pub fits: Vec<DimensionFit>,
    pub conversion_1d: ConversionCheck,
    pub fg: Vec<FgComparison>,
    pub table: Option<TableFit>,
}

fn law(l: &analog_sqed::fit::PowerLawFit) -> LawSummary {
    LawSummary {
        prefactor: l.prefactor,
        exponent: l.exponent,
        r_squared: l.r_squared,
        exponent_half_width: l.exponent_half_width,
        log_prefactor_half_width: l.log_prefactor_half_width,
    }
}

/// Refits every kernel sample under multiplicative noise `1 + jitter u`, `u` uniform in
/// `[-1, 1]`, and returns the exponent ranges of the two laws.
fn jitter_ranges(sweep: &SweepFit, jitter: f64, trials: usize, rng: &mut ChaCha8Rng) -> analog_sqed::Result<((f64, f64), (f64, f64))> {
    let mut qa = (f64::INFINITY, f64::NEG_INFINITY);
    let mut qb = qa;
    for _ in 0..trials {
        let mut amps = Vec::new();
        let mut decays = Vec::new();
        for f in &sweep.fits {
            let noisy: Vec<f64> = f
                .sample
                .values
                .iter()
                .map(|v| v * (1.0 + jitter * rng.random_range(-1.0..=1.0)))
                .collect();
            let e = fit_exponential(&f.sample.s, &noisy)?;
            amps.push((f.alpha, e.a));
            decays.push((f.alpha, e.b));
        }
        let (a, b) = (fit_power_law(&amps)?.exponent, fit_power_law(&decays)?.exponent);
        qa = (qa.0.min(a), qa.1.max(a));
        qb = (qb.0.min(b), qb.1.max(b));
    }
    Ok((qa, qb))
}

pub fn run_fit(
    cfg: &ScenarioConfig,
    table: Option<&[KernelRow]>,
    w: &mut ArtifactWriter,
) -> Result<(FitSummary, SweepFit, SweepFit), RunError> {
    let err = module("fit");
    let (one, two) = acceptance::sweeps(&cfg.grids.alphas).map_err(&err)?;
    w.csv(
        "fit_table.csv",
        &["dimension", "alpha", "a", "b", "residual", "prefit_b"],
        [&one, &two].into_iter().flat_map(|s| {
            s.fits.iter().map(|f| {
                vec![
                    dim_name(f.dimension).to_string(),
                    fmt_f64(f.alpha),
                    fmt_f64(f.fit.a),
                    fmt_f64(f.fit.b),
                    fmt_f64(f.fit.residual),
                    fmt_f64(f.prefit_b),
                ]
            })
        }),
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut fits = Vec::new();
    for s in [&one, &two] {
        let (ja, jb) = jitter_ranges(s, cfg.grids.jitter, cfg.grids.jitter_trials, &mut rng).map_err(&err)?;
        fits.push(DimensionFit {
            dimension: s.dimension,
            a: law(&s.amplitude_law),
            b: law(&s.decay_law),
            a_prefactor_with_4pi: s.amplitude_prefactor_with_4pi(),
            jitter_a_exponent: ja,
            jitter_b_exponent: jb,
        });
    }

    // F and G with the 2D coefficients at the ancilla's alpha.
    let f2 = fit_kernel(Dimension::Two, cfg.ancilla.alpha).map_err(&err)?;
    let (a, b) = (f2.fit.a, f2.fit.b);
    let m_v = cfg.ancilla.condensate.momentum_scale();
    let fg = cfg
        .grids
        .fg_wavevectors
        .par_iter()
        .map(|&k| closed_form_fg(a, b, m_v, k * m_v))
        .collect::<analog_sqed::Result<Vec<_>>>()
        .map_err(&err)?;
    w.csv(
        "fg.csv",
        &["k", "F_closed", "F_quad", "F_hankel", "G_closed", "G_quad", "G_hankel", "F_ratio", "G_ratio"],
        fg.iter().map(|c| {
            let (fh, gh) = hankel_fg(a, b, m_v, c.k);
            [c.k / m_v, c.f_closed, c.f_quad, fh, c.g_closed, c.g_quad, gh, c.f_ratio, c.g_ratio]
                .map(fmt_f64)
                .to_vec()
        }),
    )?;
    let summary = FitSummary {
        fits,
        conversion_1d: consistency_1d_summary(one.amplitude_law.prefactor, one.decay_law.prefactor),
        fg,
        table: table.map(fit_table).transpose().map_err(&err)?,
    };
    w.json("fit_summary.json", &summary)?;
    Ok((summary, one, two))
}

#[derive(Debug, Clone, Serialize)]
pub struct FullReport {
    pub config: ScenarioConfig,
    pub validation: ValidationReport,
    pub dispersion: DispersionSummary,
    pub kernels: KernelsSummary,
    pub fock: FockSummary,
    pub calibration: CalibrationSummary,
    pub fit: FitSummary,
    /// Criteria 1 to 9; runtime limits and rerun determinism are checked outside.
    pub acceptance: Vec<Criterion>,
}

pub fn run_full_report(cfg: &ScenarioConfig, w: &mut ArtifactWriter) -> Result<FullReport, RunError> {
    let validation = validate(cfg);
    let dispersion = run_dispersion(cfg, w)?;
    let kernels = run_kernels(cfg, w)?;
    let fock = run_fock(cfg, w)?;
    let calibration = run_calibrate(cfg, w)?;
    let (fit, one, two) = run_fit(cfg, None, w)?;
    let err = module("full-report");
    let at_01 = fit_kernel(Dimension::Two, 0.1).map_err(&err)?;
    let mut acceptance = vec![
        acceptance::symplectic_suite(cfg.seed).map_err(&err)?,
        acceptance::mass_identity(cfg.seed).map_err(&err)?,
        acceptance::klein_gordon_regime().map_err(&err)?,
    ];
    if cfg.grids.alphas == acceptance::ACCEPTANCE_ALPHAS {
        acceptance.push(acceptance::fits_1d(&one));
        acceptance.push(acceptance::fits_2d(&two));
        acceptance.push(acceptance::unit_conversion(&one));
    } else {
        let (one, two) = acceptance::sweeps(&acceptance::ACCEPTANCE_ALPHAS).map_err(&err)?;
        acceptance.push(acceptance::fits_1d(&one));
        acceptance.push(acceptance::fits_2d(&two));
        acceptance.push(acceptance::unit_conversion(&one));
    }
    acceptance.push(acceptance::fg_verification(cfg.seed).map_err(&err)?);
    acceptance.push(acceptance::charge_dynamics().map_err(&err)?);
    acceptance.push(acceptance::calibration_round_trips((at_01.fit.a, at_01.fit.b)).map_err(&err)?);
    // The output location is left out so that reruns into other directories hash alike.
    let mut echoed = cfg.clone();
    echoed.output.directory = ".".into();
    let report = FullReport {
        config: echoed,
        validation,
        dispersion,
        kernels,
        fock,
        calibration,
        fit,
        acceptance,
    };
    w.json("report.json", &report)?;
    Ok(report)
}

/// Validates, runs one scenario into `out` and writes the manifest.
pub fn run(cfg: &ScenarioConfig, kind: ScenarioKind, out: &Path, table: Option<&[KernelRow]>) -> Result<Manifest, RunError> {
    let report = validate(cfg);
    if !report.pass {
        return Err(RunError::Invalid(report));
    }
    let mut w = ArtifactWriter::new(out)?;
    match kind {
        ScenarioKind::Dispersion => {
            run_dispersion(cfg, &mut w)?;
        }
        ScenarioKind::Kernels => {
            run_kernels(cfg, &mut w)?;
        }
        ScenarioKind::Fock => {
            run_fock(cfg, &mut w)?;
        }
        ScenarioKind::Calibrate => {
            run_calibrate(cfg, &mut w)?;
        }
        ScenarioKind::Fit => {
            run_fit(cfg, table, &mut w)?;
        }
        ScenarioKind::FullReport => {
            run_full_report(cfg, &mut w)?;
        }
    }
    Ok(w.finish()?)
}

//! Measurements behind the acceptance criteria, shared by `full-report` and the
//! `acceptance` test target. Timing and the rerun-determinism criterion are measured
//! by the caller.

use analog_sqed::analog::{kg_deviation, mass_relation, rabi_for_mass_ratio};
use analog_sqed::bogoliubov::{build_hamiltonian_block, dispersion, symplectic_diagonalize};
use analog_sqed::calibrate::{
    electric_linear, electric_potential_from_linear, electric_potential_from_quadratic,
    electric_quadratic, rabi_window, vector_calibration, AncillaSpec, GaugeTarget,
};
use analog_sqed::charge::{
    build_mode_hamiltonian, charge_commutator, charge_matrix, evolve, squeezing_oracle,
    FockConfig, FockState,
};
use analog_sqed::kernel::{
    alpha_sweep, hankel_fg, quadrature_fg, Dimension, SweepFit, ALPHA_GRID,
};
use analog_sqed::{Branch, CondensateSpec, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Criterion {
    pub id: u8,
    pub title: &'static str,
    pub requirement: &'static str,
    pub measured: BTreeMap<&'static str, f64>,
    pub pass: bool,
}

impl Criterion {
    fn new(id: u8, title: &'static str, requirement: &'static str) -> Self {
        Criterion {
            id,
            title,
            requirement,
            measured: BTreeMap::new(),
            pass: true,
        }
    }

    fn record(&mut self, key: &'static str, value: f64) -> f64 {
        self.measured.insert(key, value);
        value
    }

    fn require(&mut self, ok: bool) {
        self.pass &= ok;
    }

    pub fn line(&self) -> String {
        let values: Vec<String> = self
            .measured
            .iter()
            .map(|(k, v)| format!("{k}={v:.6e}"))
            .collect();
        format!(
            "{} criterion {:>2} {}: {} [{}]",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.requirement,
            values.join(" ")
        )
    }
}

/// Random stable specs: `m, n, U` in `[0.5, 2)`, `U'/U` in `[-0.4, 0.9)`, `M/m` in `[0, 0.9)`.
pub fn random_stable_specs(seed: u64, count: usize) -> Vec<CondensateSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let m = rng.random_range(0.5..2.0);
            let n = rng.random_range(0.5..2.0);
            let u = rng.random_range(0.5..2.0);
            let up = u * rng.random_range(-0.4..0.9);
            let eps = rng.random_range(0.0..0.9);
            CondensateSpec {
                atom_mass: m,
                density: n,
                intra_scattering: u,
                inter_scattering: up,
                rabi: rabi_for_mass_ratio(n * (u - up), eps).expect("eps < 1"),
                dimension: 1,
                system_length: 1000.0,
            }
        })
        .collect()
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (lo.ln() + (hi / lo).ln() * i as f64 / (n - 1) as f64).exp())
        .collect()
}

pub fn symplectic_suite(seed: u64) -> Result<Criterion> {
    let mut c = Criterion::new(
        1,
        "symplectic suite",
        "100 specs x 200 momenta: |TJT^T - J| < 1e-10, closed form within 1e-9 relative",
    );
    let specs = random_stable_specs(seed, 100);
    let worst = specs
        .par_iter()
        .map(|spec| {
            let mut res = 0.0f64;
            let mut dev = 0.0f64;
            for p in log_grid(1e-3, 10.0, 200) {
                let p = p * spec.momentum_scale();
                let sol = symplectic_diagonalize(&build_hamiltonian_block(spec, p)?)?;
                res = res.max(sol.symplectic_residual());
                let (e0, em) = dispersion(spec, p)?;
                dev = dev.max((sol.energy(Branch::Gapless) - e0).abs() / e0);
                dev = dev.max((sol.energy(Branch::Massive) - em).abs() / em);
            }
            Ok((res, dev))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold((0.0f64, 0.0f64), |a, b| (a.0.max(b.0), a.1.max(b.1)));
    let r = c.record("max_symplectic_residual", worst.0);
    let d = c.record("max_relative_energy_deviation", worst.1);
    c.require(r < 1e-10 && d < 1e-9);
    Ok(c)
}

pub fn mass_identity(seed: u64) -> Result<Criterion> {
    let mut c = Criterion::new(2, "mass identity", "E_M(0) = M c_s^2 within 1e-10 relative");
    let mut worst = 0.0f64;
    for spec in random_stable_specs(seed, 100) {
        let (_, gap) = dispersion(&spec, 0.0)?;
        let rest = mass_relation(&spec)? * spec.energy_scale();
        let dev = if rest == 0.0 { gap } else { (gap - rest).abs() / rest };
        worst = worst.max(dev);
    }
    let w = c.record("max_relative_deviation", worst);
    c.require(w < 1e-10);
    Ok(c)
}

pub fn klein_gordon_regime() -> Result<Criterion> {
    let mut c = Criterion::new(
        3,
        "Klein-Gordon regime",
        "eps = 0.1: kg_deviation < 1% for p <= 0.1 mc_s; monotone on [0.1, 10] mc_s",
    );
    let base = CondensateSpec::reference();
    let spec = CondensateSpec {
        rabi: rabi_for_mass_ratio(base.gap_coupling(), 0.1)?,
        ..base
    };
    let mcs = spec.momentum_scale();
    let mut low = 0.0f64;
    for i in 0..=100 {
        low = low.max(kg_deviation(&spec, 0.1 * mcs * i as f64 / 100.0)?);
    }
    let devs = log_grid(0.1, 10.0, 200)
        .into_iter()
        .map(|p| kg_deviation(&spec, p * mcs))
        .collect::<Result<Vec<_>>>()?;
    let drops = devs.windows(2).filter(|w| w[1] < w[0]).count();
    let low = c.record("max_deviation_below_0.1", low);
    c.record("deviation_at_10", devs[devs.len() - 1]);
    c.record("monotonicity_violations", drops as f64);
    c.require(low < 0.01 && drops == 0);
    Ok(c)
}

pub fn sweeps(alphas: &[f64]) -> Result<(SweepFit, SweepFit)> {
    Ok((alpha_sweep(Dimension::One, alphas)?, alpha_sweep(Dimension::Two, alphas)?))
}

fn rel(x: f64, target: f64) -> f64 {
    (x - target).abs() / target.abs()
}

pub fn fits_1d(sweep: &SweepFit) -> Criterion {
    let mut c = Criterion::new(
        4,
        "1D fits",
        "q_a in [-1.4, -1.1], q_b in [0.75, 1.0], C_a within 25% of 0.64, C_b within 25% of 0.56",
    );
    let qa = c.record("q_a", sweep.amplitude_law.exponent);
    let qb = c.record("q_b", sweep.decay_law.exponent);
    let ca = c.record("C_a", sweep.amplitude_law.prefactor);
    let cb = c.record("C_b", sweep.decay_law.prefactor);
    c.require((-1.4..=-1.1).contains(&qa) && (0.75..=1.0).contains(&qb));
    c.require(rel(ca, 0.64) <= 0.25 && rel(cb, 0.56) <= 0.25);
    c
}

pub fn fits_2d(sweep: &SweepFit) -> Criterion {
    let mut c = Criterion::new(
        5,
        "2D fits",
        "q_a within 0.15 of -0.58, q_b within 0.15 of 0.61, C_b within 25% of 0.523",
    );
    let qa = c.record("q_a", sweep.amplitude_law.exponent);
    let qb = c.record("q_b", sweep.decay_law.exponent);
    c.record("C_a", sweep.amplitude_law.prefactor);
    c.record("C_a_with_4pi", sweep.amplitude_prefactor_with_4pi());
    let cb = c.record("C_b", sweep.decay_law.prefactor);
    c.require((qa + 0.58).abs() <= 0.15 && (qb - 0.61).abs() <= 0.15 && rel(cb, 0.523) <= 0.25);
    c
}

pub fn unit_conversion(sweep_1d: &SweepFit) -> Criterion {
    let mut c = Criterion::new(
        6,
        "unit conversion",
        "sqrt(2) C_a in [0.85, 0.95] (0.9 target); sqrt(2) C_b within 5% of 0.8",
    );
    let a = c.record("sqrt2_C_a", SQRT_2 * sweep_1d.amplitude_law.prefactor);
    let b = c.record("sqrt2_C_b", SQRT_2 * sweep_1d.decay_law.prefactor);
    c.record("C_b_deviation", rel(b, 0.8));
    c.require((0.85..=0.95).contains(&a) && rel(b, 0.8) <= 0.05);
    c
}

pub fn fg_verification(seed: u64) -> Result<Criterion> {
    let mut c = Criterion::new(
        7,
        "F/G verification",
        "quadrature = Hankel identities to 1e-8 on 50 triples; G(k = 0) = 0 exactly",
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_f00d);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let a = rng.random_range(0.05..3.0);
        let b = rng.random_range(0.05..1.0);
        let m = rng.random_range(0.3..3.0);
        let k = rng.random_range(0.0..5.0);
        let (fq, gq) = quadrature_fg(a, b, m, k)?;
        let (fh, gh) = hankel_fg(a, b, m, k);
        worst = worst.max(rel(fq, fh));
        if gh != 0.0 {
            worst = worst.max(rel(gq, gh));
        }
    }
    let (_, g0) = quadrature_fg(0.6, 0.13, 1.0, 0.0)?;
    let cmp = analog_sqed::kernel::closed_form_fg(0.6, 0.13, 1.0, 0.1)?;
    let w = c.record("max_relative_error", worst);
    let g0 = c.record("G_at_k0", g0);
    c.record("F_closed_over_quad", cmp.f_ratio);
    c.record("G_closed_over_quad", cmp.g_ratio);
    c.require(w <= 1e-8 && g0 == 0.0);
    Ok(c)
}

fn single_mode(s: f64, q: f64, total: f64) -> FockConfig {
    let mut cfg = FockConfig {
        quadratic_strength: s,
        charge_unit: q,
        total_time: total,
        ..FockConfig::single_mode(1.0, 8)
    };
    cfg.dt = 0.01 / cfg.fastest_scale();
    cfg
}

pub fn charge_dynamics() -> Result<Criterion> {
    let mut c = Criterion::new(
        8,
        "charge dynamics",
        "N_max = 8: [Q, H] = 0 to 1e-12; <Q> = 0 and n_c = n_d to 1e-9; oracle to 1e-6",
    );
    let mut comm = 0.0f64;
    let mut charge = 0.0f64;
    let mut balance = 0.0f64;
    let mut oracle = 0.0f64;
    let mut compared = 0usize;
    // Below threshold with a linear charge term, then above threshold.
    for cfg in [single_mode(-0.5, 0.25, 20.0), single_mode(-1.5, 0.1, 3.0)] {
        let h = build_mode_hamiltonian(&cfg)?;
        comm = comm.max(charge_commutator(&h, &charge_matrix(&cfg)?));
        let obs = evolve(&cfg, &FockState::vacuum(&cfg)?)?;
        let (w, l) = (cfg.mode_frequencies()[0], cfg.pair_couplings()[0]);
        for i in 0..obs.time.len() {
            charge = charge.max(obs.charge[i].abs());
            balance = balance.max((obs.n_c[i] - obs.n_d[i]).abs());
            if obs.top_level_pop[i] < 1e-6 {
                oracle = oracle.max((obs.n_c[i] - squeezing_oracle(w, l, obs.time[i])).abs());
                compared += 1;
            }
        }
    }
    let comm = c.record("commutator_norm", comm);
    let charge = c.record("max_abs_charge", charge);
    let balance = c.record("max_nc_minus_nd", balance);
    let oracle = c.record("max_oracle_deviation", oracle);
    c.record("oracle_samples", compared as f64);
    c.require(comm <= 1e-12 && charge <= 1e-9 && balance <= 1e-9 && oracle <= 1e-6 && compared > 0);
    Ok(c)
}

pub fn calibration_round_trips(fit_2d: (f64, f64)) -> Result<Criterion> {
    let mut c = Criterion::new(
        9,
        "calibration round trips",
        "electric and vector maps invert to 1e-12; eps = 0.1 gives |Omega_M| <~ 0.05 n(U-U')",
    );
    let base = CondensateSpec::reference();
    let spec = CondensateSpec {
        rabi: rabi_for_mass_ratio(base.gap_coupling(), 0.1)?,
        ..base
    };
    let mc2 = spec.energy_scale();
    let mcs = spec.momentum_scale();
    let mut worst_electric = 0.0f64;
    for a0 in [1e-4, 0.01, 0.1, 0.5].map(|x| x * mc2) {
        for sign in [1.0, -1.0] {
            let t = GaugeTarget {
                electric_potential: sign * a0,
                vector_potential: [0.0; 3],
                harmonic_wavevector: 0.0,
            };
            let back = electric_potential_from_linear(electric_linear(&t));
            worst_electric = worst_electric.max(rel(back, t.electric_potential));
            let q = electric_quadratic(&t, &spec)?.omega2;
            worst_electric = worst_electric.max(rel(electric_potential_from_quadratic(q, &spec), a0));
        }
    }
    let ancilla = AncillaSpec {
        condensate: CondensateSpec { dimension: 2, ..base },
        alpha: 0.1,
        detuning: 0.1,
        temperature: 0.0,
    };
    let k = 0.1 * ancilla.condensate.momentum_scale();
    let mut worst_vector = 0.0f64;
    for target in [1e-3, 0.01, -0.01].map(|x| x * mcs) {
        let v = vector_calibration(&ancilla, fit_2d, k, &spec, target)?;
        worst_vector = worst_vector.max(rel(v.omega3 * v.omega3 * v.g * mcs, target));
    }
    let window = rabi_window(&spec, 0.1)?;
    let e = c.record("electric_round_trip", worst_electric);
    let v = c.record("vector_round_trip", worst_vector);
    let ratio = c.record("rabi_upper_over_gap_coupling", window.upper / spec.gap_coupling());
    c.require(e <= 1e-12 && v <= 1e-12 && (ratio - 0.05).abs() <= 1e-12);
    Ok(c)
}

/// Criteria 1 to 9 for the given seed and alpha grid.
pub fn evaluate(seed: u64, alphas: &[f64]) -> Result<Vec<Criterion>> {
    let (one, two) = sweeps(alphas)?;
    let at_01 = two
        .fits
        .iter()
        .find(|f| f.alpha == 0.1)
        .map(|f| (f.fit.a, f.fit.b))
        .unwrap_or((two.amplitude_law.eval(0.1), two.decay_law.eval(0.1)));
    Ok(vec![
        symplectic_suite(seed)?,
        mass_identity(seed)?,
        klein_gordon_regime()?,
        fits_1d(&one),
        fits_2d(&two),
        unit_conversion(&one),
        fg_verification(seed)?,
        charge_dynamics()?,
        calibration_round_trips(at_01)?,
    ])
}

/// The grid the criteria are stated on.
pub const ACCEPTANCE_ALPHAS: [f64; 5] = ALPHA_GRID;

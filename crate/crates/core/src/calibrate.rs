//! Laser couplings that emulate a prescribed external gauge potential, and the regime
//! checks that keep the emulation inside the relativistic, U(1)-preserving window.
//!
//! Metric signature is `(+, -, -, -)`: `e^2 A_mu A^mu = (e A^0)^2 - c_s^2 |e A|^2`.
//! All ratios use the sound speed `c_s` as the light speed of the analog.

use crate::analog::mass_relation;
use crate::bogoliubov::CondensateSpec;
use crate::kernel::quadrature_fg;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeTarget {
    /// `e A^0` (energy).
    pub electric_potential: f64,
    /// `e A^i` (momentum).
    pub vector_potential: [f64; 3],
    /// Wavevector of the harmonic profile of the vector coupling.
    pub harmonic_wavevector: f64,
}

impl GaugeTarget {
    pub fn vector_norm_sq(&self) -> f64 {
        self.vector_potential.iter().map(|a| a * a).sum()
    }

    pub fn validate(&self, spec: &CondensateSpec) -> Result<()> {
        let finite = self.electric_potential.is_finite()
            && self.harmonic_wavevector.is_finite()
            && self.vector_potential.iter().all(|a| a.is_finite());
        if !finite {
            return Err(Error::InvalidSpec("gauge target has non-finite entries".into()));
        }
        if self.electric_potential.abs() >= spec.energy_scale() {
            return Err(Error::InvalidSpec(format!(
                "|e A0| = {} must stay below the cutoff m c_s^2 = {}",
                self.electric_potential.abs(),
                spec.energy_scale()
            )));
        }
        if self.harmonic_wavevector < 0.0 {
            return Err(Error::InvalidSpec("harmonic_wavevector must be >= 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AncillaSpec {
    /// Virtual-system condensate; supplies `m_V c_sV` and the energy scale.
    pub condensate: CondensateSpec,
    /// `M_V / m_V`; used for the kernel and the rest energy `alpha m_V c_sV^2`.
    pub alpha: f64,
    /// Detuning `delta` (energy). Enters only through the kernel normalization.
    pub detuning: f64,
    /// `k_B T` of the virtual system (energy).
    pub temperature: f64,
}

impl AncillaSpec {
    pub fn validate(&self) -> Result<()> {
        self.condensate.validate()?;
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidSpec(format!("alpha = {} must lie in (0, 1)", self.alpha)));
        }
        if !(self.temperature >= 0.0 && self.detuning.is_finite()) {
            return Err(Error::InvalidSpec("temperature must be >= 0, detuning finite".into()));
        }
        Ok(())
    }

    /// `M_V c_sV^2`.
    pub fn rest_energy(&self) -> f64 {
        self.alpha * self.condensate.energy_scale()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Warn,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// Inequality in words, e.g. `|Omega_2| <~ M c_s^2`.
    pub relation: String,
    pub value: f64,
    pub bound: f64,
    pub ratio: f64,
    pub status: Status,
}

impl Check {
    /// `value <~ bound`: fail above the bound, warn above half of it.
    fn order_bound(name: &str, relation: &str, value: f64, bound: f64) -> Check {
        Self::graded(name, relation, value, bound, 0.5, 1.0)
    }

    /// `value << bound`: warn at `warn * bound`, fail at `fail * bound`.
    fn graded(name: &str, relation: &str, value: f64, bound: f64, warn: f64, fail: f64) -> Check {
        let ratio = value.abs() / bound;
        let status = if !(ratio < fail) {
            Status::Fail
        } else if ratio >= warn {
            Status::Warn
        } else {
            Status::Pass
        };
        Check {
            name: name.into(),
            relation: relation.into(),
            value,
            bound,
            ratio,
            status,
        }
    }
}

/// `Omega_1 = 2 e A^0`.
pub fn electric_linear(target: &GaugeTarget) -> f64 {
    2.0 * target.electric_potential
}

/// Inverse of [`electric_linear`].
pub fn electric_potential_from_linear(omega1: f64) -> f64 {
    0.5 * omega1
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadraticCoupling {
    pub omega2: f64,
    pub check: Check,
}

fn omega2_check(omega2: f64, spec: &CondensateSpec) -> Result<Check> {
    let rest = mass_relation(spec)? * spec.energy_scale();
    Ok(Check::order_bound(
        "raman_omega2",
        "|Omega_2| <~ M c_s^2 (phonon energy scale)",
        omega2,
        rest,
    ))
}

/// `Omega_2 = (e A^0)^2 / (m c_s^2)`.
pub fn electric_quadratic(target: &GaugeTarget, spec: &CondensateSpec) -> Result<QuadraticCoupling> {
    spec.require_stable()?;
    let omega2 = target.electric_potential.powi(2) / spec.energy_scale();
    Ok(QuadraticCoupling {
        omega2,
        check: omega2_check(omega2, spec)?,
    })
}

/// `Omega_2 = e^2 A_mu A^mu / (m c_s^2) = ((e A^0)^2 - c_s^2 |e A|^2) / (m c_s^2)`.
pub fn magnetic_quadratic(target: &GaugeTarget, spec: &CondensateSpec) -> Result<QuadraticCoupling> {
    spec.require_stable()?;
    let c2 = spec.energy_scale() / spec.atom_mass;
    let square = target.electric_potential.powi(2) - c2 * target.vector_norm_sq();
    let omega2 = square / spec.energy_scale();
    // The bound is applied to each contribution, so a cancellation between the electric
    // and magnetic squares cannot hide a large Raman frequency.
    let magnitude = (target.electric_potential.powi(2) + c2 * target.vector_norm_sq()) / spec.energy_scale();
    let mut check = omega2_check(magnitude, spec)?;
    check.value = omega2;
    Ok(QuadraticCoupling { omega2, check })
}

/// Inverse of [`electric_quadratic`] up to the sign of `e A^0`.
pub fn electric_potential_from_quadratic(omega2: f64, spec: &CondensateSpec) -> f64 {
    (omega2 * spec.energy_scale()).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RabiWindow {
    /// `(2 m L^2)^-1`.
    pub lower: f64,
    /// `eps n(U - U') / 2`.
    pub upper: f64,
}

pub fn rabi_window(spec: &CondensateSpec, eps: f64) -> Result<RabiWindow> {
    spec.validate()?;
    let lower = 1.0 / (2.0 * spec.atom_mass * spec.system_length.powi(2));
    let upper = 0.5 * eps * spec.gap_coupling();
    if lower >= upper {
        return Err(Error::EmptyWindow(format!(
            "(2 m L^2)^-1 = {lower:e} is not below eps n(U-U')/2 = {upper:e}"
        )));
    }
    Ok(RabiWindow { lower, upper })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VectorCoupling {
    /// Target `e A^i`.
    pub target: f64,
    /// Signed wavevector; its sign follows the target so that `Omega_3^2 G` has the
    /// target's sign.
    pub wavevector: f64,
    pub f: f64,
    pub g: f64,
    pub omega3: f64,
    /// `Omega_3^2 G m c_sI`, equal to the target.
    pub omega_eff: f64,
    /// `-Omega_3^2 F`, cancels the zeroth-order term.
    pub omega_comp: f64,
    /// `Omega_3^2 |G|` against `M c_sI^2`.
    pub bound_ratio: f64,
}

/// Inverts `e A^i = Omega_3^2 G(m_V c_sV, k) m c_sI` for `Omega_3`.
///
/// `fit = (a, b)` are the 2D kernel coefficients at the ancilla's `alpha`; `F` and `G`
/// come from quadrature of their defining integrals.
pub fn vector_calibration(
    ancilla: &AncillaSpec,
    fit: (f64, f64),
    k: f64,
    spec_i: &CondensateSpec,
    target: f64,
) -> Result<VectorCoupling> {
    ancilla.validate()?;
    spec_i.require_stable()?;
    let m_v = ancilla.condensate.momentum_scale();
    let wavevector = if target < 0.0 { -k.abs() } else { k.abs() };
    let (f, g_abs) = quadrature_fg(fit.0, fit.1, m_v, k.abs())?;
    let g = wavevector.signum() * g_abs;
    let mcs = spec_i.momentum_scale();
    let omega3_sq = if target == 0.0 {
        0.0
    } else if g_abs > 0.0 {
        target.abs() / (g_abs * mcs)
    } else {
        return Err(Error::InvalidSpec("G vanishes at k = 0; need k > 0".into()));
    };
    let rest = mass_relation(spec_i)? * spec_i.energy_scale();
    let bound_ratio = omega3_sq * g_abs / rest;
    if bound_ratio > 1.0 {
        return Err(Error::BoundViolation(format!(
            "Omega_3^2 G = {:e} exceeds M c_sI^2 = {rest:e}",
            omega3_sq * g_abs
        )));
    }
    Ok(VectorCoupling {
        target,
        wavevector,
        f,
        g,
        omega3: omega3_sq.sqrt(),
        omega_eff: omega3_sq * g * mcs,
        omega_comp: -omega3_sq * f,
        bound_ratio,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeReport {
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl RegimeReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }
}

/// Every regime inequality for the interacting system, the ancilla and the target.
pub fn regime_report(spec_i: &CondensateSpec, ancilla: &AncillaSpec, target: &GaugeTarget) -> RegimeReport {
    let mut checks = Vec::new();
    let failed = |name: &str, relation: &str, e: Error| Check {
        name: name.into(),
        relation: format!("{relation}: {e}"),
        value: f64::NAN,
        bound: f64::NAN,
        ratio: f64::NAN,
        status: Status::Fail,
    };
    let eps = match mass_relation(spec_i) {
        Ok(eps) => eps,
        Err(e) => {
            checks.push(failed("mass_ratio", "M << m", e));
            return RegimeReport { checks, pass: false };
        }
    };
    let mcs = spec_i.momentum_scale();
    checks.push(Check::graded(
        "momentum_scale",
        "p_I << m_I c_sI (harmonic wavevector)",
        target.harmonic_wavevector,
        mcs,
        0.1,
        1.0,
    ));
    checks.push(Check::graded("mass_ratio", "M << m", eps, 1.0, 0.1, 1.0));
    let temperature = Check::graded(
        "temperature",
        "k_B T << M_V c_sV^2",
        ancilla.temperature,
        ancilla.rest_energy(),
        0.05,
        0.1,
    );
    checks.push(temperature);
    checks.push(Check::graded(
        "ancilla_alpha",
        "alpha inside the fitted window [0.08, 0.12]",
        ancilla.alpha,
        1.0,
        if (0.08..=0.12).contains(&ancilla.alpha) { f64::INFINITY } else { 0.0 },
        1.0,
    ));
    match rabi_window(spec_i, eps) {
        Ok(w) => {
            let rabi = spec_i.rabi.abs();
            let mut upper = Check::order_bound(
                "rabi_window",
                "(2 m L^2)^-1 < |Omega_M| <~ eps n(U-U')/2",
                rabi,
                w.upper,
            );
            if rabi <= w.lower {
                upper.status = Status::Fail;
            }
            checks.push(upper);
        }
        Err(e) => checks.push(failed("rabi_window", "(2 m L^2)^-1 < eps n(U-U')/2", e)),
    }
    let quadratic = if target.vector_norm_sq() > 0.0 {
        magnetic_quadratic(target, spec_i)
    } else {
        electric_quadratic(target, spec_i)
    };
    match quadratic {
        Ok(q) => checks.push(q.check),
        Err(e) => checks.push(failed("raman_omega2", "|Omega_2| <~ M c_s^2", e)),
    }
    // Omega_3^2 G m c_sI = e A^i, so the bound depends only on the largest component.
    let rest = eps * spec_i.energy_scale();
    let largest = target.vector_potential.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    checks.push(Check::order_bound(
        "vector_rabi",
        "|Omega_3|^2 G <~ M c_sI^2",
        largest / mcs,
        rest,
    ));
    let pass = checks.iter().all(|c| c.status != Status::Fail);
    RegimeReport { checks, pass }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioCheck {
    /// `Omega_2 / Omega_1` from the two maps.
    pub computed: f64,
    /// `e A^0 / (2 m c_s^2)`, implied by the maps.
    pub expected: f64,
    /// `e A^0 / (m c_s^2)`, the tuning condition as usually quoted.
    pub quoted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingPlan {
    pub omega1: f64,
    pub omega2: f64,
    pub ratio: Option<RatioCheck>,
    pub vector: Vec<VectorCoupling>,
    pub checks: Vec<Check>,
    pub pass: bool,
}

/// Full set of Rabi frequencies for a target, with every validity flag.
pub fn coupling_plan(
    spec_i: &CondensateSpec,
    ancilla: &AncillaSpec,
    fit: (f64, f64),
    target: &GaugeTarget,
) -> Result<CouplingPlan> {
    target.validate(spec_i)?;
    let omega1 = electric_linear(target);
    let quadratic = if target.vector_norm_sq() > 0.0 {
        magnetic_quadratic(target, spec_i)?
    } else {
        electric_quadratic(target, spec_i)?
    };
    let ratio = (omega1 != 0.0).then(|| {
        let mc2 = spec_i.energy_scale();
        RatioCheck {
            computed: electric_quadratic(target, spec_i).expect("checked above").omega2 / omega1,
            expected: target.electric_potential / (2.0 * mc2),
            quoted: target.electric_potential / mc2,
        }
    });
    let vector = target
        .vector_potential
        .iter()
        .filter(|a| **a != 0.0)
        .map(|&a| vector_calibration(ancilla, fit, target.harmonic_wavevector, spec_i, a))
        .collect::<Result<Vec<_>>>()?;
    let report = regime_report(spec_i, ancilla, target);
    Ok(CouplingPlan {
        omega1,
        omega2: quadratic.omega2,
        ratio,
        vector,
        pass: report.pass,
        checks: report.checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analog::rabi_for_mass_ratio;

    fn interacting() -> CondensateSpec {
        let base = CondensateSpec::reference();
        CondensateSpec {
            rabi: rabi_for_mass_ratio(base.gap_coupling(), 0.08).unwrap(),
            ..base
        }
    }

    fn ancilla() -> AncillaSpec {
        AncillaSpec {
            condensate: CondensateSpec::reference(),
            alpha: 0.1,
            detuning: 0.1,
            temperature: 1e-4,
        }
    }

    fn target(a0: f64, a: [f64; 3]) -> GaugeTarget {
        GaugeTarget {
            electric_potential: a0,
            vector_potential: a,
            harmonic_wavevector: 0.05,
        }
    }

    #[test]
    fn linear_map() {
        let mc2 = interacting().energy_scale();
        assert_eq!(electric_linear(&target(0.0, [0.0; 3])), 0.0);
        assert!((electric_linear(&target(0.01 * mc2, [0.0; 3])) - 0.02 * mc2).abs() < 1e-15);
        assert_eq!(
            electric_linear(&target(-0.3, [0.0; 3])),
            -electric_linear(&target(0.3, [0.0; 3]))
        );
    }

    #[test]
    fn quadratic_maps() {
        let spec = interacting();
        let mc2 = spec.energy_scale();
        let q = electric_quadratic(&target(0.1 * mc2, [0.0; 3]), &spec).unwrap();
        assert!((q.omega2 - 0.01 * mc2).abs() < 1e-15);
        assert_eq!(electric_quadratic(&target(0.0, [0.0; 3]), &spec).unwrap().omega2, 0.0);
        let mcs = spec.momentum_scale();
        let m = magnetic_quadratic(&target(0.0, [0.1 * mcs, 0.0, 0.0]), &spec).unwrap();
        assert!((m.omega2 + 0.01 * mc2).abs() < 1e-15);
        let e = magnetic_quadratic(&target(0.05, [0.0; 3]), &spec).unwrap();
        assert_eq!(e.omega2, electric_quadratic(&target(0.05, [0.0; 3]), &spec).unwrap().omega2);
    }

    #[test]
    fn window_examples() {
        let spec = CondensateSpec::reference();
        let w = rabi_window(&spec, 0.1).unwrap();
        assert!((w.upper - 0.05 * spec.gap_coupling()).abs() < 1e-16);
        let huge = CondensateSpec { system_length: 1e12, ..spec };
        assert!(rabi_window(&huge, 0.1).unwrap().lower < 1e-20);
        let tiny = CondensateSpec { system_length: 1.0, ..spec };
        assert!(matches!(rabi_window(&tiny, 0.1), Err(Error::EmptyWindow(_))));
    }

    #[test]
    fn vector_round_trip() {
        let spec = interacting();
        let anc = ancilla();
        let fit = (0.61, 0.128);
        let mcs = spec.momentum_scale();
        let k = 0.1 * anc.condensate.momentum_scale();
        let c = vector_calibration(&anc, fit, k, &spec, 0.01 * mcs).unwrap();
        let back = c.omega3 * c.omega3 * c.g * mcs;
        assert!((back - 0.01 * mcs).abs() < 1e-12 * 0.01 * mcs);
        let doubled = vector_calibration(&anc, fit, k, &spec, 0.02 * mcs).unwrap();
        assert!((doubled.omega3 / c.omega3 - 2f64.sqrt()).abs() < 1e-12);
        let zero = vector_calibration(&anc, fit, k, &spec, 0.0).unwrap();
        assert_eq!((zero.omega3, zero.omega_comp), (0.0, 0.0));
        let neg = vector_calibration(&anc, fit, k, &spec, -0.01 * mcs).unwrap();
        assert!((neg.omega_eff + 0.01 * mcs).abs() < 1e-12 * 0.01 * mcs);
        assert!(matches!(
            vector_calibration(&anc, fit, k, &spec, 10.0),
            Err(Error::BoundViolation(_))
        ));
    }

    #[test]
    fn regime_examples() {
        let spec = interacting();
        let t = target(0.01 * spec.energy_scale(), [1e-3, 0.0, 0.0]);
        let report = regime_report(&spec, &ancilla(), &t);
        assert!(report.pass, "{:?}", report.checks);
        assert!(report.checks.iter().all(|c| c.status == Status::Pass), "{:?}", report.checks);
        let hot = AncillaSpec { temperature: ancilla().rest_energy(), ..ancilla() };
        let r = regime_report(&spec, &hot, &t);
        assert_eq!(r.checks.iter().find(|c| c.name == "temperature").unwrap().status, Status::Fail);
        let heavy = CondensateSpec {
            rabi: rabi_for_mass_ratio(spec.gap_coupling(), 0.5).unwrap(),
            ..spec
        };
        let r = regime_report(&heavy, &ancilla(), &t);
        assert_eq!(r.checks.iter().find(|c| c.name == "mass_ratio").unwrap().status, Status::Warn);
    }

    #[test]
    fn plan_ratio() {
        let spec = interacting();
        let plan = coupling_plan(&spec, &ancilla(), (0.61, 0.128), &target(0.02, [0.0; 3])).unwrap();
        let r = plan.ratio.unwrap();
        assert!((r.computed - r.expected).abs() < 1e-15);
        assert!((r.quoted / r.expected - 2.0).abs() < 1e-12);
    }
}

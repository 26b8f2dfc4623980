//! Relativistic reading of the massive branch: effective mass, Klein-Gordon comparison
//! and the position-space kernels of the field and momentum operators.
//!
//! Kernels use the convention `K(x) = (1/2pi) int dp W(p) K^(p) e^(ipx)`, so convolving
//! with `K` multiplies Fourier components by the symbol `K^(p)`. With
//! `pi = (u - v)` and `phi = (u + v)` weights, `K^_pi = E (u - v)^2` and
//! `K^_phi = E (u + v)^2`.

use crate::bogoliubov::{self, Branch, CondensateSpec};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;

/// Window starts rolling off here (units of `m c_s`).
pub const WINDOW_START: f64 = 20.0;
/// Hard momentum cutoff (units of `m c_s`).
pub const CUTOFF: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalogParams {
    pub sound_speed_massless: f64,
    pub sound_speed_massive: f64,
    /// `M / m`.
    pub mass_ratio: f64,
    /// `M c_s^2`.
    pub rest_energy: f64,
    /// `m c_s^2`.
    pub cutoff: f64,
}

impl AnalogParams {
    pub fn from_spec(spec: &CondensateSpec) -> Result<Self> {
        let ratio = mass_relation(spec)?;
        if ratio >= 1.0 {
            return Err(Error::InvalidSpec(format!("M/m = {ratio} must be below 1")));
        }
        let cutoff = spec.energy_scale();
        Ok(AnalogParams {
            sound_speed_massless: spec.gapless_sound_speed(),
            sound_speed_massive: spec.sound_speed(),
            mass_ratio: ratio,
            rest_energy: ratio * cutoff,
            cutoff,
        })
    }

    pub fn warnings(&self) -> Vec<String> {
        if self.mass_ratio > 0.1 {
            vec![format!("M/m = {:.3} exceeds 0.1; relativistic regime is narrow", self.mass_ratio)]
        } else {
            Vec::new()
        }
    }

    pub fn atom_mass(&self) -> f64 {
        self.cutoff / (self.sound_speed_massive * self.sound_speed_massive)
    }
}

/// `M / m` from `M^2/m^2 = -4 Omega (n(U-U') - Omega) / (n(U-U') - 2 Omega)^2`.
pub fn mass_relation(spec: &CondensateSpec) -> Result<f64> {
    spec.validate()?;
    let g = spec.gap_coupling();
    let mc2 = spec.energy_scale();
    let m2 = -4.0 * spec.rabi * (g - spec.rabi) / (mc2 * mc2);
    if spec.rabi > 0.0 || m2 < 0.0 {
        return Err(Error::NegativeMassSquared(m2));
    }
    Ok(m2.sqrt())
}

/// Rabi coupling (negative) that produces the mass ratio `eps` for a given `n(U - U')`.
pub fn rabi_for_mass_ratio(gap_coupling: f64, eps: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&eps) || gap_coupling <= 0.0 {
        return Err(Error::InvalidSpec(format!(
            "need 0 <= eps < 1 and n(U-U') > 0, got eps = {eps}, n(U-U') = {gap_coupling}"
        )));
    }
    Ok(-0.5 * gap_coupling * (1.0 / (1.0 - eps * eps).sqrt() - 1.0))
}

/// `sqrt(M^2 c_s^4 + c_s^2 p^2)` with the rest energy taken as the gap `E_M(0)`, which
/// equals `M c_s^2` identically.
pub fn kg_energy(spec: &CondensateSpec, p: f64) -> Result<f64> {
    mass_relation(spec)?;
    let (_, rest) = bogoliubov::dispersion(spec, 0.0)?;
    let c2 = spec.energy_scale() / spec.atom_mass;
    Ok((rest * rest + c2 * p * p).sqrt())
}

pub fn kg_deviation(spec: &CondensateSpec, p: f64) -> Result<f64> {
    let (_, em) = bogoliubov::dispersion(spec, p)?;
    let kg = kg_energy(spec, p)?;
    Ok((em - kg).abs() / kg)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrefactorCheck {
    /// `(u + v)^2`.
    pub lhs: f64,
    /// `E / m c_s^2`.
    pub rhs: f64,
    /// `|lhs - rhs| / rhs`.
    pub residual: f64,
    /// `(u + v)^2 (u - v)^2`, identically 1.
    pub identity: f64,
}

/// Compares the massive-branch field weight `(u + v)^2` with `E / m c_s^2`.
pub fn prefactor_check(spec: &CondensateSpec, p: f64) -> Result<PrefactorCheck> {
    let amp = bogoliubov::amplitudes(spec, p, Branch::Massive)?;
    let (_, em) = bogoliubov::dispersion(spec, p)?;
    let lhs = (amp.u + amp.v).powi(2);
    let rhs = em / spec.energy_scale();
    let identity = lhs * (amp.u - amp.v).powi(2);
    assert!(
        (identity - 1.0).abs() < 1e-10,
        "(u+v)^2 (u-v)^2 = {identity} at p = {p}"
    );
    Ok(PrefactorCheck {
        lhs,
        rhs,
        residual: (lhs - rhs).abs() / rhs,
        identity,
    })
}

/// Massive-branch symbols `(K^_pi, K^_phi) = (E (u - v)^2, E (u + v)^2)`.
///
/// At `p = 0` the limits `A +/- B` of the branch coefficients are returned.
pub fn kernel_symbols(spec: &CondensateSpec, p: f64) -> Result<(f64, f64)> {
    let (a, b) = bogoliubov::branch_coefficients(spec, p, Branch::Massive);
    if p == 0.0 {
        return Ok((a + b, a - b));
    }
    let amp = bogoliubov::amplitudes(spec, p, Branch::Massive)?;
    let (_, em) = bogoliubov::dispersion(spec, p)?;
    Ok((em * (amp.u - amp.v).powi(2), em * (amp.u + amp.v).powi(2)))
}

/// Smooth window: 1 below `WINDOW_START`, 0 above `CUTOFF` (units of `m c_s`), C-infinity.
pub fn window(p_scaled: f64) -> f64 {
    let t = (p_scaled - WINDOW_START) / (CUTOFF - WINDOW_START);
    if t <= 0.0 {
        return 1.0;
    }
    if t >= 1.0 {
        return 0.0;
    }
    let psi = |t: f64| (-1.0 / t).exp();
    let rise = psi(t) / (psi(t) + psi(1.0 - t));
    1.0 - rise
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelGrid {
    pub spacing: f64,
    /// Points on each side of the origin; the grid is `i * spacing`, `|i| <= half_points`.
    pub half_points: usize,
}

impl KernelGrid {
    /// Spacing `xi / 8`, half extent `10 / (M c_s)` (mass ratio floored at 0.05).
    pub fn for_spec(spec: &CondensateSpec) -> Result<Self> {
        let ratio = mass_relation(spec)?.max(0.05);
        let spacing = spec.healing_length() / 8.0;
        let half_extent = 10.0 / (ratio * spec.momentum_scale());
        Ok(KernelGrid {
            spacing,
            half_points: (half_extent / spacing).ceil() as usize,
        })
    }

    pub fn half_extent(&self) -> f64 {
        self.half_points as f64 * self.spacing
    }

    pub fn positions(&self) -> Vec<f64> {
        let n = self.half_points as i64;
        (-n..=n).map(|i| i as f64 * self.spacing).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldKernel {
    pub spacing: f64,
    pub x: Vec<f64>,
    pub k_pi: Vec<f64>,
    pub k_phi: Vec<f64>,
    /// Largest change between the two trapezoid resolutions.
    pub quadrature_error: f64,
}

impl FieldKernel {
    fn center(&self) -> usize {
        self.x.len() / 2
    }

    /// `max(|K(x) - K(-x)|)` over both kernels.
    pub fn asymmetry(&self) -> f64 {
        let n = self.x.len();
        (0..n)
            .map(|i| {
                let j = n - 1 - i;
                (self.k_pi[i] - self.k_pi[j]).abs().max((self.k_phi[i] - self.k_phi[j]).abs())
            })
            .fold(0.0, f64::max)
    }

    /// Largest `|K|` at the grid edge relative to the peak, over both kernels.
    pub fn edge_ratio(&self) -> f64 {
        let peak = |k: &[f64]| k.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let edge = |k: &[f64]| k[0].abs().max(k[k.len() - 1].abs());
        (edge(&self.k_pi) / peak(&self.k_pi)).max(edge(&self.k_phi) / peak(&self.k_phi))
    }

    /// Smallest `|x|` beyond which both kernels stay below `fraction` of their peaks.
    pub fn support_radius(&self, fraction: f64) -> f64 {
        let c = self.center();
        let radius = |k: &[f64]| {
            let peak = k.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let mut last = 0;
            for (i, v) in k[c..].iter().enumerate() {
                if v.abs() >= fraction * peak {
                    last = i;
                }
            }
            (last + 1) as f64 * self.spacing
        };
        radius(&self.k_pi).max(radius(&self.k_phi))
    }

    /// Symbol at zero momentum, `sum_i K(x_i) dx`.
    pub fn zero_mode(&self, which: KernelKind) -> f64 {
        self.values(which).iter().sum::<f64>() * self.spacing
    }

    pub fn values(&self, which: KernelKind) -> &[f64] {
        match which {
            KernelKind::Momentum => &self.k_pi,
            KernelKind::Field => &self.k_phi,
        }
    }

    /// Discrete convolution `(K f)_i = sum_j dx K(x_i - x_j) f_j` for `f` on the kernel
    /// grid, with `f = 0` outside it. Kernel entries below `1e-14` of the peak are dropped.
    pub fn apply(&self, which: KernelKind, f: &[f64]) -> Vec<f64> {
        assert_eq!(f.len(), self.x.len());
        let k = self.values(which);
        let c = self.center();
        let peak = k.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let reach = k[c..]
            .iter()
            .rposition(|v| v.abs() >= 1e-14 * peak)
            .unwrap_or(0) as i64;
        let n = f.len() as i64;
        (0..n)
            .into_par_iter()
            .map(|i| {
                let mut acc = 0.0;
                for lag in -reach..=reach {
                    let j = i - lag;
                    if j >= 0 && j < n {
                        acc += k[(c as i64 + lag) as usize] * f[j as usize];
                    }
                }
                acc * self.spacing
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    /// Multiplies `pi(x) pi(y)`.
    Momentum,
    /// Multiplies `phi(x) phi(y)`.
    Field,
}

fn trapezoid_kernels(
    symbols: &[(f64, f64)],
    step: f64,
    stride: usize,
    xs: &[f64],
) -> Vec<(f64, f64)> {
    xs.par_iter()
        .map(|&x| {
            let mut s_pi = 0.5 * symbols[0].0;
            let mut s_phi = 0.5 * symbols[0].1;
            let h = step * stride as f64;
            for (k, sym) in symbols.iter().enumerate().step_by(stride).skip(1) {
                let c = (k as f64 * step * x).cos();
                s_pi += sym.0 * c;
                s_phi += sym.1 * c;
            }
            (s_pi * h / std::f64::consts::PI, s_phi * h / std::f64::consts::PI)
        })
        .collect()
}

/// Position-space kernels of the massive branch on a symmetric 1D grid.
///
/// The windowed symbols are smooth and even in `p`, so the trapezoid rule converges
/// spectrally; the result is compared against the rule at twice the step and a
/// [`Error::Quadrature`] is raised if they differ by more than `1e-9` of the peak.
pub fn nonlocal_kernels(spec: &CondensateSpec, grid: &KernelGrid) -> Result<FieldKernel> {
    spec.require_stable()?;
    if spec.dimension != 1 {
        return Err(Error::InvalidSpec("kernels are evaluated on a 1D grid".into()));
    }
    let mcs = spec.momentum_scale();
    let p_max = CUTOFF * mcs;
    let half_extent = grid.half_extent();
    // Coarse rule must already be alias free out to the grid edge plus a margin.
    let coarse_step = std::f64::consts::PI / (half_extent + 40.0 / mcs);
    let coarse = (p_max / coarse_step).ceil() as usize;
    let n = 2 * coarse;
    let step = p_max / n as f64;
    let symbols: Vec<(f64, f64)> = (0..=n)
        .into_par_iter()
        .map(|k| {
            let p = k as f64 * step;
            let w = window(p / mcs);
            if w == 0.0 {
                return Ok((0.0, 0.0));
            }
            let (a, b) = kernel_symbols(spec, p)?;
            Ok((w * a, w * b))
        })
        .collect::<Result<_>>()?;
    let xs: Vec<f64> = (0..=grid.half_points).map(|i| i as f64 * grid.spacing).collect();
    let fine = trapezoid_kernels(&symbols, step, 1, &xs);
    let rough = trapezoid_kernels(&symbols, step, 2, &xs);
    let peak = fine.iter().fold(0.0f64, |m, v| m.max(v.0.abs()).max(v.1.abs()));
    let err = fine
        .iter()
        .zip(&rough)
        .map(|(a, b)| (a.0 - b.0).abs().max((a.1 - b.1).abs()))
        .fold(0.0, f64::max);
    if !(err <= 1e-9 * peak) {
        return Err(Error::Quadrature(format!(
            "kernel trapezoid changed by {:e} of peak under step halving",
            err / peak
        )));
    }
    let m = grid.half_points;
    let mut k_pi = Vec::with_capacity(2 * m + 1);
    let mut k_phi = Vec::with_capacity(2 * m + 1);
    for i in (0..=m).rev().chain(1..=m) {
        k_pi.push(fine[i].0);
        k_phi.push(fine[i].1);
    }
    Ok(FieldKernel {
        spacing: grid.spacing,
        x: grid.positions(),
        k_pi,
        k_phi,
        quadrature_error: err,
    })
}

/// Fourth-order central difference; samples outside the grid are zero.
fn gradient(f: &[f64], dx: f64) -> Vec<f64> {
    let n = f.len() as i64;
    let at = |i: i64| if i >= 0 && i < n { f[i as usize] } else { 0.0 };
    (0..n)
        .map(|i| (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2)) / (12.0 * dx))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadraticEnergies {
    pub nonlocal: f64,
    pub local: f64,
}

impl QuadraticEnergies {
    pub fn relative_difference(&self) -> f64 {
        if self.local == 0.0 && self.nonlocal == 0.0 {
            0.0
        } else {
            (self.nonlocal - self.local).abs() / self.local.abs()
        }
    }
}

/// Energy of the configuration `f` placed in the momentum (`KernelKind::Momentum`) or
/// field (`KernelKind::Field`) slot, under the kernel and under the local form
///
/// `E_loc = 1/2 sum [kappa pi^2 + (c_s^2 (d phi)^2 + M^2 c_s^4 phi^2) / kappa] dx`,
///
/// where `kappa = K^_pi(0)` is the canonical normalization of the pair.
pub fn quadratic_energies(
    kernel: &FieldKernel,
    analog: &AnalogParams,
    which: KernelKind,
    f: &[f64],
) -> QuadraticEnergies {
    let dx = kernel.spacing;
    let kf = kernel.apply(which, f);
    let nonlocal = 0.5 * dx * f.iter().zip(&kf).map(|(a, b)| a * b).sum::<f64>();
    let kappa = kernel.zero_mode(KernelKind::Momentum);
    let local = match which {
        KernelKind::Momentum => 0.5 * dx * kappa * f.iter().map(|v| v * v).sum::<f64>(),
        KernelKind::Field => {
            let c2 = analog.sound_speed_massive.powi(2);
            let m2 = analog.rest_energy.powi(2);
            let df = gradient(f, dx);
            0.5 * dx / kappa
                * f.iter()
                    .zip(&df)
                    .map(|(v, d)| c2 * d * d + m2 * v * v)
                    .sum::<f64>()
        }
    };
    QuadraticEnergies { nonlocal, local }
}

/// Gaussian-modulated cosines `exp(-x^2 / 2w^2) cos(k_j x)` with `k_j = j B / 4`,
/// `j = 1..=4`, `w = min(4 / B, half_extent / 6)`.
pub fn band_limited_family(kernel: &FieldKernel, bandwidth: f64) -> Vec<Vec<f64>> {
    let half_extent = kernel.x[kernel.x.len() - 1];
    let w = (4.0 / bandwidth).min(half_extent / 6.0);
    (1..=4)
        .map(|j| {
            let k = j as f64 * bandwidth / 4.0;
            kernel
                .x
                .iter()
                .map(|&x| (-0.5 * (x / w).powi(2)).exp() * (k * x).cos())
                .collect()
        })
        .collect()
}

/// Largest relative difference between kernel and local energies over the
/// band-limited family of `bandwidth` (absolute momentum units), in both slots.
pub fn locality_error(kernel: &FieldKernel, analog: &AnalogParams, bandwidth: f64) -> f64 {
    band_limited_family(kernel, bandwidth)
        .iter()
        .flat_map(|f| {
            [KernelKind::Momentum, KernelKind::Field]
                .map(|which| quadratic_energies(kernel, analog, which, f).relative_difference())
        })
        .fold(0.0, f64::max)
}

//! Quadratic Bogoliubov problem of the Rabi-coupled two-component condensate.
//!
//! The Nambu vector is `eta = (a_1p, a_2p, a_1,-p^dag, a_2,-p^dag)` and the Hamiltonian is
//! `H_p = 1/2 eta^dag H eta` with `H = [[A, B], [B, A]]`:
//!
//! ```text
//! A = [[eps + nU - Omega, nU' + Omega], [nU' + Omega, eps + nU - Omega]]
//! B = [[nU, nU'], [nU', nU]]
//! ```
//!
//! The exchange of the two species commutes with `H`, so the spectrum splits into a
//! symmetric (gapless) and an antisymmetric (massive) branch.

use crate::{Error, Result};
use nalgebra::{Matrix2, Matrix4, SymmetricEigen};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CondensateSpec {
    pub atom_mass: f64,
    pub density: f64,
    pub intra_scattering: f64,
    pub inter_scattering: f64,
    pub rabi: f64,
    pub dimension: u8,
    pub system_length: f64,
}

impl CondensateSpec {
    /// `m = n = U = 1`, `U' = 0.5`, `Omega = -0.05` in one dimension.
    pub fn reference() -> Self {
        CondensateSpec {
            atom_mass: 1.0,
            density: 1.0,
            intra_scattering: 1.0,
            inter_scattering: 0.5,
            rabi: -0.05,
            dimension: 1,
            system_length: 1000.0,
        }
    }

    /// `n (U - U')`.
    pub fn gap_coupling(&self) -> f64 {
        self.density * (self.intra_scattering - self.inter_scattering)
    }

    /// `n (U + U')`.
    pub fn sum_coupling(&self) -> f64 {
        self.density * (self.intra_scattering + self.inter_scattering)
    }

    /// `m c_s^2 = n (U - U') - 2 Omega`, the energy scale of the massive branch.
    pub fn energy_scale(&self) -> f64 {
        self.gap_coupling() - 2.0 * self.rabi
    }

    /// `m c_s0^2 = n (U + U')`, the energy scale of the gapless branch.
    pub fn gapless_energy_scale(&self) -> f64 {
        self.sum_coupling()
    }

    pub fn sound_speed(&self) -> f64 {
        (self.energy_scale() / self.atom_mass).sqrt()
    }

    pub fn gapless_sound_speed(&self) -> f64 {
        (self.gapless_energy_scale() / self.atom_mass).sqrt()
    }

    /// `m c_s`.
    pub fn momentum_scale(&self) -> f64 {
        self.atom_mass * self.sound_speed()
    }

    /// `xi = 1 / (sqrt(2) m c_s)`.
    pub fn healing_length(&self) -> f64 {
        1.0 / (std::f64::consts::SQRT_2 * self.momentum_scale())
    }

    pub fn kinetic(&self, p: f64) -> f64 {
        p * p / (2.0 * self.atom_mass)
    }

    /// Checks the hard invariants: positive mass, density and length, a known dimension
    /// and a positive squared sound speed.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("atom_mass", self.atom_mass),
            ("density", self.density),
            ("intra_scattering", self.intra_scattering),
            ("inter_scattering", self.inter_scattering),
            ("rabi", self.rabi),
            ("system_length", self.system_length),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::InvalidSpec(format!("{name} is not finite")));
            }
        }
        if self.atom_mass <= 0.0 {
            return Err(Error::InvalidSpec("atom_mass must be positive".into()));
        }
        if self.density <= 0.0 {
            return Err(Error::InvalidSpec("density must be positive".into()));
        }
        if self.system_length <= 0.0 {
            return Err(Error::InvalidSpec("system_length must be positive".into()));
        }
        if !(1..=3).contains(&self.dimension) {
            return Err(Error::InvalidSpec("dimension must be 1, 2 or 3".into()));
        }
        if self.energy_scale() <= 0.0 {
            return Err(Error::InvalidSpec(format!(
                "n(U - U') - 2 rabi = {:e} must be positive",
                self.energy_scale()
            )));
        }
        Ok(())
    }

    /// Validation plus the stability requirements (`rabi <= 0`, gapless branch real).
    pub fn require_stable(&self) -> Result<()> {
        self.validate()?;
        let report = stability_report(self);
        if report.stable {
            Ok(())
        } else {
            Err(Error::Instability(report.violations.join("; ")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// In-phase oscillation of the two species.
    Gapless,
    /// Out-of-phase oscillation; gapped by the Rabi coupling.
    Massive,
}

impl Branch {
    pub const ALL: [Branch; 2] = [Branch::Gapless, Branch::Massive];

    fn index(self) -> usize {
        match self {
            Branch::Gapless => 0,
            Branch::Massive => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianBlock {
    pub momentum: f64,
    pub matrix: Matrix4<f64>,
    /// `A + B`, assembled from the parameters rather than from `matrix`.
    pub sum: Matrix2<f64>,
    /// `A - B`; its entries `eps - Omega` and `Omega` carry no `nU` offset, so the small
    /// kinetic energy keeps full relative precision at low momentum.
    pub difference: Matrix2<f64>,
}

impl HamiltonianBlock {
    pub fn metric() -> Matrix4<f64> {
        Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, 1.0, -1.0, -1.0))
    }

    pub fn hermiticity_residual(&self) -> f64 {
        (self.matrix - self.matrix.transpose()).amax()
    }

    /// `max |(A +- B) - (sum, difference)|`, zero up to rounding for a consistent block.
    pub fn quadrature_residual(&self) -> f64 {
        let a = self.matrix.fixed_view::<2, 2>(0, 0).into_owned();
        let b = self.matrix.fixed_view::<2, 2>(0, 2).into_owned();
        (a + b - self.sum).amax().max((a - b - self.difference).amax())
    }
}

/// Amplitude pair of one branch, species-2 convention (`u > 0`, `v <= 0`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Amplitudes {
    pub u: f64,
    pub v: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BogoliubovSolution {
    pub momentum: f64,
    /// Columns are the `+E` eigenvectors of `HJ` (gapless, massive) followed by their
    /// conjugate partners; `T^-1 H J T = diag(E0, EM, -E0, -EM)` and `T J T^T = J`.
    pub transform: Matrix4<f64>,
    pub energies: [f64; 2],
    pub amplitudes: [Amplitudes; 2],
}

impl BogoliubovSolution {
    pub fn energy(&self, branch: Branch) -> f64 {
        self.energies[branch.index()]
    }

    pub fn amplitude(&self, branch: Branch) -> Amplitudes {
        self.amplitudes[branch.index()]
    }

    /// Largest entry of `|T J T^T - J|`.
    pub fn symplectic_residual(&self) -> f64 {
        let j = HamiltonianBlock::metric();
        (self.transform * j * self.transform.transpose() - j).amax()
    }
}

pub fn build_hamiltonian_block(spec: &CondensateSpec, p: f64) -> Result<HamiltonianBlock> {
    spec.validate()?;
    if p == 0.0 {
        return Err(Error::ZeroMomentum);
    }
    if !p.is_finite() {
        return Err(Error::InvalidSpec("momentum is not finite".into()));
    }
    let n = spec.density;
    let eps = spec.kinetic(p);
    let diag = eps + n * spec.intra_scattering - spec.rabi;
    let normal_inter = n * spec.inter_scattering + spec.rabi;
    let intra = n * spec.intra_scattering;
    let inter = n * spec.inter_scattering;
    #[rustfmt::skip]
    let matrix = Matrix4::new(
        diag,         normal_inter, intra,        inter,
        normal_inter, diag,         inter,        intra,
        intra,        inter,        diag,         normal_inter,
        inter,        intra,        normal_inter, diag,
    );
    let sum = Matrix2::new(
        eps + 2.0 * intra - spec.rabi,
        2.0 * inter + spec.rabi,
        2.0 * inter + spec.rabi,
        eps + 2.0 * intra - spec.rabi,
    );
    let difference = Matrix2::new(eps - spec.rabi, spec.rabi, spec.rabi, eps - spec.rabi);
    Ok(HamiltonianBlock {
        momentum: p,
        matrix,
        sum,
        difference,
    })
}

fn sym_sqrt(m: &Matrix2<f64>, what: &str) -> Result<(Matrix2<f64>, Matrix2<f64>)> {
    let eig = SymmetricEigen::new(*m);
    if eig.eigenvalues.iter().any(|&l| l <= 0.0 || !l.is_finite()) {
        return Err(Error::Instability(format!("{what} is not positive definite")));
    }
    let root = eig.eigenvalues.map(f64::sqrt);
    let q = eig.eigenvectors;
    let s = q * Matrix2::from_diagonal(&root) * q.transpose();
    let inv = q * Matrix2::from_diagonal(&root.map(|r| 1.0 / r)) * q.transpose();
    Ok((s, inv))
}

/// Symplectic diagonalization through the symmetric reduction
/// `S^(1/2) D S^(1/2) = W diag(E^2) W^T`, `S = A + B`, `D = A - B`.
pub fn symplectic_diagonalize(block: &HamiltonianBlock) -> Result<BogoliubovSolution> {
    let s = block.sum;
    let d = block.difference;
    let (s_half, s_inv_half) = sym_sqrt(&s, "A + B")?;
    let d_eig = SymmetricEigen::new(d);
    if d_eig.eigenvalues.iter().any(|&l| l < 0.0) {
        return Err(Error::Instability("A - B has a negative direction".into()));
    }
    let m2 = s_half * d * s_half;
    let m2 = 0.5 * (m2 + m2.transpose());
    let eig = SymmetricEigen::new(m2);
    let (mut l0, mut l1) = (eig.eigenvalues[0], eig.eigenvalues[1]);
    let scale = l0.abs().max(l1.abs());
    // The smaller eigenvalue of the explicit product only has absolute accuracy; take it
    // from det(M2) = det(S) det(D) instead.
    let det = SymmetricEigen::new(s).eigenvalues.product() * d_eig.eigenvalues.product();
    if l0 < l1 {
        l0 = det / l1;
    } else {
        l1 = det / l0;
    }
    if l0.min(l1) < -1e-14 * scale {
        return Err(Error::Instability("HJ has complex eigenvalues".into()));
    }
    if l0.min(l1) <= 0.0 {
        return Err(Error::Instability("zero-energy mode at finite momentum".into()));
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let parity = Matrix2::new(h, h, h, -h);
    // Columns ordered (gapless, massive); the gapless mode is even under exchange.
    let (w, lambda) = if (l0 - l1).abs() <= 1e-12 * scale {
        (parity, [l0, l1])
    } else {
        let c0 = eig.eigenvectors.column(0);
        if c0[0] * c0[1] >= 0.0 {
            (eig.eigenvectors, [l0, l1])
        } else {
            let mut w = Matrix2::zeros();
            w.set_column(0, &eig.eigenvectors.column(1));
            w.set_column(1, &eig.eigenvectors.column(0));
            (w, [l1, l0])
        }
    };
    let energies = [lambda[0].sqrt(), lambda[1].sqrt()];
    let mut x = s_inv_half * w;
    let mut y = s_half * w;
    for j in 0..2 {
        let r = energies[j].sqrt();
        x.column_mut(j).scale_mut(r);
        y.column_mut(j).scale_mut(1.0 / r);
    }
    let mut u = 0.5 * (x + y);
    let mut v = 0.5 * (x - y);
    for j in 0..2 {
        if u[(1, j)] < 0.0 {
            u.column_mut(j).neg_mut();
            v.column_mut(j).neg_mut();
        }
    }
    let mut t = Matrix4::zeros();
    t.fixed_view_mut::<2, 2>(0, 0).copy_from(&u);
    t.fixed_view_mut::<2, 2>(2, 2).copy_from(&u);
    t.fixed_view_mut::<2, 2>(0, 2).copy_from(&(-v));
    t.fixed_view_mut::<2, 2>(2, 0).copy_from(&(-v));
    let sqrt2 = std::f64::consts::SQRT_2;
    let amplitudes = [0, 1].map(|j| Amplitudes {
        u: sqrt2 * u[(1, j)],
        v: sqrt2 * v[(1, j)],
    });
    Ok(BogoliubovSolution {
        momentum: block.momentum,
        transform: t,
        energies,
        amplitudes,
    })
}

/// Closed-form energies `(E0, EM)`:
/// `E0^2 = 2 n(U + U') eps + eps^2`,
/// `EM^2 = Er^2 + 2 m c_s^2 eps + eps^2`, `Er^2 = (n(U - U') - 2 Omega)^2 - (n(U - U'))^2`.
pub fn dispersion(spec: &CondensateSpec, p: f64) -> Result<(f64, f64)> {
    spec.require_stable()?;
    let eps = spec.kinetic(p);
    let e0_sq = 2.0 * spec.sum_coupling() * eps + eps * eps;
    let g = spec.gap_coupling();
    let mc2 = spec.energy_scale();
    // (g - 2 Omega)^2 - g^2 without the cancellation at small Omega.
    let er_sq = -4.0 * spec.rabi * (g - spec.rabi);
    let em_sq = er_sq + 2.0 * mc2 * eps + eps * eps;
    Ok((e0_sq.sqrt(), em_sq.sqrt()))
}

/// `(A_J, B_J)` of the decoupled single-mode problem of a branch.
pub fn branch_coefficients(spec: &CondensateSpec, p: f64, branch: Branch) -> (f64, f64) {
    let eps = spec.kinetic(p);
    match branch {
        Branch::Gapless => (eps + spec.sum_coupling(), spec.sum_coupling()),
        Branch::Massive => (eps + spec.energy_scale(), spec.gap_coupling()),
    }
}

/// `u = sqrt((m c_J^2 + eps) / (2 E) + 1/2)`, `v = -sqrt((m c_J^2 + eps) / (2 E) - 1/2)`.
///
/// For the massive branch the species sign is `(-1)^i`; the returned pair is the
/// species-2 component, for which both signs are as written.
pub fn amplitudes(spec: &CondensateSpec, p: f64, branch: Branch) -> Result<Amplitudes> {
    spec.require_stable()?;
    if p == 0.0 {
        return Err(Error::ZeroMomentum);
    }
    let (e0, em) = dispersion(spec, p)?;
    let e = match branch {
        Branch::Gapless => e0,
        Branch::Massive => em,
    };
    let (a, b) = branch_coefficients(spec, p, branch);
    // v^2 = (A - E) / 2E written without cancellation.
    let v_sq = b * b / (2.0 * e * (a + e));
    let u_sq = (a + e) / (2.0 * e);
    Ok(Amplitudes {
        u: u_sq.sqrt(),
        v: -v_sq.sqrt(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub stable: bool,
    pub massless: bool,
    pub mass_squared_ratio: f64,
    pub violations: Vec<String>,
    pub notes: Vec<String>,
}

pub fn stability_report(spec: &CondensateSpec) -> StabilityReport {
    let mut violations = Vec::new();
    let mut notes = Vec::new();
    if let Err(e) = spec.validate() {
        violations.push(e.to_string());
    }
    if spec.rabi > 0.0 {
        violations.push(format!("rabi = {:e} must be <= 0", spec.rabi));
    }
    let g = spec.gap_coupling();
    let mc2 = spec.energy_scale();
    let m2 = -4.0 * spec.rabi * (g - spec.rabi) / (mc2 * mc2);
    if !(m2 >= 0.0) {
        violations.push(format!(
            "M^2/m^2 = -4 rabi (n(U-U') - rabi) / (n(U-U') - 2 rabi)^2 = {m2:e} is negative"
        ));
    }
    if !(spec.sum_coupling() > 0.0) {
        violations.push(format!(
            "gapless branch: n(U + U') = {:e} must be positive",
            spec.sum_coupling()
        ));
    }
    if !(g > 0.0) {
        violations.push(format!("n(U - U') = {g:e} must be positive"));
    }
    let massless = spec.rabi == 0.0;
    if massless {
        notes.push("rabi = 0: massive branch is gapless (M = 0)".into());
    }
    StabilityReport {
        stable: violations.is_empty(),
        massless,
        mass_squared_ratio: m2,
        violations,
        notes,
    }
}

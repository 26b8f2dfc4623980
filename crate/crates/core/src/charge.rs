//! Charged excitations in a truncated Fock space and their pair creation by a
//! constant external potential.
//!
//! Each slot `k` pairs a `c` quantum at `p` with a `d` quantum at `-p`. Inserting the
//! mode expansion `Phi = (c_p e^{ipx} + d_p^dag e^{-ipx}) / sqrt(2E)` into the
//! electric interaction with constant `A^0` gives, per slot,
//!
//! ```text
//! H_k = w_k (n_c + n_d) + q (n_c - n_d) + l_k (c^dag d^dag + c d)
//! w_k = E_k + s / (2 E_k),   l_k = s / (2 E_k)
//! ```
//!
//! with `q = e A^0` from the linear term (it is `A^0` times the charge) and
//! `s = e^2 A_0 A^0` from the quadratic term (`Phi^dag Phi` contributes both a
//! frequency shift and the pair term). The pair term changes `n_c` and `n_d` together,
//! so `[Q, H] = 0`.
//!
//! From the vacuum, `<n_c>(t) = l^2 / (w^2 - l^2) sin^2(sqrt(w^2 - l^2) t)` for
//! `|l| < |w|`, `l^2 t^2` at `|l| = |w|`, and the `sinh^2` continuation above.

use crate::{Error, Result};
use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub type C64 = Complex<f64>;

/// Largest Hilbert space accepted.
pub const MAX_DIMENSION: usize = 1_000_000;
/// Largest Hilbert space propagated by exact diagonalization.
pub const DENSE_LIMIT: usize = 4096;
/// Top-level population above which a run is flagged as truncation dominated.
pub const TRUNCATION_WARNING: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FockConfig {
    pub mode_count: usize,
    pub occupation_cutoff: usize,
    pub mode_energies: Vec<f64>,
    /// `e A^0`.
    pub charge_unit: f64,
    /// `e^2 A_0 A^0`.
    pub quadratic_strength: f64,
    pub dt: f64,
    pub total_time: f64,
}

impl FockConfig {
    pub fn single_mode(energy: f64, cutoff: usize) -> Self {
        FockConfig {
            mode_count: 1,
            occupation_cutoff: cutoff,
            mode_energies: vec![energy],
            charge_unit: 0.0,
            quadratic_strength: 0.0,
            dt: 0.01 / energy,
            total_time: 10.0 / energy,
        }
    }

    /// `(N_max + 1)^(2K)`, or `None` on overflow.
    pub fn dimension(&self) -> Option<u128> {
        (self.occupation_cutoff as u128 + 1).checked_pow(2 * self.mode_count as u32)
    }

    pub fn validate(&self) -> Result<()> {
        if self.mode_count == 0 {
            return Err(Error::InvalidSpec("mode_count must be at least 1".into()));
        }
        if self.occupation_cutoff < 2 {
            return Err(Error::InvalidSpec("occupation_cutoff must be at least 2".into()));
        }
        if self.mode_energies.len() != self.mode_count {
            return Err(Error::InvalidSpec(format!(
                "{} mode energies for {} modes",
                self.mode_energies.len(),
                self.mode_count
            )));
        }
        if let Some(e) = self.mode_energies.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
            return Err(Error::InvalidSpec(format!("mode energy {e} must be positive")));
        }
        for (name, v) in [
            ("charge_unit", self.charge_unit),
            ("quadratic_strength", self.quadratic_strength),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidSpec(format!("{name} is not finite")));
            }
        }
        if !(self.dt > 0.0 && self.total_time > 0.0 && self.total_time.is_finite()) {
            return Err(Error::InvalidSpec("dt and total_time must be positive".into()));
        }
        match self.dimension() {
            Some(d) if d <= MAX_DIMENSION as u128 => Ok(()),
            d => Err(Error::Dimension {
                dim: d.unwrap_or(u128::MAX),
                limit: MAX_DIMENSION,
            }),
        }
    }

    /// Pair couplings `l_k = s / (2 E_k)`.
    pub fn pair_couplings(&self) -> Vec<f64> {
        self.mode_energies
            .iter()
            .map(|e| self.quadratic_strength / (2.0 * e))
            .collect()
    }

    /// Slot frequencies `w_k = E_k + s / (2 E_k)`.
    pub fn mode_frequencies(&self) -> Vec<f64> {
        self.mode_energies
            .iter()
            .map(|e| e + self.quadratic_strength / (2.0 * e))
            .collect()
    }

    /// Fastest scale entering the step-size requirement `dt <= 0.01 / scale`.
    pub fn fastest_scale(&self) -> f64 {
        let e = self.mode_energies.iter().fold(0.0f64, |m, v| m.max(*v));
        let l = self.pair_couplings().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let w = self.mode_frequencies().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        e.max(l).max(w + self.charge_unit.abs())
    }

    pub fn samples(&self) -> usize {
        (self.total_time / self.dt).round() as usize
    }
}

/// Occupation basis `|n_c1, n_d1, n_c2, n_d2, ...>`, first digit fastest.
#[derive(Debug, Clone, Copy)]
struct Basis {
    radix: usize,
    digits: usize,
    dim: usize,
}

impl Basis {
    fn new(cfg: &FockConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Basis {
            radix: cfg.occupation_cutoff + 1,
            digits: 2 * cfg.mode_count,
            dim: cfg.dimension().expect("validated") as usize,
        })
    }

    fn occupation(&self, index: usize, digit: usize) -> usize {
        (index / self.radix.pow(digit as u32)) % self.radix
    }

    fn stride(&self, digit: usize) -> usize {
        self.radix.pow(digit as u32)
    }

    fn index(&self, occupations: &[usize]) -> usize {
        occupations
            .iter()
            .enumerate()
            .map(|(d, n)| n * self.stride(d))
            .sum()
    }
}

/// Real symmetric matrix in compressed rows.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    pub dim: usize,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseMatrix {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        let range = self.row_start[row]..self.row_start[row + 1];
        self.cols[range.clone()]
            .iter()
            .zip(&self.vals[range])
            .filter(|(c, _)| **c == col)
            .map(|(_, v)| *v)
            .sum()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.row_start[r]..self.row_start[r + 1]).map(move |k| (r, self.cols[k], self.vals[k]))
        })
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.entries() {
            m[(r, c)] += v;
        }
        m
    }

    /// Largest absolute row sum, an upper bound on the spectral radius.
    pub fn row_sum_norm(&self) -> f64 {
        (0..self.dim)
            .map(|r| self.vals[self.row_start[r]..self.row_start[r + 1]].iter().map(|v| v.abs()).sum())
            .fold(0.0, f64::max)
    }

    fn apply(&self, x: &[C64], out: &mut [C64]) {
        out.par_iter_mut().enumerate().for_each(|(r, o)| {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.row_start[r]..self.row_start[r + 1] {
                acc += x[self.cols[k]] * self.vals[k];
            }
            *o = acc;
        });
    }
}

pub fn build_mode_hamiltonian(cfg: &FockConfig) -> Result<SparseMatrix> {
    let basis = Basis::new(cfg)?;
    let w = cfg.mode_frequencies();
    let l = cfg.pair_couplings();
    let q = cfg.charge_unit;
    let nmax = cfg.occupation_cutoff;
    let mut row_start = Vec::with_capacity(basis.dim + 1);
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    for i in 0..basis.dim {
        row_start.push(cols.len());
        let mut diag = 0.0;
        let mut off: Vec<(usize, f64)> = Vec::new();
        for k in 0..cfg.mode_count {
            let nc = basis.occupation(i, 2 * k);
            let nd = basis.occupation(i, 2 * k + 1);
            diag += w[k] * (nc + nd) as f64 + q * (nc as f64 - nd as f64);
            if l[k] == 0.0 {
                continue;
            }
            let pair = basis.stride(2 * k) + basis.stride(2 * k + 1);
            // <nc+1, nd+1| c^dag d^dag |nc, nd> = sqrt((nc+1)(nd+1))
            if nc > 0 && nd > 0 {
                off.push((i - pair, l[k] * ((nc * nd) as f64).sqrt()));
            }
            if nc < nmax && nd < nmax {
                off.push((i + pair, l[k] * (((nc + 1) * (nd + 1)) as f64).sqrt()));
            }
        }
        if diag != 0.0 {
            cols.push(i);
            vals.push(diag);
        }
        for (c, v) in off {
            cols.push(c);
            vals.push(v);
        }
    }
    row_start.push(cols.len());
    Ok(SparseMatrix {
        dim: basis.dim,
        row_start,
        cols,
        vals,
    })
}

/// Diagonal of `Q / e = sum_k (n_ck - n_dk)`.
pub fn charge_matrix(cfg: &FockConfig) -> Result<Vec<f64>> {
    let basis = Basis::new(cfg)?;
    Ok((0..basis.dim)
        .map(|i| {
            (0..cfg.mode_count)
                .map(|k| basis.occupation(i, 2 * k) as f64 - basis.occupation(i, 2 * k + 1) as f64)
                .sum()
        })
        .collect())
}

/// Largest entry of `[Q, H]`; for diagonal `Q` this is `max |(q_i - q_j) H_ij|`.
pub fn charge_commutator(h: &SparseMatrix, q: &[f64]) -> f64 {
    h.entries()
        .map(|(r, c, v)| ((q[r] - q[c]) * v).abs())
        .fold(0.0, f64::max)
}

/// Frobenius norm of `H` between different charge sectors after sorting the basis by
/// charge.
pub fn off_sector_norm(h: &SparseMatrix, q: &[f64]) -> f64 {
    let mut order: Vec<usize> = (0..q.len()).collect();
    order.sort_by(|a, b| q[*a].total_cmp(&q[*b]));
    let mut position = vec![0; q.len()];
    for (p, &i) in order.iter().enumerate() {
        position[i] = p;
    }
    let sector_of = |p: usize| q[order[p]];
    h.entries()
        .filter(|(r, c, _)| sector_of(position[*r]) != sector_of(position[*c]))
        .map(|(_, _, v)| v * v)
        .sum::<f64>()
        .sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    pub amplitudes: Vec<C64>,
}

impl FockState {
    pub fn vacuum(cfg: &FockConfig) -> Result<Self> {
        Self::occupied(cfg, &vec![0; 2 * cfg.mode_count])
    }

    /// Basis state with occupations `(n_c1, n_d1, n_c2, n_d2, ...)`.
    pub fn occupied(cfg: &FockConfig, occupations: &[usize]) -> Result<Self> {
        let basis = Basis::new(cfg)?;
        if occupations.len() != basis.digits || occupations.iter().any(|n| *n >= basis.radix) {
            return Err(Error::InvalidSpec("occupations do not fit the truncated basis".into()));
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); basis.dim];
        amplitudes[basis.index(occupations)] = C64::new(1.0, 0.0);
        Ok(FockState { amplitudes })
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChargeObservables {
    pub time: Vec<f64>,
    /// `<Q> / e`.
    pub charge: Vec<f64>,
    pub n_c: Vec<f64>,
    pub n_d: Vec<f64>,
    pub norm: Vec<f64>,
    /// Largest population of the top Fock level over all slots and species.
    pub top_level_pop: Vec<f64>,
}

impl ChargeObservables {
    pub fn max_top_level_pop(&self) -> f64 {
        self.top_level_pop.iter().fold(0.0f64, |m, v| m.max(*v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Propagator {
    /// Exact propagation in the eigenbasis of `H`.
    Dense,
    /// Fixed-step fourth-order Runge-Kutta without renormalization.
    RungeKutta,
}

fn measure(basis: &Basis, cfg: &FockConfig, psi: &[C64]) -> (f64, f64, f64, f64, f64) {
    let mut nc = 0.0;
    let mut nd = 0.0;
    let mut norm = 0.0;
    let mut top = vec![0.0; basis.digits];
    for (i, a) in psi.iter().enumerate() {
        let p = a.norm_sqr();
        norm += p;
        for d in 0..basis.digits {
            let n = basis.occupation(i, d);
            if d % 2 == 0 {
                nc += p * n as f64;
            } else {
                nd += p * n as f64;
            }
            if n == cfg.occupation_cutoff {
                top[d] += p;
            }
        }
    }
    let top = top.into_iter().fold(0.0, f64::max);
    (nc - nd, nc, nd, norm.sqrt(), top)
}

pub fn evolve(cfg: &FockConfig, initial: &FockState) -> Result<ChargeObservables> {
    let basis = Basis::new(cfg)?;
    let method = if basis.dim <= DENSE_LIMIT {
        Propagator::Dense
    } else {
        Propagator::RungeKutta
    };
    evolve_with(cfg, initial, method)
}

/// Unitary evolution over `[0, T]`, sampling every `dt`.
pub fn evolve_with(
    cfg: &FockConfig,
    initial: &FockState,
    method: Propagator,
) -> Result<ChargeObservables> {
    let basis = Basis::new(cfg)?;
    if initial.amplitudes.len() != basis.dim {
        return Err(Error::InvalidSpec("initial state has the wrong dimension".into()));
    }
    if cfg.dt > 0.01 / cfg.fastest_scale() * (1.0 + 1e-12) {
        return Err(Error::InvalidSpec(format!(
            "dt = {} does not resolve the fastest scale {}",
            cfg.dt,
            cfg.fastest_scale()
        )));
    }
    let h = build_mode_hamiltonian(cfg)?;
    let steps = cfg.samples();
    let mut obs = ChargeObservables {
        time: Vec::with_capacity(steps + 1),
        charge: Vec::with_capacity(steps + 1),
        n_c: Vec::with_capacity(steps + 1),
        n_d: Vec::with_capacity(steps + 1),
        norm: Vec::with_capacity(steps + 1),
        top_level_pop: Vec::with_capacity(steps + 1),
    };
    let mut record = |t: f64, psi: &[C64]| {
        let (q, nc, nd, norm, top) = measure(&basis, cfg, psi);
        obs.time.push(t);
        obs.charge.push(q);
        obs.n_c.push(nc);
        obs.n_d.push(nd);
        obs.norm.push(norm);
        obs.top_level_pop.push(top);
        norm
    };
    match method {
        Propagator::Dense => {
            let eig = SymmetricEigen::new(h.to_dense());
            let v = eig.eigenvectors.map(|x| C64::new(x, 0.0));
            let psi0 = DVector::from_column_slice(&initial.amplitudes);
            let coeff = v.adjoint() * psi0;
            for j in 0..=steps {
                let t = j as f64 * cfg.dt;
                let phased = DVector::from_iterator(
                    basis.dim,
                    coeff
                        .iter()
                        .zip(eig.eigenvalues.iter())
                        .map(|(c, e)| c * C64::from_polar(1.0, -e * t)),
                );
                let psi = &v * phased;
                record(t, psi.as_slice());
            }
        }
        Propagator::RungeKutta => {
            let substeps = ((cfg.dt * h.row_sum_norm() / 0.02).ceil() as usize).max(1);
            let step = cfg.dt / substeps as f64;
            let mut psi = initial.amplitudes.clone();
            let n = psi.len();
            let mut k = vec![vec![C64::new(0.0, 0.0); n]; 4];
            let mut tmp = vec![C64::new(0.0, 0.0); n];
            let minus_i = C64::new(0.0, -1.0);
            let start_norm = initial.norm();
            record(0.0, &psi);
            for j in 1..=steps {
                for _ in 0..substeps {
                    h.apply(&psi, &mut k[0]);
                    for i in 0..n {
                        tmp[i] = psi[i] + k[0][i] * minus_i * (0.5 * step);
                    }
                    h.apply(&tmp, &mut k[1]);
                    for i in 0..n {
                        tmp[i] = psi[i] + k[1][i] * minus_i * (0.5 * step);
                    }
                    h.apply(&tmp, &mut k[2]);
                    for i in 0..n {
                        tmp[i] = psi[i] + k[2][i] * minus_i * step;
                    }
                    h.apply(&tmp, &mut k[3]);
                    for i in 0..n {
                        psi[i] += (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i])
                            * minus_i
                            * (step / 6.0);
                    }
                }
                let norm = record(j as f64 * cfg.dt, &psi);
                let drift = (norm - start_norm).abs();
                if drift > 1e-6 {
                    return Err(Error::StepSize { drift });
                }
            }
        }
    }
    Ok(obs)
}

/// Closed-form `<n_c>(t)` of one slot from the vacuum.
pub fn squeezing_oracle(frequency: f64, coupling: f64, t: f64) -> f64 {
    let d = frequency * frequency - coupling * coupling;
    let l2 = coupling * coupling;
    if d > 0.0 {
        l2 / d * (d.sqrt() * t).sin().powi(2)
    } else if d == 0.0 {
        l2 * t * t
    } else {
        l2 / (-d) * ((-d).sqrt() * t).sinh().powi(2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    /// Pair coupling of the first slot, `|l_1|`.
    pub lambda: f64,
    pub frequency: f64,
    pub peak_n_c: f64,
    pub mean_n_c: f64,
    /// `|l| >= |w|`: pair number grows without bound until truncation.
    pub unstable: bool,
    pub max_top_level_pop: f64,
    pub truncation_warning: bool,
    /// `<n_c>` never decreases before the truncation warning threshold is reached.
    pub monotone_until_truncation: bool,
}

/// Evolves the vacuum for each pair coupling `l` in `lambdas`, realized through
/// `s = -2 E_1 l` so that the first slot has `w_1 = E_1 - l` and `|l_1| = l`.
pub fn vacuum_instability_scan(template: &FockConfig, lambdas: &[f64]) -> Result<Vec<ScanRow>> {
    template.validate()?;
    let e1 = template.mode_energies[0];
    lambdas
        .par_iter()
        .map(|&lambda| {
            let mut cfg = template.clone();
            cfg.quadratic_strength = -2.0 * e1 * lambda;
            cfg.dt = cfg.dt.min(0.01 / cfg.fastest_scale());
            let obs = evolve(&cfg, &FockState::vacuum(&cfg)?)?;
            let w = cfg.mode_frequencies()[0];
            let l = cfg.pair_couplings()[0];
            let peak = obs.n_c.iter().fold(0.0f64, |m, v| m.max(*v));
            let mean = obs.n_c.iter().sum::<f64>() / obs.n_c.len() as f64;
            let mut monotone = true;
            for (i, pair) in obs.n_c.windows(2).enumerate() {
                if obs.top_level_pop[i + 1] > TRUNCATION_WARNING {
                    break;
                }
                if pair[1] < pair[0] {
                    monotone = false;
                    break;
                }
            }
            let top = obs.max_top_level_pop();
            Ok(ScanRow {
                lambda: l.abs(),
                frequency: w,
                peak_n_c: peak,
                mean_n_c: mean,
                unstable: l.abs() >= w.abs(),
                max_top_level_pop: top,
                truncation_warning: top > TRUNCATION_WARNING,
                monotone_until_truncation: monotone,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair_cfg(nmax: usize, s: f64) -> FockConfig {
        FockConfig {
            quadratic_strength: s,
            charge_unit: 0.3,
            ..FockConfig::single_mode(1.0, nmax)
        }
    }

    #[test]
    fn free_hamiltonian_is_diagonal() {
        let h = build_mode_hamiltonian(&pair_cfg(4, 0.0)).unwrap();
        assert!(h.entries().all(|(r, c, _)| r == c));
    }

    #[test]
    fn two_level_pair_structure() {
        // The cutoff floor is 2, so the N_max = 1 block is read off as the
        // occupations <= 1 corner of the cutoff-2 space.
        let cfg = pair_cfg(2, 0.4);
        let h = build_mode_hamiltonian(&cfg).unwrap().to_dense();
        let idx = |nc: usize, nd: usize| nc + 3 * nd;
        let states = [idx(0, 0), idx(1, 0), idx(0, 1), idx(1, 1)];
        for &a in &states {
            for &b in &states {
                let coupled = (a == idx(0, 0) && b == idx(1, 1)) || (a == idx(1, 1) && b == idx(0, 0));
                if a != b && !coupled {
                    assert_eq!(h[(a, b)], 0.0);
                }
            }
        }
        assert!((h[(idx(1, 1), idx(0, 0))] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn charge_eigenvalues() {
        let cfg = pair_cfg(3, 0.2);
        let q = charge_matrix(&cfg).unwrap();
        assert_eq!(q[0], 0.0);
        let state = FockState::occupied(&cfg, &[2, 0]).unwrap();
        let i = state.amplitudes.iter().position(|a| a.re == 1.0).unwrap();
        assert_eq!(q[i], 2.0);
    }

    #[test]
    fn rejects_oversized_space() {
        let cfg = FockConfig {
            mode_count: 4,
            mode_energies: vec![1.0; 4],
            ..FockConfig::single_mode(1.0, 8)
        };
        assert!(matches!(cfg.validate(), Err(Error::Dimension { .. })));
    }

    #[test]
    fn oracle_branches_join() {
        let t = 0.7;
        let below = squeezing_oracle(1.0, 1.0 - 1e-7, t);
        let at = squeezing_oracle(1.0, 1.0, t);
        let above = squeezing_oracle(1.0, 1.0 + 1e-7, t);
        assert!((below - at).abs() < 1e-6 && (above - at).abs() < 1e-6);
    }

    #[test]
    fn dense_and_runge_kutta_agree() {
        let mut cfg = pair_cfg(4, -0.6);
        cfg.total_time = 3.0;
        cfg.dt = 0.01 / cfg.fastest_scale();
        let psi = FockState::vacuum(&cfg).unwrap();
        let a = evolve_with(&cfg, &psi, Propagator::Dense).unwrap();
        let b = evolve_with(&cfg, &psi, Propagator::RungeKutta).unwrap();
        for (x, y) in a.n_c.iter().zip(&b.n_c) {
            assert!((x - y).abs() < 1e-8);
        }
        assert!(b.norm.iter().all(|n| (n - 1.0).abs() < 1e-9));
    }

    #[test]
    fn coarse_step_is_rejected() {
        let mut cfg = pair_cfg(3, 0.2);
        cfg.dt = 1.0;
        let psi = FockState::vacuum(&cfg).unwrap();
        assert!(evolve(&cfg, &psi).is_err());
    }
}

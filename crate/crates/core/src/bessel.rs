//! Bessel functions of the first kind, orders 0 and 1.
//!
//! Power series near the origin, Miller backward recurrence in the transition
//! region and the Hankel asymptotic expansion for large arguments.

use std::f64::consts::PI;

const SERIES_MAX: f64 = 5.0;
const ASYMPTOTIC_MIN: f64 = 25.0;

pub fn j0(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= SERIES_MAX {
        series(ax, 0)
    } else if ax < ASYMPTOTIC_MIN {
        miller(ax).0
    } else {
        asymptotic(ax, 0)
    }
}

pub fn j1(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax <= SERIES_MAX {
        series(ax, 1)
    } else if ax < ASYMPTOTIC_MIN {
        miller(ax).1
    } else {
        asymptotic(ax, 1)
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

fn series(x: f64, order: u32) -> f64 {
    let q = -0.25 * x * x;
    let mut term = if order == 0 { 1.0 } else { 0.5 * x };
    let mut sum = term;
    for k in 1..60 {
        let k = k as f64;
        term *= q / (k * (k + order as f64));
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// Returns (J0, J1) from downward recurrence normalised by J0 + 2 sum J_2k = 1.
fn miller(x: f64) -> (f64, f64) {
    let start = 2 * ((x as usize + 40) / 2);
    let mut next = 0.0;
    let mut cur = 1e-30;
    let mut norm = 0.0;
    let mut j1 = 0.0;
    for k in (1..=start).rev() {
        let prev = 2.0 * k as f64 / x * cur - next;
        next = cur;
        cur = prev;
        if k - 1 == 1 {
            j1 = cur;
        }
        if (k - 1) % 2 == 0 && k - 1 > 0 {
            norm += 2.0 * cur;
        }
        if cur.abs() > 1e250 {
            next *= 1e-250;
            cur *= 1e-250;
            norm *= 1e-250;
            j1 *= 1e-250;
        }
    }
    norm += cur;
    (cur / norm, j1 / norm)
}

fn asymptotic(x: f64, order: u32) -> f64 {
    let mu = 4.0 * (order * order) as f64;
    let chi = x - (0.5 * order as f64 + 0.25) * PI;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..40 {
        let odd = (2 * k - 1) as f64;
        a *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        if a.abs() > last || a.abs() < 1e-18 {
            break;
        }
        last = a.abs();
        // a_k alternates between Q (odd k) and P (even k) with signs (-1)^floor(k/2)
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 1 {
            q += sign * a;
        } else {
            p += sign * a;
        }
    }
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// k-th positive zero of J0 (k >= 1), McMahon estimate refined by Newton.
pub fn j0_zero(k: usize) -> f64 {
    assert!(k >= 1);
    let beta = (k as f64 - 0.25) * PI;
    let b2 = beta * beta;
    let mut z = beta + 1.0 / (8.0 * beta) - 31.0 / (384.0 * beta * b2)
        + 3779.0 / (15360.0 * beta * b2 * b2);
    for _ in 0..20 {
        let step = j0(z) / j1(z);
        z += step;
        if step.abs() < 1e-15 * z {
            break;
        }
    }
    z
}

//! Adaptive Gauss-Kronrod quadrature (10-point Gauss, 21-point Kronrod) with global
//! error control, a semi-infinite variant and a segmented summation for oscillatory
//! tails.

use crate::{Error, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_980_803_690,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-13,
            rel: 1e-11,
            max_intervals: 4000,
        }
    }
}

impl Tolerance {
    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

/// Single 21-point Kronrod panel. Returns (value, error estimate).
pub fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = WGK[10] * fc;
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv = [(0.0, 0.0); 10];
    for (j, x) in XGK.iter().take(10).enumerate() {
        let dx = half * x;
        let (f1, f2) = (f(center - dx), f(center + dx));
        fv[j] = (f1, f2);
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for (j, (f1, f2)) in fv.iter().enumerate() {
        res_asc += WGK[j] * ((f1 - mean).abs() + (f2 - mean).abs());
    }
    let h = half.abs();
    let err = rescale_error((res_k - res_g) * half, res_abs * h, res_asc * h);
    (res_k * half, err)
}

/// Globally adaptive integration of `f` over the finite interval [a, b].
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Integral> {
    if a == b {
        return Ok(Integral { value: 0.0, error: 0.0 });
    }
    let (value, error) = gauss_kronrod(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value, error });
    let (mut total, mut total_err) = (value, error);
    while total_err > tol.target(total) {
        if heap.len() >= tol.max_intervals {
            return Err(Error::Quadrature(format!(
                "error {total_err:e} after {} subintervals on [{a}, {b}]",
                heap.len()
            )));
        }
        let worst = heap.pop().expect("heap never empty");
        let mid = 0.5 * (worst.a + worst.b);
        let (v1, e1) = gauss_kronrod(&f, worst.a, mid);
        let (v2, e2) = gauss_kronrod(&f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Panel { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, error: e2 });
        if !(total.is_finite() && total_err.is_finite()) {
            return Err(Error::Quadrature("non-finite integrand".into()));
        }
    }
    // Recompute from panels to shed accumulated rounding in the running sums.
    let mut value = 0.0;
    let mut error = 0.0;
    for p in heap.iter() {
        value += p.value;
        error += p.error;
    }
    Ok(Integral { value, error })
}

/// Integral of `f` over [a, inf) through the map x = a + t / (1 - t).
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, tol: Tolerance) -> Result<Integral> {
    let g = |t: f64| {
        let s = 1.0 - t;
        let v = f(a + t / s) / (s * s);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate(g, 0.0, 1.0, tol)
}

/// Sum of integrals over consecutive segments `[edges(k), edges(k + 1)]`, k = 0, 1, ...
///
/// Meant for oscillatory integrands whose segment contributions alternate in sign.
/// Partial sums are accelerated by repeated averaging; summation stops once the
/// accelerated estimate is stable to the tolerance.
pub fn integrate_segments<F, E>(f: F, edges: E, tol: Tolerance, max_segments: usize) -> Result<Integral>
where
    F: Fn(f64) -> f64,
    E: Fn(usize) -> f64,
{
    const DEPTH: usize = 12;
    let mut partial: Vec<f64> = Vec::new();
    let mut sum = 0.0;
    let mut err = 0.0;
    let mut history: Vec<f64> = Vec::new();
    for k in 0..max_segments {
        let seg = integrate(&f, edges(k), edges(k + 1), tol)?;
        sum += seg.value;
        err += seg.error;
        partial.push(sum);
        if partial.len() < DEPTH {
            continue;
        }
        let mut level: Vec<f64> = partial[partial.len() - DEPTH..].to_vec();
        while level.len() > 1 {
            level = level.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        }
        let estimate = level[0];
        history.push(estimate);
        let n = history.len();
        if n >= 3 {
            let target = tol.target(estimate);
            let d1 = (history[n - 1] - history[n - 2]).abs();
            let d2 = (history[n - 1] - history[n - 3]).abs();
            if d1 <= target && d2 <= target {
                return Ok(Integral {
                    value: estimate,
                    error: err + d1.max(d2),
                });
            }
        }
    }
    Err(Error::Convergence(format!(
        "oscillatory sum not settled after {max_segments} segments"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_weights_sum_to_two() {
        let s: f64 = 2.0 * WGK[..10].iter().sum::<f64>() + WGK[10];
        assert!((s - 2.0).abs() < 1e-15);
        let g: f64 = 2.0 * WG.iter().sum::<f64>();
        assert!((g - 2.0).abs() < 1e-15);
    }

    #[test]
    fn panel_exact_for_polynomials() {
        for deg in 0..=31 {
            let (v, _) = gauss_kronrod(&|x: f64| x.powi(deg), 0.0, 1.0);
            let exact = 1.0 / (deg as f64 + 1.0);
            assert!((v - exact).abs() < 1e-14, "degree {deg}: {v} vs {exact}");
        }
    }

    #[test]
    fn adaptive_peaked() {
        let r = integrate(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, Tolerance::default()).unwrap();
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((r.value - exact).abs() < 1e-9 * exact);
    }

    #[test]
    fn semi_infinite_exponential() {
        let r = integrate_to_infinity(|x| (-x).exp(), 0.0, Tolerance::default()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_tail() {
        // int_0^inf cos(x) / (1 + x^2) dx = pi / (2 e)
        let edges = |k: usize| if k == 0 { 0.0 } else { (k as f64 - 0.5) * std::f64::consts::PI };
        let r = integrate_segments(|x: f64| x.cos() / (1.0 + x * x), edges, Tolerance::default(), 100_000)
            .unwrap();
        let exact = std::f64::consts::PI / (2.0 * 1f64.exp());
        assert!((r.value - exact).abs() < 1e-10, "{}", r.value - exact);
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let tol = Tolerance { abs: 0.0, rel: 0.0, max_intervals: 10 };
        assert!(matches!(integrate(|x: f64| x.sqrt(), 0.0, 1.0, tol), Err(Error::Quadrature(_))));
    }
}

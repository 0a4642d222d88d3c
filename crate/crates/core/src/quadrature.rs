//! Adaptive Gauss–Kronrod quadrature on finite intervals, plus a panel rule
//! for exponentially decaying integrands on `[a, inf)`.

// Node and weight tables keep the digits as tabulated.
#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
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
    0.123_491_976_262_065_851_077_958_109_831_074,
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

/// Requested accuracy: a result is accepted once the error estimate is below
/// `max(abs, rel * |value|)`.
#[derive(Clone, Copy, Debug)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Tolerance { abs, rel }
    }

    pub const fn relative(rel: f64) -> Self {
        Tolerance { abs: 0.0, rel }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

/// Integral estimate with its error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// One application of the 21-point rule on `[a, b]`.
pub fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Estimate {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[10] * fc;
    let mut gauss = 0.0;
    let mut res_abs = kronrod.abs();
    let mut fv = [(0.0, 0.0); 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let (f1, f2) = (f(center - dx), f(center + dx));
        fv[j] = (f1, f2);
        kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv[j].0 - mean).abs() + (fv[j].1 - mean).abs());
    }
    let value = kronrod * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Estimate { value, error: err }
}

struct Panel {
    a: f64,
    b: f64,
    est: Estimate,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.est.error == other.est.error
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
        self.est.error.total_cmp(&other.est.error)
    }
}

const MAX_SUBDIVISIONS: usize = 4000;

/// Adaptive bisection of the panel with the largest error estimate.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate> {
    integrate_with_breaks(f, &[a, b], tol)
}

/// Like [`integrate`], with the interval pre-split at the sorted `points`
/// (first and last entries are the integration limits).
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(f: F, points: &[f64], tol: Tolerance) -> Result<Estimate> {
    let mut heap = BinaryHeap::new();
    let (mut value, mut error) = (0.0, 0.0);
    for w in points.windows(2) {
        if w[1] > w[0] {
            let est = gauss_kronrod(&f, w[0], w[1]);
            value += est.value;
            error += est.error;
            heap.push(Panel { a: w[0], b: w[1], est });
        }
    }
    let mut splits = 0;
    while !(error <= tol.target(value)) {
        if !value.is_finite() || splits >= MAX_SUBDIVISIONS {
            return Err(Error::Accuracy { estimate: value, error });
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval cannot be split any further in double precision.
            return Err(Error::Accuracy { estimate: value, error });
        }
        let left = gauss_kronrod(&f, worst.a, mid);
        let right = gauss_kronrod(&f, mid, worst.b);
        value += left.value + right.value - worst.est.value;
        error += left.error + right.error - worst.est.error;
        heap.push(Panel { a: worst.a, b: mid, est: left });
        heap.push(Panel { a: mid, b: worst.b, est: right });
        splits += 1;
        // Re-sum occasionally to shed accumulated rounding in the running totals.
        if splits % 64 == 0 {
            value = heap.iter().map(|p| p.est.value).sum();
            error = heap.iter().map(|p| p.est.error).sum();
        }
    }
    value = heap.iter().map(|p| p.est.value).sum();
    error = heap.iter().map(|p| p.est.error).sum();
    if !value.is_finite() {
        return Err(Error::Accuracy { estimate: value, error });
    }
    Ok(Estimate { value, error })
}

/// Panels stop once this many in a row contribute below [`TAIL_RATIO`] of the running total.
pub const TAIL_PANELS: usize = 5;
pub const TAIL_RATIO: f64 = 1e-20;
const MAX_PANELS: usize = 600;

/// Integral over `[a, inf)` of an integrand with exponential decay. Panels of
/// width `h0`, growing by 1.25 each step, are integrated adaptively until
/// [`TAIL_PANELS`] consecutive panels fall below [`TAIL_RATIO`] of the total.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, h0: f64, tol: Tolerance) -> Result<Estimate> {
    let mut total = Estimate { value: 0.0, error: 0.0 };
    let mut lo = a;
    let mut h = h0;
    let mut quiet = 0;
    for _ in 0..MAX_PANELS {
        let panel = integrate(&f, lo, lo + h, Tolerance::new(tol.abs, tol.rel))
            .or_else(|e| match e {
                // Accept a panel whose own error is already negligible against the running total.
                Error::Accuracy { estimate, error } if error <= tol.target(total.value) * 1e-3 => {
                    Ok(Estimate { value: estimate, error })
                }
                other => Err(other),
            })?;
        total.value += panel.value;
        total.error += panel.error;
        // An integrand that underflows to exactly zero everywhere also counts as settled.
        let negligible = panel.value.abs() < TAIL_RATIO * total.value.abs() || (panel.value == 0.0 && total.value == 0.0);
        if negligible {
            quiet += 1;
            if quiet >= TAIL_PANELS {
                return Ok(total);
            }
        } else {
            quiet = 0;
        }
        lo += h;
        h *= 1.25;
    }
    Err(Error::Accuracy { estimate: total.value, error: f64::INFINITY })
}

//! Globally adaptive Gauss–Kronrod (21-point) quadrature.
//!
//! Half-infinite domains `[a, ∞)` are mapped onto `[0, 1)` with
//! `x = a + s · t / (1 - t)`, where `s` is a declared length scale.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Finite(f64, f64),
    /// `[lower, ∞)` with the substitution scale `scale > 0`.
    UpperInfinite {
        lower: f64,
        scale: f64,
    },
}

impl Domain {
    pub fn upper_infinite(lower: f64) -> Self {
        Domain::UpperInfinite { lower, scale: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    /// Absolute error estimate.
    pub error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-10,
            rel_tol: 0.0,
            max_evals: 400_000,
        }
    }
}

impl QuadOptions {
    pub fn absolute(tol: f64) -> Self {
        QuadOptions {
            abs_tol: tol,
            ..Default::default()
        }
    }

    pub fn relative(tol: f64) -> Self {
        QuadOptions {
            abs_tol: 0.0,
            rel_tol: tol,
            ..Default::default()
        }
    }
}

#[allow(clippy::excessive_precision)]
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

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
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

pub(crate) const GK21_EVALS: usize = 21;

/// One 21-point Gauss–Kronrod panel on `[a, b]`: `(value, error estimate)`.
pub(crate) fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut res_k = f_center * WGK[10];
    let mut res_abs = res_k.abs();
    let mut res_g = 0.0;
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    #[allow(clippy::needless_range_loop)]
    for j in 0..5 {
        let jtw = 2 * j + 1;
        let dx = half * XGK[jtw];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_g += WG[j] * (f1 + f2);
        res_k += WGK[jtw] * (f1 + f2);
        res_abs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..5 {
        let jtwm1 = 2 * j;
        let dx = half * XGK[jtwm1];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        res_k += WGK[jtwm1] * (f1 + f2);
        res_abs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let abs_half = half.abs();
    let value = res_k * half;
    res_abs *= abs_half;
    res_asc *= abs_half;
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

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

fn adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<QuadratureResult> {
    let (value, error) = gk21(&f, a, b);
    let mut evaluations = GK21_EVALS;
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value, error });
    let mut settled_value = 0.0;
    let mut settled_error = 0.0;
    loop {
        let (total, total_err) = heap
            .iter()
            .fold((settled_value, settled_error), |(v, e), p| (v + p.value, e + p.error));
        if !total.is_finite() || !total_err.is_finite() {
            return Err(Error::domain("integrand produced a non-finite value"));
        }
        let target = opts.abs_tol.max(opts.rel_tol * total.abs());
        if total_err <= target || heap.is_empty() {
            return Ok(QuadratureResult {
                value: total,
                error_estimate: total_err,
                evaluations,
            });
        }
        if evaluations + 2 * GK21_EVALS > opts.max_evals {
            return Err(Error::NonConvergence {
                evaluations,
                error_estimate: total_err,
            });
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        let width = (worst.b - worst.a).abs();
        if width <= 8.0 * f64::EPSILON * mid.abs().max(f64::MIN_POSITIVE) || mid == worst.a || mid == worst.b {
            // Panel cannot be resolved further in double precision.
            settled_value += worst.value;
            settled_error += worst.error;
            continue;
        }
        let (v1, e1) = gk21(&f, worst.a, mid);
        let (v2, e2) = gk21(&f, mid, worst.b);
        evaluations += 2 * GK21_EVALS;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }
}

/// Integrates `f` over `domain` to the absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, domain: Domain, tol: f64) -> Result<QuadratureResult> {
    integrate_with(f, domain, &QuadOptions::absolute(tol))
}

pub fn integrate_with<F: Fn(f64) -> f64>(f: F, domain: Domain, opts: &QuadOptions) -> Result<QuadratureResult> {
    if !(opts.abs_tol > 0.0 || opts.rel_tol > 0.0) {
        return Err(Error::domain("quadrature tolerance must be positive"));
    }
    match domain {
        Domain::Finite(a, b) => {
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::domain(format!("finite domain with endpoints {a}, {b}")));
            }
            if a == b {
                return Ok(QuadratureResult {
                    value: 0.0,
                    error_estimate: 0.0,
                    evaluations: 1,
                });
            }
            adaptive(f, a, b, opts)
        }
        Domain::UpperInfinite { lower, scale } => {
            if !lower.is_finite() || !(scale > 0.0) {
                return Err(Error::domain(format!(
                    "half-infinite domain needs a finite lower bound and positive scale, got {lower}, {scale}"
                )));
            }
            let mapped = |t: f64| {
                let one_minus = 1.0 - t;
                let x = lower + scale * t / one_minus;
                if !x.is_finite() {
                    return 0.0;
                }
                let fx = f(x);
                if fx == 0.0 {
                    0.0
                } else {
                    fx * scale / (one_minus * one_minus)
                }
            };
            adaptive(mapped, 0.0, 1.0, opts)
        }
    }
}

//! Adaptive Gauss–Kronrod integration.
//!
//! The base rule is the 21-point Kronrod extension of the 10-point Gauss rule with
//! the usual QUADPACK error rescaling. Subintervals are refined globally, largest
//! error first.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

pub const DEFAULT_MAX_EVALS: usize = 1_000_000;

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
    0.123_491_976_262_065_851_077_208_980_162_830,
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

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl QuadResult {
    fn combine(self, other: QuadResult) -> QuadResult {
        QuadResult {
            value: self.value + other.value,
            abs_error_estimate: self.abs_error_estimate + other.abs_error_estimate,
            evaluations: self.evaluations + other.evaluations,
            converged: self.converged && other.converged,
        }
    }
}

/// Integrand behaves like `C · u^{-1-decay_exponent}` as u → ∞.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailSpec {
    pub decay_exponent: f64,
}

/// Below this decay exponent tails are considered too slow to integrate.
pub const SLOW_TAIL_THRESHOLD: f64 = 0.01;

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Segment {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err)
    }
}

/// One 21-point Kronrod panel: (value, error estimate).
pub fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * h;
    let res_abs = res_abs * h.abs();
    let res_asc = res_asc * h.abs();
    let mut err = ((res_k - res_g) * h).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

/// Globally adaptive integration on a finite interval, no variable change.
///
/// Stops when the summed error estimate is below `max(rel_tol·|I|, abs_tol)`.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_evals: usize,
) -> QuadResult {
    if a == b {
        return QuadResult { value: 0.0, abs_error_estimate: 0.0, evaluations: 0, converged: true };
    }
    let (v, e) = gk21(&f, a, b);
    let mut evals = 21;
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value: v, err: e });
    let mut total = v;
    let mut total_err = e;
    let mut converged = false;
    let mut splits = 0usize;
    loop {
        let target = (rel_tol * total.abs()).max(abs_tol);
        if total_err <= target {
            converged = true;
            break;
        }
        if evals + 42 > max_evals || !total.is_finite() {
            break;
        }
        let seg = heap.pop().expect("heap never empty");
        let m = 0.5 * (seg.a + seg.b);
        if m <= seg.a || m >= seg.b {
            // interval can no longer be split; accept its contribution
            heap.push(Segment { err: 0.0, ..seg });
            total_err -= seg.err;
            if heap.iter().all(|s| s.err == 0.0) {
                converged = total_err <= target;
                break;
            }
            continue;
        }
        let (v1, e1) = gk21(&f, seg.a, m);
        let (v2, e2) = gk21(&f, m, seg.b);
        evals += 42;
        total += v1 + v2 - seg.value;
        total_err += e1 + e2 - seg.err;
        heap.push(Segment { a: seg.a, b: m, value: v1, err: e1 });
        heap.push(Segment { a: m, b: seg.b, value: v2, err: e2 });
        splits += 1;
        if splits % 100 == 0 {
            // refresh the running sums to limit cancellation drift
            total = heap.iter().map(|s| s.value).sum();
            total_err = heap.iter().map(|s| s.err).sum();
        }
    }
    total = heap.iter().map(|s| s.value).sum();
    let err: f64 = heap.iter().map(|s| s.err).sum();
    QuadResult {
        value: total,
        abs_error_estimate: err,
        evaluations: evals,
        converged: converged || err <= (rel_tol * total.abs()).max(abs_tol),
    }
}

/// ∫_a^b f with the substitution t = a + (b-a)(3x² - 2x³), which removes
/// inverse-square-root singularities at either endpoint.
///
/// `tol` is relative; use [`integrate_finite_with`] for an absolute floor.
pub fn integrate_finite<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> QuadResult {
    integrate_finite_with(f, a, b, tol, 0.0, DEFAULT_MAX_EVALS)
}

pub fn integrate_finite_with<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_evals: usize,
) -> QuadResult {
    let len = b - a;
    let g = |x: f64| {
        let t = a + len * x * x * (3.0 - 2.0 * x);
        let dt = 6.0 * len * x * (1.0 - x);
        if dt == 0.0 {
            0.0
        } else {
            f(t) * dt
        }
    };
    integrate_adaptive(g, 0.0, 1.0, rel_tol, abs_tol, max_evals)
}

/// ∫_a^∞ f, splitting at a+1 and compactifying the tail.
pub fn integrate_semiinf<F: Fn(f64) -> f64>(f: F, a: f64, tail: TailSpec, tol: f64) -> Result<QuadResult> {
    integrate_semiinf_scaled(f, a, 1.0, tail, tol)
}

/// As [`integrate_semiinf`], with the finite/tail split at `a + scale`.
///
/// The tail map is u = a + scale·y^{-1/δ}, y ∈ (0, 1]; an integrand decaying like
/// u^{-1-δ} becomes bounded and smooth in y. For δ = 1 this is the familiar
/// u = t/(1-t) compactification up to an affine change.
pub fn integrate_semiinf_scaled<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    scale: f64,
    tail: TailSpec,
    tol: f64,
) -> Result<QuadResult> {
    let delta = tail.decay_exponent;
    if !(delta > 0.0) {
        return Err(Error::InvalidInput(format!("decay exponent must be > 0, got {delta}")));
    }
    if delta < SLOW_TAIL_THRESHOLD {
        return Err(Error::SlowTail { decay_exponent: delta });
    }
    let head = integrate_finite_with(&f, a, a + scale, tol, 0.0, DEFAULT_MAX_EVALS / 2);
    let inv = 1.0 / delta;
    let g = |y: f64| {
        if y <= 0.0 {
            return 0.0;
        }
        let p = y.powf(-inv);
        let u = a + scale * p;
        if !u.is_finite() {
            return 0.0;
        }
        let v = f(u) * scale * inv * p / y;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    // the tail target is relative to the whole integral
    let abs_floor = tol * head.value.abs() * 0.5;
    let tail_r = integrate_adaptive(g, 0.0, 1.0, tol, abs_floor, DEFAULT_MAX_EVALS / 2);
    Ok(head.combine(tail_r))
}

/// ∫_a^U f plus a tail bound: the remainder `C·U^{-δ}/δ` with `C = f(U)·U^{1+δ}`
/// is added to the error estimate but not to the value.
pub fn integrate_semiinf_truncated<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    cutoff: f64,
    tail: TailSpec,
    tol: f64,
) -> Result<QuadResult> {
    let delta = tail.decay_exponent;
    if delta < SLOW_TAIL_THRESHOLD {
        return Err(Error::SlowTail { decay_exponent: delta });
    }
    if cutoff <= a {
        return Err(Error::InvalidInput("cutoff must exceed the lower limit".into()));
    }
    // log-spaced pieces keep each panel well resolved
    let mut edges = vec![a];
    let mut x = a + 1.0;
    while x < cutoff {
        edges.push(x);
        x = (x * 10.0).max(a + 10.0);
    }
    edges.push(cutoff);
    let mut acc = QuadResult { value: 0.0, abs_error_estimate: 0.0, evaluations: 0, converged: true };
    for w in edges.windows(2) {
        let r = integrate_finite_with(&f, w[0], w[1], tol, 0.0, DEFAULT_MAX_EVALS / edges.len());
        acc = acc.combine(r);
    }
    let c = f(cutoff) * cutoff.powf(1.0 + delta);
    let remainder = (c * cutoff.powf(-delta) / delta).abs();
    acc.abs_error_estimate += remainder;
    acc.evaluations += 1;
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_sqrt_singularity() {
        let r = integrate_finite(|s| 1.0 / s.sqrt(), 0.0, 1.0, 1e-12);
        assert!(r.converged);
        assert!((r.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn euler_integral_gives_log2() {
        let r = integrate_finite(|s| 1.0 / (1.0 + s), 0.0, 1.0, 1e-13);
        assert!((r.value - 2f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn semi_infinite_examples() {
        let r = integrate_semiinf(|u| (-u).exp(), 0.0, TailSpec { decay_exponent: 1.0 }, 1e-12).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12, "{r:?}");
        // beta integral: Γ(1.5)Γ(2.5)/Γ(4) = π/16
        let r = integrate_semiinf(
            |u: f64| u.sqrt() / (1.0 + u).powi(4),
            0.0,
            TailSpec { decay_exponent: 1.5 },
            1e-12,
        )
        .unwrap();
        assert!((r.value - std::f64::consts::PI / 16.0).abs() < 1e-12, "{r:?}");
    }

    #[test]
    fn slow_tail_rejected() {
        let r = integrate_semiinf(|u| 1.0 / (1.0 + u), 0.0, TailSpec { decay_exponent: 0.005 }, 1e-8);
        assert!(matches!(r, Err(Error::SlowTail { .. })));
    }

    #[test]
    fn slowly_decaying_tail() {
        // ∫_0^∞ (1+u)^{-1.1} du = 10
        let r = integrate_semiinf(|u: f64| (1.0 + u).powf(-1.1), 0.0, TailSpec { decay_exponent: 0.1 }, 1e-10)
            .unwrap();
        assert!((r.value - 10.0).abs() < 1e-8, "{r:?}");
    }

    #[test]
    fn truncated_tail_bound_covers_remainder() {
        let f = |u: f64| u.powf(-1.5);
        let r = integrate_semiinf_truncated(f, 1.0, 1e3, TailSpec { decay_exponent: 0.5 }, 1e-12).unwrap();
        assert!((r.value - 2.0).abs() <= r.abs_error_estimate);
    }
}

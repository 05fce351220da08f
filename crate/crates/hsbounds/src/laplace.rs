//! Numerical checks of Laplace-method expansions.
//!
//! A standard Laplace integral is `L(n) = ∫₀^b θ(t) e^{-nφ(t)} dt` with φ increasing
//! and φ(0⁺) = 0. If `ξ = θ/φ'` expands as `Σ P_i φ^{α_i - 1}` near 0, then
//! `L(n) ~ Σ P_i Γ(α_i) / n^{α_i}`. The expansion coefficients are supplied by the
//! caller; this module evaluates the series, integrates directly, and checks that
//! the remainder decays at the advertised rate.

use crate::error::{Error, Result};
use crate::quad;
use crate::specfun::gamma;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::sync::Arc;

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Factor by which the scaled remainder may grow across an n sweep and still count as bounded.
pub const BOUNDEDNESS_SLACK: f64 = 3.0;

const DIRECT_REL_TOL: f64 = 1e-12;
/// Beyond n·φ = this the integrand is below e^{-800} of its peak.
const PHASE_CUTOFF: f64 = 800.0;
const MONOTONE_SAMPLES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionTerm {
    pub p: f64,
    pub alpha: f64,
}

#[derive(Clone)]
pub struct LaplaceSpec {
    pub theta: RealFn,
    pub phi: RealFn,
    /// Upper limit, possibly `f64::INFINITY`.
    pub b: f64,
    /// Terms of ξ = θ/φ' in powers φ^{α-1}, α strictly increasing.
    pub expansion: Vec<ExpansionTerm>,
    /// Decay exponent of the remainder once the whole expansion is used.
    pub remainder_alpha: f64,
}

impl fmt::Debug for LaplaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LaplaceSpec")
            .field("b", &self.b)
            .field("expansion", &self.expansion)
            .field("remainder_alpha", &self.remainder_alpha)
            .finish_non_exhaustive()
    }
}

impl LaplaceSpec {
    pub fn new(theta: RealFn, phi: RealFn, b: f64) -> Self {
        LaplaceSpec { theta, phi, b, expansion: Vec::new(), remainder_alpha: f64::NAN }
    }

    pub fn with_expansion(mut self, terms: &[(f64, f64)], remainder_alpha: f64) -> Result<Self> {
        let expansion: Vec<ExpansionTerm> = terms.iter().map(|&(p, alpha)| ExpansionTerm { p, alpha }).collect();
        let mut prev = 0.0;
        for t in &expansion {
            if !(t.alpha > prev) {
                return Err(Error::InvalidInput(format!("expansion exponents must be positive and increasing, got {}", t.alpha)));
            }
            prev = t.alpha;
        }
        if !(remainder_alpha > prev) {
            return Err(Error::InvalidInput(format!("remainder exponent {remainder_alpha} must exceed {prev}")));
        }
        self.expansion = expansion;
        self.remainder_alpha = remainder_alpha;
        Ok(self)
    }

    /// Exponent of the first term left out when `order` terms are summed.
    pub fn next_alpha(&self, order: usize) -> f64 {
        self.expansion.get(order).map_or(self.remainder_alpha, |t| t.alpha)
    }

    /// `∫₀^b θ e^{-nφ}` by adaptive quadrature on pieces matched to the decay scale.
    pub fn direct(&self, n: f64) -> Result<quad::QuadResult> {
        if !(n > 0.0) {
            return Err(Error::InvalidInput(format!("n must be positive, got {n}")));
        }
        let phi = &self.phi;
        let theta = &self.theta;
        // first breakpoint where nφ = 1
        let s = {
            let mut hi = if self.b.is_finite() { self.b } else { 1.0 };
            while !self.b.is_finite() && n * phi(hi) < 1.0 {
                hi *= 2.0;
                if hi > 1e300 {
                    return Err(Error::Domain("phase does not grow".into()));
                }
            }
            if n * phi(hi) <= 1.0 {
                hi
            } else {
                let mut lo = 0.0;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if n * phi(mid) < 1.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo <= 1e-15 * hi {
                        break;
                    }
                }
                hi
            }
        };
        let f = |t: f64| {
            let v = theta(t) * (-n * phi(t)).exp();
            if v.is_finite() {
                v
            } else {
                0.0
            }
        };
        let mut acc = quad::integrate_finite_with(&f, 0.0, s, DIRECT_REL_TOL, 0.0, quad::DEFAULT_MAX_EVALS);
        let floor = 1e-3 * DIRECT_REL_TOL * acc.value.abs();
        let mut lo = s;
        while lo < self.b && n * phi(lo) < PHASE_CUTOFF {
            let hi = (2.0 * lo).min(self.b);
            let r = quad::integrate_finite_with(&f, lo, hi, DIRECT_REL_TOL, floor, quad::DEFAULT_MAX_EVALS);
            acc.value += r.value;
            acc.abs_error_estimate += r.abs_error_estimate;
            acc.evaluations += r.evaluations;
            acc.converged &= r.converged;
            lo = hi;
        }
        Ok(acc)
    }
}

/// `Σ_{i<order} P_i Γ(α_i) / n^{α_i}`.
pub fn asymp_value(spec: &LaplaceSpec, n: f64, order: usize) -> Result<f64> {
    if order > spec.expansion.len() {
        return Err(Error::InvalidInput(format!(
            "order {order} exceeds the {} known expansion terms",
            spec.expansion.len()
        )));
    }
    let mut sum = 0.0;
    for t in &spec.expansion[..order] {
        sum += t.p * gamma::gamma(t.alpha)? * n.powf(-t.alpha);
    }
    Ok(sum)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticRow {
    pub n: f64,
    pub direct: f64,
    pub asymptotic: f64,
    pub residual: f64,
    /// |residual| · n^{α_ℓ}
    pub scaled_residual: f64,
    pub quad_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticReport {
    pub order: usize,
    pub next_alpha: f64,
    pub rows: Vec<AsymptoticRow>,
    /// Every scaled residual stays within [`BOUNDEDNESS_SLACK`] times the first one.
    pub bounded: bool,
}

impl AsymptoticReport {
    pub fn scaled_residuals(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.scaled_residual).collect()
    }

    /// Largest ratio of a later scaled residual to the first.
    pub fn growth(&self) -> f64 {
        let first = self.rows.first().map_or(0.0, |r| r.scaled_residual);
        self.rows.iter().map(|r| r.scaled_residual / first).fold(0.0, f64::max)
    }
}

pub fn check_asymptotics(spec: &LaplaceSpec, n_list: &[f64], order: usize) -> Result<AsymptoticReport> {
    check_asymptotics_sum(std::slice::from_ref(spec), n_list, order)
}

/// As [`check_asymptotics`] for the sum of several integrals (e.g. both halves of a
/// split), each truncated after `order` terms. The remainder exponent is the
/// smallest among the parts.
pub fn check_asymptotics_sum(specs: &[LaplaceSpec], n_list: &[f64], order: usize) -> Result<AsymptoticReport> {
    let next_alpha = specs.iter().map(|s| s.next_alpha(order)).fold(f64::INFINITY, f64::min);
    check_remainder_rate(specs, n_list, order, next_alpha)
}

/// Scale the remainder after `order` terms by `n^{next_alpha}` with a caller-chosen
/// exponent, for sums whose intermediate terms cancel.
pub fn check_remainder_rate(
    specs: &[LaplaceSpec],
    n_list: &[f64],
    order: usize,
    next_alpha: f64,
) -> Result<AsymptoticReport> {
    if specs.is_empty() || n_list.is_empty() {
        return Err(Error::InvalidInput("need at least one spec and one n".into()));
    }
    if !next_alpha.is_finite() {
        return Err(Error::InvalidInput("remainder exponent unknown".into()));
    }
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let mut direct = 0.0;
        let mut asymptotic = 0.0;
        let mut quad_error = 0.0;
        for s in specs {
            let r = s.direct(n)?;
            if !r.converged {
                return Err(Error::NotConverged { what: "laplace direct quadrature", iterations: r.evaluations });
            }
            direct += r.value;
            quad_error += r.abs_error_estimate;
            asymptotic += asymp_value(s, n, order)?;
        }
        let residual = direct - asymptotic;
        rows.push(AsymptoticRow {
            n,
            direct,
            asymptotic,
            residual,
            scaled_residual: residual.abs() * n.powf(next_alpha),
            quad_error,
        });
    }
    let first = rows[0].scaled_residual;
    let bounded = rows.iter().all(|r| r.scaled_residual <= BOUNDEDNESS_SLACK * first);
    Ok(AsymptoticReport { order, next_alpha, rows, bounded })
}

/// The two standard integrals around an interior minimum h of Φ on (a, c):
/// `∫_a^c Θ e^{-nΦ} = e^{-nΦ(h)} [L⁻(n) + L⁺(n)]`.
#[derive(Debug, Clone)]
pub struct SplitSpecs {
    pub h: f64,
    pub phi_at_min: f64,
    /// φ⁻(t) = Φ(h−t) − Φ(h), θ⁻(t) = Θ(h−t), t ∈ (0, h−a).
    pub minus: LaplaceSpec,
    /// φ⁺(t) = Φ(h+t) − Φ(h), θ⁺(t) = Θ(h+t), t ∈ (0, c−h).
    pub plus: LaplaceSpec,
}

impl SplitSpecs {
    pub fn set_expansions(
        mut self,
        minus: &[(f64, f64)],
        plus: &[(f64, f64)],
        remainder_alpha: f64,
    ) -> Result<Self> {
        self.minus = self.minus.with_expansion(minus, remainder_alpha)?;
        self.plus = self.plus.with_expansion(plus, remainder_alpha)?;
        Ok(self)
    }

    /// The full integral `∫_a^c Θ e^{-nΦ}` from the two directly integrated halves.
    pub fn direct(&self, n: f64) -> Result<f64> {
        let s = self.minus.direct(n)?.value + self.plus.direct(n)?.value;
        Ok((-n * self.phi_at_min).exp() * s)
    }

    /// The second terms of the two halves cancel, so after the leading term alone the
    /// remainder of L⁻ + L⁺ decays like n^{-3/2}.
    pub fn check_leading(&self, n_list: &[f64]) -> Result<AsymptoticReport> {
        let (m, p) = (&self.minus.expansion, &self.plus.expansion);
        if m.len() < 2 || p.len() < 2 || (m[1].p + p[1].p).abs() > 1e-14 * m[1].p.abs().max(1.0) {
            return Err(Error::InvalidInput("second-order terms of the halves do not cancel".into()));
        }
        let next = self.minus.next_alpha(2).min(self.plus.next_alpha(2));
        check_remainder_rate(&[self.minus.clone(), self.plus.clone()], n_list, 1, next)
    }

    pub fn asymptotic(&self, n: f64, order: usize) -> Result<f64> {
        let s = asymp_value(&self.minus, n, order)? + asymp_value(&self.plus, n, order)?;
        Ok((-n * self.phi_at_min).exp() * s)
    }
}

/// Sample points strictly inside (lo, hi); for an infinite `hi` they spread geometrically.
fn interior_samples(lo: f64, hi: f64) -> Vec<f64> {
    let k = MONOTONE_SAMPLES;
    if hi.is_finite() {
        (1..k).map(|i| lo + (hi - lo) * i as f64 / k as f64).collect()
    } else {
        let unit = 1.0 + lo.abs();
        (0..k).map(|i| lo + unit * 10f64.powf(-3.0 + 6.0 * i as f64 / (k - 1) as f64)).collect()
    }
}

fn check_monotone(phi: &RealFn, pts: &[f64], increasing: bool, what: &str) -> Result<()> {
    for w in pts.windows(2) {
        let (u, v) = (phi(w[0]), phi(w[1]));
        let slack = 1e-12 * (1.0 + u.abs().max(v.abs()));
        let ok = if increasing { v >= u - slack } else { v <= u + slack };
        if !ok {
            return Err(Error::Domain(format!(
                "phase not {} on the {what} side: Φ({}) = {u}, Φ({}) = {v}",
                if increasing { "increasing" } else { "decreasing" },
                w[0],
                w[1]
            )));
        }
    }
    Ok(())
}

/// Split `∫_a^c Θ e^{-nΦ}` at the minimum point h of Φ. The returned specs carry no
/// expansion; attach one with [`SplitSpecs::set_expansions`].
pub fn split_interior_max(theta: RealFn, phi: RealFn, a: f64, c: f64, h: f64) -> Result<SplitSpecs> {
    if !(a < h && h < c) {
        return Err(Error::InvalidInput(format!("need a < h < c, got {a}, {h}, {c}")));
    }
    let mut left = vec![a + (h - a) * 1e-9];
    left.extend(interior_samples(a, h));
    left.push(h);
    check_monotone(&phi, &left, false, "left")?;
    let mut right = vec![h];
    right.extend(interior_samples(h, c));
    check_monotone(&phi, &right, true, "right")?;

    let phi_at_min = phi(h);
    let (th_m, ph_m) = (theta.clone(), phi.clone());
    let minus = LaplaceSpec::new(
        Arc::new(move |t| th_m(h - t)),
        Arc::new(move |t| ph_m(h - t) - phi_at_min),
        h - a,
    );
    let (th_p, ph_p) = (theta, phi);
    let plus = LaplaceSpec::new(
        Arc::new(move |t| th_p(h + t)),
        Arc::new(move |t| ph_p(h + t) - phi_at_min),
        c - h,
    );
    Ok(SplitSpecs { h, phi_at_min, minus, plus })
}

/// `L(m) = ∫₀^{3/4} t^{-1/2} (1−t)^{-1} (1 + t/3)^{-m} dt ~ √(3π)/√m`.
pub fn l_integral() -> LaplaceSpec {
    LaplaceSpec::new(
        Arc::new(|t: f64| 1.0 / (t.sqrt() * (1.0 - t))),
        Arc::new(|t: f64| (t / 3.0).ln_1p()),
        0.75,
    )
    .with_expansion(&[(3f64.sqrt(), 0.5)], 1.5)
    .expect("valid expansion")
}

/// `L_d(m) = ∫₀^1 (1−t)^{d/4−1} t^{-1/2} e^{-m[2 ln(1−t/3) − ln(1−t)]} dt ~ √(3π)/√m`.
pub fn l_d_integral(d: u32) -> LaplaceSpec {
    let e = d as f64 / 4.0 - 1.0;
    LaplaceSpec::new(
        Arc::new(move |t: f64| (1.0 - t).powf(e) / t.sqrt()),
        Arc::new(|t: f64| 2.0 * (-t / 3.0).ln_1p() - (-t).ln_1p()),
        1.0,
    )
    .with_expansion(&[(3f64.sqrt(), 0.5)], 1.5)
    .expect("valid expansion")
}

/// `C_nd(1/2) = 3^n ∫₀^1 s^{n−1} (1−s)^{-1/2} (1+s/2)^{d/2−2n} ds` by direct quadrature.
pub fn c_half_direct(n: f64, d: u32) -> Result<f64> {
    let dh = d as f64 / 2.0;
    if !(n > dh) {
        return Err(Error::Domain(format!("need n > d/2, got n = {n}, d = {d}")));
    }
    // the integrand peaks near s = 1; split there to keep both endpoint behaviours clean
    let f = |s: f64| {
        let v = ((n - 1.0) * s.ln() + (dh - 2.0 * n) * (0.5 * s).ln_1p() + n * 3f64.ln()).exp() / (1.0 - s).sqrt();
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let mid = 1.0 - 1.0 / n;
    let a = quad::integrate_finite_with(f, 0.0, mid, DIRECT_REL_TOL, 0.0, quad::DEFAULT_MAX_EVALS);
    let b = quad::integrate_finite_with(f, mid, 1.0, DIRECT_REL_TOL, 0.0, quad::DEFAULT_MAX_EVALS);
    if !(a.converged && b.converged) {
        return Err(Error::NotConverged { what: "C_nd(1/2) quadrature", iterations: a.evaluations + b.evaluations });
    }
    Ok(a.value + b.value)
}

/// `C_nd(1/2)` through the Laplace integral: `(3/2)^{d/2} (4/3)^n L_d(n − d/4)`.
pub fn c_half_via_laplace(n: f64, d: u32) -> Result<f64> {
    let m = n - d as f64 / 4.0;
    let l = l_d_integral(d).direct(m)?;
    Ok(1.5f64.powf(d as f64 / 2.0) * (4.0 / 3.0f64).powf(n) * l.value)
}

/// Leading large-n law `√π 3^{d/2+1/2} / (2^{d/2} √n) · (4/3)^n`.
pub fn c_half_leading(n: f64, d: u32) -> f64 {
    let dh = d as f64 / 2.0;
    PI.sqrt() * 3f64.powf(dh + 0.5) / (2f64.powf(dh) * n.sqrt()) * (4.0 / 3.0f64).powf(n)
}

/// `Φ_pc(ρ) = (ρ−p)²/c − ln(1+ρ²)`.
pub fn phase_pc(p: f64, c: f64) -> RealFn {
    Arc::new(move |r: f64| (r - p) * (r - p) / c - (r * r).ln_1p())
}

/// The two Gaussian-window parameter pairs with an explicit phase minimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum XFamily {
    /// (p, c) = (1/(2√2), 3/4): minimum at 1/√2, Φ = 1/6 − ln(3/2).
    Base,
    /// (2p, 2c): minimum at √2, Φ = 1/3 − ln 3.
    Doubled,
}

impl XFamily {
    pub fn params(self) -> (f64, f64) {
        let p = 1.0 / (2.0 * SQRT_2);
        match self {
            XFamily::Base => (p, 0.75),
            XFamily::Doubled => (2.0 * p, 1.5),
        }
    }

    pub fn minimum_point(self) -> f64 {
        match self {
            XFamily::Base => 1.0 / SQRT_2,
            XFamily::Doubled => SQRT_2,
        }
    }

    /// Φ at its minimum point.
    pub fn phase_minimum(self) -> f64 {
        match self {
            XFamily::Base => 1.0 / 6.0 - 1.5f64.ln(),
            XFamily::Doubled => 1.0 / 3.0 - 3f64.ln(),
        }
    }

    /// (P₀, P₁) of ξ on the minus branch; the plus branch flips the sign of P₁.
    pub fn coefficients(self, alpha: f64) -> (f64, f64) {
        match self {
            XFamily::Base => {
                let s = 2f64.powf(-alpha / 2.0 - 0.5);
                (s * 3.0 / (2.0 * 5f64.sqrt()), -s * (0.9 * alpha - 0.2))
            }
            XFamily::Doubled => {
                let s = 2f64.powf(alpha / 2.0);
                (s * 3.0 / (2.0 * 7f64.sqrt()), -s * (9.0 * alpha / 14.0 - 2.0 / 49.0) / SQRT_2)
            }
        }
    }

    /// Leading law of X_α(n) = ∫_p^∞ ρ^α e^{-nΦ(ρ)} dρ.
    pub fn leading(self, alpha: f64, n: f64) -> f64 {
        let (p0, _) = self.coefficients(alpha);
        2.0 * p0 * PI.sqrt() / n.sqrt() * (-n * self.phase_minimum()).exp()
    }
}

/// The split of `X_α(n) = ∫_p^∞ ρ^α e^{-nΦ_pc(ρ)} dρ` with both expansions attached.
pub fn x_split(family: XFamily, alpha: f64) -> Result<SplitSpecs> {
    let (p, c) = family.params();
    let theta: RealFn = Arc::new(move |r: f64| r.powf(alpha));
    let split = split_interior_max(theta, phase_pc(p, c), p, f64::INFINITY, family.minimum_point())?;
    let (p0, p1) = family.coefficients(alpha);
    split.set_expansions(&[(p0, 0.5), (p1, 1.0)], &[(p0, 0.5), (-p1, 1.0)], 1.5)
}

/// `X_α(n)` by one quadrature over (p, ∞), independent of the split.
pub fn x_direct(family: XFamily, alpha: f64, n: f64) -> Result<f64> {
    let (p, c) = family.params();
    let phi = phase_pc(p, c);
    let m = family.phase_minimum();
    let h = family.minimum_point();
    let f = |r: f64| r.powf(alpha) * (-n * (phi(r) - m)).exp();
    let w = 10.0 / n.sqrt();
    let left = quad::integrate_finite_with(f, p, h, DIRECT_REL_TOL, 0.0, quad::DEFAULT_MAX_EVALS);
    let mid = quad::integrate_finite_with(f, h, h + w, DIRECT_REL_TOL, 0.0, quad::DEFAULT_MAX_EVALS);
    // e^{-nΦ} decays like a Gaussian beyond the window; the polynomial tail map only sees noise
    let tail = quad::integrate_semiinf_scaled(f, h + w, 1.0, quad::TailSpec { decay_exponent: 1.0 }, DIRECT_REL_TOL)?;
    Ok((left.value + mid.value + tail.value) * (-n * m).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    const NS: [f64; 4] = [50.0, 100.0, 200.0, 400.0];

    #[test]
    fn series_values() {
        let l = l_integral();
        assert!((asymp_value(&l, 4.0, 1).unwrap() - (3.0 * PI).sqrt() / 2.0).abs() < 1e-14);
        assert_eq!(asymp_value(&l, 4.0, 0).unwrap(), 0.0);
        assert!(asymp_value(&l, 4.0, 2).is_err());
        let (p0, _) = XFamily::Base.coefficients(0.0);
        assert!((p0 - 3.0 / (2.0 * 10f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn l_integral_remainder() {
        let rep = check_asymptotics(&l_integral(), &NS, 1).unwrap();
        assert!(rep.bounded, "{:?}", rep.scaled_residuals());
        assert_eq!(rep.next_alpha, 1.5);
        for r in &rep.rows {
            assert!(r.quad_error < 1e-3 * r.residual.abs());
        }
    }

    #[test]
    fn c_half_routes_agree() {
        for &d in &[1u32, 2, 3] {
            for &n in &[5.0, 20.5, 100.0] {
                let a = c_half_direct(n, d).unwrap();
                let b = c_half_via_laplace(n, d).unwrap();
                assert!(((a - b) / a).abs() < 1e-10, "d={d} n={n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn split_minimum_values() {
        for fam in [XFamily::Base, XFamily::Doubled] {
            let (p, c) = fam.params();
            let phi = phase_pc(p, c);
            let h = fam.minimum_point();
            assert!((phi(h) - fam.phase_minimum()).abs() < 1e-15);
            let s = x_split(fam, 0.5).unwrap();
            assert_eq!(s.h, h);
            assert!((s.phi_at_min - fam.phase_minimum()).abs() < 1e-15);
        }
        // an off-minimum split point is rejected
        let (p, c) = XFamily::Base.params();
        let one: RealFn = Arc::new(|_| 1.0);
        assert!(split_interior_max(one, phase_pc(p, c), p, f64::INFINITY, 1.2).is_err());
    }

    #[test]
    fn symmetric_parabola() {
        let one: RealFn = Arc::new(|_| 1.0);
        let s = split_interior_max(one, Arc::new(|x: f64| (x - 1.0) * (x - 1.0)), 0.0, 2.0, 1.0).unwrap();
        for &t in &[0.1, 0.37, 0.9] {
            assert!(((s.minus.phi)(t) - t * t).abs() < 1e-15);
            assert!(((s.plus.phi)(t) - t * t).abs() < 1e-15);
        }
        assert_eq!(s.minus.b, 1.0);
        assert_eq!(s.plus.b, 1.0);
    }

    #[test]
    fn x_split_matches_single_quadrature() {
        for fam in [XFamily::Base, XFamily::Doubled] {
            for &n in &[10.0, 100.0] {
                let a = x_split(fam, 0.5).unwrap().direct(n).unwrap();
                let b = x_direct(fam, 0.5, n).unwrap();
                assert!(((a - b) / a).abs() < 1e-10, "{fam:?} n={n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn odd_terms_cancel() {
        for fam in [XFamily::Base, XFamily::Doubled] {
            let s = x_split(fam, 1.0).unwrap();
            let both = s.check_leading(&NS).unwrap();
            assert!(both.bounded, "{fam:?} {:?}", both.scaled_residuals());
            assert_eq!(both.next_alpha, 1.5);
            // a single branch truncated after the √ term keeps its 1/n piece,
            // while in the sum that piece is gone
            let one = check_remainder_rate(std::slice::from_ref(&s.minus), &NS, 1, 1.0).unwrap();
            let p1 = s.minus.expansion[1].p.abs();
            let last = one.rows.last().unwrap().scaled_residual;
            assert!((last - p1).abs() < 0.1 * p1, "{fam:?} {last} vs {p1}");
            let sum_n = check_remainder_rate(&[s.minus.clone(), s.plus.clone()], &NS, 1, 1.0).unwrap();
            let r = sum_n.scaled_residuals();
            assert!(r[3] < 0.5 * r[0] && r[3] < 0.1 * p1, "{fam:?} {r:?}");
            let two = check_asymptotics(&s.minus, &NS, 2).unwrap();
            assert!(two.bounded, "{fam:?} {:?}", two.scaled_residuals());
            let two = check_asymptotics(&s.plus, &NS, 2).unwrap();
            assert!(two.bounded, "{fam:?} {:?}", two.scaled_residuals());
        }
    }
}

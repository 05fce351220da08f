//! Kernel functions behind the bounds: F_nd, 𝒮_nd, the radial profile g_nd and
//! the Bessel-product integral I_μν.

use crate::error::{Error, Result};
use crate::quad;
use crate::specfun::{bessel_j, bessel_k, f21, hyp2f1_scaled, ln_gamma_signed};
use num_rational::Ratio;
use serde::Serialize;
use std::f64::consts::PI;

/// Tolerance for recognising integer and half-integer parameters given as floats.
pub const GAP_TOL: f64 = 1e-12;
/// F_nd switches from the direct to the transformed representation above this u.
pub const TRANSFORM_SWITCH_U: f64 = 0.7;

/// A pair (n, d) with n > d/2.
///
/// `nd = n - d/2` is stored separately so that tiny gaps such as 1e-4 are exact and
/// not the difference of two rounded numbers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundQuery {
    d: u32,
    n: f64,
    nd: f64,
    #[serde(skip)]
    exact: Option<Ratio<i64>>,
}

impl BoundQuery {
    pub fn new(n: f64, d: u32) -> Result<Self> {
        Self::checked(d, n, n - 0.5 * d as f64, None)
    }

    /// n = d/2 + gap.
    pub fn from_gap(d: u32, gap: f64) -> Result<Self> {
        Self::checked(d, 0.5 * d as f64 + gap, gap, None)
    }

    /// Exact rational n; the integer and half-integer tests then need no tolerance.
    pub fn from_ratio(n: Ratio<i64>, d: u32) -> Result<Self> {
        let gap = n - Ratio::new(d as i64, 2);
        Self::checked(d, ratio_to_f64(n), ratio_to_f64(gap), Some(n))
    }

    fn checked(d: u32, n: f64, nd: f64, exact: Option<Ratio<i64>>) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidInput("dimension d must be at least 1".into()));
        }
        if !(nd > 0.0) || !n.is_finite() {
            return Err(Error::InvalidInput(format!("need n > d/2, got n = {n}, d = {d}")));
        }
        Ok(BoundQuery { d, n, nd, exact })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    /// n - d/2.
    pub fn nd(&self) -> f64 {
        self.nd
    }

    pub fn exact_n(&self) -> Option<Ratio<i64>> {
        self.exact
    }

    pub fn half_d(&self) -> f64 {
        0.5 * self.d as f64
    }

    /// k when n - d/2 - 1/2 = k ∈ {0, 1, 2, ...}.
    pub fn half_integer_gap(&self) -> Option<u32> {
        match self.exact {
            Some(n) => {
                let k = n - Ratio::new(self.d as i64 + 1, 2);
                (k.is_integer() && k >= Ratio::from_integer(0)).then(|| k.to_integer() as u32)
            }
            None => near_nonneg_integer(self.nd - 0.5),
        }
    }

    pub fn integer_n(&self) -> Option<u32> {
        match self.exact {
            Some(n) => (n.is_integer() && n > Ratio::from_integer(0)).then(|| n.to_integer() as u32),
            None => near_nonneg_integer(self.n).filter(|&m| m > 0),
        }
    }

    /// n ≤ d/2 + 1/2, where 𝒮_nd increases and K⁺ is its limit at infinity.
    pub fn closed_form_upper(&self) -> bool {
        match self.exact {
            Some(n) => n <= Ratio::new(self.d as i64 + 1, 2),
            None => self.nd <= 0.5 + GAP_TOL,
        }
    }
}

/// ln Γ(x) for x > 0.
pub(crate) fn lng(x: f64) -> f64 {
    ln_gamma_signed(x).0
}

fn ratio_to_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn near_nonneg_integer(x: f64) -> Option<u32> {
    let r = x.round();
    ((x - r).abs() <= GAP_TOL * x.abs().max(1.0) && r >= 0.0 && r < u32::MAX as f64).then_some(r as u32)
}

/// ln of a sum of positive terms given by their logs.
pub(crate) fn ln_sum_exp(logs: &[f64]) -> f64 {
    let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + logs.iter().map(|l| (l - m).exp()).sum::<f64>().ln()
}

/// F_nd(u) = F(2n - d/2, n; n + 1/2; -u), straight from the definition.
pub fn f_nd_direct(q: &BoundQuery, u: f64) -> Result<f64> {
    f21(2.0 * q.n - q.half_d(), q.n, q.n + 0.5, -u)
}

/// F_nd(u) = (1+u)^{-n} F(n, d/2 + 1/2 - n; n + 1/2; u/(1+u)).
pub fn f_nd_transformed(q: &BoundQuery, u: f64) -> Result<f64> {
    Ok(ln_f_nd_transformed(q, u)?.exp())
}

fn ln_f_nd_transformed(q: &BoundQuery, u: f64) -> Result<f64> {
    let n = q.n;
    let s = hyp2f1_scaled(n, q.half_d() + 0.5 - n, n + 0.5, u / (1.0 + u))?;
    Ok(-n * u.ln_1p() + s.ln_abs())
}

/// The finite sum for n - d/2 - 1/2 = k:
/// Σ_{ℓ≤k} (n)_ℓ (d/2 + 1/2 - n)_ℓ / ((n + 1/2)_ℓ ℓ!) · u^ℓ / (1+u)^{n+ℓ}.
///
/// Alternating; kept as an oracle for small k. [`ln_f_nd`] sums the same polynomial
/// rearranged into positive terms.
pub fn f_nd_finite_sum(q: &BoundQuery, u: f64) -> Option<f64> {
    let k = q.half_integer_gap()?;
    let n = q.n;
    let b = q.half_d() + 0.5 - n;
    let x = u / (1.0 + u);
    let mut c = 1.0;
    let mut sum = 1.0;
    for l in 0..k {
        let lf = l as f64;
        c *= (n + lf) * (b + lf) / ((n + 0.5 + lf) * (lf + 1.0)) * x;
        sum += c;
    }
    Some(sum * (1.0 + u).powf(-n))
}

/// ln F_nd via (1+u)^{-n-k} Σ_{ℓ≤k} C(k,ℓ) (1/2)_ℓ / (n+1/2)_ℓ · u^ℓ.
fn ln_f_nd_positive_sum(q: &BoundQuery, k: u32, u: f64) -> f64 {
    let n = q.n;
    let lu = u.ln();
    let mut logs = Vec::with_capacity(k as usize + 1);
    let mut lt = 0.0;
    logs.push(0.0);
    for l in 0..k {
        let lf = l as f64;
        lt += ((k as f64 - lf) / (lf + 1.0)).ln() + ((0.5 + lf) / (n + 0.5 + lf)).ln() + lu;
        logs.push(lt);
    }
    -(n + k as f64) * u.ln_1p() + ln_sum_exp(&logs)
}

/// ln F_nd(u); F_nd is positive for all u ≥ 0.
pub fn ln_f_nd(q: &BoundQuery, u: f64) -> Result<f64> {
    if !(u >= 0.0) || u.is_infinite() {
        return Err(Error::Domain(format!("F_nd needs finite u >= 0, got {u}")));
    }
    if u == 0.0 {
        return Ok(0.0);
    }
    if let Some(k) = q.half_integer_gap() {
        return Ok(ln_f_nd_positive_sum(q, k, u));
    }
    if u <= TRANSFORM_SWITCH_U {
        let s = hyp2f1_scaled(2.0 * q.n - q.half_d(), q.n, q.n + 0.5, -u)?;
        return Ok(s.ln_abs());
    }
    ln_f_nd_transformed(q, u)
}

pub fn f_nd(q: &BoundQuery, u: f64) -> Result<f64> {
    Ok(ln_f_nd(q, u)?.exp())
}

/// ln of Γ(2n - d/2) / ((4π)^{d/2} Γ(2n)) = 𝒮_nd(0).
pub fn ln_s_nd_at_zero(q: &BoundQuery) -> f64 {
    let n = q.n;
    lng(2.0 * n - q.half_d()) - q.half_d() * (4.0 * PI).ln() - lng(2.0 * n)
}

/// ln 𝒮_nd(u).
pub fn ln_s_nd(q: &BoundQuery, u: f64) -> Result<f64> {
    Ok(ln_s_nd_at_zero(q) + q.n * (4.0 * u).ln_1p() + ln_f_nd(q, u)?)
}

/// 𝒮_nd(u) = Γ(2n - d/2) / ((4π)^{d/2} Γ(2n)) · (1 + 4u)^n · F_nd(u).
pub fn s_nd(q: &BoundQuery, u: f64) -> Result<f64> {
    Ok(ln_s_nd(q, u)?.exp())
}

/// ln 𝒮_nd(+∞) = ln[Γ(1 + n_d) / (2^{d-1} π^{d/2} n_d Γ(n))].
pub fn ln_s_nd_limit_inf(q: &BoundQuery) -> f64 {
    let d = q.d as f64;
    lng(1.0 + q.nd) - (d - 1.0) * 2f64.ln() - 0.5 * d * PI.ln() - q.nd.ln() - lng(q.n)
}

pub fn s_nd_limit_inf(q: &BoundQuery) -> f64 {
    ln_s_nd_limit_inf(q).exp()
}

/// Radial profile of g_nd: r^{n_d} K_{n_d}(r) / (2^{n-1} Γ(n)), r > 0.
pub fn g_nd(q: &BoundQuery, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("g_nd needs r > 0, got {r}")));
    }
    let nu = q.nd;
    let k = bessel_k(nu, r)?;
    Ok((nu * r.ln() + k.ln() - (q.n - 1.0) * 2f64.ln() - lng(q.n)).exp())
}

/// I_μν(h) = ∫₀^∞ r^{μ+ν+1} J_μ(hr) K²_{ν/2}(r) dr in closed form:
/// √π Γ(μ+ν+1) Γ(μ+ν/2+1) / (2^{μ+2} Γ(μ+ν/2+3/2)) · h^μ · F(μ+ν+1, μ+ν/2+1; μ+ν/2+3/2; -h²/4).
pub fn i_mu_nu(mu: f64, nu: f64, h: f64) -> Result<f64> {
    check_i_params(mu, nu, h)?;
    let (lg1, s1) = ln_gamma_signed(mu + nu + 1.0);
    let (lg2, s2) = ln_gamma_signed(mu + 0.5 * nu + 1.0);
    let (lg3, s3) = ln_gamma_signed(mu + 0.5 * nu + 1.5);
    let ln_pre = 0.5 * PI.ln() + lg1 + lg2 - lg3 - (mu + 2.0) * 2f64.ln() + mu * h.ln();
    let f = hyp2f1_scaled(mu + nu + 1.0, mu + 0.5 * nu + 1.0, mu + 0.5 * nu + 1.5, -0.25 * h * h)?;
    Ok(s1 * s2 * s3 * f.sign() * (ln_pre + f.ln_abs()).exp())
}

/// I_μν(h) by direct quadrature of its defining integral.
pub fn i_mu_nu_quadrature(mu: f64, nu: f64, h: f64) -> Result<f64> {
    check_i_params(mu, nu, h)?;
    let f = |r: f64| {
        if r == 0.0 {
            return 0.0;
        }
        let j = bessel_j(mu, h * r).unwrap_or(f64::NAN);
        let k = bessel_k(0.5 * nu, r).unwrap_or(f64::NAN);
        r.powf(mu + nu + 1.0) * j * k * k
    };
    let head = quad::integrate_finite_with(f, 0.0, 1.0, 1e-12, 0.0, quad::DEFAULT_MAX_EVALS);
    // K² ~ e^{-2r}: nothing is left beyond r = 60; one piece per half period of J
    let half_period = PI / h;
    let mut total = head.value;
    let mut a = 1.0;
    while a < 60.0 {
        let b = (a + half_period.min(2.0)).min(60.0);
        total += quad::integrate_adaptive(f, a, b, 1e-12, 1e-15 * head.value.abs(), 100_000).value;
        a = b;
    }
    if !total.is_finite() {
        return Err(Error::NotConverged { what: "I_mu_nu quadrature", iterations: 0 });
    }
    Ok(total)
}

fn check_i_params(mu: f64, nu: f64, h: f64) -> Result<()> {
    if !(mu > -1.0 && nu > 0.0 && h > 0.0) {
        return Err(Error::Domain(format!("I_mu_nu needs mu > -1, nu > 0, h > 0; got {mu}, {nu}, {h}")));
    }
    Ok(())
}

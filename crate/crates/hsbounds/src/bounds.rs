//! Upper bounds K⁺ and K⁺⁺ and the lower bounds K^B, K^BB, K^F, K^FF on the
//! multiplication constant K_nd of H^n(R^d).
//!
//! Every optimizer works on the logarithm of its objective. Norms that can leave
//! the f64 range are carried as logs as well.

use crate::error::{Error, Result};
use crate::golden;
use crate::kernels::{self, ln_sum_exp, lng, BoundQuery};
use crate::optim;
use crate::par::{self, Execution};
use crate::quad::{self, TailSpec};
use crate::specfun::gamma::ln_binomial;
use crate::specfun::{bessel_i_scaled, digamma, hyp2f1_scaled, pochhammer, rgamma, Scaled, EULER_GAMMA};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

/// Starting scale for the K^B search.
pub const BESSEL_START: f64 = 1.4;
/// Starting scale for the K^BB search.
pub const BB_START: f64 = 1.42;
/// Search interval for the Bessel scale λ.
pub const LAMBDA_RANGE: (f64, f64) = (1e-3, 1e3);
/// K^B needs its squared-kernel quadrature, whose tail decays like u^{-1-(n-d/2)}.
pub const MIN_BESSEL_GAP: f64 = 0.01;
/// Below this gap only K^BB is evaluated.
pub const BB_ONLY_BELOW: f64 = 0.2;
/// Above this gap K^B is no longer evaluated.
pub const BESSEL_UP_TO_GAP: f64 = 10.0;
/// K^F is searched up to this n; K^FF is used beyond.
pub const FOURIER_SEARCH_UP_TO_N: f64 = 50.0;
/// Required agreement of the two ‖g‖² formulas for integer n.
pub const BESSEL_NORM_AGREEMENT: f64 = 1e-10;
/// Required agreement of the finite sum and the quadrature for ‖f‖², integer n.
pub const FOURIER_NORM_AGREEMENT: f64 = 1e-8;
/// Relative accuracy of closed-form objectives (hypergeometric kernels).
const KERNEL_REL_ERR: f64 = 1e-12;
/// Relative tolerance of the Fourier-norm quadrature used in cross-checks.
const CHECK_QUAD_REL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    UpperPlus,
    UpperPlusPlus,
    LowerBessel,
    LowerBesselBb,
    LowerFourier,
    LowerFourierFf,
    AsympSmallN,
    AsympLargeN,
}

impl BoundKind {
    /// Short tag as used in the tables: B, BB, F, FF.
    pub fn tag(self) -> &'static str {
        match self {
            BoundKind::UpperPlus => "+",
            BoundKind::UpperPlusPlus => "++",
            BoundKind::LowerBessel => "B",
            BoundKind::LowerBesselBb => "BB",
            BoundKind::LowerFourier => "F",
            BoundKind::LowerFourierFf => "FF",
            BoundKind::AsympSmallN => "asymp-small",
            BoundKind::AsympLargeN => "asymp-large",
        }
    }

    pub fn is_lower(self) -> bool {
        matches!(
            self,
            BoundKind::LowerBessel | BoundKind::LowerBesselBb | BoundKind::LowerFourier | BoundKind::LowerFourierFf
        )
    }
}

/// Maximizer of the bound's objective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialParams {
    U(f64),
    Lambda(f64),
    PSigma { p: f64, sigma: f64 },
}

impl TrialParams {
    pub fn components(&self) -> (f64, Option<f64>) {
        match *self {
            TrialParams::U(u) => (u, None),
            TrialParams::Lambda(l) => (l, None),
            TrialParams::PSigma { p, sigma } => (p, Some(sigma)),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub evaluations: usize,
    pub iterations: usize,
    pub converged: bool,
    /// The sup is a limit at the edge of the parameter range.
    pub at_boundary: bool,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundResult {
    pub value: f64,
    pub kind: BoundKind,
    pub argmax: Option<TrialParams>,
    pub error_estimate: f64,
    pub diagnostics: Diagnostics,
}

/// Numerical knobs shared by all bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Settings {
    /// Relative tolerance of every quadrature inside an objective.
    pub quad_rel: f64,
    /// Argument tolerance of the 1D searches.
    pub tol_x: f64,
    /// Final simplex size, in log coordinates, of the 2D searches.
    pub simplex_tol: f64,
    #[serde(skip)]
    pub exec: Execution,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { quad_rel: 1e-10, tol_x: optim::DEFAULT_TOL_X, simplex_tol: 1e-7, exec: Execution::available() }
    }
}

/// First error raised inside an objective that has to return a plain f64.
struct ErrorSlot(Mutex<Option<Error>>);

impl ErrorSlot {
    fn new() -> Self {
        ErrorSlot(Mutex::new(None))
    }

    fn value(&self, r: Result<f64>) -> f64 {
        match r {
            Ok(v) => v,
            Err(e) => {
                let mut slot = self.0.lock().expect("error slot poisoned");
                slot.get_or_insert(e);
                f64::NAN
            }
        }
    }

    fn check(self) -> Result<()> {
        match self.0.into_inner().expect("error slot poisoned") {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

fn positive_ln(s: Scaled, what: &str) -> Result<f64> {
    if s.sign() > 0.0 {
        Ok(s.ln_abs())
    } else {
        Err(Error::Domain(format!("{what} evaluated to a non-positive value")))
    }
}

fn check_scale(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name} must be positive and finite, got {x}")))
    }
}

fn rel_diff(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// Streaming log-sum-exp over positive terms.
struct LogAcc {
    max: f64,
    sum: f64,
}

impl LogAcc {
    fn new() -> Self {
        LogAcc { max: f64::NEG_INFINITY, sum: 0.0 }
    }

    fn push(&mut self, t: f64) {
        if t == f64::NEG_INFINITY {
            return;
        }
        if t > self.max {
            self.sum = self.sum * (self.max - t).exp() + 1.0;
            self.max = t;
        } else {
            self.sum += (t - self.max).exp();
        }
    }

    fn ln(&self) -> f64 {
        self.max + self.sum.ln()
    }
}

// ---------------------------------------------------------------------------
// upper bound K⁺

fn limit_upper(q: &BoundQuery, note: &str) -> BoundResult {
    let value = kernels::s_nd_limit_inf(q).sqrt();
    BoundResult {
        value,
        kind: BoundKind::UpperPlus,
        argmax: None,
        error_estimate: value * KERNEL_REL_ERR,
        diagnostics: Diagnostics { converged: true, at_boundary: true, notes: vec![note.to_string()], ..Default::default() },
    }
}

/// K⁺ = √(sup_u 𝒮_nd(u)).
pub fn k_plus(q: &BoundQuery) -> Result<BoundResult> {
    k_plus_with(q, None, &Settings::default())
}

/// K⁺ with the search started at max(1/2, `warm_u`).
///
/// For n ≤ d/2 + 1/2 the function 𝒮_nd increases and the value is √𝒮_nd(∞),
/// reported with no argmax and `at_boundary` set.
pub fn k_plus_with(q: &BoundQuery, warm_u: Option<f64>, s: &Settings) -> Result<BoundResult> {
    if q.closed_form_upper() {
        return Ok(limit_upper(q, "S_nd increases for n <= d/2 + 1/2; sup is the limit u -> inf"));
    }
    let evals = AtomicUsize::new(0);
    let slot = ErrorSlot::new();
    let f = |u: f64| {
        evals.fetch_add(1, Ordering::Relaxed);
        slot.value(kernels::ln_s_nd(q, u))
    };
    let x0 = warm_u.unwrap_or(0.5).max(0.5);
    let r = optim::maximize_1d(f, 0.0, f64::INFINITY, x0, s.tol_x);
    slot.check()?;
    match r {
        Ok(r) => {
            let value = (0.5 * r.max_value).exp();
            let mut notes = Vec::new();
            if !r.converged {
                notes.push("search did not converge; value is a lower estimate of K+".to_string());
            }
            Ok(BoundResult {
                value,
                kind: BoundKind::UpperPlus,
                argmax: Some(TrialParams::U(r.argmax[0])),
                error_estimate: value * KERNEL_REL_ERR,
                diagnostics: Diagnostics {
                    evaluations: evals.into_inner(),
                    iterations: r.iterations,
                    converged: r.converged,
                    at_boundary: false,
                    notes,
                },
            })
        }
        Err(Error::BracketFailure { at }) if at > x0 => {
            Ok(limit_upper(q, "S_nd still increasing at the bracket cap; sup taken as the limit u -> inf"))
        }
        Err(e) => Err(e),
    }
}

// ---------------------------------------------------------------------------
// asymptotic constants and the elementary bound K⁺⁺

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsympConstants {
    pub d: u32,
    pub m_d: f64,
    pub n_d: f64,
    pub t_d: f64,
    pub v_d: f64,
}

impl AsympConstants {
    pub fn new(d: u32) -> Self {
        let df = d as f64;
        let h = 0.5 * df;
        let m_d = 1.0 / (2f64.powf(h - 0.5) * PI.powf(0.25 * df) * lng(h).exp().sqrt());
        let n_d = 0.5 * (digamma(h).expect("d/2 > 0") + EULER_GAMMA);
        let t_d = 3f64.powf(0.25 * df + 0.25) / (2f64.powf(df) * PI.powf(0.25 * df));
        let v_d = (0.75f64.sqrt()).ln() + 0.5 + 3.0 / df - n_d;
        AsympConstants { d, m_d, n_d, t_d, v_d }
    }
}

/// (M_d/√n_d)(1 − N_d n_d), the n → (d/2)⁺ law of K⁺.
pub fn k_plus_asymp_small(q: &BoundQuery) -> f64 {
    let c = AsympConstants::new(q.d());
    c.m_d / q.nd().sqrt() * (1.0 - c.n_d * q.nd())
}

/// T_d (2/√3)^n n^{-d/4}, the n → ∞ law of K⁺.
pub fn k_plus_asymp_large(q: &BoundQuery) -> f64 {
    ln_large_law(q).exp()
}

pub(crate) fn ln_large_law(q: &BoundQuery) -> f64 {
    let c = AsympConstants::new(q.d());
    c.t_d.ln() + q.n() * (2.0 / 3f64.sqrt()).ln() - 0.25 * q.d() as f64 * q.n().ln()
}

/// (2/√3)^n n^{-d/4} factored out, the z-free bracket terms, and the weight n_d/n² of z.
fn elementary_terms(c: &AsympConstants, q: &BoundQuery) -> (f64, f64, f64) {
    let (n, nd, df) = (q.n(), q.nd(), q.d() as f64);
    let ln_prefix = n * (2.0 / 3f64.sqrt()).ln() - 0.25 * df * n.ln();
    let first = (3.0 * df / 8.0).powf(0.25 * df) * c.m_d / nd.sqrt() * (1.0 - nd / n).powf(1.5) * (1.0 + c.v_d * nd);
    let second = c.t_d * (nd / n).powf(1.5);
    (ln_prefix, first + second, nd / (n * n))
}

/// z_nd from a known K⁺ value.
pub fn z_nd_given(q: &BoundQuery, k_plus_value: f64) -> f64 {
    let c = AsympConstants::new(q.d());
    let (lp, base, w) = elementary_terms(&c, q);
    ((k_plus_value.ln() - lp).exp() - base) / w
}

pub fn z_nd(q: &BoundQuery) -> Result<f64> {
    Ok(z_nd_given(q, k_plus(q)?.value))
}

/// K⁺⁺ with the constant `z_d` in place of z_nd.
pub fn k_plus_plus(q: &BoundQuery, z_d: f64) -> BoundResult {
    let c = AsympConstants::new(q.d());
    let (lp, base, w) = elementary_terms(&c, q);
    let value = lp.exp() * (base + z_d * w);
    BoundResult {
        value,
        kind: BoundKind::UpperPlusPlus,
        argmax: None,
        error_estimate: value * 1e-14,
        diagnostics: Diagnostics { converged: true, ..Default::default() },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ElementarySample {
    pub gap: f64,
    pub n: f64,
    pub k_plus: f64,
    pub z_nd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ElementaryBoundData {
    pub d: u32,
    /// sup of z_nd over the grid (and the limit 0 at n → (d/2)⁺).
    pub z_d: f64,
    /// `z_d` rounded up to three significant figures; K⁺⁺ and Θ_d use this value,
    /// and rounding up keeps K⁺⁺ ≥ K⁺.
    pub z_d_rounded: f64,
    pub theta_d: f64,
    /// Gap n − d/2 where the largest z_nd was found; `None` when the sup is the
    /// limit 0 at n → (d/2)⁺.
    pub z_argmax_gap: Option<f64>,
    pub theta_argmax_gap: f64,
    pub samples: Vec<ElementarySample>,
    pub warnings: Vec<String>,
}

/// Default sampling of n − d/2: 100 log-spaced points on [1e-5, 1e-1], then 300
/// evenly spaced points up to 200.
pub fn elementary_grid() -> Vec<f64> {
    let mut g: Vec<f64> = (0..100).map(|i| 10f64.powf(-5.0 + 4.0 * i as f64 / 99.0)).collect();
    g.extend((1..=300).map(|i| 0.1 + (200.0 - 0.1) * i as f64 / 300.0));
    g
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 3 {
        return Err(Error::InvalidInput("grid needs at least 3 points".into()));
    }
    if grid[0] <= 0.0 || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("grid gaps must be positive and strictly increasing".into()));
    }
    Ok(())
}

/// Refine a grid maximum of `f` between its neighbours; returns (gap, value).
fn refine_grid_max<F: Fn(f64) -> f64>(f: F, grid: &[f64], i: usize, at: f64, tol: f64) -> Option<(f64, f64)> {
    if i == 0 || i + 1 >= grid.len() {
        return None;
    }
    optim::maximize_1d(f, grid[i - 1], grid[i + 1], at, tol).ok().map(|r| (r.argmax[0], r.max_value))
}

/// Z_d, Θ_d and the sampled z_nd over `grid` (values of n − d/2).
pub fn elementary_bound_data(d: u32, grid: &[f64], s: &Settings) -> Result<ElementaryBoundData> {
    check_grid(grid)?;
    let eval = |gap: f64| -> Result<ElementarySample> {
        let q = BoundQuery::from_gap(d, gap)?;
        let k = k_plus_with(&q, None, s)?.value;
        Ok(ElementarySample { gap, n: q.n(), k_plus: k, z_nd: z_nd_given(&q, k) })
    };
    let samples: Vec<ElementarySample> = par::map(s.exec, grid, |&g| eval(g)).into_iter().collect::<Result<_>>()?;
    let mut warnings = Vec::new();
    let last = grid.len() - 1;

    let (iz, best_z) = samples
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, p)| if p.z_nd > acc.1 { (i, p.z_nd) } else { acc });
    let z_of = |g: f64| eval(g).map(|p| p.z_nd).unwrap_or(f64::NAN);
    let (mut z_gap, mut z_max) = (grid[iz], best_z);
    if let Some((g, v)) = refine_grid_max(z_of, grid, iz, grid[iz], 1e-7) {
        if v > z_max {
            z_gap = g;
            z_max = v;
        }
    }
    if iz == last {
        warnings.push(format!("z_nd largest at the last grid point n - d/2 = {}; grid may be too short", grid[last]));
    }
    // z_nd = O(√n_d) as n → (d/2)⁺, so 0 is always a limit value of z_nd
    let (z_d, z_argmax_gap) = if z_max > 0.0 {
        if iz == 0 {
            warnings.push(format!("z_nd largest at the first grid point n - d/2 = {}; grid may be too coarse", grid[0]));
        }
        (z_max, Some(z_gap))
    } else {
        (0.0, None)
    };

    let z_pub = round_up_3(z_d);
    let ratio_at = |p: &ElementarySample| {
        let q = BoundQuery::from_gap(d, p.gap).expect("grid point already validated");
        k_plus_plus(&q, z_pub).value / p.k_plus
    };
    let (it, best_t) = samples
        .iter()
        .enumerate()
        .map(|(i, p)| (i, ratio_at(p)))
        .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    let t_of = |g: f64| eval(g).map(|p| ratio_at(&p)).unwrap_or(f64::NAN);
    let (mut t_gap, mut theta) = (grid[it], best_t);
    if let Some((g, v)) = refine_grid_max(t_of, grid, it, grid[it], 1e-7) {
        if v > theta {
            t_gap = g;
            theta = v;
        }
    }
    if it == 0 || it == last {
        warnings.push(format!("K++/K+ largest at a grid endpoint n - d/2 = {}; grid may be too coarse", grid[it]));
    }
    Ok(ElementaryBoundData {
        d,
        z_d,
        z_d_rounded: z_pub,
        theta_d: theta.max(1.0),
        z_argmax_gap,
        theta_argmax_gap: t_gap,
        samples,
        warnings,
    })
}

/// Smallest number with three significant figures that is ≥ x (x ≥ 0).
pub fn round_up_3(x: f64) -> f64 {
    if x <= 0.0 {
        return x;
    }
    let unit = golden::third_figure_unit(x);
    let m = x / unit;
    // guard against m = 782.0000000001 from a value that is already on the grid
    let c = if (m - m.round()).abs() < 1e-9 { m.round() } else { m.ceil() };
    c * unit
}

pub fn z_d_sup(d: u32, grid: &[f64]) -> Result<f64> {
    Ok(elementary_bound_data(d, grid, &Settings::default())?.z_d)
}

pub fn theta_d(d: u32, grid: &[f64]) -> Result<f64> {
    Ok(elementary_bound_data(d, grid, &Settings::default())?.theta_d)
}

// ---------------------------------------------------------------------------
// Bessel trial functions g_λnd

/// ln ‖g_λnd‖²_n from the hypergeometric closed form.
pub fn ln_bessel_norm_sq(q: &BoundQuery, lambda: f64) -> Result<f64> {
    check_scale("lambda", lambda)?;
    let (h, n, nd) = (q.half_d(), q.n(), q.nd());
    let f = hyp2f1_scaled(-n, h, n, 1.0 - lambda * lambda)?;
    let lf = positive_ln(f, "F(-n, d/2; n; 1 - lambda^2)")?;
    Ok(h * PI.ln() + lng(1.0 + nd) - nd.ln() - lng(n) - q.d() as f64 * lambda.ln() + lf)
}

/// ‖g_λnd‖²_n by the binomial sum, integer n only.
pub fn bessel_norm_sq_sum(q: &BoundQuery, lambda: f64) -> Result<f64> {
    check_scale("lambda", lambda)?;
    let m = q.integer_n().ok_or_else(|| Error::InvalidInput(format!("finite sum needs integer n, got {}", q.n())))?;
    let (h, n) = (q.half_d(), q.n());
    let ll = lambda.ln();
    let logs: Vec<f64> = (0..=m)
        .map(|l| {
            let lf = l as f64;
            ln_binomial(n, lf) + lng(lf + h) + lng(2.0 * n - h - lf) + 2.0 * lf * ll
        })
        .collect();
    Ok((h * PI.ln() - lng(h) - lng(2.0 * n) - q.d() as f64 * ll + ln_sum_exp(&logs)).exp())
}

/// ‖g_λnd‖²_n. For integer n the binomial sum is evaluated too, and a mismatch
/// beyond [`BESSEL_NORM_AGREEMENT`] is an error.
pub fn bessel_norm_sq(q: &BoundQuery, lambda: f64) -> Result<f64> {
    let v = ln_bessel_norm_sq(q, lambda)?.exp();
    if q.integer_n().is_some() {
        let w = bessel_norm_sq_sum(q, lambda)?;
        if rel_diff(v, w) > BESSEL_NORM_AGREEMENT {
            return Err(Error::CrossCheck(format!(
                "|g|^2 closed form {v:e} vs binomial sum {w:e} at n = {}, d = {}, lambda = {lambda}",
                q.n(),
                q.d()
            )));
        }
    }
    Ok(v)
}

fn ln_bessel_sq_prefactor(q: &BoundQuery, lambda: f64) -> f64 {
    let (h, n) = (q.half_d(), q.n());
    h * PI.ln() + 2.0 * lng(2.0 * n - h) - lng(h) - 2.0 * lng(2.0 * n) - q.d() as f64 * lambda.ln()
}

/// ‖g²_λnd‖²_n as a double sum of hypergeometric terms; needs n − d/2 − 1/2 = k ∈ ℕ.
///
/// F_nd is expanded as (1+u)^{-n-k} Σ_ℓ C(k,ℓ) (1/2)_ℓ/(n+1/2)_ℓ u^ℓ, so every term of
/// the square is positive and each u-integral is Γ(d/2+s) Γ(n+2k−d/2−s)/Γ(n+2k) ·
/// F(−n, d/2+s; n+2k; 1−4λ²) with s = ℓ + m. No cancellation occurs, unlike the
/// alternating expansion of [`bessel_sq_norm_sq_sum_alternating`].
pub fn bessel_sq_norm_sq_sum(q: &BoundQuery, lambda: f64) -> Result<f64> {
    check_scale("lambda", lambda)?;
    let k = half_gap(q)?;
    let (h, n) = (q.half_d(), q.n());
    let kf = k as f64;
    let w = 1.0 - 4.0 * lambda * lambda;
    let gam = n + 2.0 * kf;
    let ln_e: Vec<f64> = (0..=k)
        .map(|l| {
            let lf = l as f64;
            ln_binomial(kf, lf) + lng(0.5 + lf) - lng(0.5) - lng(n + 0.5 + lf) + lng(n + 0.5)
        })
        .collect();
    // the integrals depend on s = ℓ + m only
    let mut logs = Vec::with_capacity((k as usize + 1).pow(2));
    for sidx in 0..=2 * k {
        let sf = sidx as f64;
        let f = hyp2f1_scaled(-n, h + sf, gam, w)?;
        let lf = positive_ln(f, "F(-n, d/2 + s; n + 2k; 1 - 4 lambda^2)")?;
        let li = lng(h + sf) + lng(gam - h - sf) - lng(gam) + lf;
        for l in sidx.saturating_sub(k)..=sidx.min(k) {
            logs.push(ln_e[l as usize] + ln_e[(sidx - l) as usize] + li);
        }
    }
    Ok((ln_sum_exp(&logs) + ln_bessel_sq_prefactor(q, lambda)).exp())
}

fn half_gap(q: &BoundQuery) -> Result<u32> {
    q.half_integer_gap().ok_or_else(|| {
        Error::InvalidInput(format!("finite sum needs n - d/2 - 1/2 integer, got n = {}, d = {}", q.n(), q.d()))
    })
}

/// The same double sum with the alternating coefficients
/// (n)_ℓ (d/2 + 1/2 − n)_ℓ / ((n + 1/2)_ℓ ℓ!). Loses digits to cancellation once
/// k and λ grow; kept as an independent check for small k.
pub fn bessel_sq_norm_sq_sum_alternating(q: &BoundQuery, lambda: f64) -> Result<f64> {
    check_scale("lambda", lambda)?;
    let k = half_gap(q)?;
    let (h, n, nd) = (q.half_d(), q.n(), q.nd());
    let w = 1.0 - 4.0 * lambda * lambda;
    let coef: Vec<f64> = (0..=k)
        .map(|l| pochhammer(n, l) * pochhammer(h + 0.5 - n, l) / (pochhammer(n + 0.5, l) * pochhammer(1.0, l)))
        .collect();
    let mut total = Scaled { value: 0.0, ln_scale: 0.0 };
    for l in 0..=k {
        for m in 0..=k {
            let s = (l + m) as f64;
            let f = hyp2f1_scaled(-n, h + s, n + s, w)?;
            let g = lng(h + s) + lng(nd) - lng(n + s);
            total = total.add(Scaled { value: f.value * coef[l as usize] * coef[m as usize], ln_scale: f.ln_scale + g });
        }
    }
    let lv = positive_ln(total, "squared-kernel finite sum")?;
    Ok((lv + ln_bessel_sq_prefactor(q, lambda)).exp())
}

/// ‖g²_λnd‖²_n by quadrature of its u-integral. The integrand decays like
/// u^{-1-(n-d/2)}, so gaps below the slow-tail threshold are rejected; use
/// [`k_bb`] there.
pub fn bessel_sq_norm_sq_quadrature(q: &BoundQuery, lambda: f64, rel: f64) -> Result<f64> {
    check_scale("lambda", lambda)?;
    let (h, n) = (q.half_d(), q.n());
    let l4 = 4.0 * lambda * lambda;
    let slot = ErrorSlot::new();
    let f = |u: f64| {
        if u <= 0.0 {
            return 0.0;
        }
        let lf = slot.value(kernels::ln_f_nd(q, u));
        ((h - 1.0) * u.ln() + n * (l4 * u).ln_1p() + 2.0 * lf).exp()
    };
    let scale = 1f64.max(1.0 / (lambda * lambda));
    let r = quad::integrate_semiinf_scaled(f, 0.0, scale, TailSpec { decay_exponent: q.nd() }, rel)?;
    slot.check()?;
    if !r.value.is_finite() || r.abs_error_estimate > 1e3 * rel * r.value.abs() {
        return Err(Error::NotConverged { what: "squared-kernel norm quadrature", iterations: r.evaluations });
    }
    Ok(r.value * ln_bessel_sq_prefactor(q, lambda).exp())
}

/// ‖g²_λnd‖²_n: the finite sum when n − d/2 − 1/2 ∈ ℕ, quadrature otherwise.
pub fn bessel_sq_norm_sq(q: &BoundQuery, lambda: f64) -> Result<f64> {
    bessel_sq_norm_sq_with(q, lambda, Settings::default().quad_rel)
}

pub fn bessel_sq_norm_sq_with(q: &BoundQuery, lambda: f64, rel: f64) -> Result<f64> {
    if q.half_integer_gap().is_some() {
        bessel_sq_norm_sq_sum(q, lambda)
    } else {
        bessel_sq_norm_sq_quadrature(q, lambda, rel)
    }
}

/// 𝒦^B(λ) = ‖g²_λnd‖ / ‖g_λnd‖².
pub fn bessel_objective(q: &BoundQuery, lambda: f64, rel: f64) -> Result<f64> {
    Ok((0.5 * bessel_sq_norm_sq_with(q, lambda, rel)?.ln() - ln_bessel_norm_sq(q, lambda)?).exp())
}

fn maximize_lambda<F: Fn(f64) -> Result<f64>>(
    ln_objective: F,
    start: f64,
    s: &Settings,
    kind: BoundKind,
    rel_err: f64,
) -> Result<BoundResult> {
    let evals = AtomicUsize::new(0);
    let slot = ErrorSlot::new();
    let f = |l: f64| {
        evals.fetch_add(1, Ordering::Relaxed);
        slot.value(ln_objective(l))
    };
    let r = optim::maximize_1d(f, LAMBDA_RANGE.0, LAMBDA_RANGE.1, start, s.tol_x);
    slot.check()?;
    let r = r?;
    let value = r.max_value.exp();
    Ok(BoundResult {
        value,
        kind,
        argmax: Some(TrialParams::Lambda(r.argmax[0])),
        error_estimate: value * rel_err,
        diagnostics: Diagnostics {
            evaluations: evals.into_inner(),
            iterations: r.iterations,
            converged: r.converged,
            ..Default::default()
        },
    })
}

/// K^B = sup_λ 𝒦^B(λ).
pub fn k_b(q: &BoundQuery) -> Result<BoundResult> {
    k_b_with(q, &Settings::default())
}

pub fn k_b_with(q: &BoundQuery, s: &Settings) -> Result<BoundResult> {
    if q.nd() < MIN_BESSEL_GAP {
        return Err(Error::SlowTail { decay_exponent: q.nd() });
    }
    let exact = q.half_integer_gap().is_some();
    let rel = s.quad_rel;
    let obj = |l: f64| Ok(0.5 * bessel_sq_norm_sq_with(q, l, rel)?.ln() - ln_bessel_norm_sq(q, l)?);
    let mut r = maximize_lambda(obj, BESSEL_START, s, BoundKind::LowerBessel, if exact { KERNEL_REL_ERR } else { rel })?;
    if let Some(TrialParams::Lambda(l)) = r.argmax {
        // the search used the closed form; check it against the binomial sum at the optimum
        bessel_norm_sq(q, l)?;
        if q.integer_n().is_some() {
            r.diagnostics.notes.push("|g|^2 closed form and binomial sum agree at the optimum".into());
        }
    }
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinorantCoeffs {
    pub p_nd: f64,
    pub big_q_nd: f64,
    pub q_nd: f64,
}

impl MinorantCoeffs {
    /// Needs d/2 < n ≤ d/2 + 1/2.
    pub fn new(q: &BoundQuery) -> Result<Self> {
        check_bb_range(q)?;
        let (h, n, nd) = (q.half_d(), q.n(), q.nd());
        let p_nd = (lng(n + 0.5) + lng(1.0 + nd) - 0.5 * PI.ln() - lng(h + 2.0 * nd)).exp();
        // Γ(1/2 + d/2 − n) has a pole at n = d/2 + 1/2, where Q vanishes
        let big_q_nd = (lng(n + 0.5) + lng(1.0 - nd) - lng(n)).exp() * rgamma(0.5 - nd);
        let q_nd = if p_nd >= big_q_nd { big_q_nd } else { p_nd - nd };
        Ok(MinorantCoeffs { p_nd, big_q_nd, q_nd })
    }
}

fn check_bb_range(q: &BoundQuery) -> Result<()> {
    if q.closed_form_upper() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "the minorant needs d/2 < n <= d/2 + 1/2, got n = {}, d = {}",
            q.n(),
            q.d()
        )))
    }
}

/// 𝒢_nd(λ), the lower estimate of ‖g²_λnd‖²_n valid for d/2 < n ≤ d/2 + 1/2.
pub fn g_minorant(q: &BoundQuery, lambda: f64) -> Result<f64> {
    check_scale("lambda", lambda)?;
    let c = MinorantCoeffs::new(q)?;
    let (h, n, nd) = (q.half_d(), q.n(), q.nd());
    let w = 1.0 - 4.0 * lambda * lambda;
    let term = |coef: f64, ln_gamma_part: f64, c3: f64| -> Result<Scaled> {
        let f = hyp2f1_scaled(-n, h, c3, w)?;
        Ok(Scaled { value: f.value * coef, ln_scale: f.ln_scale + ln_gamma_part })
    };
    let t1 = term(c.p_nd * c.p_nd, lng(1.0 + nd) - lng(n), n)?;
    let t2 = term(-c.p_nd * c.big_q_nd, lng(1.0 + 2.0 * nd) - lng(h + 2.0 * nd), 2.0 * n - h)?;
    let t3 = term(c.q_nd * c.q_nd / 3.0, lng(1.0 + 3.0 * nd) - lng(h + 3.0 * nd), 3.0 * n - q.d() as f64)?;
    let bracket = t1.add(t2).add(t3);
    let ln_pre = h * PI.ln() + 2.0 * lng(2.0 * n - h) - 3.0 * nd.ln() - 2.0 * lng(2.0 * n) - q.d() as f64 * lambda.ln();
    Ok(bracket.mul_exp(ln_pre).to_f64())
}

/// K^BB = sup_λ √𝒢_nd(λ) / ‖g_λnd‖².
pub fn k_bb(q: &BoundQuery) -> Result<BoundResult> {
    k_bb_with(q, &Settings::default())
}

pub fn k_bb_with(q: &BoundQuery, s: &Settings) -> Result<BoundResult> {
    check_bb_range(q)?;
    let obj = |l: f64| {
        let g = g_minorant(q, l)?;
        if g <= 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(0.5 * g.ln() - ln_bessel_norm_sq(q, l)?)
    };
    maximize_lambda(obj, BB_START, s, BoundKind::LowerBesselBb, KERNEL_REL_ERR)
}

// ---------------------------------------------------------------------------
// Fourier trial functions f_pσd

/// ln ‖f_pσd‖²_n by the triple binomial sum, integer n only. All terms are
/// positive, so the sum is taken in log space without cancellation.
pub fn ln_fourier_norm_sq_sum(q: &BoundQuery, p: f64, sigma: f64) -> Result<f64> {
    check_scale("p", p)?;
    check_scale("sigma", sigma)?;
    let m = q.integer_n().ok_or_else(|| Error::InvalidInput(format!("finite sum needs integer n, got {}", q.n())))?
        as usize;
    let h = q.half_d();
    let mut ln_fact = vec![0.0; 2 * m + 1];
    for k in 1..=2 * m {
        ln_fact[k] = ln_fact[k - 1] + (k as f64).ln();
    }
    let ln_choose = |a: usize, b: usize| ln_fact[a] - ln_fact[b] - ln_fact[a - b];
    // (2g − 1)!!/2^g = Γ(g + 1/2)/√π
    let ln_semi: Vec<f64> = (0..=m).map(|g| lng(g as f64 + 0.5) - 0.5 * PI.ln()).collect();
    let a = h - 0.5;
    let ln_poch: Vec<f64> = (0..=m)
        .map(|k| if a == 0.0 { if k == 0 { 0.0 } else { f64::NEG_INFINITY } } else { lng(a + k as f64) - lng(a) })
        .collect();
    let (lp, ls) = (p.ln(), sigma.ln());
    let mut acc = LogAcc::new();
    for l in 0..=m {
        let bl = ln_choose(m, l);
        for j in 0..=l {
            let bj = bl + ln_choose(l, j) + ln_poch[l - j];
            if bj == f64::NEG_INFINITY {
                continue;
            }
            for g in 0..=j {
                let t = bj
                    + ln_choose(2 * j, 2 * g)
                    + ln_semi[g]
                    + 2.0 * (j - g) as f64 * lp
                    + (l + g) as f64 * ls
                    - j as f64 * ls;
                acc.push(t);
            }
        }
    }
    Ok(h * PI.ln() - h * ls + acc.ln())
}

pub fn fourier_norm_sq_sum(q: &BoundQuery, p: f64, sigma: f64) -> Result<f64> {
    Ok(ln_fourier_norm_sq_sum(q, p, sigma)?.exp())
}

/// ln ‖f_pσd‖²_n by quadrature of its radial integral, with the scaled
/// e^{-x} I_{d/2-1}(x) so that the exponentials combine into e^{-(ρ-p)²/σ}.
pub fn ln_fourier_norm_sq_quadrature(q: &BoundQuery, p: f64, sigma: f64, rel: f64) -> Result<f64> {
    check_scale("p", p)?;
    check_scale("sigma", sigma)?;
    let (h, n) = (q.half_d(), q.n());
    let nu = h - 1.0;
    let slot = ErrorSlot::new();
    let phase = |r: f64| -> f64 {
        if r <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let x = 2.0 * p * r / sigma;
        if x <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let i = slot.value(bessel_i_scaled(nu, x));
        h * r.ln() + n * (r * r).ln_1p() - (r - p) * (r - p) / sigma + i.ln()
    };
    // the integrand peaks below p + nσ plus a few widths
    let width = sigma.sqrt();
    let reach = p + n * sigma + 10.0 * width + ((2.0 * n + q.d() as f64) * sigma).sqrt();
    const SCAN: usize = 400;
    let xs: Vec<f64> = (0..SCAN).map(|i| reach * (i as f64 + 0.5) / SCAN as f64).collect();
    let (ib, _) = xs
        .iter()
        .map(|&x| phase(x))
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    let lo = if ib == 0 { xs[0] * 1e-6 } else { xs[ib - 1] };
    let hi = if ib + 1 == SCAN { reach * 1.01 } else { xs[ib + 1] };
    let peak = optim::maximize_1d(phase, lo, hi, xs[ib], 1e-10).map(|r| r.argmax[0]).unwrap_or(xs[ib]);
    let top = phase(peak);
    if !top.is_finite() {
        slot.check()?;
        return Err(Error::Domain(format!("Fourier norm integrand not finite at its peak (p = {p}, sigma = {sigma})")));
    }
    let g = |r: f64| (phase(r) - top).exp();
    let left = quad::integrate_finite_with(g, 0.0, peak, rel, 0.0, quad::DEFAULT_MAX_EVALS / 2);
    // extend the right end until the integrand is below e^{-60} of its peak
    let mut step = width.max(1e-3 * peak);
    while phase(peak + step) - top > -60.0 {
        step *= 2.0;
        if step > 1e8 {
            return Err(Error::NotConverged { what: "Fourier norm tail search", iterations: 0 });
        }
    }
    let right = quad::integrate_adaptive(g, peak, peak + step, rel, 0.0, quad::DEFAULT_MAX_EVALS / 2);
    slot.check()?;
    let total = left.value + right.value;
    if !(left.converged && right.converged) && left.abs_error_estimate + right.abs_error_estimate > 1e3 * rel * total {
        return Err(Error::NotConverged { what: "Fourier norm quadrature", iterations: left.evaluations + right.evaluations });
    }
    let ln_pre = 2f64.ln() + h * PI.ln() - (h + 1.0) * sigma.ln() - (h - 1.0) * p.ln();
    Ok(ln_pre + top + total.ln())
}

pub fn fourier_norm_sq_quadrature(q: &BoundQuery, p: f64, sigma: f64, rel: f64) -> Result<f64> {
    Ok(ln_fourier_norm_sq_quadrature(q, p, sigma, rel)?.exp())
}

/// ‖f_pσd‖²_n. For integer n both the finite sum and the quadrature are
/// evaluated and must agree to [`FOURIER_NORM_AGREEMENT`].
pub fn fourier_norm_sq(q: &BoundQuery, p: f64, sigma: f64) -> Result<f64> {
    let quad_v = ln_fourier_norm_sq_quadrature(q, p, sigma, CHECK_QUAD_REL)?;
    if q.integer_n().is_some() {
        let sum_v = ln_fourier_norm_sq_sum(q, p, sigma)?;
        if (quad_v - sum_v).exp_m1().abs() > FOURIER_NORM_AGREEMENT {
            return Err(Error::CrossCheck(format!(
                "|f|^2 quadrature vs finite sum differ by {:e} at n = {}, d = {}, p = {p}, sigma = {sigma}",
                (quad_v - sum_v).exp_m1(),
                q.n(),
                q.d()
            )));
        }
        return Ok(sum_v.exp());
    }
    Ok(quad_v.exp())
}

/// Fast ln ‖f‖² used inside searches: the finite sum for integer n, else quadrature.
fn ln_fourier_norm_fast(q: &BoundQuery, p: f64, sigma: f64, rel: f64) -> Result<f64> {
    if q.integer_n().is_some() {
        ln_fourier_norm_sq_sum(q, p, sigma)
    } else {
        ln_fourier_norm_sq_quadrature(q, p, sigma, rel)
    }
}

fn ln_fourier_objective(q: &BoundQuery, p: f64, sigma: f64, rel: f64) -> Result<f64> {
    Ok(0.5 * ln_fourier_norm_fast(q, 2.0 * p, 2.0 * sigma, rel)? - ln_fourier_norm_fast(q, p, sigma, rel)?)
}

/// 𝒦^F(p, σ) = ‖f_{2p,2σ,d}‖ / ‖f_pσd‖².
pub fn fourier_objective(q: &BoundQuery, p: f64, sigma: f64) -> Result<f64> {
    Ok(ln_fourier_objective(q, p, sigma, Settings::default().quad_rel)?.exp())
}

/// The fixed point (1/(2√2), 3/(4n)) of K^FF.
pub fn ff_point(q: &BoundQuery) -> (f64, f64) {
    (1.0 / (2.0 * 2f64.sqrt()), 0.75 / q.n())
}

/// Multistart points of the K^F search.
pub fn fourier_starts(q: &BoundQuery) -> Vec<(f64, f64)> {
    vec![ff_point(q), (0.4, 1.0 / q.n()), (0.5, 1.0 / q.nd())]
}

fn fourier_error(q: &BoundQuery, value: f64, rel: f64) -> f64 {
    if q.integer_n().is_some() {
        value * KERNEL_REL_ERR
    } else {
        value * rel
    }
}

/// K^F = sup over (p, σ) of 𝒦^F.
pub fn k_f(q: &BoundQuery) -> Result<BoundResult> {
    k_f_with(q, &Settings::default())
}

pub fn k_f_with(q: &BoundQuery, s: &Settings) -> Result<BoundResult> {
    let evals = AtomicUsize::new(0);
    let slot = ErrorSlot::new();
    let rel = s.quad_rel;
    let f = |p: f64, sigma: f64| {
        evals.fetch_add(1, Ordering::Relaxed);
        slot.value(ln_fourier_objective(q, p, sigma, rel))
    };
    let r = optim::maximize_2d_with(f, &fourier_starts(q), s.simplex_tol, s.exec);
    slot.check()?;
    let r = r?;
    let (p, sigma) = (r.argmax[0], r.argmax[1]);
    let mut notes = Vec::new();
    if q.integer_n().is_some() {
        // the search used the finite sum; confirm both norms against quadrature
        fourier_norm_sq(q, p, sigma)?;
        fourier_norm_sq(q, 2.0 * p, 2.0 * sigma)?;
        notes.push("finite sum and quadrature agree at the optimum".into());
    }
    let value = r.max_value.exp();
    Ok(BoundResult {
        value,
        kind: BoundKind::LowerFourier,
        argmax: Some(TrialParams::PSigma { p, sigma }),
        error_estimate: fourier_error(q, value, rel),
        diagnostics: Diagnostics {
            evaluations: evals.into_inner(),
            iterations: r.iterations,
            converged: r.converged,
            at_boundary: false,
            notes,
        },
    })
}

/// K^FF = 𝒦^F(1/(2√2), 3/(4n)).
pub fn k_ff(q: &BoundQuery) -> Result<BoundResult> {
    k_ff_with(q, &Settings::default())
}

pub fn k_ff_with(q: &BoundQuery, s: &Settings) -> Result<BoundResult> {
    let (p, sigma) = ff_point(q);
    let value = ln_fourier_objective(q, p, sigma, s.quad_rel)?.exp();
    Ok(BoundResult {
        value,
        kind: BoundKind::LowerFourierFf,
        argmax: Some(TrialParams::PSigma { p, sigma }),
        error_estimate: fourier_error(q, value, s.quad_rel),
        diagnostics: Diagnostics { evaluations: 2, converged: true, ..Default::default() },
    })
}

// ---------------------------------------------------------------------------
// selection and tables

/// Lower-bound methods evaluated for `q`.
pub fn lower_candidates(q: &BoundQuery) -> Vec<BoundKind> {
    let nd = q.nd();
    let fourier = if q.n() <= FOURIER_SEARCH_UP_TO_N { BoundKind::LowerFourier } else { BoundKind::LowerFourierFf };
    if nd < BB_ONLY_BELOW {
        vec![BoundKind::LowerBesselBb]
    } else if nd <= BESSEL_UP_TO_GAP {
        vec![BoundKind::LowerBessel, fourier]
    } else {
        vec![fourier]
    }
}

pub fn lower_bound(q: &BoundQuery, kind: BoundKind, s: &Settings) -> Result<BoundResult> {
    match kind {
        BoundKind::LowerBessel => k_b_with(q, s),
        BoundKind::LowerBesselBb => k_bb_with(q, s),
        BoundKind::LowerFourier => k_f_with(q, s),
        BoundKind::LowerFourierFf => k_ff_with(q, s),
        other => Err(Error::InvalidInput(format!("{other:?} is not a lower bound"))),
    }
}

/// The largest of the applicable lower bounds.
pub fn best_lower(q: &BoundQuery) -> Result<BoundResult> {
    best_lower_with(q, &Settings::default())
}

pub fn best_lower_with(q: &BoundQuery, s: &Settings) -> Result<BoundResult> {
    let mut best: Option<BoundResult> = None;
    let mut notes = Vec::new();
    let mut first_err = None;
    for kind in lower_candidates(q) {
        match lower_bound(q, kind, s) {
            Ok(r) => {
                notes.push(format!("{} = {:.6e}", kind.tag(), r.value));
                if best.as_ref().map_or(true, |b| r.value > b.value) {
                    best = Some(r);
                }
            }
            Err(e) => {
                notes.push(format!("{} failed: {e}", kind.tag()));
                first_err.get_or_insert(e);
            }
        }
    }
    match best {
        Some(mut b) => {
            b.diagnostics.notes.extend(notes);
            Ok(b)
        }
        None => Err(first_err.expect("at least one candidate")),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sandwich {
    pub upper: BoundResult,
    pub lower: BoundResult,
    pub ratio: f64,
}

pub fn sandwich(q: &BoundQuery, s: &Settings) -> Result<Sandwich> {
    let upper = k_plus_with(q, None, s)?;
    let lower = best_lower_with(q, s)?;
    Ok(Sandwich { ratio: lower.value / upper.value, upper, lower })
}

/// One row of the bound table for dimension d, in column order.
///
/// K⁺ is computed along the row with each search warm-started at the previous
/// maximizer; the lower bounds run concurrently. A failing cell does not stop
/// the others.
pub fn table1(d: u32, s: &Settings) -> Result<Vec<(BoundQuery, Result<Sandwich>)>> {
    let queries = golden::table1_queries(d)?;
    let mut warm = None;
    let uppers: Vec<Result<BoundResult>> = queries
        .iter()
        .map(|q| {
            let r = k_plus_with(q, warm, s);
            if let Ok(BoundResult { argmax: Some(TrialParams::U(u)), .. }) = &r {
                warm = Some(*u);
            }
            r
        })
        .collect();
    let lowers = par::map(s.exec, &queries, |q| best_lower_with(q, s));
    Ok(queries
        .into_iter()
        .zip(uppers.into_iter().zip(lowers))
        .map(|(q, (u, l))| {
            let cell = u.and_then(|upper| l.map(|lower| Sandwich { ratio: lower.value / upper.value, upper, lower }));
            (q, cell)
        })
        .collect())
}

/// Z_d and Θ_d for d = 1..=d_max on the default grid.
pub fn table2(d_max: u32, s: &Settings) -> Vec<Result<ElementaryBoundData>> {
    let grid = elementary_grid();
    (1..=d_max).map(|d| elementary_bound_data(d, &grid, s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    fn qr(a: i64, b: i64, d: u32) -> BoundQuery {
        BoundQuery::from_ratio(Ratio::new(a, b), d).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn k_plus_examples() {
        let r = k_plus(&qr(2, 1, 2)).unwrap();
        assert!(close(r.value, 0.428, 0.0005), "{r:?}");
        let Some(TrialParams::U(u)) = r.argmax else { panic!() };
        assert!(close(u, 6.84, 0.01), "u = {u}");

        let r = k_plus(&qr(5, 2, 2)).unwrap();
        let Some(TrialParams::U(u)) = r.argmax else { panic!() };
        assert!(close(u, 3.2, 1e-6), "u = {u}");
        let s_max = 13.8f64.powf(2.5) / (96.0 * PI) * 9.2 / 4.2f64.powf(3.5);
        assert!(close(r.value, s_max.sqrt(), 1e-12), "{}", r.value);

        let r = k_plus(&qr(1, 1, 1)).unwrap();
        assert!(r.diagnostics.at_boundary && r.argmax.is_none());
        assert!(close(r.value, 1.0, 0.005));
    }

    #[test]
    fn boundary_regime_is_the_limit() {
        for q in [qr(1, 1, 1), qr(3, 2, 2), BoundQuery::from_gap(3, 0.3).unwrap()] {
            assert_eq!(k_plus(&q).unwrap().value, kernels::s_nd_limit_inf(&q).sqrt());
        }
    }

    #[test]
    fn asymptotic_constants() {
        let c = AsympConstants::new(1);
        assert!(close(c.m_d, 1.0 / PI.sqrt(), 1e-15));
        assert!(close(c.n_d, -(2f64.ln()), 1e-14));
        let q = BoundQuery::from_gap(1, 1e-4).unwrap();
        assert!(close(k_plus_asymp_small(&q) / 100.0, c.m_d * (1.0 - c.n_d * 1e-4), 1e-14));
        let q = qr(241, 2, 1);
        let ratio = k_plus_asymp_large(&q) / 6.63e6;
        assert!(ratio > 0.9 && ratio < 1.1, "{ratio}");
    }

    #[test]
    fn bessel_norm_paths() {
        let q = qr(2, 1, 2);
        let a = ln_bessel_norm_sq(&q, 2.0).unwrap().exp();
        let b = bessel_norm_sq_sum(&q, 2.0).unwrap();
        assert!(rel_diff(a, b) < 1e-12, "{a} {b}");
        // λ = 1: F(−n, d/2; n; 0) = 1
        let q = qr(3, 2, 1);
        let v = bessel_norm_sq(&q, 1.0).unwrap();
        let expect = (0.5 * PI.ln() + lng(2.0) - lng(1.5)).exp();
        assert!(rel_diff(v, expect) < 1e-14);
    }

    #[test]
    fn bessel_norm_matches_defining_integral() {
        // ‖g_λ‖² = π^{d/2}/(Γ(d/2) λ^d) ∫ u^{d/2−1}(1 + λ²u)^n/(1 + u)^{2n} du
        let q = qr(3, 2, 1);
        let l: f64 = 0.5;
        let f = |u: f64| u.powf(-0.5) * (1.0 + l * l * u).powf(1.5) / (1.0 + u).powi(3);
        let i = quad::integrate_semiinf(f, 0.0, TailSpec { decay_exponent: 1.0 }, 1e-12).unwrap().value;
        let direct = PI.sqrt() / (lng(0.5).exp() * l) * i;
        assert!(rel_diff(bessel_norm_sq(&q, l).unwrap(), direct) < 1e-8);
    }

    #[test]
    fn squared_kernel_paths_agree() {
        let q = qr(5, 2, 2);
        let a = bessel_sq_norm_sq_sum(&q, 1.0).unwrap();
        let b = bessel_sq_norm_sq_quadrature(&q, 1.0, 1e-11).unwrap();
        assert!(rel_diff(a, b) < 1e-7, "{a} {b}");
        for &(num, d, l) in &[(5i64, 2u32, 0.3f64), (7, 4, 1.7), (9, 2, 0.8)] {
            let q = qr(num, 2, d);
            let a = bessel_sq_norm_sq_sum(&q, l).unwrap();
            let b = bessel_sq_norm_sq_sum_alternating(&q, l).unwrap();
            assert!(rel_diff(a, b) < 1e-12, "{a} {b}");
        }
        // high-precision quadrature of the u-integral, d = 4, n = 29/2, λ = 5
        let a = bessel_sq_norm_sq_sum(&qr(29, 2, 4), 5.0).unwrap();
        assert!(rel_diff(a, 24_064_086.231_831_345) < 1e-12, "{a}");
    }

    #[test]
    fn k_b_example() {
        let r = k_b(&qr(3, 2, 2)).unwrap();
        let Some(TrialParams::Lambda(l)) = r.argmax else { panic!() };
        assert!(close(l, 1.38, 0.01), "lambda = {l}");
        assert!(close(r.value, 0.865 * 0.565, 0.002), "{}", r.value);
    }

    #[test]
    fn minorant_coefficients() {
        let c = MinorantCoeffs::new(&qr(3, 2, 2)).unwrap();
        assert_eq!(c.big_q_nd, 0.0);
        assert_eq!(c.q_nd, 0.0);
        assert!(MinorantCoeffs::new(&qr(2, 1, 2)).is_err());
    }

    #[test]
    fn k_bb_ratios() {
        let q = BoundQuery::from_gap(2, 1e-4).unwrap();
        let ratio = k_bb(&q).unwrap().value / k_plus(&q).unwrap().value;
        assert!(close(ratio, 0.816, 0.0015), "{ratio}");
        let q = BoundQuery::from_gap(1, 0.1).unwrap();
        let ratio = k_bb(&q).unwrap().value / k_plus(&q).unwrap().value;
        assert!(close(ratio, 0.824, 0.0015), "{ratio}");
    }

    #[test]
    fn fourier_norm_paths() {
        let q = qr(2, 1, 2);
        let a = fourier_norm_sq_sum(&q, 0.511, 1.05).unwrap();
        let b = fourier_norm_sq_quadrature(&q, 0.511, 1.05, 1e-12).unwrap();
        assert!(rel_diff(a, b) < 1e-9, "{a} {b}");
        // n = 0 would leave only the Gaussian norm π^{d/2} σ^{-d/2}; n = 1, d = 1 adds σ/2 + p²
        let q = qr(1, 1, 1);
        let v = fourier_norm_sq_sum(&q, 0.7, 0.3).unwrap();
        let expect = (PI / 0.3).sqrt() * (1.0 + 0.49 + 0.15);
        assert!(rel_diff(v, expect) < 1e-13, "{v} {expect}");
    }

    #[test]
    fn fourier_norm_matches_one_dimensional_integral() {
        let q = qr(3, 1, 1);
        let (p, s) = (1.0f64, 2.0f64);
        let f = |k: f64| (1.0 + k * k).powi(3) * (-(k - p) * (k - p) / s).exp() / s;
        let i = quad::integrate_adaptive(f, -60.0, 60.0, 1e-13, 0.0, 1_000_000).value;
        assert!(rel_diff(fourier_norm_sq(&q, p, s).unwrap(), i) < 1e-10);
    }

    #[test]
    fn k_f_example() {
        let r = k_f(&qr(2, 1, 2)).unwrap();
        let Some(TrialParams::PSigma { p, sigma }) = r.argmax else { panic!() };
        assert!(close(p, 0.511, 0.005) && close(sigma, 1.05, 0.02), "{p} {sigma}");
    }

    #[test]
    fn rounding_up() {
        assert_eq!(round_up_3(0.0), 0.0);
        assert!(close(round_up_3(0.10166), 0.102, 1e-15));
        assert!(close(round_up_3(0.0782), 0.0782, 1e-15));
        assert!(close(round_up_3(0.078201), 0.0783, 1e-15));
        assert!(close(round_up_3(1.2920), 1.30, 1e-15));
    }

    #[test]
    fn elementary_bound_small_d() {
        let e = elementary_bound_data(2, &elementary_grid(), &Settings::default()).unwrap();
        assert!(close(e.z_d, 0.00925, 0.001), "{e:?}");
        assert!(e.z_d_rounded >= e.z_d && e.theta_d >= 1.0);
        for p in &e.samples {
            assert!(p.z_nd <= e.z_d + 1e-12);
            let q = BoundQuery::from_gap(2, p.gap).unwrap();
            assert!(k_plus_plus(&q, e.z_d_rounded).value >= p.k_plus * (1.0 - 1e-12));
        }
        assert!(close(e.theta_d, 1.039, 0.002), "{}", e.theta_d);
    }

    #[test]
    fn routing() {
        assert_eq!(lower_candidates(&BoundQuery::from_gap(2, 0.1).unwrap()), vec![BoundKind::LowerBesselBb]);
        assert_eq!(lower_candidates(&qr(2, 1, 2)), vec![BoundKind::LowerBessel, BoundKind::LowerFourier]);
        assert_eq!(lower_candidates(&qr(121, 2, 1)), vec![BoundKind::LowerFourierFf]);
        assert_eq!(best_lower(&qr(2, 1, 2)).unwrap().kind, BoundKind::LowerBessel);
    }
}

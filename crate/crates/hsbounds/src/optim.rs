//! Derivative-free maximization: bracketed Brent search in 1D, Nelder–Mead with
//! multistart in 2D.

use crate::error::{Error, Result};
use crate::par::{self, Execution};
use serde::Serialize;

/// Largest abscissa the 1D bracket expansion will try.
pub const BRACKET_CAP: f64 = 1e12;
pub const DEFAULT_TOL_X: f64 = 1e-8;
const BRENT_MAX_ITER: usize = 500;
const SIMPLEX_MAX_ITER: usize = 500;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaxResult {
    pub argmax: Vec<f64>,
    pub max_value: f64,
    pub iterations: usize,
    pub converged: bool,
    /// 1D: successive brackets (lo, mid, hi). 2D: best point of each start.
    pub history: Vec<[f64; 3]>,
}

/// NaN and ±inf from the objective never win.
fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// Maximize a unimodal `f` on [lo, hi].
///
/// Steps away from `x0` with doubling step sizes until the function turns down,
/// then refines with Brent's golden-section/parabolic method. If `f` is still
/// increasing at `hi` (or `lo`), returns [`Error::BracketFailure`] with the
/// boundary, so the caller can use its limit value. `hi` is clamped to
/// [`BRACKET_CAP`].
pub fn maximize_1d<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, x0: f64, tol_x: f64) -> Result<MaxResult> {
    let hi = hi.min(BRACKET_CAP);
    if !(lo < hi) || !(x0 >= lo && x0 <= hi) {
        return Err(Error::InvalidInput(format!("need lo <= x0 <= hi, got {lo}, {x0}, {hi}")));
    }
    let g = |x: f64| sanitize(f(x));
    let mut history = Vec::new();
    let step0 = (0.1 * x0.abs()).max(tol_x * 100.0).max(1e-6).min(0.25 * (hi - lo));

    let mut b = x0;
    let mut fb = g(b);
    let up = (b + step0).min(hi);
    let fup = g(up);
    let down = (b - step0).max(lo);
    let fdown = g(down);

    let (a, c);
    if fup > fb {
        // march upward
        let mut step = step0;
        let (mut prev, mut x, mut fx) = (b, up, fup);
        loop {
            history.push([prev, x, x]);
            if x >= hi {
                return Err(Error::BracketFailure { at: hi });
            }
            step *= 2.0;
            let nx = (x + step).min(hi);
            let fnx = g(nx);
            if fnx < fx {
                a = prev;
                b = x;
                fb = fx;
                c = nx;
                break;
            }
            prev = x;
            x = nx;
            fx = fnx;
        }
    } else if fdown > fb {
        let mut step = step0;
        let (mut prev, mut x, mut fx) = (b, down, fdown);
        loop {
            history.push([x, x, prev]);
            if x <= lo {
                return Err(Error::BracketFailure { at: lo });
            }
            step *= 2.0;
            let nx = (x - step).max(lo);
            let fnx = g(nx);
            if fnx < fx {
                a = nx;
                b = x;
                fb = fx;
                c = prev;
                break;
            }
            prev = x;
            x = nx;
            fx = fnx;
        }
    } else {
        a = down;
        c = up;
    }
    history.push([a, b, c]);

    let (x, fx, iterations, converged) = brent(&g, a, b, fb, c, tol_x, &mut history);
    Ok(MaxResult { argmax: vec![x], max_value: fx, iterations, converged, history })
}

/// Brent's method on the bracket a < b < c with f(b) ≥ f(a), f(c).
fn brent<G: Fn(f64) -> f64>(
    g: &G,
    mut a: f64,
    b: f64,
    fb: f64,
    mut c: f64,
    tol_x: f64,
    history: &mut Vec<[f64; 3]>,
) -> (f64, f64, usize, bool) {
    const CGOLD: f64 = 0.381_966_011_250_105_1;
    let (mut x, mut w, mut v) = (b, b, b);
    let (mut fx, mut fw, mut fv) = (fb, fb, fb);
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    for iter in 0..BRENT_MAX_ITER {
        let xm = 0.5 * (a + c);
        let tol1 = 0.25 * tol_x * x.abs().max(1.0);
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (c - a) {
            return (x, fx, iter, true);
        }
        let mut golden = true;
        if e.abs() > tol1 {
            // parabola through x, w, v (maximizing f is minimizing -f)
            let r = (x - w) * (fv - fx);
            let mut q = (x - v) * (fw - fx);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            e = d;
            if !(p.abs() >= (0.5 * q * etemp).abs() || p <= q * (a - x) || p >= q * (c - x)) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || c - u < tol2 {
                    d = tol1.copysign(xm - x);
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { c - x };
            d = CGOLD * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = g(u);
        if fu >= fx {
            if u >= x {
                a = x;
            } else {
                c = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                c = u;
            }
            if fu >= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu >= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
        history.push([a, x, c]);
    }
    (x, fx, BRENT_MAX_ITER, false)
}

/// Maximize `f` over the positive quadrant from each start; see [`maximize_2d_with`].
pub fn maximize_2d<F: Fn(f64, f64) -> f64 + Sync>(f: F, starts: &[(f64, f64)], tol: f64) -> Result<MaxResult> {
    maximize_2d_with(f, starts, tol, Execution::default())
}

/// Nelder–Mead in (ln p, ln σ) from every start, run through `exec`.
///
/// `tol` bounds the final simplex size in log coordinates. The best start wins;
/// exact ties go to the lexicographically smallest argmax. A run that exhausts its
/// budget still reports its best point, with `converged = false`.
pub fn maximize_2d_with<F: Fn(f64, f64) -> f64 + Sync>(
    f: F,
    starts: &[(f64, f64)],
    tol: f64,
    exec: Execution,
) -> Result<MaxResult> {
    if starts.is_empty() {
        return Err(Error::InvalidInput("maximize_2d needs at least one start".into()));
    }
    if starts.iter().any(|&(p, s)| !(p > 0.0 && s > 0.0)) {
        return Err(Error::InvalidInput("maximize_2d starts must lie in the positive quadrant".into()));
    }
    let g = |y: [f64; 2]| sanitize(f(y[0].exp(), y[1].exp()));
    let runs = par::map(exec, starts, |&(p, s)| {
        let first = nelder_mead(&g, [p.ln(), s.ln()], 0.2, tol);
        // one restart around the result guards against a collapsed simplex
        let second = nelder_mead(&g, first.0, 0.05, tol);
        let best = if second.1 >= first.1 { second.0 } else { first.0 };
        let value = first.1.max(second.1);
        (best, value, first.2 + second.2, first.3 && second.3)
    });
    let mut order: Vec<usize> = (0..runs.len()).collect();
    order.sort_by(|&i, &j| {
        let (ri, rj) = (&runs[i], &runs[j]);
        rj.1.partial_cmp(&ri.1)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(ri.0[0].partial_cmp(&rj.0[0]).unwrap_or(std::cmp::Ordering::Equal))
            .then(ri.0[1].partial_cmp(&rj.0[1]).unwrap_or(std::cmp::Ordering::Equal))
    });
    let best = &runs[order[0]];
    let history = runs.iter().map(|r| [r.0[0].exp(), r.0[1].exp(), r.1]).collect();
    Ok(MaxResult {
        argmax: vec![best.0[0].exp(), best.0[1].exp()],
        max_value: best.1,
        iterations: runs.iter().map(|r| r.2).sum(),
        converged: best.3,
        history,
    })
}

/// Returns (best point, value, iterations, converged).
fn nelder_mead<G: Fn([f64; 2]) -> f64>(g: &G, x0: [f64; 2], step: f64, tol: f64) -> ([f64; 2], f64, usize, bool) {
    let mut pts = [x0, [x0[0] + step, x0[1]], [x0[0], x0[1] + step]];
    let mut vals = [g(pts[0]), g(pts[1]), g(pts[2])];
    let lerp = |a: [f64; 2], b: [f64; 2], t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
    for iter in 0..SIMPLEX_MAX_ITER {
        // sort descending by value: 0 best, 2 worst
        let mut idx = [0, 1, 2];
        idx.sort_by(|&i, &j| vals[j].partial_cmp(&vals[i]).unwrap_or(std::cmp::Ordering::Equal));
        pts = [pts[idx[0]], pts[idx[1]], pts[idx[2]]];
        vals = [vals[idx[0]], vals[idx[1]], vals[idx[2]]];

        let size = (1..3)
            .map(|k| (pts[k][0] - pts[0][0]).abs().max((pts[k][1] - pts[0][1]).abs()))
            .fold(0.0, f64::max);
        let spread = (vals[0] - vals[2]).abs();
        if size <= tol && (spread <= 1e-13 * vals[0].abs() || vals[2] == vals[0]) {
            return (pts[0], vals[0], iter, true);
        }
        if size <= 1e-3 * tol {
            // flat objective at working precision
            return (pts[0], vals[0], iter, true);
        }

        let centroid = lerp(pts[0], pts[1], 0.5);
        let xr = lerp(centroid, pts[2], -1.0);
        let fr = g(xr);
        if fr > vals[0] {
            let xe = lerp(centroid, pts[2], -2.0);
            let fe = g(xe);
            if fe > fr {
                pts[2] = xe;
                vals[2] = fe;
            } else {
                pts[2] = xr;
                vals[2] = fr;
            }
        } else if fr > vals[1] {
            pts[2] = xr;
            vals[2] = fr;
        } else {
            let (xc, fc) = if fr > vals[2] {
                let xc = lerp(centroid, pts[2], -0.5);
                (xc, g(xc))
            } else {
                let xc = lerp(centroid, pts[2], 0.5);
                (xc, g(xc))
            };
            if fc > vals[2].max(fr) {
                pts[2] = xc;
                vals[2] = fc;
            } else {
                // shrink toward the best point
                for k in 1..3 {
                    pts[k] = lerp(pts[0], pts[k], 0.5);
                    vals[k] = g(pts[k]);
                }
            }
        }
    }
    let mut best = 0;
    for k in 1..3 {
        if vals[k] > vals[best] {
            best = k;
        }
    }
    (pts[best], vals[best], SIMPLEX_MAX_ITER, false)
}

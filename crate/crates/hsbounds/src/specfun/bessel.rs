use super::gamma::{ln_gamma_signed, rgamma};
use crate::error::{Error, Result};
use std::f64::consts::PI;

fn check_x(func: &'static str, x: f64) -> Result<()> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("{func} needs finite x >= 0, got {x}")));
    }
    Ok(())
}

/// Power series Σ (sign·x²/4)^k / (k! Γ(k+ν+1)) · (x/2)^ν.
fn bessel_series(nu: f64, x: f64, sign: f64) -> f64 {
    let q = sign * 0.25 * x * x;
    let mut term = rgamma(nu + 1.0);
    let mut sum = term;
    for k in 1..500 {
        let kf = k as f64;
        term *= q / (kf * (nu + kf));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum * (0.5 * x).powf(nu)
}

/// Bessel function of the first kind J_ν(x), ν ≥ -1/2, x ≥ 0.
pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    check_x("bessel_j", x)?;
    if nu < -0.5 {
        return Err(Error::Domain(format!("bessel_j needs nu >= -1/2, got {nu}")));
    }
    if x == 0.0 {
        return Ok(if nu == 0.0 {
            1.0
        } else if nu > 0.0 {
            0.0
        } else {
            f64::INFINITY
        });
    }
    if x <= SERIES_J_MAX_X {
        return Ok(bessel_series(nu, x, -1.0));
    }
    if x >= HANKEL_J_MIN_X + nu * nu {
        return Ok(bessel_j_hankel(nu, x));
    }
    Ok(bessel_j_miller(nu, x))
}

/// Miller's backward recurrence from far above the order, normalised with
/// (x/2)^ν₀ = Σ_k (ν₀+2k) Γ(ν₀+k)/k! · J_{ν₀+2k}(x), where ν = ν₀ + m, ν₀ < 1.
fn bessel_j_miller(nu: f64, x: f64) -> f64 {
    let m = nu.floor().max(0.0) as usize;
    let nu0 = nu - m as f64;
    let top = m + x.ceil() as usize + 60;
    let mut f_next = 0.0f64;
    let mut f = 1e-300f64;
    let mut wanted = 0.0;
    let mut norm = 0.0;
    let weight = |k: usize| -> f64 {
        // (ν₀+2k) Γ(ν₀+k)/k!, with the k = 0 term read as Γ(ν₀+1)
        if k == 0 {
            ln_gamma_signed(nu0 + 1.0).0.exp()
        } else {
            let kf = k as f64;
            (nu0 + 2.0 * kf) * (ln_gamma_signed(nu0 + kf).0 - ln_gamma_signed(kf + 1.0).0).exp()
        }
    };
    for j in (0..=top).rev() {
        // f holds the unnormalised J_{ν₀+j}
        if j == m {
            wanted = f;
        }
        if j % 2 == 0 {
            norm += weight(j / 2) * f;
        }
        if j == 0 {
            break;
        }
        let prev = 2.0 * (nu0 + j as f64) / x * f - f_next;
        f_next = f;
        f = prev;
        if f.abs() > 1e250 {
            f *= 1e-250;
            f_next *= 1e-250;
            wanted *= 1e-250;
            norm *= 1e-250;
        }
    }
    wanted * (0.5 * x).powf(nu0) / norm
}

const SERIES_J_MAX_X: f64 = 4.0;
const HANKEL_J_MIN_X: f64 = 25.0;

/// Hankel expansion J_ν(x) = √(2/(πx)) (P cos χ − Q sin χ), χ = x − νπ/2 − π/4,
/// summed until the terms stop shrinking.
fn bessel_j_hankel(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let (mut p, mut q) = (1.0, 0.0);
    let mut term = 1.0f64;
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term *= (mu - odd * odd) / (8.0 * kf * x);
        if term.abs() >= prev || term == 0.0 {
            break;
        }
        prev = term.abs();
        // signs: P = t0 − t2 + t4 …, Q = t1 − t3 + t5 …
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
        if term.abs() <= 1e-17 {
            break;
        }
    }
    let chi = x - (0.5 * nu + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// e^{-x} I_ν(x), ν ≥ -1/2, x ≥ 0. Never overflows.
pub fn bessel_i_scaled(nu: f64, x: f64) -> Result<f64> {
    check_x("bessel_i_scaled", x)?;
    if nu < -0.5 {
        return Err(Error::Domain(format!("bessel_i needs nu >= -1/2, got {nu}")));
    }
    if x == 0.0 {
        return Ok(if nu == 0.0 {
            1.0
        } else if nu > 0.0 {
            0.0
        } else {
            f64::INFINITY
        });
    }
    if nu == -0.5 {
        return Ok((1.0 + (-2.0 * x).exp()) / (2.0 * PI * x).sqrt());
    }
    if nu == 0.5 {
        return Ok(-(-2.0 * x).exp_m1() / (2.0 * PI * x).sqrt());
    }
    if x > 30.0 + nu * nu {
        // Hankel asymptotic expansion; the e^{-2x} companion is below f64 resolution here
        let mu = 4.0 * nu * nu;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut prev = f64::INFINITY;
        for k in 1..200 {
            let kf = k as f64;
            let odd = 2.0 * kf - 1.0;
            term *= -(mu - odd * odd) / (8.0 * kf * x);
            if term.abs() >= prev {
                break;
            }
            sum += term;
            prev = term.abs();
            if term.abs() <= 1e-17 * sum.abs() {
                break;
            }
        }
        return Ok(sum / (2.0 * PI * x).sqrt());
    }
    // series with the exponential folded into the prefactor
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..2000 {
        let kf = k as f64;
        term *= q / (kf * (nu + kf));
        sum += term;
        if term <= 1e-17 * sum {
            break;
        }
    }
    let (lg, _) = ln_gamma_signed(nu + 1.0);
    Ok(sum * (nu * (0.5 * x).ln() - lg - x).exp())
}

/// Modified Bessel function of the first kind I_ν(x).
pub fn bessel_i(nu: f64, x: f64) -> Result<f64> {
    Ok(bessel_i_scaled(nu, x)? * x.exp())
}

/// e^{x} K_ν(x) from K_ν(x) = ∫₀^∞ e^{-x cosh t} cosh(νt) dt, by the trapezoid rule
/// with step halving. The integrand is entire and decays double-exponentially,
/// so the trapezoid rule converges geometrically in 1/h.
pub fn bessel_k_scaled(nu: f64, x: f64) -> Result<f64> {
    check_x("bessel_k", x)?;
    if x == 0.0 {
        return Ok(f64::INFINITY);
    }
    let nu = nu.abs();
    let f = |t: f64| {
        let s = (0.5 * t).sinh();
        (-2.0 * x * s * s).exp() * (nu * t).cosh()
    };
    let sweep = |h: f64, start: usize, stride: usize| -> f64 {
        let mut sum = 0.0;
        let mut k = start;
        let mut last = f64::INFINITY;
        loop {
            let v = f(k as f64 * h);
            sum += v;
            if (v <= 1e-18 * sum && v <= last) || v == 0.0 || k > 1_000_000 {
                break;
            }
            last = v;
            k += stride;
        }
        sum
    };
    let mut h = 0.5;
    let mut total = h * (0.5 * f(0.0) + sweep(h, 1, 1));
    for _ in 0..16 {
        h *= 0.5;
        let refined = 0.5 * total + h * sweep(h, 1, 2);
        let done = (refined - total).abs() <= 1e-15 * refined;
        total = refined;
        if done {
            return Ok(total);
        }
    }
    Err(Error::NotConverged { what: "bessel_k trapezoid", iterations: 16 })
}

/// Macdonald function K_ν(x), x > 0.
pub fn bessel_k(nu: f64, x: f64) -> Result<f64> {
    Ok(bessel_k_scaled(nu, x)? * (-x).exp())
}

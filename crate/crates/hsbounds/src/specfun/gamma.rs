use crate::error::{Error, Result};
use std::f64::consts::PI;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// Largest argument for which `gamma` is finite.
pub const GAMMA_MAX_ARG: f64 = 171.624_376_956_302_7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MathConstants {
    pub euler_gamma: f64,
    pub pi: f64,
}

pub const MATH: MathConstants = MathConstants {
    euler_gamma: EULER_GAMMA,
    pi: PI,
};

// B_{2k} / (2k (2k-1)), k = 1..8
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

// B_{2k} / (2k), k = 1..8
const DIGAMMA_ASYM: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32_760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
];

const SHIFT_TO: f64 = 10.0;

/// `x` is a non-positive integer.
pub fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// `sin(πx)`, exact at integers and half-integers.
pub fn sinpi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).floor();
    let (r, sign) = if r >= 1.0 { (r - 1.0, -1.0) } else { (r, 1.0) };
    let s = if r == 0.0 {
        0.0
    } else if r == 0.5 {
        1.0
    } else if r < 0.25 {
        (PI * r).sin()
    } else if r < 0.75 {
        (PI * (0.5 - r)).cos()
    } else {
        (PI * (1.0 - r)).sin()
    };
    sign * s
}

fn stirling_series(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut acc = 0.0;
    for c in STIRLING.iter().rev() {
        acc = acc * inv2 + c;
    }
    acc * inv
}

/// `ln Γ(x)` for `x > 0`.
fn ln_gamma_pos(x: f64) -> f64 {
    if x < SHIFT_TO {
        let mut prod = 1.0;
        let mut y = x;
        while y < SHIFT_TO {
            prod *= y;
            y += 1.0;
        }
        ln_gamma_pos(y) - prod.ln()
    } else {
        (x - 0.5) * x.ln() - x + LN_SQRT_2PI + stirling_series(x)
    }
}

/// `(ln|Γ(x)|, sign Γ(x))`. At poles returns `(+∞, 0.0)`.
pub fn ln_gamma_signed(x: f64) -> (f64, f64) {
    if x.is_nan() {
        return (f64::NAN, f64::NAN);
    }
    if is_nonpositive_integer(x) {
        return (f64::INFINITY, 0.0);
    }
    if x > 0.0 {
        return (ln_gamma_pos(x), 1.0);
    }
    // reflection: Γ(x) Γ(1-x) = π / sin(πx)
    let s = sinpi(x);
    let (lg, _) = ln_gamma_signed(1.0 - x);
    (PI.ln() - s.abs().ln() - lg, s.signum())
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if x <= 0.0 {
        if is_nonpositive_integer(x) {
            return Err(Error::Pole { func: "ln_gamma", x });
        }
        return Err(Error::Domain(format!("ln_gamma requires x > 0, got {x}")));
    }
    Ok(ln_gamma_pos(x))
}

fn gamma_large(x: f64) -> f64 {
    // split the power so x^(x-1/2) does not overflow before e^(-x) is applied
    let t = x.powf(0.5 * x - 0.25);
    t * (t * (-x).exp()) * SQRT_2PI * stirling_series(x).exp()
}

/// Γ(x) for x not a non-positive integer.
pub fn gamma(x: f64) -> Result<f64> {
    if is_nonpositive_integer(x) {
        return Err(Error::Pole { func: "gamma", x });
    }
    if x > GAMMA_MAX_ARG {
        return Err(Error::Overflow { func: "gamma", x });
    }
    Ok(gamma_unchecked(x))
}

fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // Γ(x) = π / (sin(πx) Γ(1-x))
        let s = sinpi(x);
        let g = gamma_unchecked(1.0 - x);
        if g.is_infinite() {
            return 0.0 * s.signum();
        }
        return PI / (s * g);
    }
    if x >= SHIFT_TO {
        return gamma_large(x);
    }
    let mut prod = 1.0;
    let mut y = x;
    while y < SHIFT_TO {
        prod *= y;
        y += 1.0;
    }
    gamma_large(y) / prod
}

/// 1/Γ(x); zero at the poles of Γ.
pub fn rgamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    if x > GAMMA_MAX_ARG {
        let (lg, _) = ln_gamma_signed(x);
        return (-lg).exp();
    }
    if x < 0.5 {
        // 1/Γ(x) = sin(πx) Γ(1-x) / π
        let g1 = 1.0 - x;
        if g1 > GAMMA_MAX_ARG {
            let (lg, _) = ln_gamma_signed(g1);
            return sinpi(x).signum() * (lg + sinpi(x).abs().ln() - PI.ln()).exp();
        }
        return sinpi(x) * gamma_unchecked(g1) / PI;
    }
    1.0 / gamma_unchecked(x)
}

/// ψ(x) = Γ'(x)/Γ(x).
pub fn digamma(x: f64) -> Result<f64> {
    if is_nonpositive_integer(x) {
        return Err(Error::Pole { func: "digamma", x });
    }
    Ok(digamma_unchecked(x))
}

pub(crate) fn digamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // ψ(1-x) - ψ(x) = π cot(πx)
        let s = sinpi(x);
        let c = sinpi(x + 0.5);
        return digamma_unchecked(1.0 - x) - PI * c / s;
    }
    let mut acc = 0.0;
    let mut y = x;
    while y < SHIFT_TO {
        acc -= 1.0 / y;
        y += 1.0;
    }
    let inv2 = 1.0 / (y * y);
    let mut series = 0.0;
    for c in DIGAMMA_ASYM.iter().rev() {
        series = series * inv2 + c;
    }
    acc + y.ln() - 0.5 / y - series * inv2
}

/// Rising factorial (a)_l = a (a+1) ... (a+l-1).
pub fn pochhammer(a: f64, l: u32) -> f64 {
    let mut p = 1.0;
    for k in 0..l {
        p *= a + k as f64;
    }
    p
}

/// Semifactorial m!! = 1·3·…·m for odd m ≥ -1, with (-1)!! = 1.
///
/// Returned as `f64`: 301!! already exceeds `u128`.
pub fn semifactorial(m: i64) -> Result<f64> {
    if m < -1 || m % 2 == 0 {
        return Err(Error::InvalidInput(format!(
            "semifactorial needs an odd integer >= -1, got {m}"
        )));
    }
    let mut p = 1.0;
    let mut k = 3;
    while k <= m {
        p *= k as f64;
        k += 2;
    }
    Ok(p)
}

/// ln C(n, k) for real n ≥ k ≥ 0.
pub fn ln_binomial(n: f64, k: f64) -> f64 {
    ln_gamma_pos(n + 1.0) - ln_gamma_pos(k + 1.0) - ln_gamma_pos(n - k + 1.0)
}

/// Signed `ln|Πnum Γ / Πden Γ|`. A pole in the denominator makes the sign 0.
pub fn ln_gamma_ratio(num: &[f64], den: &[f64]) -> (f64, f64) {
    let mut ln = 0.0;
    let mut sign = 1.0;
    for &x in den {
        let (l, s) = ln_gamma_signed(x);
        if s == 0.0 {
            return (f64::NEG_INFINITY, 0.0);
        }
        ln -= l;
        sign *= s;
    }
    for &x in num {
        let (l, s) = ln_gamma_signed(x);
        if s == 0.0 {
            return (f64::INFINITY, f64::NAN);
        }
        ln += l;
        sign *= s;
    }
    (ln, sign)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn gamma_examples() {
        assert!(rel(gamma(0.5).unwrap(), PI.sqrt()) < 1e-15);
        assert_eq!(gamma(1.0).unwrap(), 1.0);
        assert!(rel(gamma(6.0).unwrap(), 120.0) < 1e-15);
        assert!(rel(gamma(-0.5).unwrap(), -2.0 * PI.sqrt()) < 1e-15);
        assert!(matches!(gamma(0.0), Err(Error::Pole { .. })));
        assert!(matches!(gamma(-3.0), Err(Error::Pole { .. })));
        assert!(matches!(gamma(200.0), Err(Error::Overflow { .. })));
    }

    #[test]
    fn gamma_matches_factorials_and_log_companion() {
        let mut f = 1.0f64;
        for k in 1..170u32 {
            f *= k as f64;
            let g = gamma(k as f64 + 1.0).unwrap();
            assert!(rel(g, f) < 2e-13, "k={k}");
            assert!((ln_gamma(k as f64 + 1.0).unwrap() - f.ln()).abs() < 1e-12 * f.ln().max(1.0));
        }
        // Γ(1e-4) ≈ 1/x - γ
        let x = 1e-4;
        assert!(rel(gamma(x).unwrap(), 9999.422_883_231_927) < 1e-12);
    }

    #[test]
    fn digamma_examples() {
        assert!((digamma(1.0).unwrap() + EULER_GAMMA).abs() < 1e-15);
        assert!(
            (digamma(0.5).unwrap() - (-EULER_GAMMA - 2.0 * 2f64.ln())).abs() < 1e-14
        );
        assert!((digamma(2.0).unwrap() - (1.0 - EULER_GAMMA)).abs() < 1e-15);
        assert!(digamma(-2.0).is_err());
        // ψ(-0.5) = ψ(0.5) + 2
        assert!((digamma(-0.5).unwrap() - (digamma(0.5).unwrap() + 2.0)).abs() < 1e-13);
    }

    #[test]
    fn pochhammer_and_semifactorial() {
        assert_eq!(pochhammer(3.0, 0), 1.0);
        assert_eq!(pochhammer(1.0, 4), 24.0);
        assert_eq!(pochhammer(0.5, 2), 0.75);
        assert_eq!(semifactorial(-1).unwrap(), 1.0);
        assert_eq!(semifactorial(1).unwrap(), 1.0);
        assert_eq!(semifactorial(5).unwrap(), 15.0);
        assert!(semifactorial(4).is_err());
        assert!(semifactorial(-3).is_err());
    }

    #[test]
    fn rgamma_is_reciprocal_and_zero_at_poles() {
        for &x in &[-2.5, -0.3, 0.7, 3.2, 50.0, 170.0] {
            let (lg, s) = ln_gamma_signed(x);
            assert!(rel(rgamma(x), s * (-lg).exp()) < 1e-12, "x={x}");
        }
        assert_eq!(rgamma(0.0), 0.0);
        assert_eq!(rgamma(-4.0), 0.0);
    }

    #[test]
    fn sinpi_exact_points() {
        assert_eq!(sinpi(1.0), 0.0);
        assert_eq!(sinpi(-2.0), 0.0);
        assert_eq!(sinpi(0.5), 1.0);
        assert_eq!(sinpi(1.5), -1.0);
        assert!((sinpi(0.3) - (0.3 * PI).sin()).abs() < 1e-16);
    }
}

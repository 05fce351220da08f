//! Real-argument special functions.

pub mod bessel;
pub mod gamma;
pub mod hyper;

pub use bessel::{bessel_i, bessel_i_scaled, bessel_j, bessel_k, bessel_k_scaled};
pub use gamma::{
    digamma, gamma, ln_gamma, ln_gamma_signed, pochhammer, rgamma, semifactorial, MathConstants,
    EULER_GAMMA, MATH,
};
pub use hyper::{f21, hyp2f1, hyp2f1_direct_series, hyp2f1_scaled, hyp2f1_with_regime, HyperEval, Regime, Scaled};

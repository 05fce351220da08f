use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{func}: pole at x = {x}")]
    Pole { func: &'static str, x: f64 },
    #[error("{func}: result overflows at x = {x}")]
    Overflow { func: &'static str, x: f64 },
    #[error("hypergeometric series diverges at w = 1 (c = {c} <= a + b = {ab})")]
    Divergent { c: f64, ab: f64 },
    #[error("unsupported regime: {0}")]
    Unsupported(String),
    #[error("{what} did not converge after {iterations} iterations")]
    NotConverged { what: &'static str, iterations: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("maximum not bracketed: objective still increasing at boundary {at}")]
    BracketFailure { at: f64 },
    #[error("tail decays too slowly (exponent {decay_exponent} < 0.01)")]
    SlowTail { decay_exponent: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("cross-check failed: {0}")]
    CrossCheck(String),
}

pub type Result<T> = std::result::Result<T, Error>;

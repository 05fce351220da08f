//! Rigorous numerical bounds for the best constant `K` in
//! `‖fg‖_n ≤ K ‖f‖_n ‖g‖_n` on the Sobolev space `H^n(R^d)`.
//!
//! The crate is organised bottom-up:
//!
//! * [`specfun`]: Gamma, digamma, Gauss hypergeometric and Bessel functions.
//! * [`quad`]: adaptive Gauss–Kronrod integration on finite and semi-infinite ranges.
//! * [`optim`]: bracketed 1D maximisation and multistart Nelder–Mead.
//! * [`kernels`]: the kernel functions the bounds are built from.
//! * [`bounds`]: upper bounds `K⁺`, `K⁺⁺` and the Bessel / Fourier lower bounds.
//! * [`laplace`]: numerical verification of Laplace-method expansions.
//! * [`golden`]: reference table values used for comparison.

pub mod bounds;
pub mod error;
pub mod golden;
pub mod kernels;
pub mod laplace;
pub mod optim;
pub mod par;
pub mod quad;
pub mod specfun;

pub use error::{Error, Result};
pub use kernels::BoundQuery;

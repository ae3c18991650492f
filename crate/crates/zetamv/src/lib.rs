//! Numerical verification of discrete mean values of the derivative of the
//! Riemann zeta function over its nontrivial zeros.
//!
//! The library computes the sum over zeros `rho = 1/2 + i*gamma` with
//! `0 < gamma < T` of `zeta'(rho) X(rho) Y(1 - rho)`, where `X` and `Y` are
//! Dirichlet polynomials of length `M = T^theta`, by two independent routes:
//!
//! * directly, from certified zeros and Euler-Maclaurin evaluations of
//!   `zeta'` on the critical line;
//! * from explicit main-term formulas whose coefficients are arithmetic
//!   (Moebius/von Mangoldt convolutions) and analytic (Laurent data of
//!   `zeta'^2/zeta` at 1) constants.
//!
//! The two routes share no code beyond basic arithmetic, which is what makes
//! agreement between them evidence rather than tautology.

pub mod arith;
pub mod characters;
pub mod coeffs;
pub mod meanvalue;
pub mod poly;
pub mod quad;
pub mod zeta;

pub use arith::{ArithFn, FactorSieve, FactoredInteger, Support};
pub use coeffs::CoefficientVector;
pub use meanvalue::{ComparisonReport, MainTermConstants, MeanValueParams};
pub use poly::Polynomial;

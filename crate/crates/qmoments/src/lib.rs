//! Exact moments of Lorentzian-time-smeared quadratic operators of the
//! massless field in four-dimensional Minkowski vacuum, together with the
//! machinery to analyze the resulting moment problem: support lower bounds,
//! tail asymptotics, distribution fits, cumulative-distribution bounds, and
//! nucleation-rate estimates.
//!
//! The crate is organized around an exact-arithmetic core:
//!
//! - [`arith`]: arbitrary-precision rationals, decimal big-floats, integer
//!   partitions and formal power series (exponential convention).
//! - [`kintegrals`]: the run-factor integrals `K_n^(r)` via their recurrence,
//!   with an independent quadrature oracle.
//! - [`runpoly`]: run-structure polynomials over partition-indexed monomials,
//!   verified against a brute-force permutation census.
//! - [`engine`]: assembly of exact connected and full moment tables for the
//!   built-in operators, growth diagnostics and asymptotic brackets.
//! - [`analysis`]: Hankel-pencil lower bounds `y_N`, sequence acceleration
//!   and extrapolation fits.
//! - [`dist`]: shifted-Gamma model, tail-parameter extraction, heuristic
//!   full-range fits, Chebyshev-type CDF bounds, Krein diagnostic.
//! - [`apps`]: black-hole nucleation counts/masses and the Boltzmann-brain
//!   exponent.
//! - [`cli`]: the command-line surface.
//!
//! All moment computations are exact (arbitrary-precision rational); floats
//! enter only for bounds, fits and tails, at a configurable decimal
//! precision (default 40 digits).

pub mod arith;
pub mod kintegrals;
pub mod quad;
pub mod runpoly;
pub mod engine;
pub mod analysis;
pub mod dist;
pub mod apps;
pub mod io;
pub mod cli;

mod error;

pub use error::Error;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;

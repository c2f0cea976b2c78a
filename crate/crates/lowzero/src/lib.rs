//! Numerical laboratory for low-lying zero statistics of level-1 modular-form
//! L-functions.
//!
//! The crate is organized around three computational pillars:
//!
//! * exponential sums over primes in residue classes, `e(2 sqrt(p_1...p_n)/c)`,
//!   together with empirical cancellation-exponent fits ([`expsum`]);
//! * the Petersson trace formula: exact Kloosterman sums ([`kloosterman`]),
//!   Bessel functions of high order ([`bessel`]), smooth weights and their
//!   oscillatory transform ([`weight`]), exact Hecke eigenform q-expansions
//!   ([`eigenforms`]) and the two-sided trace machinery ([`petersson`]);
//! * density statistics: test-function pairs ([`testfn`]), explicit-formula
//!   prime sums and harmonic-weighted family averages ([`density`]),
//!   Katz-Sarnak determinant kernels ([`rmt`]) and the support/rank-bound
//!   arithmetic ([`support`]).
//!
//! Everything is deterministic: parallel reductions use fixed segment
//! boundaries and ordered merges, so results are bit-identical across thread
//! counts.

pub mod bessel;
pub mod dd;
pub mod density;
pub mod eigenforms;
pub mod expsum;
pub mod kloosterman;
pub mod petersson;
pub mod primes;
pub mod quad;
pub mod rmt;
pub mod support;
pub mod testfn;
pub mod weight;

use thiserror::Error;

/// Errors shared across the laboratory modules.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A parameter fell outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// Adaptive quadrature could not reach the requested tolerance.
    #[error("quadrature failed: requested {requested:e}, achieved {achieved:e}")]
    Quadrature { requested: f64, achieved: f64 },
    /// A truncated series could not certify its tail below the tolerance.
    #[error("truncation failure: certified tail {bound:e} exceeds tolerance {tol:e}; increase c_max")]
    Truncation { bound: f64, tol: f64 },
    /// Weight k with dim H_k != 1 (or odd / too small).
    #[error("unsupported weight {0}: only k in {{12, 16, 18, 20, 22, 26}} have one-dimensional spaces")]
    UnsupportedWeight(u32),
    /// An eigenform coefficient array is too short for the requested sum.
    #[error("coefficient array too short: need a_f(n) up to n = {needed}, have {have}")]
    CoefficientsExhausted { needed: u64, have: u64 },
    /// A regression grid has too few points on the fitted axis.
    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),
    /// The Petersson trace came out non-positive, signalling upstream failure.
    #[error("non-positive trace {0}: truncation failure upstream")]
    NonPositiveTrace(f64),
}

pub type Result<T> = std::result::Result<T, Error>;

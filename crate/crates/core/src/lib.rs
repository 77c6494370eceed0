//! Arithmetic of the quartic fields `F = Q(α)`, `α⁴ = -q`, for primes `q ≡ 7 (mod 8)`,
//! and of the fields around them: `K = Q(√-q)`, `Q(√q)`, `Q(i, √q)`.
//!
//! The crate computes the data needed to check statements about the 2-adic
//! behaviour of units and class groups of these fields:
//!
//! * [`arith`]: integers, primes, symbols, Cornacchia.
//! * [`padic2`]: 2-adic numbers, the quadratic extensions of `Q₂`, logarithms, Hilbert symbols.
//! * [`imquad`]: binary quadratic forms and class groups of `Q(√-q)` and `Q(√-2q)`.
//! * [`realquad`]: continued fractions and units of `Q(√q)`.
//! * [`quartic`]: the maximal order and fundamental unit of `F` and its 2-adic logarithms.
//! * [`iwasawa`]: valuation and structure formulas for the Iwasawa modules.
//! * [`lseries`]: rigorous bounds in the simple-zero criterion for the Hecke L-series.
//! * [`hp`]: fixed-point ball arithmetic used by [`lseries`] and the unit search.

pub mod arith;
pub mod error;
pub mod hp;
pub mod imquad;
pub mod iwasawa;
pub mod lattice;
pub mod lseries;
pub mod padic2;
pub mod quartic;
pub mod realquad;

pub use error::{Error, Result};

/// Arbitrary precision integer.
pub type Int = num_bigint::BigInt;
/// Arbitrary precision rational.
pub type Rat = num_rational::BigRational;

/// Version string stored alongside cached results.
pub const TOOL_VERSION: &str = concat!("iwacert-", env!("CARGO_PKG_VERSION"));

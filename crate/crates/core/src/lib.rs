//! Exact arithmetic for lattice shells, harmonic polynomials, and the
//! q-series their weighted theta sums produce.
//!
//! The pipeline, bottom to top:
//!
//! * [`qseries`] — exact truncated q-expansions on the 1/24 exponent grid:
//!   eta products, Eisenstein series, the cusp-form coefficient sequences
//!   τ and τ₂, divisor sums, convolution scans.
//! * [`lattices`] — shell enumeration for the root lattices and their
//!   relatives, either in integer coordinates or through a Gram matrix.
//! * [`harmonics`] / [`invariant`] — harmonic polynomials: exact Laplacian
//!   kernels, harmonic projection, and a compressed representation for
//!   polynomials invariant under signed coordinate permutations.
//! * [`theta`] — harmonic theta series: shell sums θ_{Λ,P} as q-series,
//!   and the rank of the space they span at each degree.
//! * [`modring`] — finite-dimensional spaces of modular forms given by
//!   generator monomials; fitting a q-expansion into such a space and
//!   extending it to any precision.
//! * [`strength`] — spherical-design strength of shells: membership scans,
//!   the τ₂ equivalence for `D4`, nonvanishing certificates, congruences.
//! * [`designs`] — finite point sets on spheres: design degree checks by
//!   two independent methods, averaging comparisons, Fisher-type bounds.
//!
//! Everything is exact: `BigInt`/`BigRational` end to end, with fixed-width
//! fast paths that fall back to bignum rather than ever rounding.

pub mod designs;
pub mod error;
pub mod harmonics;
pub mod invariant;
pub mod lattices;
pub mod linalg;
pub mod modring;
pub mod qseries;
pub mod strength;
pub mod theta;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

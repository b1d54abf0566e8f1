//! Crate-wide error type.

use thiserror::Error;

/// Everything that can go wrong across the crate.
///
/// Mathematical mismatches (a fit that does not reproduce enumerated
/// coefficients, a requested coefficient beyond computed precision) are
/// first-class variants so callers can distinguish them from usage errors.
#[derive(Debug, Error)]
pub enum Error {
    /// Two series whose fractional q-offsets differ by a non-integer.
    #[error("incompatible q-offsets: {0}/24 vs {1}/24 (difference not an integer power of q)")]
    OffsetMismatch(i64, i64),

    /// A coefficient was requested past the valid truncation order.
    #[error("precision shortfall: need coefficient index {need}, series valid to {have}")]
    PrecisionShortfall { need: i64, have: i64 },

    /// Eisenstein weights other than 2, 4, 6 are not provided.
    #[error("unsupported Eisenstein weight {0} (supported: 2, 4, 6)")]
    UnsupportedWeight(u32),

    /// Lattice is registered by name only, or the name is unknown.
    #[error("lattice {0}: {1}")]
    UnsupportedLattice(String, String),

    /// A shell that must be non-empty came out empty.
    #[error("shell of squared norm {norm2} in {lattice} is empty")]
    EmptyShell { lattice: String, norm2: i64 },

    /// Vector/matrix/polynomial dimensions do not line up.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Explicit harmonic kernel construction past the configured cap.
    #[error("monomial space of size {size} exceeds the basis cap {cap}; use random projected harmonics instead")]
    BasisCapExceeded { size: usize, cap: usize },

    /// A generator-ring fit failed: inconsistent system or nonzero residual.
    #[error("lift failed for {context}: {reason}")]
    LiftFailed { context: String, reason: String },

    /// No generator ring is registered for the requested level.
    #[error("no generator ring for level {0} (supported: 1, 2)")]
    UnsupportedLevel(u32),

    /// Kernel design checks require an antipodal point set.
    #[error("point set is not antipodal: {0}")]
    NotAntipodal(String),

    /// Averaging identities require a design at every lower degree.
    #[error("point set is not a design at degree {0}")]
    NotADesign(u32),

    /// Exact trigonometric data exists only for the registered angles.
    #[error("unsupported angle {0}π/{1} (supported: π/3, 2π/3, 4π/3, π/2, π)")]
    UnsupportedAngle(i64, i64),

    /// Malformed on-disk data (shell CSV, polynomial JSON, …).
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

//! Crate-wide error type.
//!
//! Every fallible operation returns [`enum@Error`]; variants carry the measured
//! quantity that violated the contract so callers can report precise
//! diagnostics.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Validation and computation failures.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Bloch vector outside the unit ball.
    #[error("Bloch vector has norm {norm:.17e}, outside the unit ball")]
    NonPhysicalState {
        /// Measured norm.
        norm: f64,
    },

    /// Direction vector not unit length.
    #[error("direction has norm {norm:.17e}, expected a unit vector")]
    NonUnitDirection {
        /// Measured norm.
        norm: f64,
    },

    /// A vector that must be nonzero was (numerically) zero.
    #[error("vector is numerically zero and cannot be normalized")]
    ZeroVector,

    /// Matrix is not Hermitian.
    #[error("matrix deviates from Hermitian by {deviation:.17e}")]
    NotHermitian {
        /// Largest |M - M^dagger| entry.
        deviation: f64,
    },

    /// Density matrix trace differs from one.
    #[error("density matrix has trace {trace:.17e}, expected 1")]
    NonUnitTrace {
        /// Real part of the measured trace.
        trace: f64,
    },

    /// Density matrix has a negative eigenvalue beyond tolerance.
    #[error("density matrix has minimum eigenvalue {min_eigenvalue:.17e}, below -1e-10")]
    NotPositiveSemidefinite {
        /// Smallest eigenvalue found.
        min_eigenvalue: f64,
    },

    /// Matrix is not unitary.
    #[error("matrix deviates from unitarity by {deviation:.17e}")]
    NotUnitary {
        /// Largest |U^dagger U - I| entry.
        deviation: f64,
    },

    /// Matrix is not a proper rotation (orthogonal, determinant +1).
    #[error("matrix deviates from a proper rotation by {deviation:.17e}")]
    NotRotation {
        /// Largest deviation from O^T O = I or det O = 1.
        deviation: f64,
    },

    /// Distribution entries do not sum to one.
    #[error("distribution sums to {sum:.17e}, expected 1")]
    NotNormalized {
        /// Measured sum.
        sum: f64,
    },

    /// A transition matrix column does not sum to one.
    #[error("column {column} of transition matrix sums to {sum:.17e}, expected 1")]
    NotStochastic {
        /// Offending column index.
        column: usize,
        /// Measured column sum.
        sum: f64,
    },

    /// Conditioning on an outcome of zero probability.
    #[error("outcome {outcome} has probability {probability:.17e}; conditional state undefined")]
    ZeroProbabilityOutcome {
        /// The outcome sign, rendered +1/-1.
        outcome: String,
        /// Its measured probability.
        probability: f64,
    },

    /// A distribution that must be nonnegative has entries below the floor.
    #[error("distribution has entry {min_entry:.17e} below the positivity floor; {context}")]
    NegativeEntries {
        /// Most negative entry.
        min_entry: f64,
        /// Diagnostic dump (offending state serialized by the caller).
        context: String,
    },

    /// Bit count outside the supported range.
    #[error("bit count {n_bits} outside supported range 1..=12")]
    BitCountOutOfRange {
        /// Requested count.
        n_bits: usize,
    },

    /// Object has the wrong dimension for the requested operation.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch {
        /// Required dimension.
        expected: usize,
        /// Supplied dimension.
        got: usize,
    },

    /// Convex mixture weights invalid (negative or not summing to one).
    #[error("mixture weights sum to {sum:.17e} with minimum {min:.17e}; need nonnegative weights summing to 1")]
    InvalidMixture {
        /// Sum of the weights.
        sum: f64,
        /// Smallest weight.
        min: f64,
    },

    /// Meter register is not deterministic where the contract requires it.
    #[error("meter expectation {expectation:.17e} is not deterministic (need |<bit>| = 1)")]
    NoisyMeter {
        /// Measured meter expectation.
        expectation: f64,
    },

    /// Frame index out of range for the given frame.
    #[error("index {index} out of range for {size} frame elements")]
    IndexOutOfRange {
        /// Requested index.
        index: usize,
        /// Number of elements.
        size: usize,
    },

    /// Scale factor outside its valid range.
    #[error("scale {scale:.17e} invalid; need a finite value >= 0")]
    InvalidScale {
        /// Supplied scale.
        scale: f64,
    },
}

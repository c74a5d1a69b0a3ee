//! Quasi-probability frame representations of qubits.
//!
//! A qubit state can be traded for an ordinary probability vector by
//! measuring it against an informationally complete frame of four
//! sub-normalized projectors built on a regular tetrahedron of Bloch
//! vectors. In that picture:
//!
//! - states become probability 4-vectors ([`sic`]),
//! - unitaries become quasi-stochastic transition matrices whose columns
//!   sum to one but may go negative ([`sic::channel_from_rotation`]),
//! - n-bit registers get the analogous frame over all nontrivial spin
//!   monomials ([`gbv`]),
//! - a qubit-plus-meter measurement becomes an 8x8 quasi-bistochastic
//!   process with structural properties (cyclicity, forced negativity,
//!   canonical-parameter uniqueness) exposed for study ([`measurement`]).
//!
//! The [`oracle`] module carries an independent density-matrix
//! implementation of the same physics; nothing in the frame modules calls
//! into it except shared input types, and the two routes are compared only
//! in tests and in the `oracle-diff` experiment of the companion CLI.
//!
//! Numeric tolerances are pinned once in [`types::tol`].

#![forbid(unsafe_code)]
#![deny(missing_docs)]

pub mod diagnostics;
pub mod error;
pub mod gbv;
pub mod measurement;
pub mod oracle;
pub mod sampling;
pub mod sic;
pub mod types;

pub use error::{Error, Result};
pub use types::{BlochVec, ChshSettings, MeasDirection, Sign};

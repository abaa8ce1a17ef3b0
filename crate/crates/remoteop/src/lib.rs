//! Simulation of remotely implemented block-permutation unitaries between
//! two parties, without prior shared entanglement, together with the
//! communication-cost accounting that compares it against teleportation
//! and entanglement-based baselines.
//!
//! The crate is organized around five pieces:
//!
//! - [`state`]: dense qudit state vectors, gate application, measurement.
//! - [`gates`]: the specific gate constructors the protocols need
//!   (generalized CNOT, qudit Fourier transform, phase corrections).
//! - [`restricted`]: the block-permutation operation family U(f,G) —
//!   construction, Haar-random sampling, and classification.
//! - [`protocol`]: two-party runs over a metered channel with ownership
//!   enforcement, transcripts, and resource ledgers; includes the
//!   teleportation, send-everything, and controlled-U baselines.
//! - [`resources`]: affine cost expressions in N and M, scenario
//!   conversions, and the four summary tables.
//!
//! See the `examples/` directory for one runnable example per capability,
//! and the `remoteop` binary (`verify`, `tables`, `demo` subcommands) for
//! the command-line surface.

pub mod cli;
pub mod error;
pub mod gates;
pub mod protocol;
pub mod resources;
pub mod restricted;
pub mod state;

pub use error::{Error, Result};
pub use protocol::{
    run_bqst, run_remote_restricted, run_simple_swap, run_yang_cu, Case, Party, ResourceVector,
    Session, Transcript,
};
pub use restricted::{
    build_matrix, classify, controlled_u, random_restricted, Permutation, RestrictedOperation,
};
pub use state::{
    equal_states, EqualMode, GateMatrix, MeasurePolicy, MeasurementOutcome, StateVector,
};

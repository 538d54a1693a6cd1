//! The simulated quantum device (the prover).
//!
//! [`SimulatedDevice`] executes circuits on a dense [`StateVector`] and exposes only classical
//! results through the [`Device`] trait. [`FaultModel`] injects the deviations the verifier is
//! supposed to catch.

mod device;
pub mod exact;
mod fault;
mod statevector;
mod transcript;

pub use device::{Device, FixedRun, RunSeed, SimulatedDevice, DEFAULT_MAX_LINES};
pub use fault::{FaultModel, FaultSpecError};
pub use statevector::{input_amplitudes, StateVector};
pub use transcript::{circuit_id, Transcript, TranscriptRecord};

use crate::circuit::{Line, ResolveError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProverError {
    #[error("{n} lines exceed the statevector limit of {max}")]
    TooManyLines { n: usize, max: usize },
    #[error("instruction {0} is a bare T gate; the device only runs Clifford gates and gadgets")]
    NonClifford(usize),
    #[error("line {0} is out of range")]
    LineOutOfRange(Line),
    #[error("fault model forced outcome {outcome} on line {line}, which has probability zero")]
    ImpossibleOutcome { line: Line, outcome: bool },
    #[error("circuit has no final measurement")]
    NoOutput,
    #[error("invalid fault model: {0}")]
    Fault(#[from] FaultSpecError),
    #[error(transparent)]
    Resolve(#[from] ResolveError),
    #[error("transcript: {0}")]
    Transcript(String),
    #[error("device failure: {0}")]
    Failure(String),
}

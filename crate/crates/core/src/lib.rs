//! Classical verification of adaptive Clifford computations driven by magic-state T-gadgets.
//!
//! The crate is organised bottom-up:
//!
//! * [`circuit`]: circuit types with their text format, plus gadgetization and resolution.
//! * [`pauli`] and [`polysim`]: signed Pauli algebra and the verifier's polynomial-time
//!   output probabilities for non-adaptive Clifford sequences on product inputs.
//! * [`prover`]: a dense statevector device with fault models, seen only through [`prover::Device`].
//! * [`protocol`]: planning and running the tests, then composing the verdict.
//! * [`config`] and [`cli`]: campaign configuration and the command-line front end.

pub mod circuit;
pub mod pauli;
pub mod polysim;
pub mod prover;
pub mod protocol;
pub mod config;
pub mod cli;

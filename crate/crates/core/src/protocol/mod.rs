//! The verifier: it drives the device through the planned tests and then decides.
//!
//! [`verify`] runs the whole campaign for one adaptive circuit. The building blocks are
//! public so callers can run stages individually.

mod plan;
mod runs;
mod verdict;

pub use plan::{
    gadget_tolerance, hoeffding_half_width, hoeffding_repetitions, plan, TestPlan,
    DEFAULT_EXTRA_CHECK_LINES,
};
pub use runs::{
    measurement_prefix, run_computational, run_gate_tests, run_measurement_tests, ExtraLineCheck,
    GadgetTestResult, GateTestResult, Interruption, IMPOSSIBLE,
};
pub use verdict::{
    compose_error, verdict, Confidence, Decision, ErrorBudget, RejectReason, VerdictReport,
};

use crate::circuit::{validate, AdaptiveCircuit};
use crate::polysim::{PolysimError, DEFAULT_K_MAX};
use crate::prover::Device;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProtocolError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("circuit is not valid: {0}")]
    InvalidCircuit(String),
    #[error("circuit contains {0} bare T gate(s); gadgetize it first")]
    UngadgetizedCircuit(usize),
    #[error("device error: {0}")]
    Device(String),
    #[error("malformed transcript: {0}")]
    Malformed(String),
    #[error(transparent)]
    Polysim(#[from] PolysimError),
    #[error("error composition needs every check to have passed")]
    ChecksFailed,
}

/// Campaign parameters for [`verify`].
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyParams {
    pub seed: u64,
    pub epsilon: f64,
    pub eta: f64,
    /// Failure probability of each individual estimate.
    pub delta: f64,
    pub extra_check_lines: usize,
    pub k_max: usize,
}

impl Default for VerifyParams {
    fn default() -> Self {
        VerifyParams {
            seed: 0,
            epsilon: 0.05,
            eta: 0.05,
            delta: 0.01,
            extra_check_lines: DEFAULT_EXTRA_CHECK_LINES,
            k_max: DEFAULT_K_MAX,
        }
    }
}

/// SplitMix64 finalizer.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent seed for a sub-batch identified by `tag`.
pub fn derive_seed(master: u64, tag: u64) -> u64 {
    splitmix64(master ^ splitmix64(tag))
}

/// Tag of the gate-test batch.
pub const GATE_TEST_TAG: u64 = 1;

/// Tag of the measurement-test batch of gadget `i` (0-based).
pub fn gadget_tag(i: usize) -> u64 {
    100 + i as u64
}

/// Run the full campaign: one computational run, the gate test on its recorded sequence,
/// one measurement test per gadget, then the verdict.
///
/// Errors are reserved for inputs the verifier cannot work with. A device that misbehaves
/// or fails mid-batch produces a `Reject` report.
pub fn verify<D: Device + ?Sized>(
    device: &D,
    circuit: &AdaptiveCircuit,
    params: &VerifyParams,
) -> Result<VerdictReport, ProtocolError> {
    if let Some(v) = validate(circuit).into_iter().next() {
        return Err(ProtocolError::InvalidCircuit(v.to_string()));
    }
    let bare = circuit.t_count();
    if bare > 0 {
        return Err(ProtocolError::UngadgetizedCircuit(bare));
    }
    let mut test_plan = plan(circuit.gadget_count(), params.epsilon, params.eta, params.delta)?
        .with_extra_check_lines(params.extra_check_lines);
    test_plan.k_max = params.k_max;

    let transcript = run_computational(device, circuit, params.seed)?;
    let gate = run_gate_tests(
        device,
        &transcript,
        &test_plan,
        derive_seed(params.seed, GATE_TEST_TAG),
    )?;
    let gadgets = run_measurement_tests(device, &transcript, &test_plan, |i| {
        derive_seed(params.seed, gadget_tag(i))
    })?;
    Ok(verdict(transcript.record(), &test_plan, params.seed, gate, gadgets))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_seeds_differ() {
        let s: Vec<u64> = (0..50).map(|t| derive_seed(7, t)).collect();
        let mut u = s.clone();
        u.sort_unstable();
        u.dedup();
        assert_eq!(u.len(), s.len());
        assert_ne!(derive_seed(7, 1), derive_seed(8, 1));
    }

    #[test]
    fn splitmix_reference_value() {
        // First output of the reference SplitMix64 generator seeded with 0.
        assert_eq!(splitmix64(0), 0xE220_A839_7B1D_CDAF);
    }
}

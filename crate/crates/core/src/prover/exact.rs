//! Exact dense-state reference computations, used to cross-check the verifier's
//! Pauli-propagation engine and to size fault effects before a campaign.

use crate::circuit::{FixedSequence, Line};

use super::{ProverError, StateVector, DEFAULT_MAX_LINES};

/// Distribution of the final output with every measurement simulated in place: each
/// intermediate measurement branches the state, weighted by its Born probability.
/// `magic_offset` perturbs `MAGIC` inputs as the miscalibration fault does.
pub fn output_probability_in_place(
    seq: &FixedSequence,
    outcome: bool,
    magic_offset: f64,
) -> Result<f64, ProverError> {
    let state = StateVector::product(&seq.inputs, magic_offset, DEFAULT_MAX_LINES)?;
    let out = seq.output_line().ok_or(ProverError::NoOutput)?;
    let last = seq.ops.len() - 1;
    Ok(branch(seq, state, 0, 1.0, last, out, outcome))
}

fn branch(
    seq: &FixedSequence,
    mut state: StateVector,
    from: usize,
    weight: f64,
    last: usize,
    out: Line,
    outcome: bool,
) -> f64 {
    for pos in from..seq.ops.len() {
        let op = &seq.ops[pos];
        if let Some(g) = op.unitary() {
            state.apply(&g);
        }
        if let Some(line) = op.measured_line() {
            if pos == last {
                let p1 = state.prob_one(out);
                return weight * if outcome { p1 } else { 1.0 - p1 };
            }
            let mut total = 0.0;
            for m in [false, true] {
                let mut s = state.clone();
                let p = s.collapse(line, m);
                if p > 0.0 {
                    total += branch(seq, s, pos + 1, weight * p, last, out, outcome);
                }
            }
            return total;
        }
    }
    unreachable!("sequence ends with its output measurement")
}

/// Output probability with intermediate measurements omitted entirely.
pub fn output_probability_unitary(
    seq: &FixedSequence,
    outcome: bool,
    magic_offset: f64,
) -> Result<f64, ProverError> {
    let state = final_unitary_state(seq, magic_offset)?;
    let out = seq.output_line().ok_or(ProverError::NoOutput)?;
    let p1 = state.prob_one(out);
    Ok(if outcome { p1 } else { 1.0 - p1 })
}

/// The state after all unitaries of `seq`, measurements skipped.
pub fn final_unitary_state(seq: &FixedSequence, magic_offset: f64) -> Result<StateVector, ProverError> {
    let mut state = StateVector::product(&seq.inputs, magic_offset, DEFAULT_MAX_LINES)?;
    for op in &seq.ops {
        if let Some(g) = op.unitary() {
            state.apply(&g);
        }
    }
    Ok(state)
}

/// Joint distribution of `lines` read out after the full unitary, indexed by outcome bits
/// (bit `i` is the outcome of `lines[i]`).
pub fn joint_distribution_unitary(
    seq: &FixedSequence,
    lines: &[Line],
    magic_offset: f64,
) -> Result<Vec<f64>, ProverError> {
    let state = final_unitary_state(seq, magic_offset)?;
    let mut dist = vec![0.0; 1 << lines.len()];
    for (idx, a) in state.amplitudes().iter().enumerate() {
        let key = lines
            .iter()
            .enumerate()
            .fold(0usize, |k, (i, &l)| k | ((idx >> l & 1) << i));
        dist[key] += a.norm_sqr();
    }
    Ok(dist)
}

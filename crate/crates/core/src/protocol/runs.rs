use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::circuit::{AdaptiveCircuit, Clifford, FixedOp, FixedSequence, Line};
use crate::polysim::{joint_output_distribution, single_output_probability};
use crate::prover::{Device, Transcript};

use super::plan::{hoeffding_half_width, TestPlan};
use super::ProtocolError;

/// Outcomes whose classical probability is below this are treated as impossible.
pub const IMPOSSIBLE: f64 = 1e-12;

/// A batch that stopped before its planned repetitions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Interruption {
    /// An outcome with classical probability zero was observed.
    ImpossibleOutcome { repetition: u64, outcome: String },
    /// The device failed mid-batch.
    DeviceFailure { error: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateTestResult {
    pub planned: u64,
    pub completed: u64,
    /// Frequency of output 0.
    pub p_hat: f64,
    pub ci_half_width: f64,
    /// Verifier-computed probability of output 0.
    pub p_classical: f64,
    pub deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub interruption: Option<Interruption>,
}

/// Joint readout of the gadget ancilla and the extra check lines at one gadget stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtraLineCheck {
    /// 1-based gadget index.
    pub gadget: usize,
    /// Ancilla first, then the extra lines; bit `i` of a distribution index is `lines[i]`.
    pub lines: Vec<Line>,
    pub expected: Vec<f64>,
    pub observed: Vec<f64>,
    pub tv_distance: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GadgetTestResult {
    /// 1-based gadget index.
    pub gadget: usize,
    pub target: Line,
    pub ancilla: Line,
    pub planned: u64,
    pub completed: u64,
    /// Frequency of readout 1.
    pub p_hat: f64,
    pub ci_half_width: f64,
    pub deviation: f64,
    /// Acceptance band around 1/2.
    pub tolerance: f64,
    pub passed: bool,
    pub extra: Option<ExtraLineCheck>,
    pub interruption: Option<Interruption>,
}

impl GadgetTestResult {
    pub fn all_passed(&self) -> bool {
        self.passed && self.extra.as_ref().is_none_or(|e| e.passed) && self.interruption.is_none()
    }
}

/// The single adaptive run whose output is to be certified.
pub fn run_computational<D: Device + ?Sized>(
    device: &D,
    circuit: &AdaptiveCircuit,
    seed: u64,
) -> Result<Transcript, ProtocolError> {
    device
        .run_adaptive(circuit, seed)
        .map_err(|e| ProtocolError::Device(e.to_string()))
}

fn frequency(count: u64, n: u64) -> f64 {
    if n == 0 {
        0.0
    } else {
        count as f64 / n as f64
    }
}

/// Re-run the recorded gate sequence non-adaptively `plan.r_gate` times and compare the
/// frequency of output 0 with the classically computed probability.
pub fn run_gate_tests<D: Device + ?Sized>(
    device: &D,
    transcript: &Transcript,
    plan: &TestPlan,
    seed: u64,
) -> Result<GateTestResult, ProtocolError> {
    let seq = &transcript.resolved;
    let p_classical = single_output_probability(seq, false)?;
    let impossible = [p_classical < IMPOSSIBLE, 1.0 - p_classical < IMPOSSIBLE];
    let mut zeros = 0u64;
    let mut seen = 0u64;
    let mut interruption = None;
    let mut sink = |r: u64, bits: &[bool]| {
        let out = *bits.last().expect("run has an output");
        seen += 1;
        if !out {
            zeros += 1;
        }
        if impossible[usize::from(out)] {
            interruption = Some(Interruption::ImpossibleOutcome {
                repetition: r,
                outcome: u8::from(out).to_string(),
            });
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    };
    if let Err(e) = device.run_fixed_batch(seq, seed, plan.r_gate, &mut sink) {
        interruption = Some(Interruption::DeviceFailure {
            error: e.to_string(),
        });
    }
    let completed = seen;
    let p_hat = frequency(zeros, completed);
    let deviation = (p_hat - p_classical).abs();
    let passed = interruption.is_none() && completed == plan.r_gate && deviation <= plan.eta;
    Ok(GateTestResult {
        planned: plan.r_gate,
        completed,
        p_hat,
        ci_half_width: hoeffding_half_width(completed, plan.delta),
        p_classical,
        deviation,
        tolerance: plan.eta,
        passed,
        interruption,
    })
}

/// Prefix of the recorded sequence up to the ancilla readout of gadget `gadget` (0-based),
/// with earlier gadgets frozen to their recorded outcomes, followed by readouts of up to
/// `extra` further lines. Returns the prefix and the lines read out (ancilla first).
pub fn measurement_prefix(
    resolved: &FixedSequence,
    gadget: usize,
    extra: usize,
) -> Option<(FixedSequence, Vec<Line>)> {
    let pos = resolved.gadget_measurement(gadget)?;
    let (target, ancilla) = match (&resolved.ops[pos.checked_sub(1)?], &resolved.ops[pos]) {
        (FixedOp::Gate(Clifford::Cx(t, a)), FixedOp::GadgetMeasure { ancilla, .. })
            if a == ancilla =>
        {
            (*t, *ancilla)
        }
        _ => return None,
    };
    let mut ops = resolved.ops[..=pos].to_vec();
    let mut measured = vec![false; resolved.n_lines];
    for op in &ops {
        if let Some(l) = op.measured_line() {
            measured[l] = true;
        }
    }
    let future_ancillas: Vec<Line> = resolved.ops[pos + 1..]
        .iter()
        .filter_map(|op| match op {
            FixedOp::GadgetMeasure { ancilla, .. } => Some(*ancilla),
            _ => None,
        })
        .collect();
    let candidates = std::iter::once(target).chain(0..resolved.n_lines);
    let mut lines = vec![ancilla];
    for l in candidates {
        if lines.len() > extra {
            break;
        }
        if !measured[l] && !future_ancillas.contains(&l) && !lines.contains(&l) {
            lines.push(l);
        }
    }
    for &l in &lines[1..] {
        ops.push(FixedOp::Measure {
            line: l,
            label: "check".into(),
        });
    }
    let prefix = FixedSequence {
        n_lines: resolved.n_lines,
        inputs: resolved.inputs.clone(),
        ops,
        frozen_outcomes: resolved.frozen_outcomes[..=gadget].to_vec(),
    };
    Some((prefix, lines))
}

/// Measurement test runs for every gadget, in order. `seed_for(i)` gives the batch seed of
/// gadget `i` (0-based).
pub fn run_measurement_tests<D: Device + ?Sized>(
    device: &D,
    transcript: &Transcript,
    plan: &TestPlan,
    seed_for: impl Fn(usize) -> u64,
) -> Result<Vec<GadgetTestResult>, ProtocolError> {
    let resolved = &transcript.resolved;
    let t = resolved.gadget_count();
    let mut results = Vec::with_capacity(t);
    for i in 0..t {
        let (prefix, lines) = measurement_prefix(resolved, i, plan.extra_check_lines)
            .ok_or_else(|| ProtocolError::Malformed(format!("gadget {} has no ancilla readout", i + 1)))?;
        results.push(gadget_stage(device, &prefix, &lines, i, plan, seed_for(i))?);
    }
    Ok(results)
}

fn gadget_stage<D: Device + ?Sized>(
    device: &D,
    prefix: &FixedSequence,
    lines: &[Line],
    gadget: usize,
    plan: &TestPlan,
    seed: u64,
) -> Result<GadgetTestResult, ProtocolError> {
    let (target, ancilla) = match prefix.ops[prefix.gadget_measurement(gadget).expect("prefix ends at gadget") - 1] {
        FixedOp::Gate(Clifford::Cx(t, a)) => (t, a),
        _ => unreachable!("gadget readout follows its CX"),
    };
    let expected = joint_output_distribution(prefix, lines, plan.k_max)?;
    let readout_index: Vec<usize> = {
        let positions = prefix.measurement_positions();
        lines
            .iter()
            .map(|&l| {
                let pos = prefix.measurement_of(l).expect("line is read out");
                positions.iter().position(|&p| p == pos).expect("position is a measurement")
            })
            .collect()
    };
    let mut counts = vec![0u64; expected.len()];
    let mut interruption = None;
    let mut sink = |r: u64, bits: &[bool]| {
        let key = readout_index
            .iter()
            .enumerate()
            .fold(0usize, |k, (i, &j)| k | (usize::from(bits[j]) << i));
        counts[key] += 1;
        if expected[key] < IMPOSSIBLE {
            interruption = Some(Interruption::ImpossibleOutcome {
                repetition: r,
                outcome: (0..lines.len())
                    .map(|i| if key >> i & 1 == 1 { '1' } else { '0' })
                    .collect(),
            });
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    };
    if let Err(e) = device.run_fixed_batch(prefix, seed, plan.r_meas, &mut sink) {
        interruption = Some(Interruption::DeviceFailure {
            error: e.to_string(),
        });
    }
    let completed: u64 = counts.iter().sum();
    let ones: u64 = counts
        .iter()
        .enumerate()
        .filter(|(k, _)| k & 1 == 1)
        .map(|(_, c)| c)
        .sum();
    let p_hat = frequency(ones, completed);
    let deviation = (p_hat - 0.5).abs();
    let complete = interruption.is_none() && completed == plan.r_meas;
    let band = plan.gadget_band();
    let extra = (lines.len() > 1).then(|| {
        let observed: Vec<f64> = counts.iter().map(|&c| frequency(c, completed)).collect();
        let tv_distance = observed
            .iter()
            .zip(&expected)
            .map(|(o, e)| (o - e).abs())
            .sum::<f64>()
            / 2.0;
        ExtraLineCheck {
            gadget: gadget + 1,
            lines: lines.to_vec(),
            expected: expected.clone(),
            observed,
            tv_distance,
            tolerance: plan.eta,
            passed: complete && tv_distance <= plan.eta,
        }
    });
    Ok(GadgetTestResult {
        gadget: gadget + 1,
        target,
        ancilla,
        planned: plan.r_meas,
        completed,
        p_hat,
        ci_half_width: hoeffding_half_width(completed, plan.delta),
        deviation,
        tolerance: band,
        passed: complete && deviation <= band,
        extra,
        interruption,
    })
}

//! Random circuit generators shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use gadgetcheck::circuit::{AdaptiveCircuit, Clifford, FixedOp, FixedSequence, InputState, Instruction, Line};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_input<R: Rng>(rng: &mut R) -> InputState {
    match rng.random_range(0..4) {
        0 => InputState::Zero,
        1 => InputState::One,
        2 => InputState::Magic,
        _ => InputState::General {
            theta: rng.random_range(0.0..=PI),
            phi: rng.random_range(0.0..2.0 * PI),
        },
    }
}

pub fn random_clifford<R: Rng>(rng: &mut R, lines: &[Line]) -> Clifford {
    let pick = |rng: &mut R| lines[rng.random_range(0..lines.len())];
    let two = lines.len() >= 2 && rng.random_bool(0.4);
    if two {
        let a = pick(rng);
        let mut b = pick(rng);
        while b == a {
            b = pick(rng);
        }
        match rng.random_range(0..3) {
            0 => Clifford::Cx(a, b),
            1 => Clifford::Cz(a, b),
            _ => Clifford::Swap(a, b),
        }
    } else {
        let a = pick(rng);
        match rng.random_range(0..6) {
            0 => Clifford::H(a),
            1 => Clifford::S(a),
            2 => Clifford::Sdg(a),
            3 => Clifford::X(a),
            4 => Clifford::Y(a),
            _ => Clifford::Z(a),
        }
    }
}

/// Non-adaptive Clifford sequence on `n` lines with `depth` gates, random product inputs and
/// the output read from a random line at the end.
pub fn random_unitary_sequence<R: Rng>(rng: &mut R, n: usize, depth: usize) -> FixedSequence {
    let lines: Vec<Line> = (0..n).collect();
    let mut ops: Vec<FixedOp> = (0..depth)
        .map(|_| FixedOp::Gate(random_clifford(rng, &lines)))
        .collect();
    ops.push(FixedOp::Measure {
        line: rng.random_range(0..n),
        label: "out".into(),
    });
    FixedSequence {
        n_lines: n,
        inputs: (0..n).map(|_| random_input(rng)).collect(),
        ops,
        frozen_outcomes: Vec::new(),
    }
}

/// Like [`random_unitary_sequence`] but some lines are measured mid-circuit and never touched again.
pub fn random_sequence_with_discards<R: Rng>(rng: &mut R, n: usize, depth: usize) -> FixedSequence {
    assert!(n >= 2);
    let mut live: Vec<Line> = (0..n).collect();
    let mut ops = Vec::new();
    let mut k = 0;
    for _ in 0..depth {
        if live.len() > 1 && rng.random_bool(0.12) {
            let line = live.remove(rng.random_range(0..live.len()));
            ops.push(FixedOp::Measure {
                line,
                label: format!("m{k}"),
            });
            k += 1;
        } else {
            ops.push(FixedOp::Gate(random_clifford(rng, &live)));
        }
    }
    ops.push(FixedOp::Measure {
        line: live[rng.random_range(0..live.len())],
        label: "out".into(),
    });
    FixedSequence {
        n_lines: n,
        inputs: (0..n).map(|_| random_input(rng)).collect(),
        ops,
        frozen_outcomes: Vec::new(),
    }
}

/// Valid adaptive circuit with `t` bare T gates (not yet gadgetized) among Clifford gates.
pub fn random_adaptive<R: Rng>(rng: &mut R, n: usize, depth: usize, t: usize) -> AdaptiveCircuit {
    let lines: Vec<Line> = (0..n).collect();
    let mut ins: Vec<Instruction> = (0..depth)
        .map(|_| Instruction::Gate(random_clifford(rng, &lines)))
        .collect();
    for _ in 0..t {
        let pos = rng.random_range(0..=ins.len());
        ins.insert(pos, Instruction::T(rng.random_range(0..n)));
    }
    ins.push(Instruction::Measure {
        line: rng.random_range(0..n),
        label: "out".into(),
    });
    AdaptiveCircuit::with_inputs((0..n).map(|_| random_input(rng)).collect(), ins)
}

/// Insert readouts of `lines` (those not already measured) just before the final output.
pub fn with_readouts(seq: &FixedSequence, lines: &[Line]) -> FixedSequence {
    let mut out = seq.clone();
    let last = out.ops.pop().expect("sequence has an output");
    for &l in lines {
        if out.ops.iter().all(|op| op.measured_line() != Some(l)) && last.measured_line() != Some(l) {
            out.ops.push(FixedOp::Measure {
                line: l,
                label: format!("r{l}"),
            });
        }
    }
    out.ops.push(last);
    out
}

//! Circuit representation for adaptive Clifford computations with magic-state inputs.
//!
//! An [`AdaptiveCircuit`] is a list of [`Instruction`]s over `n_lines` qubit lines, each line
//! prepared in a product [`InputState`]. The only adaptation allowed is the T-gadget, whose
//! single-qubit `S^m` correction depends on its own ancilla measurement. Resolving the gadgets
//! against a recorded outcome vector yields a [`FixedSequence`], a plain non-adaptive Clifford
//! circuit with intermediate measurements.

mod gadget;
mod parse;
mod text;
mod validate;

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

pub use gadget::{gadgetize, resolve, ResolveError};
pub use parse::{parse_circuit, parse_fixed, ParseError, ParseErrorKind};
pub use text::{serialize, serialize_fixed};
pub use validate::{validate, Violation};

/// Index of a qubit line.
pub type Line = usize;

/// Label carried by the final output measurement.
pub const OUTPUT_LABEL: &str = "out";

/// Product-state preparation of a single line.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub enum InputState {
    #[default]
    Zero,
    One,
    /// `|A> = (|0> + e^{iπ/4}|1>)/√2`.
    Magic,
    /// `cos(θ/2)|0> + e^{iφ} sin(θ/2)|1>` with `0 ≤ θ ≤ π`, `0 ≤ φ < 2π`.
    General { theta: f64, phi: f64 },
}

impl InputState {
    /// Bloch angles `(θ, φ)` of the state.
    pub fn angles(&self) -> (f64, f64) {
        match *self {
            InputState::Zero => (0.0, 0.0),
            InputState::One => (PI, 0.0),
            InputState::Magic => (PI / 2.0, FRAC_PI_4),
            InputState::General { theta, phi } => (theta, phi),
        }
    }

    /// Single-qubit expectations `(<X>, <Y>, <Z>)`.
    pub fn bloch(&self) -> [f64; 3] {
        match *self {
            // Exact values for the named states; the general formula leaves 1e-17 residues.
            InputState::Zero => [0.0, 0.0, 1.0],
            InputState::One => [0.0, 0.0, -1.0],
            InputState::Magic => [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2, 0.0],
            InputState::General { theta, phi } => [
                theta.sin() * phi.cos(),
                theta.sin() * phi.sin(),
                theta.cos(),
            ],
        }
    }

    pub fn angles_in_range(&self) -> bool {
        match *self {
            InputState::General { theta, phi } => {
                (0.0..=PI).contains(&theta) && (0.0..2.0 * PI).contains(&phi)
            }
            _ => true,
        }
    }
}

/// Unitary Clifford gates of the fixed generating set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Clifford {
    H(Line),
    S(Line),
    Sdg(Line),
    X(Line),
    Y(Line),
    Z(Line),
    /// Control, target.
    Cx(Line, Line),
    Cz(Line, Line),
    Swap(Line, Line),
}

impl Clifford {
    pub fn mnemonic(&self) -> &'static str {
        match self {
            Clifford::H(_) => "H",
            Clifford::S(_) => "S",
            Clifford::Sdg(_) => "SDG",
            Clifford::X(_) => "X",
            Clifford::Y(_) => "Y",
            Clifford::Z(_) => "Z",
            Clifford::Cx(..) => "CX",
            Clifford::Cz(..) => "CZ",
            Clifford::Swap(..) => "SWAP",
        }
    }

    pub fn lines(&self) -> Vec<Line> {
        match *self {
            Clifford::H(a)
            | Clifford::S(a)
            | Clifford::Sdg(a)
            | Clifford::X(a)
            | Clifford::Y(a)
            | Clifford::Z(a) => vec![a],
            Clifford::Cx(a, b) | Clifford::Cz(a, b) | Clifford::Swap(a, b) => vec![a, b],
        }
    }

    /// The inverse gate.
    pub fn adjoint(&self) -> Clifford {
        match *self {
            Clifford::S(a) => Clifford::Sdg(a),
            Clifford::Sdg(a) => Clifford::S(a),
            g => g,
        }
    }
}

/// One instruction of an adaptive circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Instruction {
    Gate(Clifford),
    Measure { line: Line, label: String },
    /// Non-Clifford `diag(1, e^{iπ/4})`; only present before gadgetization.
    T(Line),
    /// `CX(target, ancilla)`, measure the ancilla to get `m`, then `S^m` on the target.
    TGadget { target: Line, ancilla: Line },
}

impl Instruction {
    /// Every line this instruction touches.
    pub fn lines(&self) -> Vec<Line> {
        match self {
            Instruction::Gate(g) => g.lines(),
            Instruction::Measure { line, .. } => vec![*line],
            Instruction::T(l) => vec![*l],
            Instruction::TGadget { target, ancilla } => vec![*target, *ancilla],
        }
    }

    /// Line discarded by this instruction, if any.
    pub fn measured_line(&self) -> Option<Line> {
        match self {
            Instruction::Measure { line, .. } => Some(*line),
            Instruction::TGadget { ancilla, .. } => Some(*ancilla),
            _ => None,
        }
    }
}

impl TryFrom<&Instruction> for Clifford {
    type Error = NonUnitary;

    fn try_from(ins: &Instruction) -> Result<Self, Self::Error> {
        match ins {
            Instruction::Gate(g) => Ok(*g),
            other => Err(NonUnitary(format!("{other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("instruction is not a unitary Clifford gate: {0}")]
pub struct NonUnitary(pub String);

/// A circuit whose only adaptation is through T-gadgets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveCircuit {
    pub n_lines: usize,
    pub inputs: Vec<InputState>,
    pub instructions: Vec<Instruction>,
}

impl AdaptiveCircuit {
    /// An empty circuit with every line in `|0>`.
    pub fn new(n_lines: usize) -> Self {
        AdaptiveCircuit {
            n_lines,
            inputs: vec![InputState::Zero; n_lines],
            instructions: Vec::new(),
        }
    }

    pub fn with_inputs(inputs: Vec<InputState>, instructions: Vec<Instruction>) -> Self {
        AdaptiveCircuit {
            n_lines: inputs.len(),
            inputs,
            instructions,
        }
    }

    pub fn push(&mut self, ins: Instruction) -> &mut Self {
        self.instructions.push(ins);
        self
    }

    /// The line measured by the final instruction.
    pub fn output_line(&self) -> Option<Line> {
        match self.instructions.last() {
            Some(Instruction::Measure { line, .. }) => Some(*line),
            _ => None,
        }
    }

    pub fn gadget_count(&self) -> usize {
        self.instructions
            .iter()
            .filter(|i| matches!(i, Instruction::TGadget { .. }))
            .count()
    }

    pub fn t_count(&self) -> usize {
        self.instructions
            .iter()
            .filter(|i| matches!(i, Instruction::T(_)))
            .count()
    }
}

/// Operation of a resolved, non-adaptive sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FixedOp {
    Gate(Clifford),
    Measure { line: Line, label: String },
    /// Ancilla measurement of gadget number `gadget` (0-based).
    GadgetMeasure { ancilla: Line, gadget: usize },
    /// Frozen correction `S^exponent` on the gadget target; exponent 0 is an explicit no-op.
    SCorrection { target: Line, exponent: u8, gadget: usize },
}

impl FixedOp {
    pub fn lines(&self) -> Vec<Line> {
        match self {
            FixedOp::Gate(g) => g.lines(),
            FixedOp::Measure { line, .. } => vec![*line],
            FixedOp::GadgetMeasure { ancilla, .. } => vec![*ancilla],
            FixedOp::SCorrection { target, .. } => vec![*target],
        }
    }

    pub fn measured_line(&self) -> Option<Line> {
        match self {
            FixedOp::Measure { line, .. } => Some(*line),
            FixedOp::GadgetMeasure { ancilla, .. } => Some(*ancilla),
            _ => None,
        }
    }

    /// The unitary this op applies, if any. `S^0` has none.
    pub fn unitary(&self) -> Option<Clifford> {
        match *self {
            FixedOp::Gate(g) => Some(g),
            FixedOp::SCorrection {
                target,
                exponent: 1,
                ..
            } => Some(Clifford::S(target)),
            _ => None,
        }
    }
}

/// A fully resolved non-adaptive Clifford circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedSequence {
    pub n_lines: usize,
    pub inputs: Vec<InputState>,
    pub ops: Vec<FixedOp>,
    /// Gadget outcomes the corrections were frozen to, in gadget order.
    pub frozen_outcomes: Vec<bool>,
}

impl FixedSequence {
    /// The line measured by the final op.
    pub fn output_line(&self) -> Option<Line> {
        self.ops.last().and_then(FixedOp::measured_line)
    }

    /// Positions of all measurement ops, in order.
    pub fn measurement_positions(&self) -> Vec<usize> {
        self.ops
            .iter()
            .enumerate()
            .filter_map(|(i, op)| op.measured_line().map(|_| i))
            .collect()
    }

    /// Position of the measurement of `line`, if it is measured.
    pub fn measurement_of(&self, line: Line) -> Option<usize> {
        self.ops.iter().position(|op| op.measured_line() == Some(line))
    }

    /// Position of the ancilla measurement of gadget `gadget`.
    pub fn gadget_measurement(&self, gadget: usize) -> Option<usize> {
        self.ops.iter().position(
            |op| matches!(op, FixedOp::GadgetMeasure { gadget: g, .. } if *g == gadget),
        )
    }

    pub fn gadget_count(&self) -> usize {
        self.ops
            .iter()
            .filter(|op| matches!(op, FixedOp::GadgetMeasure { .. }))
            .count()
    }

    /// Lines not measured anywhere in the sequence.
    pub fn unmeasured_lines(&self) -> Vec<Line> {
        let mut measured = vec![false; self.n_lines];
        for op in &self.ops {
            if let Some(l) = op.measured_line() {
                measured[l] = true;
            }
        }
        (0..self.n_lines).filter(|&l| !measured[l]).collect()
    }
}

impl fmt::Display for AdaptiveCircuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize(self))
    }
}

impl fmt::Display for FixedSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_fixed(self))
    }
}

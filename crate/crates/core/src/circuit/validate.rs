use std::fmt;

use serde::Serialize;

use super::{AdaptiveCircuit, InputState, Instruction, Line, OUTPUT_LABEL};

/// A structural defect found by [`validate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "code", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Violation {
    NoLines,
    InputCountMismatch { expected: usize, found: usize },
    InputAngleOutOfRange { line: Line },
    LineOutOfRange { instruction: usize, line: Line },
    RepeatedTarget { instruction: usize, line: Line },
    MeasuredLineReused { instruction: usize, line: Line },
    AncillaNotMagic { instruction: usize, ancilla: Line },
    AncillaNotFresh { instruction: usize, ancilla: Line },
    OutputNotFinalMeasurement,
    OutputLabel { label: String },
}

impl Violation {
    /// Stable upper-case identifier.
    pub fn code(&self) -> &'static str {
        match self {
            Violation::NoLines => "NO_LINES",
            Violation::InputCountMismatch { .. } => "INPUT_COUNT_MISMATCH",
            Violation::InputAngleOutOfRange { .. } => "INPUT_ANGLE_OUT_OF_RANGE",
            Violation::LineOutOfRange { .. } => "LINE_OUT_OF_RANGE",
            Violation::RepeatedTarget { .. } => "REPEATED_TARGET",
            Violation::MeasuredLineReused { .. } => "MEASURED_LINE_REUSED",
            Violation::AncillaNotMagic { .. } => "ANCILLA_NOT_MAGIC",
            Violation::AncillaNotFresh { .. } => "ANCILLA_NOT_FRESH",
            Violation::OutputNotFinalMeasurement => "OUTPUT_NOT_FINAL_MEASUREMENT",
            Violation::OutputLabel { .. } => "OUTPUT_LABEL",
        }
    }

    /// Index of the offending instruction, when the violation is local to one.
    pub fn instruction(&self) -> Option<usize> {
        match *self {
            Violation::LineOutOfRange { instruction, .. }
            | Violation::RepeatedTarget { instruction, .. }
            | Violation::MeasuredLineReused { instruction, .. }
            | Violation::AncillaNotMagic { instruction, .. }
            | Violation::AncillaNotFresh { instruction, .. } => Some(instruction),
            _ => None,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoLines => write!(f, "circuit has no lines"),
            Violation::InputCountMismatch { expected, found } => {
                write!(f, "{found} inputs declared for {expected} lines")
            }
            Violation::InputAngleOutOfRange { line } => {
                write!(f, "GENERAL angles of line {line} outside 0<=theta<=pi, 0<=phi<2pi")
            }
            Violation::LineOutOfRange { line, .. } => write!(f, "line {line} is not declared"),
            Violation::RepeatedTarget { line, .. } => {
                write!(f, "line {line} used twice by one instruction")
            }
            Violation::MeasuredLineReused { line, .. } => {
                write!(f, "line {line} used after its measurement")
            }
            Violation::AncillaNotMagic { ancilla, .. } => {
                write!(f, "gadget ancilla {ancilla} is not prepared in MAGIC")
            }
            Violation::AncillaNotFresh { ancilla, .. } => {
                write!(f, "gadget ancilla {ancilla} was acted on before the gadget")
            }
            Violation::OutputNotFinalMeasurement => {
                write!(f, "final instruction is not the output measurement")
            }
            Violation::OutputLabel { label } => {
                write!(f, "output measurement labelled {label:?}, expected {OUTPUT_LABEL:?}")
            }
        }
    }
}

/// Collect every structural violation of `c`. An empty list means the circuit is valid.
pub fn validate(c: &AdaptiveCircuit) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = c.n_lines;
    if n == 0 {
        out.push(Violation::NoLines);
    }
    if c.inputs.len() != n {
        out.push(Violation::InputCountMismatch {
            expected: n,
            found: c.inputs.len(),
        });
    }
    for (line, s) in c.inputs.iter().enumerate() {
        if !s.angles_in_range() {
            out.push(Violation::InputAngleOutOfRange { line });
        }
    }

    let mut measured = vec![false; n];
    let mut touched = vec![false; n];
    for (idx, ins) in c.instructions.iter().enumerate() {
        let lines = ins.lines();
        let mut in_range = true;
        for &l in &lines {
            if l >= n {
                out.push(Violation::LineOutOfRange {
                    instruction: idx,
                    line: l,
                });
                in_range = false;
            }
        }
        if lines.len() == 2 && lines[0] == lines[1] {
            out.push(Violation::RepeatedTarget {
                instruction: idx,
                line: lines[0],
            });
        }
        if !in_range {
            continue;
        }
        for &l in &lines {
            if measured[l] {
                out.push(Violation::MeasuredLineReused {
                    instruction: idx,
                    line: l,
                });
            }
        }
        if let Instruction::TGadget { ancilla, .. } = *ins {
            if c.inputs.get(ancilla) != Some(&InputState::Magic) {
                out.push(Violation::AncillaNotMagic {
                    instruction: idx,
                    ancilla,
                });
            }
            if touched[ancilla] {
                out.push(Violation::AncillaNotFresh {
                    instruction: idx,
                    ancilla,
                });
            }
        }
        for &l in &lines {
            touched[l] = true;
        }
        if let Some(l) = ins.measured_line() {
            measured[l] = true;
        }
    }

    match c.instructions.last() {
        Some(Instruction::Measure { label, .. }) => {
            if label != OUTPUT_LABEL {
                out.push(Violation::OutputLabel {
                    label: label.clone(),
                });
            }
        }
        _ => out.push(Violation::OutputNotFinalMeasurement),
    }
    out
}

/// Scan property shared with fixed sequences: no line appears after its measurement.
pub(crate) fn first_reuse<I>(n_lines: usize, ops: I) -> Option<(usize, Line)>
where
    I: IntoIterator<Item = (Vec<Line>, Option<Line>)>,
{
    let mut measured = vec![false; n_lines];
    for (idx, (lines, m)) in ops.into_iter().enumerate() {
        for l in lines {
            if l < n_lines && measured[l] {
                return Some((idx, l));
            }
        }
        if let Some(l) = m {
            if l < n_lines {
                measured[l] = true;
            }
        }
    }
    None
}

use std::fmt::Write;

use super::{AdaptiveCircuit, Clifford, FixedOp, FixedSequence, InputState, Instruction};

pub(super) fn input_token(s: &InputState) -> String {
    match s {
        InputState::Zero => "ZERO".into(),
        InputState::One => "ONE".into(),
        InputState::Magic => "MAGIC".into(),
        InputState::General { theta, phi } => format!("GENERAL {theta:?} {phi:?}"),
    }
}

fn gate_line(g: &Clifford) -> String {
    match g {
        Clifford::H(a)
        | Clifford::S(a)
        | Clifford::Sdg(a)
        | Clifford::X(a)
        | Clifford::Y(a)
        | Clifford::Z(a) => format!("{} {a}", g.mnemonic()),
        Clifford::Cx(a, b) | Clifford::Cz(a, b) | Clifford::Swap(a, b) => {
            format!("{} {a} {b}", g.mnemonic())
        }
    }
}

fn header(out: &mut String, n_lines: usize, inputs: &[InputState]) {
    let _ = writeln!(out, "qubits {n_lines}");
    for (i, s) in inputs.iter().enumerate() {
        let _ = writeln!(out, "input {i} {}", input_token(s));
    }
}

/// Canonical text of an adaptive circuit: header, one `input` line per line, then instructions.
pub fn serialize(c: &AdaptiveCircuit) -> String {
    let mut out = String::new();
    header(&mut out, c.n_lines, &c.inputs);
    for ins in &c.instructions {
        let _ = match ins {
            Instruction::Gate(g) => writeln!(out, "{}", gate_line(g)),
            Instruction::Measure { line, label } => writeln!(out, "MEASURE {line} {label}"),
            Instruction::T(l) => writeln!(out, "T {l}"),
            Instruction::TGadget { target, ancilla } => {
                writeln!(out, "TGADGET {target} {ancilla}")
            }
        };
    }
    out
}

/// Canonical text of a resolved sequence. Gadget expansions appear as
/// `CX`, `GMEASURE <ancilla> <gadget>` and `SCORR <target> <m> <gadget>`.
pub fn serialize_fixed(seq: &FixedSequence) -> String {
    let mut out = String::new();
    header(&mut out, seq.n_lines, &seq.inputs);
    let bits: String = if seq.frozen_outcomes.is_empty() {
        "-".into()
    } else {
        seq.frozen_outcomes
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    };
    let _ = writeln!(out, "frozen {bits}");
    for op in &seq.ops {
        let _ = match op {
            FixedOp::Gate(g) => writeln!(out, "{}", gate_line(g)),
            FixedOp::Measure { line, label } => writeln!(out, "MEASURE {line} {label}"),
            FixedOp::GadgetMeasure { ancilla, gadget } => {
                writeln!(out, "GMEASURE {ancilla} {gadget}")
            }
            FixedOp::SCorrection {
                target,
                exponent,
                gadget,
            } => writeln!(out, "SCORR {target} {exponent} {gadget}"),
        };
    }
    out
}

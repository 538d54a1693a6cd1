use super::{AdaptiveCircuit, Clifford, FixedOp, FixedSequence, InputState, Instruction};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ResolveError {
    #[error("circuit has {expected} gadgets but {found} outcomes were given")]
    LengthMismatch { expected: usize, found: usize },
    #[error("instruction {0} is a bare T gate; gadgetize the circuit first")]
    UngadgetizedT(usize),
}

/// Replace every `T k` with `TGADGET k a`, where `a` is a fresh line appended after the
/// existing ones (in T order) and prepared in `MAGIC`.
pub fn gadgetize(c: &AdaptiveCircuit) -> AdaptiveCircuit {
    let mut out = AdaptiveCircuit {
        n_lines: c.n_lines,
        inputs: c.inputs.clone(),
        instructions: Vec::with_capacity(c.instructions.len()),
    };
    for ins in &c.instructions {
        match *ins {
            Instruction::T(target) => {
                let ancilla = out.n_lines;
                out.n_lines += 1;
                out.inputs.push(InputState::Magic);
                out.instructions.push(Instruction::TGadget { target, ancilla });
            }
            ref other => out.instructions.push(other.clone()),
        }
    }
    out
}

/// Freeze gadget `i` to outcome `outcomes[i]`: `CX(target, ancilla)`, ancilla measurement,
/// then `S^m` on the target. `S^0` stays in the sequence as an explicit no-op.
pub fn resolve(c: &AdaptiveCircuit, outcomes: &[bool]) -> Result<FixedSequence, ResolveError> {
    let t = c.gadget_count();
    if outcomes.len() != t {
        return Err(ResolveError::LengthMismatch {
            expected: t,
            found: outcomes.len(),
        });
    }
    let mut ops = Vec::with_capacity(c.instructions.len() + 2 * t);
    let mut gadget = 0;
    for (idx, ins) in c.instructions.iter().enumerate() {
        match ins {
            Instruction::Gate(g) => ops.push(FixedOp::Gate(*g)),
            Instruction::Measure { line, label } => ops.push(FixedOp::Measure {
                line: *line,
                label: label.clone(),
            }),
            Instruction::T(_) => return Err(ResolveError::UngadgetizedT(idx)),
            Instruction::TGadget { target, ancilla } => {
                ops.push(FixedOp::Gate(Clifford::Cx(*target, *ancilla)));
                ops.push(FixedOp::GadgetMeasure {
                    ancilla: *ancilla,
                    gadget,
                });
                ops.push(FixedOp::SCorrection {
                    target: *target,
                    exponent: u8::from(outcomes[gadget]),
                    gadget,
                });
                gadget += 1;
            }
        }
    }
    Ok(FixedSequence {
        n_lines: c.n_lines,
        inputs: c.inputs.clone(),
        ops,
        frozen_outcomes: outcomes.to_vec(),
    })
}

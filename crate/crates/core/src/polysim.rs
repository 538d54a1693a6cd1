//! Polynomial-time output probabilities of non-adaptive Clifford sequences on product inputs.
//!
//! The measured observable `Z_line` is pulled back through the unitary part of the sequence
//! (`U† Z U`, one gate at a time in reverse), which stays a signed Pauli string. Its expectation
//! on a product input factorises over lines. Intermediate measurements act on lines that are
//! never touched again, so they commute with everything after them and can be deferred to the
//! end; the output marginal is then exactly that of the measurement-free unitary.

use serde::{Deserialize, Serialize};

use crate::circuit::{FixedSequence, InputState, Line};
use crate::pauli::{multiply, Pauli, PauliError, PauliOperator};

/// Default cap on simultaneously measured lines (`2^k` terms in the projector expansion).
pub const DEFAULT_K_MAX: usize = 10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PolysimError {
    #[error("position {at} is past the end of a {len}-op sequence")]
    PositionOutOfRange { at: usize, len: usize },
    #[error("line {line} out of range for {n} lines")]
    LineOutOfRange { line: Line, n: usize },
    #[error("{k} lines requested but at most {k_max} are supported")]
    TooManyLines { k: usize, k_max: usize },
    #[error("line {0} is not measured in the sequence")]
    Unmeasured(Line),
    #[error("{lines} lines but {outcomes} outcomes")]
    OutcomeCount { lines: usize, outcomes: usize },
    #[error("sequence has no output measurement")]
    NoOutput,
    #[error(transparent)]
    Pauli(#[from] PauliError),
}

/// Per-line `(<X>, <Y>, <Z>)` of a product input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductExpectationTable {
    rows: Vec<[f64; 3]>,
}

impl ProductExpectationTable {
    pub fn from_inputs(inputs: &[InputState]) -> Self {
        ProductExpectationTable {
            rows: inputs.iter().map(InputState::bloch).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, line: Line) -> [f64; 3] {
        self.rows[line]
    }
}

/// `U† Z_line U` for the unitary part of `seq.ops[..at]`.
pub fn backpropagate(
    seq: &FixedSequence,
    line: Line,
    at: usize,
) -> Result<PauliOperator, PolysimError> {
    if at > seq.ops.len() {
        return Err(PolysimError::PositionOutOfRange {
            at,
            len: seq.ops.len(),
        });
    }
    if line >= seq.n_lines {
        return Err(PolysimError::LineOutOfRange {
            line,
            n: seq.n_lines,
        });
    }
    let mut p = PauliOperator::z(seq.n_lines, line);
    for op in seq.ops[..at].iter().rev() {
        if let Some(g) = op.unitary() {
            p.conjugate_adjoint_in_place(&g)?;
        }
    }
    Ok(p)
}

/// `sign · Π_i <P_i>` on the product input.
pub fn expectation(p: &PauliOperator, inputs: &ProductExpectationTable) -> f64 {
    debug_assert_eq!(p.n(), inputs.len());
    let mut acc = p.sign();
    for line in p.support() {
        let [x, y, z] = inputs.row(line);
        acc *= match p.get(line) {
            Pauli::X => x,
            Pauli::Y => y,
            Pauli::Z => z,
            Pauli::I => 1.0,
        };
        if acc == 0.0 {
            break;
        }
    }
    acc
}

fn bit_sign(outcome: bool) -> f64 {
    if outcome {
        -1.0
    } else {
        1.0
    }
}

/// Probability that the final measurement of `seq` yields `outcome`.
pub fn single_output_probability(seq: &FixedSequence, outcome: bool) -> Result<f64, PolysimError> {
    let line = seq.output_line().ok_or(PolysimError::NoOutput)?;
    let z = backpropagate(seq, line, seq.ops.len())?;
    let table = ProductExpectationTable::from_inputs(&seq.inputs);
    Ok((1.0 + bit_sign(outcome) * expectation(&z, &table)) / 2.0)
}

/// Joint probability that each listed (measured) line yields the matching outcome.
///
/// Expands `Π_i (I + (-1)^{m_i} Z'_i)/2` over all `2^k` subsets, where `Z'_i` is `Z_i` pulled
/// back through the whole unitary part of the sequence.
pub fn joint_output_probability(
    seq: &FixedSequence,
    lines: &[Line],
    outcomes: &[bool],
    k_max: usize,
) -> Result<f64, PolysimError> {
    let pulled = pulled_back_observables(seq, lines, k_max)?;
    if outcomes.len() != lines.len() {
        return Err(PolysimError::OutcomeCount {
            lines: lines.len(),
            outcomes: outcomes.len(),
        });
    }
    let table = ProductExpectationTable::from_inputs(&seq.inputs);
    let terms = subset_expectations(&pulled, &table)?;
    Ok(combine(&terms, outcomes))
}

/// Every joint probability over the listed lines, indexed by outcome bits
/// (bit `i` of the index is the outcome of `lines[i]`).
pub fn joint_output_distribution(
    seq: &FixedSequence,
    lines: &[Line],
    k_max: usize,
) -> Result<Vec<f64>, PolysimError> {
    let pulled = pulled_back_observables(seq, lines, k_max)?;
    let table = ProductExpectationTable::from_inputs(&seq.inputs);
    let terms = subset_expectations(&pulled, &table)?;
    let k = lines.len();
    Ok((0..1usize << k)
        .map(|idx| {
            let outcomes: Vec<bool> = (0..k).map(|i| idx >> i & 1 == 1).collect();
            combine(&terms, &outcomes)
        })
        .collect())
}

fn pulled_back_observables(
    seq: &FixedSequence,
    lines: &[Line],
    k_max: usize,
) -> Result<Vec<PauliOperator>, PolysimError> {
    if lines.len() > k_max {
        return Err(PolysimError::TooManyLines {
            k: lines.len(),
            k_max,
        });
    }
    lines
        .iter()
        .map(|&l| {
            if l >= seq.n_lines {
                return Err(PolysimError::LineOutOfRange {
                    line: l,
                    n: seq.n_lines,
                });
            }
            seq.measurement_of(l).ok_or(PolysimError::Unmeasured(l))?;
            backpropagate(seq, l, seq.ops.len())
        })
        .collect()
}

/// `<Π_{i∈S} Z'_i>` for every subset `S`, indexed by bitmask.
fn subset_expectations(
    pulled: &[PauliOperator],
    table: &ProductExpectationTable,
) -> Result<Vec<f64>, PolysimError> {
    let k = pulled.len();
    let n = table.len();
    let mut products: Vec<PauliOperator> = Vec::with_capacity(1 << k);
    let mut values = Vec::with_capacity(1 << k);
    products.push(PauliOperator::identity(n));
    values.push(1.0);
    for mask in 1usize..1 << k {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        let (phase, op) = multiply(&products[rest], &pulled[low])?;
        // Pulled-back Z's on distinct lines commute, so the phase is real.
        debug_assert!(phase.is_real());
        let op = if phase == crate::pauli::Phase::MinusOne {
            op.negated()
        } else {
            op
        };
        values.push(expectation(&op, table));
        products.push(op);
    }
    Ok(values)
}

fn combine(terms: &[f64], outcomes: &[bool]) -> f64 {
    let k = outcomes.len();
    let mut acc = 0.0;
    for (mask, &v) in terms.iter().enumerate() {
        let mut s = 1.0;
        for (i, &m) in outcomes.iter().enumerate() {
            if mask >> i & 1 == 1 {
                s *= bit_sign(m);
            }
        }
        acc += s * v;
    }
    acc / (1u64 << k) as f64
}

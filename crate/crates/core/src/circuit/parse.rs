use std::fmt;

use super::validate::{first_reuse, validate, Violation};
use super::{AdaptiveCircuit, Clifford, FixedOp, FixedSequence, InputState, Instruction, Line};

/// Upper bound on `qubits`, so a hostile header cannot request an absurd allocation.
pub const MAX_DECLARED_LINES: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("missing `qubits <n>` header")]
    MissingHeader,
    #[error("duplicate `qubits` header")]
    DuplicateHeader,
    #[error("line {0} is not declared")]
    UndeclaredLine(Line),
    #[error("{op} takes {expected} argument(s), found {found}")]
    Arity {
        op: String,
        expected: usize,
        found: usize,
    },
    #[error("input for line {0} declared twice")]
    DuplicateInput(Line),
    #[error("{0}")]
    Invalid(Violation),
}

/// Error positioned at a 1-based source line and column.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.kind)
    }
}

#[derive(Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    column: usize,
}

struct Cursor<'a> {
    line: usize,
    tokens: Vec<Token<'a>>,
}

impl<'a> Cursor<'a> {
    fn err(&self, column: usize, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: self.line,
            column,
            kind,
        }
    }

    fn expect_args(&self, n: usize) -> Result<(), ParseError> {
        let found = self.tokens.len() - 1;
        if found != n {
            let column = self
                .tokens
                .get(n + 1)
                .or(self.tokens.last())
                .map_or(1, |t| t.column);
            return Err(self.err(
                column,
                ParseErrorKind::Arity {
                    op: self.tokens[0].text.to_string(),
                    expected: n,
                    found,
                },
            ));
        }
        Ok(())
    }

    fn uint(&self, i: usize) -> Result<usize, ParseError> {
        let t = self.tokens[i];
        t.text.parse::<usize>().map_err(|_| {
            self.err(
                t.column,
                ParseErrorKind::Syntax(format!("expected a non-negative integer, found {:?}", t.text)),
            )
        })
    }

    fn line_ref(&self, i: usize, n_lines: usize) -> Result<Line, ParseError> {
        let l = self.uint(i)?;
        if l >= n_lines {
            return Err(self.err(self.tokens[i].column, ParseErrorKind::UndeclaredLine(l)));
        }
        Ok(l)
    }

    fn real(&self, i: usize) -> Result<f64, ParseError> {
        let t = self.tokens[i];
        match t.text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(self.err(
                t.column,
                ParseErrorKind::Syntax(format!("expected a finite real number, found {:?}", t.text)),
            )),
        }
    }
}

fn lex(text: &str) -> impl Iterator<Item = Cursor<'_>> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let code = raw.split('#').next().unwrap_or("");
        let mut tokens = Vec::new();
        let mut start = None;
        for (pos, ch) in code.char_indices() {
            if ch.is_whitespace() {
                if let Some(s) = start.take() {
                    tokens.push(Token {
                        text: &code[s..pos],
                        column: code[..s].chars().count() + 1,
                    });
                }
            } else if start.is_none() {
                start = Some(pos);
            }
        }
        if let Some(s) = start {
            tokens.push(Token {
                text: &code[s..],
                column: code[..s].chars().count() + 1,
            });
        }
        (!tokens.is_empty()).then_some(Cursor { line: i + 1, tokens })
    })
}

/// Statements shared by the adaptive and the resolved formats.
enum Stmt {
    Gate(Clifford),
    Measure { line: Line, label: String },
    T(Line),
    TGadget { target: Line, ancilla: Line },
    GadgetMeasure { ancilla: Line, gadget: usize },
    SCorrection { target: Line, exponent: u8, gadget: usize },
    Frozen(Vec<bool>),
}

struct Header {
    n_lines: usize,
    inputs: Vec<Option<InputState>>,
}

struct Parsed {
    n_lines: usize,
    inputs: Vec<InputState>,
    body: Vec<(Stmt, usize, usize)>,
}

fn parse_input(cur: &Cursor<'_>, header: &mut Header) -> Result<(), ParseError> {
    if cur.tokens.len() < 3 {
        return Err(cur.err(
            cur.tokens.last().map_or(1, |t| t.column),
            ParseErrorKind::Arity {
                op: "input".into(),
                expected: 2,
                found: cur.tokens.len() - 1,
            },
        ));
    }
    let line = cur.line_ref(1, header.n_lines)?;
    let kind = cur.tokens[2];
    let state = match kind.text {
        "ZERO" | "ONE" | "MAGIC" => {
            cur.expect_args(2)?;
            match kind.text {
                "ZERO" => InputState::Zero,
                "ONE" => InputState::One,
                _ => InputState::Magic,
            }
        }
        "GENERAL" => {
            cur.expect_args(4)?;
            let theta = cur.real(3)?;
            let phi = cur.real(4)?;
            let s = InputState::General { theta, phi };
            if !s.angles_in_range() {
                return Err(cur.err(
                    cur.tokens[3].column,
                    ParseErrorKind::Invalid(Violation::InputAngleOutOfRange { line }),
                ));
            }
            s
        }
        other => {
            return Err(cur.err(
                kind.column,
                ParseErrorKind::Syntax(format!(
                    "unknown input state {other:?} (expected ZERO, ONE, MAGIC or GENERAL)"
                )),
            ))
        }
    };
    if header.inputs[line].is_some() {
        return Err(cur.err(cur.tokens[1].column, ParseErrorKind::DuplicateInput(line)));
    }
    header.inputs[line] = Some(state);
    Ok(())
}

fn parse_stmt(cur: &Cursor<'_>, n: usize, fixed: bool) -> Result<Stmt, ParseError> {
    let op = cur.tokens[0];
    let one = |f: fn(Line) -> Clifford| -> Result<Stmt, ParseError> {
        cur.expect_args(1)?;
        Ok(Stmt::Gate(f(cur.line_ref(1, n)?)))
    };
    let two = |f: fn(Line, Line) -> Clifford| -> Result<Stmt, ParseError> {
        cur.expect_args(2)?;
        let a = cur.line_ref(1, n)?;
        let b = cur.line_ref(2, n)?;
        if a == b {
            return Err(cur.err(
                cur.tokens[2].column,
                ParseErrorKind::Syntax(format!("{} needs two distinct lines", op.text)),
            ));
        }
        Ok(Stmt::Gate(f(a, b)))
    };
    match op.text {
        "H" => one(Clifford::H),
        "S" => one(Clifford::S),
        "SDG" => one(Clifford::Sdg),
        "X" => one(Clifford::X),
        "Y" => one(Clifford::Y),
        "Z" => one(Clifford::Z),
        "CX" => two(Clifford::Cx),
        "CZ" => two(Clifford::Cz),
        "SWAP" => two(Clifford::Swap),
        "MEASURE" => {
            cur.expect_args(2)?;
            Ok(Stmt::Measure {
                line: cur.line_ref(1, n)?,
                label: cur.tokens[2].text.to_string(),
            })
        }
        "T" if !fixed => {
            cur.expect_args(1)?;
            Ok(Stmt::T(cur.line_ref(1, n)?))
        }
        "TGADGET" if !fixed => {
            cur.expect_args(2)?;
            let target = cur.line_ref(1, n)?;
            let ancilla = cur.line_ref(2, n)?;
            if target == ancilla {
                return Err(cur.err(
                    cur.tokens[2].column,
                    ParseErrorKind::Syntax("TGADGET target and ancilla must differ".into()),
                ));
            }
            Ok(Stmt::TGadget { target, ancilla })
        }
        "GMEASURE" if fixed => {
            cur.expect_args(2)?;
            Ok(Stmt::GadgetMeasure {
                ancilla: cur.line_ref(1, n)?,
                gadget: cur.uint(2)?,
            })
        }
        "SCORR" if fixed => {
            cur.expect_args(3)?;
            let target = cur.line_ref(1, n)?;
            let exponent = match cur.tokens[2].text {
                "0" => 0,
                "1" => 1,
                other => {
                    return Err(cur.err(
                        cur.tokens[2].column,
                        ParseErrorKind::Syntax(format!("S exponent must be 0 or 1, found {other:?}")),
                    ))
                }
            };
            Ok(Stmt::SCorrection {
                target,
                exponent,
                gadget: cur.uint(3)?,
            })
        }
        "frozen" if fixed => {
            cur.expect_args(1)?;
            let t = cur.tokens[1];
            if t.text == "-" {
                return Ok(Stmt::Frozen(Vec::new()));
            }
            t.text
                .chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    _ => Err(cur.err(
                        t.column,
                        ParseErrorKind::Syntax(format!("frozen outcomes must be bits, found {:?}", t.text)),
                    )),
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Stmt::Frozen)
        }
        other => Err(cur.err(
            op.column,
            ParseErrorKind::Syntax(format!("unknown instruction {other:?}")),
        )),
    }
}

fn parse_common(text: &str, fixed: bool) -> Result<Parsed, ParseError> {
    let mut header: Option<Header> = None;
    let mut body = Vec::new();
    for cur in lex(text) {
        let first = cur.tokens[0];
        if first.text == "qubits" {
            if header.is_some() {
                return Err(cur.err(first.column, ParseErrorKind::DuplicateHeader));
            }
            cur.expect_args(1)?;
            let n = cur.uint(1)?;
            if n == 0 || n > MAX_DECLARED_LINES {
                return Err(cur.err(
                    cur.tokens[1].column,
                    ParseErrorKind::Syntax(format!("line count must be in 1..={MAX_DECLARED_LINES}")),
                ));
            }
            header = Some(Header {
                n_lines: n,
                inputs: vec![None; n],
            });
            continue;
        }
        let Some(h) = header.as_mut() else {
            return Err(cur.err(first.column, ParseErrorKind::MissingHeader));
        };
        if first.text == "input" {
            parse_input(&cur, h)?;
        } else {
            let stmt = parse_stmt(&cur, h.n_lines, fixed)?;
            body.push((stmt, cur.line, first.column));
        }
    }
    let h = header.ok_or(ParseError {
        line: 1,
        column: 1,
        kind: ParseErrorKind::MissingHeader,
    })?;
    Ok(Parsed {
        n_lines: h.n_lines,
        inputs: h.inputs.into_iter().map(Option::unwrap_or_default).collect(),
        body,
    })
}

fn end_position(text: &str) -> (usize, usize) {
    (text.lines().count().max(1), 1)
}

/// Parse the circuit text format and check every structural invariant.
pub fn parse_circuit(text: &str) -> Result<AdaptiveCircuit, ParseError> {
    let parsed = parse_common(text, false)?;
    let mut positions = Vec::with_capacity(parsed.body.len());
    let mut instructions = Vec::with_capacity(parsed.body.len());
    for (stmt, line, column) in parsed.body {
        positions.push((line, column));
        instructions.push(match stmt {
            Stmt::Gate(g) => Instruction::Gate(g),
            Stmt::Measure { line, label } => Instruction::Measure { line, label },
            Stmt::T(l) => Instruction::T(l),
            Stmt::TGadget { target, ancilla } => Instruction::TGadget { target, ancilla },
            _ => unreachable!("resolved-only statement in adaptive parse"),
        });
    }
    let circuit = AdaptiveCircuit {
        n_lines: parsed.n_lines,
        inputs: parsed.inputs,
        instructions,
    };
    if let Some(v) = validate(&circuit).into_iter().next() {
        let (line, column) = v
            .instruction()
            .and_then(|i| positions.get(i).copied())
            .unwrap_or_else(|| end_position(text));
        return Err(ParseError {
            line,
            column,
            kind: ParseErrorKind::Invalid(v),
        });
    }
    Ok(circuit)
}

/// Parse the resolved-sequence text format written by [`serialize_fixed`](super::serialize_fixed).
pub fn parse_fixed(text: &str) -> Result<FixedSequence, ParseError> {
    let parsed = parse_common(text, true)?;
    let mut frozen = None;
    let mut ops = Vec::new();
    let mut positions = Vec::new();
    for (stmt, line, column) in parsed.body {
        let op = match stmt {
            Stmt::Frozen(bits) => {
                if frozen.replace(bits).is_some() {
                    return Err(ParseError {
                        line,
                        column,
                        kind: ParseErrorKind::Syntax("duplicate `frozen` line".into()),
                    });
                }
                continue;
            }
            Stmt::Gate(g) => FixedOp::Gate(g),
            Stmt::Measure { line, label } => FixedOp::Measure { line, label },
            Stmt::GadgetMeasure { ancilla, gadget } => FixedOp::GadgetMeasure { ancilla, gadget },
            Stmt::SCorrection {
                target,
                exponent,
                gadget,
            } => FixedOp::SCorrection {
                target,
                exponent,
                gadget,
            },
            Stmt::T(_) | Stmt::TGadget { .. } => unreachable!("adaptive statement in resolved parse"),
        };
        positions.push((line, column));
        ops.push(op);
    }
    let seq = FixedSequence {
        n_lines: parsed.n_lines,
        inputs: parsed.inputs,
        ops,
        frozen_outcomes: frozen.unwrap_or_default(),
    };
    let reuse = first_reuse(
        seq.n_lines,
        seq.ops.iter().map(|op| (op.lines(), op.measured_line())),
    );
    if let Some((idx, l)) = reuse {
        let (line, column) = positions[idx];
        return Err(ParseError {
            line,
            column,
            kind: ParseErrorKind::Invalid(Violation::MeasuredLineReused {
                instruction: idx,
                line: l,
            }),
        });
    }
    if seq.gadget_count() != seq.frozen_outcomes.len() {
        let (line, column) = end_position(text);
        return Err(ParseError {
            line,
            column,
            kind: ParseErrorKind::Syntax(format!(
                "{} gadget measurements but {} frozen outcomes",
                seq.gadget_count(),
                seq.frozen_outcomes.len()
            )),
        });
    }
    Ok(seq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{serialize, serialize_fixed};

    #[test]
    fn minimal_circuit() {
        let c = parse_circuit("qubits 1\ninput 0 ZERO\nH 0\nMEASURE 0 out").unwrap();
        assert_eq!(c.n_lines, 1);
        assert_eq!(c.instructions.len(), 2);
        assert_eq!(c.output_line(), Some(0));
    }

    #[test]
    fn non_magic_ancilla_rejected_with_position() {
        let text = "qubits 5\ninput 3 MAGIC\nTGADGET 2 4\nMEASURE 2 out\n";
        let err = parse_circuit(text).unwrap_err();
        assert_eq!((err.line, err.column), (3, 1));
        assert!(matches!(
            err.kind,
            ParseErrorKind::Invalid(Violation::AncillaNotMagic { ancilla: 4, .. })
        ));
    }

    #[test]
    fn undeclared_line_points_at_token() {
        let err = parse_circuit("qubits 2\nCX 0 7\nMEASURE 0 out\n").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UndeclaredLine(7));
        assert_eq!((err.line, err.column), (2, 6));
    }

    #[test]
    fn arity_mismatch() {
        let err = parse_circuit("qubits 2\nCX 0\n").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Arity { expected: 2, found: 1, .. }));
        let err = parse_circuit("qubits 2\nMEASURE 0\n").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Arity { expected: 2, found: 1, .. }));
    }

    #[test]
    fn unknown_keyword_and_missing_header() {
        let err = parse_circuit("qubits 1\n  FOO 0\n").unwrap_err();
        assert_eq!((err.line, err.column), (2, 3));
        let err = parse_circuit("H 0\n").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::MissingHeader);
        let err = parse_circuit("# nothing\n").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::MissingHeader);
    }

    #[test]
    fn comments_and_default_inputs() {
        let c = parse_circuit(
            "# header\nqubits 2 # two lines\ninput 1 GENERAL 1.5 0.25\nCZ 0 1 # entangle\nMEASURE 1 out\n",
        )
        .unwrap();
        assert_eq!(c.inputs[0], InputState::Zero);
        assert_eq!(c.inputs[1], InputState::General { theta: 1.5, phi: 0.25 });
    }

    #[test]
    fn duplicate_input_rejected() {
        let err = parse_circuit("qubits 1\ninput 0 ONE\ninput 0 ZERO\n").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::DuplicateInput(0));
    }

    #[test]
    fn fixed_round_trip() {
        let text = "qubits 2\ninput 0 ZERO\ninput 1 MAGIC\nfrozen 1\nH 0\nCX 0 1\nGMEASURE 1 0\nSCORR 0 1 0\nMEASURE 0 out\n";
        let seq = parse_fixed(text).unwrap();
        assert_eq!(seq.frozen_outcomes, vec![true]);
        assert_eq!(serialize_fixed(&seq), text);
    }

    #[test]
    fn fixed_rejects_outcome_count_mismatch() {
        let text = "qubits 2\ninput 1 MAGIC\nfrozen -\nCX 0 1\nGMEASURE 1 0\nSCORR 0 0 0\nMEASURE 0 out\n";
        assert!(parse_fixed(text).is_err());
    }

    #[test]
    fn adaptive_rejects_fixed_keywords() {
        assert!(parse_circuit("qubits 1\nfrozen 1\n").is_err());
        assert!(parse_fixed("qubits 1\nT 0\nMEASURE 0 out\n").is_err());
    }

    #[test]
    fn canonical_form() {
        let c = parse_circuit("qubits 2\n\nCX   0 1\nMEASURE 1 out   \n").unwrap();
        assert_eq!(
            serialize(&c),
            "qubits 2\ninput 0 ZERO\ninput 1 ZERO\nCX 0 1\nMEASURE 1 out\n"
        );
    }
}

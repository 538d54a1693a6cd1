use serde::{Deserialize, Serialize};

use crate::prover::TranscriptRecord;

use super::plan::TestPlan;
use super::runs::{ExtraLineCheck, GadgetTestResult, GateTestResult, Interruption};
use super::ProtocolError;

/// Certified error budget of an accepted run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorBudget {
    /// Interval containing the probability the device picked the recorded gadget branch.
    pub pi_bound: [f64; 2],
    /// Additive distance of the device's effective output distribution from the ideal one.
    pub epsilon_prime: f64,
}

/// Compose the error budget from passed checks.
///
/// Assumes every gadget branch implements the same map, so the output distribution of
/// the recorded branch stands in for all of them: `epsilon' = eta + epsilon`.
pub fn compose_error(
    plan: &TestPlan,
    gate_passed: bool,
    gadget_passed: &[bool],
) -> Result<ErrorBudget, ProtocolError> {
    if !gate_passed || gadget_passed.iter().any(|p| !p) {
        return Err(ProtocolError::ChecksFailed);
    }
    if gadget_passed.len() != plan.t {
        return Err(ProtocolError::Malformed(format!(
            "{} gadget results for {} gadgets",
            gadget_passed.len(),
            plan.t
        )));
    }
    let epsilon_prime = if plan.t == 0 {
        plan.eta
    } else {
        plan.eta + plan.epsilon
    };
    Ok(ErrorBudget {
        pi_bound: plan.pi_bound(),
        epsilon_prime,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Decision {
    Accept,
    Reject,
}

/// Why a run was rejected. Each carries the observed and the tolerated deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "code", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RejectReason {
    OutputDeviation {
        p_hat: f64,
        p_classical: f64,
        deviation: f64,
        tolerance: f64,
    },
    GadgetBias {
        gadget: usize,
        p_hat: f64,
        deviation: f64,
        tolerance: f64,
    },
    ExtraLineMismatch {
        gadget: usize,
        tv_distance: f64,
        tolerance: f64,
    },
    ImpossibleOutcome {
        batch: String,
        repetition: u64,
        outcome: String,
    },
    Incomplete {
        batch: String,
        completed: u64,
        planned: u64,
        error: String,
    },
}

impl RejectReason {
    pub fn code(&self) -> &'static str {
        match self {
            RejectReason::OutputDeviation { .. } => "OUTPUT_DEVIATION",
            RejectReason::GadgetBias { .. } => "GADGET_BIAS",
            RejectReason::ExtraLineMismatch { .. } => "EXTRA_LINE_MISMATCH",
            RejectReason::ImpossibleOutcome { .. } => "IMPOSSIBLE_OUTCOME",
            RejectReason::Incomplete { .. } => "INCOMPLETE",
        }
    }
}

impl std::fmt::Display for RejectReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RejectReason::OutputDeviation {
                p_hat,
                p_classical,
                deviation,
                tolerance,
            } => write!(
                f,
                "OUTPUT_DEVIATION: observed P(0)={p_hat:.6}, computed {p_classical:.6}, |diff|={deviation:.6} > {tolerance}"
            ),
            RejectReason::GadgetBias {
                gadget,
                p_hat,
                deviation,
                tolerance,
            } => write!(
                f,
                "GADGET_BIAS({gadget}): observed P(m=1)={p_hat:.6}, |diff from 1/2|={deviation:.6} > {tolerance:.6}"
            ),
            RejectReason::ExtraLineMismatch {
                gadget,
                tv_distance,
                tolerance,
            } => write!(
                f,
                "EXTRA_LINE_MISMATCH({gadget}): total variation {tv_distance:.6} > {tolerance}"
            ),
            RejectReason::ImpossibleOutcome {
                batch,
                repetition,
                outcome,
            } => write!(
                f,
                "IMPOSSIBLE_OUTCOME: {batch} repetition {repetition} read {outcome}, which has probability 0"
            ),
            RejectReason::Incomplete {
                batch,
                completed,
                planned,
                error,
            } => write!(f, "INCOMPLETE: {batch} stopped after {completed}/{planned} runs: {error}"),
        }
    }
}

/// What an accepted run certifies about its output bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Confidence {
    /// `|p_classical - 1/2|`.
    pub margin: f64,
    /// Lower bound `1/2 + margin - epsilon'` on the probability that the output is the
    /// majority answer.
    pub correct_output_probability: f64,
    /// `1 - delta (t + 1)`: probability that none of the estimates misled the verifier.
    pub statistical_confidence: f64,
    pub statement: String,
}

/// Everything the verifier computed and decided.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub transcript: TranscriptRecord,
    pub plan: TestPlan,
    pub seed: u64,
    /// Verifier-computed probability of output 0 for the recorded sequence.
    pub p_classical: f64,
    pub gate_test: GateTestResult,
    pub gadget_tests: Vec<GadgetTestResult>,
    pub extra_line_checks: Vec<ExtraLineCheck>,
    pub pi_bound: Option<[f64; 2]>,
    pub epsilon_prime: Option<f64>,
    pub decision: Decision,
    pub reasons: Vec<RejectReason>,
    pub confidence: Option<Confidence>,
}

impl VerdictReport {
    pub fn accepted(&self) -> bool {
        self.decision == Decision::Accept
    }

    pub fn reason_codes(&self) -> Vec<&'static str> {
        self.reasons.iter().map(RejectReason::code).collect()
    }

    /// Pretty JSON with fields in declaration order.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Human-readable summary.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let tr = &self.transcript;
        s.push_str(&format!("circuit    {}\n", tr.circuit_id));
        s.push_str(&format!(
            "run        seed={} gadgets={} outcomes={} output={}\n",
            self.seed,
            self.plan.t,
            tr.gadget_outcomes.iter().map(|b| b.to_string()).collect::<String>(),
            tr.final_output
        ));
        s.push_str(&format!(
            "plan       eps={} eta={} delta={} d_gadget={:.6} R_gate={} R_meas={}\n",
            self.plan.epsilon, self.plan.eta, self.plan.delta, self.plan.d_gadget, self.plan.r_gate, self.plan.r_meas
        ));
        let g = &self.gate_test;
        s.push_str(&format!(
            "gate test  P(0) observed {:.6} ± {:.6}, computed {:.6}, |diff| {:.6} <= {}: {}\n",
            g.p_hat,
            g.ci_half_width,
            g.p_classical,
            g.deviation,
            g.tolerance,
            pass(g.passed)
        ));
        for m in &self.gadget_tests {
            s.push_str(&format!(
                "gadget {:<3} P(m=1) observed {:.6} ± {:.6}, |diff| {:.6} <= {:.6}: {}\n",
                m.gadget,
                m.p_hat,
                m.ci_half_width,
                m.deviation,
                m.tolerance,
                pass(m.passed)
            ));
            if let Some(e) = &m.extra {
                s.push_str(&format!(
                    "           lines {:?} total variation {:.6} <= {}: {}\n",
                    e.lines,
                    e.tv_distance,
                    e.tolerance,
                    pass(e.passed)
                ));
            }
        }
        match self.decision {
            Decision::Accept => {
                let [lo, hi] = self.pi_bound.unwrap_or([f64::NAN; 2]);
                s.push_str(&format!("branch     probability in [{lo:.6e}, {hi:.6e}]\n"));
                s.push_str(&format!(
                    "epsilon'   {}\n",
                    self.epsilon_prime.unwrap_or(f64::NAN)
                ));
                if let Some(c) = &self.confidence {
                    s.push_str(&format!("confidence {}\n", c.statement));
                }
                s.push_str("verdict    ACCEPT\n");
            }
            Decision::Reject => {
                s.push_str("verdict    REJECT\n");
                for r in &self.reasons {
                    s.push_str(&format!("  - {r}\n"));
                }
            }
        }
        s
    }
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn interruption_reason(batch: &str, planned: u64, completed: u64, i: &Interruption) -> RejectReason {
    match i {
        Interruption::ImpossibleOutcome { repetition, outcome } => RejectReason::ImpossibleOutcome {
            batch: batch.to_string(),
            repetition: *repetition,
            outcome: outcome.clone(),
        },
        Interruption::DeviceFailure { error } => RejectReason::Incomplete {
            batch: batch.to_string(),
            completed,
            planned,
            error: error.clone(),
        },
    }
}

/// Decide: accept iff the gate test and every gadget stage passed.
pub fn verdict(
    transcript: TranscriptRecord,
    plan: &TestPlan,
    seed: u64,
    gate: GateTestResult,
    gadgets: Vec<GadgetTestResult>,
) -> VerdictReport {
    let mut reasons = Vec::new();
    if let Some(i) = &gate.interruption {
        reasons.push(interruption_reason("gate test", gate.planned, gate.completed, i));
    } else if !gate.passed {
        reasons.push(RejectReason::OutputDeviation {
            p_hat: gate.p_hat,
            p_classical: gate.p_classical,
            deviation: gate.deviation,
            tolerance: gate.tolerance,
        });
    }
    for g in &gadgets {
        let batch = format!("gadget {} measurement test", g.gadget);
        if let Some(i) = &g.interruption {
            reasons.push(interruption_reason(&batch, g.planned, g.completed, i));
            continue;
        }
        if !g.passed {
            reasons.push(RejectReason::GadgetBias {
                gadget: g.gadget,
                p_hat: g.p_hat,
                deviation: g.deviation,
                tolerance: g.tolerance,
            });
        }
        if let Some(e) = g.extra.as_ref().filter(|e| !e.passed) {
            reasons.push(RejectReason::ExtraLineMismatch {
                gadget: g.gadget,
                tv_distance: e.tv_distance,
                tolerance: e.tolerance,
            });
        }
    }
    if gadgets.len() != plan.t {
        reasons.push(RejectReason::Incomplete {
            batch: "measurement tests".into(),
            completed: gadgets.len() as u64,
            planned: plan.t as u64,
            error: "missing gadget stages".into(),
        });
    }

    let gadget_passed: Vec<bool> = gadgets.iter().map(GadgetTestResult::all_passed).collect();
    let p_classical = gate.p_classical;
    let budget = if reasons.is_empty() {
        compose_error(plan, gate.passed && gate.interruption.is_none(), &gadget_passed).ok()
    } else {
        None
    };
    let decision = if budget.is_some() {
        Decision::Accept
    } else {
        Decision::Reject
    };
    let confidence = budget.map(|b| {
        let margin = (p_classical - 0.5).abs();
        let correct = 0.5 + margin - b.epsilon_prime;
        let statistical = 1.0 - plan.delta_total();
        Confidence {
            margin,
            correct_output_probability: correct,
            statistical_confidence: statistical,
            statement: format!(
                "output is the majority answer with probability ≥ {correct:.4} (estimates hold with probability ≥ {statistical:.4})"
            ),
        }
    });
    VerdictReport {
        transcript,
        plan: plan.clone(),
        seed,
        p_classical,
        gate_test: gate,
        extra_line_checks: gadgets.iter().filter_map(|g| g.extra.clone()).collect(),
        gadget_tests: gadgets,
        pi_bound: budget.map(|b| b.pi_bound),
        epsilon_prime: budget.map(|b| b.epsilon_prime),
        decision,
        reasons,
        confidence,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::plan::plan;

    fn gate(p_hat: f64, p_classical: f64, eta: f64) -> GateTestResult {
        let deviation = (p_hat - p_classical).abs();
        GateTestResult {
            planned: 10,
            completed: 10,
            p_hat,
            ci_half_width: 0.1,
            p_classical,
            deviation,
            tolerance: eta,
            passed: deviation <= eta,
            interruption: None,
        }
    }

    fn gadget(i: usize, p_hat: f64, band: f64) -> GadgetTestResult {
        GadgetTestResult {
            gadget: i,
            target: 0,
            ancilla: i,
            planned: 10,
            completed: 10,
            p_hat,
            ci_half_width: 0.1,
            deviation: (p_hat - 0.5).abs(),
            tolerance: band,
            passed: (p_hat - 0.5).abs() <= band,
            extra: None,
            interruption: None,
        }
    }

    fn record(t: usize) -> TranscriptRecord {
        TranscriptRecord {
            circuit_id: "x".into(),
            seed: 0,
            gadget_outcomes: vec![0; t],
            final_output: 0,
        }
    }

    #[test]
    fn no_gadgets_budget_is_eta() {
        let p = plan(0, 0.05, 0.02, 0.01).unwrap();
        assert_eq!(compose_error(&p, true, &[]).unwrap().epsilon_prime, 0.02);
    }

    #[test]
    fn one_percent_budget() {
        let p = plan(2, 0.005, 0.005, 0.01).unwrap();
        let b = compose_error(&p, true, &[true, true]).unwrap();
        assert!((b.epsilon_prime - 0.01).abs() < 1e-15);
        let [lo, hi] = b.pi_bound;
        assert!((hi * 4.0 - 1.005).abs() < 1e-12);
        assert!((lo * 4.0 - 1.0).abs() <= 0.005);
    }

    #[test]
    fn compose_refuses_failed_checks() {
        let p = plan(1, 0.05, 0.05, 0.01).unwrap();
        assert_eq!(compose_error(&p, false, &[true]), Err(ProtocolError::ChecksFailed));
        assert_eq!(compose_error(&p, true, &[false]), Err(ProtocolError::ChecksFailed));
    }

    #[test]
    fn accept_with_wide_margin() {
        let p = plan(1, 0.005, 0.005, 0.01).unwrap();
        let band = p.gadget_band();
        let r = verdict(record(1), &p, 1, gate(0.995, 0.995, 0.005), vec![gadget(1, 0.5, band)]);
        assert!(r.accepted());
        let c = r.confidence.unwrap();
        assert!(c.correct_output_probability >= 0.98);
        assert_eq!(r.epsilon_prime, Some(0.01));
    }

    #[test]
    fn failing_gadget_is_listed() {
        let p = plan(2, 0.05, 0.05, 0.01).unwrap();
        let band = p.gadget_band();
        let r = verdict(
            record(2),
            &p,
            1,
            gate(0.5, 0.5, 0.05),
            vec![gadget(1, 0.5, band), gadget(2, 0.6, band)],
        );
        assert!(!r.accepted());
        assert_eq!(
            r.reasons,
            vec![RejectReason::GadgetBias {
                gadget: 2,
                p_hat: 0.6,
                deviation: (0.6f64 - 0.5).abs(),
                tolerance: band
            }]
        );
        assert!(r.epsilon_prime.is_none() && r.confidence.is_none());
    }

    #[test]
    fn output_deviation_reports_both_values() {
        let p = plan(0, 0.05, 0.05, 0.01).unwrap();
        let r = verdict(record(0), &p, 1, gate(0.4, 0.5, 0.05), vec![]);
        assert_eq!(r.reason_codes(), vec!["OUTPUT_DEVIATION"]);
        let text = r.reasons[0].to_string();
        assert!(text.contains("0.400000") && text.contains("0.500000"));
    }
}

use std::cell::RefCell;
use std::ops::ControlFlow;

use gadgetcheck::circuit::{gadgetize, parse_circuit, serialize_fixed, AdaptiveCircuit, FixedSequence};
use gadgetcheck::protocol::{
    hoeffding_half_width, plan, verify, Decision, ProtocolError, RejectReason, VerifyParams,
};
use gadgetcheck::prover::{Device, FaultModel, FixedRun, ProverError, RunSeed, SimulatedDevice, Transcript};

fn honest() -> AdaptiveCircuit {
    gadgetize(&parse_circuit(include_str!("../circuits/honest.qc")).unwrap())
}

fn params(seed: u64) -> VerifyParams {
    VerifyParams {
        seed,
        ..VerifyParams::default()
    }
}

#[test]
fn ideal_device_is_accepted() {
    let dev = SimulatedDevice::default();
    let accepted = (0..20)
        .filter(|&s| verify(&dev, &honest(), &params(s)).unwrap().accepted())
        .count();
    assert!(accepted >= 18, "{accepted}/20");
}

#[test]
fn accepted_report_carries_budget() {
    let r = verify(&SimulatedDevice::default(), &honest(), &params(3)).unwrap();
    assert_eq!(r.decision, Decision::Accept);
    assert!((r.epsilon_prime.unwrap() - 0.1).abs() < 1e-12);
    let [lo, hi] = r.pi_bound.unwrap();
    assert!(lo < 0.5 && 0.5 < hi);
    assert_eq!(r.gadget_tests.len(), 1);
    assert_eq!(r.extra_line_checks.len(), 1);
    let c = r.confidence.unwrap();
    assert!((c.margin - 0.5).abs() < 1e-12);
    assert!((c.statistical_confidence - 0.98).abs() < 1e-12);
}

#[test]
fn biased_coin_is_caught_by_measurement_test() {
    let dev = SimulatedDevice::new(FaultModel::GadgetCoinBias { bias: 0.1 });
    let r = verify(&dev, &honest(), &params(1)).unwrap();
    assert_eq!(r.decision, Decision::Reject);
    assert!(r.reason_codes().contains(&"GADGET_BIAS"));
    assert!(r.gate_test.passed);
}

#[test]
fn liar_is_caught_by_gate_test() {
    let dev = SimulatedDevice::new(FaultModel::Liar { q: 0.2 });
    // On a deterministic output, a single lie is already impossible.
    let r = verify(&dev, &honest(), &params(1)).unwrap();
    assert_eq!(r.reason_codes(), vec!["IMPOSSIBLE_OUTCOME"]);
    let coin = parse_circuit("qubits 1\nH 0\nMEASURE 0 out\n").unwrap();
    let r = verify(&dev, &coin, &params(1)).unwrap();
    assert_eq!(r.reason_codes(), vec!["OUTPUT_DEVIATION"]);
    assert!((r.gate_test.p_hat - 0.2).abs() < 0.05);
}

#[test]
fn reports_are_deterministic() {
    let dev = SimulatedDevice::default();
    let a = verify(&dev, &honest(), &params(77)).unwrap().to_json();
    let b = verify(&dev, &honest(), &params(77)).unwrap().to_json();
    assert_eq!(a, b);
    let c = verify(&dev, &honest(), &params(78)).unwrap().to_json();
    assert_ne!(a, c);
}

#[test]
fn clifford_only_circuit_uses_eta_alone() {
    let c = parse_circuit("qubits 2\nX 0\nCX 0 1\nMEASURE 1 out\n").unwrap();
    let r = verify(&SimulatedDevice::default(), &c, &params(0)).unwrap();
    assert!(r.accepted());
    assert_eq!(r.epsilon_prime, Some(0.05));
    assert!(r.gadget_tests.is_empty());
    assert_eq!(r.pi_bound, Some([1.0, 1.0]));
}

#[test]
fn unusable_inputs_are_errors() {
    let dev = SimulatedDevice::default();
    let bare = parse_circuit("qubits 1\nT 0\nMEASURE 0 out\n").unwrap();
    assert_eq!(verify(&dev, &bare, &params(0)).unwrap_err(), ProtocolError::UngadgetizedCircuit(1));
    let bad = VerifyParams {
        eta: 0.0,
        ..params(0)
    };
    assert!(matches!(verify(&dev, &honest(), &bad), Err(ProtocolError::Parameter(_))));
}

#[test]
fn confidence_intervals_narrow_with_repetitions() {
    let loose = plan(2, 0.05, 0.05, 0.01).unwrap();
    let tight = plan(2, 0.02, 0.02, 0.01).unwrap();
    assert!(tight.r_gate > loose.r_gate && tight.r_meas > loose.r_meas);
    let mut last = f64::INFINITY;
    for r in [10u64, 100, 1_000, 10_000, 100_000] {
        let w = hoeffding_half_width(r, 0.01);
        assert!(w < last);
        last = w;
    }
    assert!((hoeffding_half_width(400, 0.01) * 2.0 - hoeffding_half_width(100, 0.01)).abs() < 1e-15);
}

/// A device with no quantum state at all: it answers from a script and logs every request.
/// The verifier must work through the `Device` trait alone.
type Script = dyn Fn(&FixedSequence, u64) -> Vec<bool>;

struct Scripted {
    log: RefCell<Vec<String>>,
    gadget_outcomes: Vec<bool>,
    /// Bits returned for a fixed run, given the sequence and the repetition index.
    fixed_bits: Box<Script>,
    fail_after: Option<u64>,
}

impl Device for Scripted {
    fn run_adaptive(&self, circuit: &AdaptiveCircuit, seed: u64) -> Result<Transcript, ProverError> {
        self.log.borrow_mut().push("adaptive".into());
        Transcript::new(circuit, seed, self.gadget_outcomes.clone(), false)
    }

    fn run_fixed(&self, seq: &FixedSequence, seed: RunSeed) -> Result<FixedRun, ProverError> {
        if self.fail_after.is_some_and(|n| seed.stream >= n) {
            return Err(ProverError::Failure("cryostat warmed up".into()));
        }
        let bits = (self.fixed_bits)(seq, seed.stream);
        Ok(FixedRun {
            final_output: *bits.last().unwrap(),
            measurements: bits,
        })
    }

    fn run_fixed_batch(
        &self,
        seq: &FixedSequence,
        seed: u64,
        reps: u64,
        sink: &mut dyn FnMut(u64, &[bool]) -> ControlFlow<()>,
    ) -> Result<u64, ProverError> {
        self.log
            .borrow_mut()
            .push(format!("batch {reps} {}", serialize_fixed(seq).replace('\n', ";")));
        for r in 0..reps {
            let run = self.run_fixed(seq, RunSeed { seed, stream: r })?;
            if sink(r, &run.measurements).is_break() {
                return Ok(r + 1);
            }
        }
        Ok(reps)
    }
}

/// Classical imitation of an honest device on the bundled circuit: fair gadget coins,
/// the target and its partner line always equal, output always 0.
fn imitation(seq: &FixedSequence, r: u64) -> Vec<bool> {
    let n = seq.measurement_positions().len();
    let coin = r % 2 == 1;
    let pair = (r / 2) % 2 == 1;
    match n {
        // Gate test: ancilla readout, then the output.
        2 => vec![coin, false],
        // Measurement test: ancilla, target line, partner line.
        3 => vec![coin, pair, pair],
        other => panic!("unexpected sequence with {other} readouts"),
    }
}

#[test]
fn verifier_only_sees_classical_bits() {
    let c = honest();
    let dev = Scripted {
        log: RefCell::new(Vec::new()),
        gadget_outcomes: vec![true],
        fixed_bits: Box::new(imitation),
        fail_after: None,
    };
    let r = verify(&dev, &c, &params(4)).unwrap();
    let log = dev.log.borrow();
    assert_eq!(log.len(), 3);
    assert_eq!(log[0], "adaptive");
    assert!(log[1].starts_with(&format!("batch {} ", r.plan.r_gate)), "{}", log[1]);
    assert!(log[1].contains("frozen 1") && log[1].contains("SCORR 1 1 0"));
    assert!(log[2].starts_with(&format!("batch {} ", r.plan.r_meas)));
    assert!(log[2].contains("GMEASURE 4 0") && !log[2].contains("SCORR"));
    // Perfectly balanced classical answers pass: the protocol certifies the output
    // distribution, not the physics producing it.
    assert!(r.accepted(), "{}", r.summary());
}

#[test]
fn impossible_outcome_stops_the_batch() {
    let dev = Scripted {
        log: RefCell::new(Vec::new()),
        gadget_outcomes: vec![false],
        fixed_bits: Box::new(|seq, r| {
            let mut bits = imitation(seq, r);
            if bits.len() == 2 {
                bits[1] = r == 5;
            }
            bits
        }),
        fail_after: None,
    };
    let r = verify(&dev, &honest(), &params(4)).unwrap();
    assert_eq!(r.gate_test.completed, 6);
    assert_eq!(
        r.reasons[0],
        RejectReason::ImpossibleOutcome {
            batch: "gate test".into(),
            repetition: 5,
            outcome: "1".into()
        }
    );
}

#[test]
fn device_failure_is_incomplete() {
    let dev = Scripted {
        log: RefCell::new(Vec::new()),
        gadget_outcomes: vec![false],
        fixed_bits: Box::new(imitation),
        fail_after: Some(50),
    };
    let r = verify(&dev, &honest(), &params(4)).unwrap();
    assert_eq!(r.decision, Decision::Reject);
    assert_eq!(r.gate_test.completed, 50);
    assert!(r.reason_codes().iter().all(|&c| c == "INCOMPLETE"));
    assert_eq!(r.reasons.len(), 2);
}

//! The Pauli-propagation engine against dense statevector simulation.

mod common;

use gadgetcheck::circuit::{gadgetize, parse_circuit, resolve, FixedSequence};
use gadgetcheck::polysim::{joint_output_distribution, joint_output_probability, single_output_probability};
use gadgetcheck::prover::exact;
use proptest::prelude::*;
use rand::Rng;

fn sv_p0(seq: &FixedSequence) -> f64 {
    exact::output_probability_in_place(seq, false, 0.0).unwrap()
}

#[test]
fn bundled_circuits_match_statevector() {
    for text in [
        include_str!("../circuits/honest.qc"),
        include_str!("../circuits/phase_sensitive.qc"),
        include_str!("../circuits/corpus.qc"),
    ] {
        let g = gadgetize(&parse_circuit(text).unwrap());
        let t = g.gadget_count();
        for bits in 0..1u32 << t {
            let outcomes: Vec<bool> = (0..t).map(|i| bits >> i & 1 == 1).collect();
            let seq = resolve(&g, &outcomes).unwrap();
            let p = single_output_probability(&seq, false).unwrap();
            assert!((p - sv_p0(&seq)).abs() < 1e-10);
            let q = single_output_probability(&seq, true).unwrap();
            assert!((p + q - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn product_input_examples() {
    let p = |text: &str| single_output_probability(&gadgetcheck::circuit::parse_fixed(text).unwrap(), false).unwrap();
    assert_eq!(p("qubits 1\nfrozen -\nMEASURE 0 out\n"), 1.0);
    assert_eq!(p("qubits 1\ninput 0 ONE\nfrozen -\nMEASURE 0 out\n"), 0.0);
    assert!((p("qubits 1\nfrozen -\nH 0\nMEASURE 0 out\n") - 0.5).abs() < 1e-15);
    assert!((p("qubits 1\ninput 0 MAGIC\nfrozen -\nMEASURE 0 out\n") - 0.5).abs() < 1e-15);
    // H S† on |A> rotates the Bloch vector (1,1,0)/√2 so that <Z> = 1/√2.
    let expected = 0.5 * (1.0 + std::f64::consts::FRAC_1_SQRT_2);
    assert!((p("qubits 1\ninput 0 MAGIC\nfrozen -\nSDG 0\nH 0\nMEASURE 0 out\n") - expected).abs() < 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn unitary_sequences_agree(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let n = rng.random_range(1..=6);
        let depth = rng.random_range(0..=30);
        let seq = common::random_unitary_sequence(&mut rng, n, depth);
        let p = single_output_probability(&seq, false).unwrap();
        prop_assert!((p - sv_p0(&seq)).abs() <= 1e-10);
    }

    #[test]
    fn discarded_measurements_change_nothing(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let n = rng.random_range(2..=6);
        let seq = common::random_sequence_with_discards(&mut rng, n, 30);
        let in_place = exact::output_probability_in_place(&seq, true, 0.0).unwrap();
        let omitted = exact::output_probability_unitary(&seq, true, 0.0).unwrap();
        prop_assert!((in_place - omitted).abs() <= 1e-10);
        prop_assert!((single_output_probability(&seq, true).unwrap() - omitted).abs() <= 1e-10);
    }

    #[test]
    fn joint_distribution_is_normalized_and_exact(seed in any::<u64>(), k in 1usize..=4) {
        let mut rng = common::rng(seed);
        let n = rng.random_range(k.max(2)..=6);
        let seq = common::random_unitary_sequence(&mut rng, n, 25);
        let mut lines: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            lines.swap(i, rng.random_range(0..=i));
        }
        lines.truncate(k);
        let seq = common::with_readouts(&seq, &lines);
        let dist = joint_output_distribution(&seq, &lines, 10).unwrap();
        prop_assert!((dist.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        let oracle = exact::joint_distribution_unitary(&seq, &lines, 0.0).unwrap();
        for (idx, (a, b)) in dist.iter().zip(&oracle).enumerate() {
            prop_assert!((a - b).abs() <= 1e-10, "outcome {idx}: {a} vs {b}");
            let outcomes: Vec<bool> = (0..k).map(|i| idx >> i & 1 == 1).collect();
            let single = joint_output_probability(&seq, &lines, &outcomes, 10).unwrap();
            prop_assert!((single - a).abs() <= 1e-12);
        }
    }
}

#[test]
fn joint_rejects_too_many_lines() {
    let mut rng = common::rng(3);
    let seq = common::with_readouts(&common::random_unitary_sequence(&mut rng, 5, 5), &[0, 1, 2]);
    assert!(joint_output_distribution(&seq, &[0, 1, 2], 2).is_err());
}

use mbqaoa::compiler::compile_qaoa;
use mbqaoa::gatesim::{qaoa_distribution, tvd, QaoaParams, Statevector};
use mbqaoa::linalg::c64;
use mbqaoa::pattern::{
    check_determinism, enumerate_branches, explore, sample, Correction, MeasureCmd, MeasurementPattern,
    Pauli, Plane,
};
use mbqaoa::problem::{maxcut_to_qubo, Graph};
use mbqaoa::zx::Phase;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{Binomial, DiscreteCDF};

/// Input 0 teleported twice to node 2; `H·H` leaves the identity.
fn double_wire() -> MeasurementPattern {
    MeasurementPattern {
        nodes: vec![0, 1, 2],
        inputs: vec![0],
        outputs: vec![2],
        entangle: vec![(0, 1), (1, 2)],
        measurements: vec![
            MeasureCmd::new(0, Plane::XY, Phase::zero()),
            MeasureCmd::new(1, Plane::XY, Phase::zero()),
        ],
        corrections: vec![
            Correction {
                node: 2,
                pauli: Pauli::X,
                domain: [1].into(),
            },
            Correction {
                node: 2,
                pauli: Pauli::Z,
                domain: [0].into(),
            },
        ],
    }
}

fn k3_params() -> QaoaParams {
    QaoaParams::new(vec![0.37, -0.9], vec![1.2, 0.45]).unwrap()
}

#[test]
fn double_wire_is_identity() {
    let p = double_wire();
    assert!(p.validate().is_empty());
    let input = Statevector::from_amplitudes(1, vec![c64(0.6, 0.0), c64(0.0, 0.8)]).unwrap();
    let branches = enumerate_branches(&p, &input).unwrap();
    assert_eq!(branches.len(), 4);
    for b in &branches {
        assert!((b.probability - 0.25).abs() < 1e-12);
        assert!(b.output_state.phase_distance(&input) < 1e-12);
    }
    assert!(check_determinism(&p).unwrap());
}

#[test]
fn wire_on_plus_is_a_fair_coin() {
    let shots = 1000;
    let counts = sample(&double_wire(), &Statevector::plus(1), shots, 2024).unwrap();
    let zeros = counts.get(&0).copied().unwrap_or(0) as u64;
    let b = Binomial::new(0.5, shots as u64).unwrap();
    let lower = b.cdf(zeros);
    let upper = 1.0 - if zeros == 0 { 0.0 } else { b.cdf(zeros - 1) };
    let p_value = (2.0 * lower.min(upper)).min(1.0);
    assert!(p_value > 1e-4, "{zeros} zeros, p = {p_value}");
}

#[test]
fn unmeasured_register_samples_its_input() {
    let p = MeasurementPattern {
        nodes: vec![0, 1, 2],
        inputs: vec![0, 1, 2],
        outputs: vec![0, 1, 2],
        ..MeasurementPattern::default()
    };
    assert!(p.validate().is_empty());
    let counts = sample(&p, &Statevector::zero(3), 200, 1).unwrap();
    assert_eq!(counts.len(), 1);
    assert_eq!(counts[&0], 200);
}

#[test]
fn sampling_is_reproducible() {
    let q = maxcut_to_qubo(&Graph::complete(3)).unwrap();
    let p = compile_qaoa(&q, &k3_params()).unwrap();
    let empty = Statevector::zero(0);
    let a = sample(&p, &empty, 300, 99).unwrap();
    let b = sample(&p, &empty, 300, 99).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, sample(&p, &empty, 300, 100).unwrap());
}

#[test]
fn compiled_k3_validates() {
    let q = maxcut_to_qubo(&Graph::complete(3)).unwrap();
    let p = compile_qaoa(&q, &k3_params()).unwrap();
    assert!(p.validate().is_empty());
    assert!(check_determinism(&p).unwrap());
}

#[test]
fn branch_enumeration_agrees_with_merged_exploration() {
    let q = maxcut_to_qubo(&Graph::complete(2)).unwrap();
    let params = QaoaParams::new(vec![0.8], vec![0.3]).unwrap();
    let p = compile_qaoa(&q, &params).unwrap();
    let empty = Statevector::zero(0);
    let branches = enumerate_branches(&p, &empty).unwrap();
    assert_eq!(branches.len(), 1 << p.measurements.len());
    let total: f64 = branches.iter().map(|b| b.probability).sum();
    assert!((total - 1.0).abs() < 1e-9);
    let mut dist = vec![0.0; 4];
    for b in &branches {
        assert!((b.probability - 1.0 / branches.len() as f64).abs() < 1e-9);
        for (d, x) in dist.iter_mut().zip(b.output_state.probabilities()) {
            *d += b.probability * x;
        }
    }
    let merged = explore(&p, &empty).unwrap();
    assert!(tvd(&dist, &merged.output_distribution()) < 1e-12);
    assert!(tvd(&dist, &qaoa_distribution(&q, &params).unwrap()) < 1e-10);
}

#[test]
fn deterministic_patterns_have_unbiased_outcomes() {
    let q = maxcut_to_qubo(&Graph::cycle(4)).unwrap();
    let p = compile_qaoa(&q, &k3_params()).unwrap();
    let e = explore(&p, &Statevector::zero(0)).unwrap();
    assert!(e.is_deterministic(1e-9));
    assert!(e.max_outcome_bias < 1e-9);
    assert!((e.total_probability() - 1.0).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn entangle_order_is_irrelevant(seed in any::<u64>()) {
        let q = maxcut_to_qubo(&Graph::complete(3)).unwrap();
        let p = compile_qaoa(&q, &k3_params()).unwrap();
        let mut order: Vec<usize> = (0..p.entangle.len()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let shuffled = p.with_entangle_order(&order);
        prop_assert!(shuffled.validate().is_empty());
        let empty = Statevector::zero(0);
        let a = explore(&p, &empty).unwrap().output_distribution();
        let b = explore(&shuffled, &empty).unwrap().output_distribution();
        prop_assert!(tvd(&a, &b) < 1e-12);
    }
}

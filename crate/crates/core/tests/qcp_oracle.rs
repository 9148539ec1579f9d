mod common;

use common::{phase_distance, random_state};
use dyncirc::qcp::{self, try_split, AbstractState, AmplitudeTable, QcpConfig, ResetSoundness};
use dyncirc::randgen::{generate, GenConfig};
use dyncirc::sim::{derive_seed, simulate_static};
use dyncirc::synth::invert;
use dyncirc::{Circuit, Gate};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn final_state(c: &Circuit, n_max: usize) -> Option<Vec<Complex64>> {
    qcp::run(c, QcpConfig { n_max, reset: ResetSoundness::Strict }).final_table.product_state()
}

#[test]
fn random_static_circuits_match_statevector() {
    for i in 0..500u64 {
        let n = 1 + (i % 4) as usize;
        let depth = 1 + (derive_seed(11, i) % 25) as usize;
        let c = generate(&GenConfig::explicit(n, depth, derive_seed(3, i)).with_densities(0.0, 0.0, 0.0)).unwrap();
        let want = simulate_static(&c).unwrap();
        let got = final_state(&c, 4).expect("no Top within n_max");
        let d = phase_distance(want.amplitudes(), &got);
        assert!(d <= 1e-9, "circuit {i}: distance {d}");
    }
}

/// Singular values of the `2 × 2^(k-1)` reshape that isolates position `pos`.
fn singular_values(dense: &[Complex64], k: usize, pos: usize) -> Vec<f64> {
    let cols = 1 << (k - 1);
    let m = DMatrix::from_fn(2, cols, |r, c| {
        let low = c & ((1 << pos) - 1);
        let high = (c >> pos) << (pos + 1);
        dense[high | (r << pos) | low]
    });
    m.svd(false, false).singular_values.iter().copied().collect()
}

fn check_split(qubits: Vec<usize>, dense: &[Complex64]) {
    let table = AmplitudeTable::from_dense(qubits.clone(), dense);
    let parts = try_split(&table);
    let mut covered: Vec<usize> = parts.iter().flat_map(|p| p.qubits().to_vec()).collect();
    covered.sort_unstable();
    assert_eq!(covered, qubits);

    let product = parts.iter().skip(1).fold(parts[0].clone(), |acc, p| acc.tensor(p));
    assert!(phase_distance(&product.to_dense(), dense) < 1e-9);

    // no remaining multi-qubit part has a separable qubit
    for p in parts.iter().filter(|p| p.qubits().len() > 1) {
        let k = p.qubits().len();
        let d = p.to_dense();
        for pos in 0..k {
            let s = singular_values(&d, k, pos);
            assert!(s[1] >= 1e-10, "separable qubit left in {:?}: {s:?}", p.qubits());
        }
    }
}

#[test]
fn split_agrees_with_svd_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for k in 2..=4 {
        for _ in 0..100 {
            let sparse = rand::Rng::random_bool(&mut rng, 0.5);
            check_split((0..k).collect(), &random_state(&mut rng, k, sparse));
        }
    }
}

#[test]
fn split_recovers_random_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..100 {
        let a = AmplitudeTable::from_dense(vec![0], &random_state(&mut rng, 1, false));
        let b = AmplitudeTable::from_dense(vec![1, 2], &random_state(&mut rng, 2, false));
        let c = AmplitudeTable::from_dense(vec![3], &random_state(&mut rng, 1, false));
        let joint = a.tensor(&b).tensor(&c);
        let parts = try_split(&joint);
        assert!(parts.len() >= 3);
        check_split(vec![0, 1, 2, 3], &joint.to_dense());
    }
}

#[test]
fn disentangled_qubits_are_separated() {
    let mut u3 = Circuit::new(3, 0);
    for g in [Gate::cz(0, 1), Gate::ry(0.4, 2), Gate::cx(2, 0), Gate::ccx(0, 2, 1), Gate::rx(1.1, 1)] {
        u3.gate(g).unwrap();
    }
    let mut c = Circuit::new(3, 0);
    for q in 0..3 {
        c.gate(Gate::h(q)).unwrap();
    }
    for inst in u3.instructions().iter().chain(invert(&u3).unwrap().instructions()) {
        c.push(inst.clone()).unwrap();
    }
    let analysis = qcp::run(&c, QcpConfig::default());
    let groups: Vec<_> = analysis.final_table.groups().collect();
    assert_eq!(groups.len(), 3);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for g in groups {
        let AbstractState::Known(t) = g.state() else { panic!("Top group") };
        assert_eq!(t.size(), 2);
        assert!((t.amplitude(0) - h).norm() < 1e-12);
        assert!((t.amplitude(1) - h).norm() < 1e-12);
    }
}

#[test]
fn example_slice_is_plus_zero_plus() {
    let c = dyncirc::demo::measure_reset_example();
    let analysis = qcp::run(&c, QcpConfig { n_max: 3, reset: ResetSoundness::Strict });
    let measure = &analysis.sites[0];
    assert_eq!(measure.group, vec![0]);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let AbstractState::Known(top) = &measure.state else { panic!("Top") };
    assert_eq!(top.to_dense(), vec![Complex64::new(h, 0.0); 2]);
    let reset = &analysis.sites[1];
    assert_eq!(reset.group, vec![2]);
    let AbstractState::Known(bottom) = &reset.state else { panic!("Top") };
    assert_eq!(bottom.to_dense(), vec![Complex64::new(h, 0.0); 2]);
}

#[test]
fn reset_propagates_known_states() {
    // reset of |+> gives |0>; reset of a qubit holding |1> gives |0>
    let mut c = Circuit::new(2, 0);
    c.gate(Gate::h(0)).unwrap().reset(0).unwrap().gate(Gate::x(1)).unwrap().reset(1).unwrap();
    let state = final_state(&c, 4).unwrap();
    assert_eq!(state[0], Complex64::new(1.0, 0.0));

    // literal mode keeps the zero branch of a Bell pair
    let mut bell = Circuit::new(2, 0);
    bell.gate(Gate::h(0)).unwrap().gate(Gate::cx(0, 1)).unwrap().reset(0).unwrap();
    let literal = qcp::run(&bell, QcpConfig { n_max: 4, reset: ResetSoundness::Literal });
    assert_eq!(literal.final_table.product_state().unwrap()[0], Complex64::new(1.0, 0.0));
    let strict = qcp::run(&bell, QcpConfig::default());
    assert!(strict.final_table.product_state().is_none());
    assert!(!strict.final_table.group_of(0).state().is_top());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn small_cap_is_sound_or_top(seed in any::<u64>(), n in 2usize..=5, n_max in 1usize..=3) {
        let c = generate(&GenConfig::explicit(n, 12, seed).with_densities(0.0, 0.0, 0.0)).unwrap();
        let want = simulate_static(&c).unwrap();
        let analysis = qcp::run(&c, QcpConfig { n_max, reset: ResetSoundness::Strict });
        for g in analysis.final_table.groups() {
            prop_assert!(g.qubits().len() <= n_max || g.state().is_top());
        }
        if let Some(got) = analysis.final_table.product_state() {
            prop_assert!(phase_distance(want.amplitudes(), &got) <= 1e-9);
        }
    }
}

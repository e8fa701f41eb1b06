use proptest::prelude::*;
use rcc_core::channel::{
    bit_flip, bit_phase_flip, commutator_criterion, depolarizing, inert_operation, phase_flip,
    Channel, KrausOperation,
};
use rcc_core::coherence::{is_incoherent, l1_coherence, max_off_diagonal, CLASSIFY_TOL};
use rcc_core::linalg::{
    haar_random_unitary, partial_trace, tensor_product, ComplexMatrix, SeededRng, Subsystem,
};
use rcc_core::rcc::{
    average_rcc, outcome_coherence_bound, post_operation_mixed, post_operation_pure,
    unselected_state_a,
};
use rcc_core::sampling::{
    random_bipartite_density, random_bipartite_state, random_ensemble, random_incoherent_quantum,
    random_kraus_operation, random_tp_channel, random_zero_coherence_state,
};
use rcc_core::state::{concurrence, reduced_a, schmidt_decompose, BipartiteDensity};

/// `tr_B[(I⊗F) ρ (I⊗F)†]` summed over Kraus operators, built from explicit
/// Kronecker products.
fn conjugate_and_trace(rho: &ComplexMatrix, da: usize, db: usize, op: &KrausOperation) -> ComplexMatrix {
    let id = ComplexMatrix::identity(da);
    let mut acc = ComplexMatrix::zeros(da * db, da * db);
    for f in op.kraus() {
        let big = tensor_product(&id, f).unwrap();
        acc = &acc + &(&(&big * rho) * &big.adjoint());
    }
    partial_trace(&acc, da, db, Subsystem::A).unwrap()
}

const DIMS: [(usize, usize); 4] = [(2, 2), (2, 3), (3, 3), (2, 4)];

#[test]
fn schmidt_reconstruction() {
    for (da, db) in [(2, 2), (2, 4), (4, 4)] {
        let mut rng = SeededRng::new(500 + (da * 10 + db) as u64, 0);
        for _ in 0..10_000 {
            let psi = random_bipartite_state(da, db, &mut rng);
            let s = schmidt_decompose(&psi);
            let rec = s.reconstruct();
            let err = rec
                .iter()
                .zip(psi.amplitudes())
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-10, "{da}x{db}: {err}");
            assert!((s.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(s.weights.windows(2).all(|w| w[0] >= w[1]) || s.is_computational_a());
        }
    }
}

#[test]
fn concurrence_by_purity() {
    let mut rng = SeededRng::new(12, 0);
    for &(da, db) in &DIMS {
        for _ in 0..500 {
            let psi = random_bipartite_state(da, db, &mut rng);
            let rho_a = reduced_a(&psi).into_matrix();
            let purity = (&rho_a * &rho_a).trace().re;
            let oracle = (2.0 * (1.0 - purity)).max(0.0).sqrt();
            assert!((concurrence(&psi) - oracle).abs() < 1e-10);
        }
    }
}

#[test]
fn local_unitaries_preserve_schmidt_weights() {
    let mut rng = SeededRng::new(13, 0);
    for &(da, db) in &DIMS {
        for _ in 0..300 {
            let psi = random_bipartite_state(da, db, &mut rng);
            let ua = haar_random_unitary(da, &mut rng);
            let ub = haar_random_unitary(db, &mut rng);
            let moved = psi.apply_local(&ua, &ub).unwrap();
            let mut w0 = schmidt_decompose(&psi).weights;
            let mut w1 = schmidt_decompose(&moved).weights;
            w0.sort_by(|a, b| b.total_cmp(a));
            w1.sort_by(|a, b| b.total_cmp(a));
            assert_eq!(w0.len(), w1.len());
            for (a, b) in w0.iter().zip(&w1) {
                assert!((a - b).abs() < 1e-10);
            }
            assert!((concurrence(&psi) - concurrence(&moved)).abs() < 1e-10);
        }
    }
}

#[test]
fn pure_mixed_and_brute_force_paths_agree() {
    let mut rng = SeededRng::new(14, 0);
    for &(da, db) in &DIMS {
        for _ in 0..300 {
            let psi = random_bipartite_state(da, db, &mut rng);
            let op = random_kraus_operation(db, &mut rng);
            let (fast, p_fast) = post_operation_pure(&psi, &op).unwrap();
            let mixed_state = psi.to_density();
            let (slow, p_slow) = post_operation_mixed(&mixed_state, &op).unwrap();
            let brute = conjugate_and_trace(mixed_state.matrix(), da, db, &op);
            let p_brute = brute.trace().re;
            assert!((p_fast - p_brute).abs() < 1e-12);
            assert!((p_slow - p_brute).abs() < 1e-12);
            let brute = brute.scale_real(1.0 / p_brute);
            assert!(fast.matrix().max_abs_diff(&brute) < 1e-10);
            assert!(slow.matrix().max_abs_diff(&brute) < 1e-10);
        }
    }
}

#[test]
fn mixed_path_matches_brute_force_on_mixed_states() {
    let mut rng = SeededRng::new(15, 0);
    for &(da, db) in &DIMS {
        for _ in 0..200 {
            let rho = random_bipartite_density(da, db, &mut rng);
            let op = random_kraus_operation(db, &mut rng);
            let unnorm = unselected_state_a(&rho, &op).unwrap();
            let brute = conjugate_and_trace(rho.matrix(), da, db, &op);
            assert!(unnorm.max_abs_diff(&brute) < 1e-12);
        }
    }
}

#[test]
fn trace_preserving_operations_do_not_signal() {
    let mut rng = SeededRng::new(16, 0);
    for &(da, db) in &DIMS {
        for _ in 0..300 {
            let psi = random_bipartite_state(da, db, &mut rng);
            let rho_a = reduced_a(&psi);
            let ensemble = random_ensemble(db, &mut rng);
            let mut total = ComplexMatrix::zeros(da, da);
            for op in ensemble.operations() {
                total = &total + &unselected_state_a(&psi, op).unwrap();
            }
            assert!(total.max_abs_diff(rho_a.matrix()) < 1e-10);
        }
    }
}

#[test]
fn incoherent_quantum_states_gain_no_coherence() {
    let mut rng = SeededRng::new(17, 0);
    for &(da, db) in &DIMS {
        for _ in 0..300 {
            let rho: BipartiteDensity = random_incoherent_quantum(da, db, &mut rng);
            let op = random_kraus_operation(db, &mut rng);
            let (out, _) = post_operation_mixed(&rho, &op).unwrap();
            assert!(l1_coherence(&out) < 1e-10);
        }
    }
}

#[test]
fn inert_operations_leave_a_incoherent() {
    let mut rng = SeededRng::new(18, 0);
    for (da, db) in [(2, 2), (2, 3), (3, 3), (3, 4)] {
        for _ in 0..300 {
            let psi = random_zero_coherence_state(da, db, &mut rng);
            let values: Vec<f64> = (0..db).map(|_| 0.05 + 0.95 * rng.uniform()).collect();
            let op = inert_operation(&psi, &values).unwrap();
            let (out, _) = post_operation_pure(&psi, &op).unwrap();
            assert!(l1_coherence(&out) < 1e-9);
            assert!(!commutator_criterion(&psi, &op, CLASSIFY_TOL).unwrap().creates);
        }
    }
}

#[test]
fn commutator_criterion_tracks_created_coherence() {
    let mut rng = SeededRng::new(19, 0);
    let mut checked = 0;
    for (da, db) in [(2, 2), (3, 3)] {
        for _ in 0..500 {
            let psi = random_zero_coherence_state(da, db, &mut rng);
            let op = random_kraus_operation(db, &mut rng);
            let c = l1_coherence(&post_operation_pure(&psi, &op).unwrap().0);
            if (1e-9..=1e-6).contains(&c) {
                continue;
            }
            let verdict = commutator_criterion(&psi, &op, CLASSIFY_TOL).unwrap();
            assert_eq!(verdict.creates, c > 1e-6);
            checked += 1;
        }
    }
    assert!(checked > 990);
}

#[test]
fn pauli_noise_creates_nothing() {
    let mut rng = SeededRng::new(20, 0);
    for _ in 0..200 {
        let psi = random_zero_coherence_state(2, 2, &mut rng);
        let p = rng.uniform();
        for op in [
            bit_flip(p).unwrap(),
            phase_flip(p).unwrap(),
            bit_phase_flip(p).unwrap(),
            depolarizing(p).unwrap(),
        ] {
            let report = average_rcc(&psi, &Channel::from(op)).unwrap();
            assert!(report.average_rcc < 1e-10);
            for o in &report.outcomes {
                assert!(o.coherence < 1e-10);
            }
        }
    }
}

#[test]
fn bounds_are_ordered() {
    let mut rng = SeededRng::new(21, 0);
    for d in [2, 3, 4] {
        for _ in 0..300 {
            let psi = random_zero_coherence_state(d, d, &mut rng);
            let channel = Channel::from(random_ensemble(d, &mut rng));
            let report = average_rcc(&psi, &channel).unwrap();
            let maxent = report.maxent_bound.unwrap();
            assert!(report.average_rcc <= report.tighter_bound + 1e-10);
            assert!(report.tighter_bound <= maxent + 1e-10);
            for (o, b) in report.outcomes.iter().zip(&report.outcome_bounds) {
                if let Some(b) = b {
                    assert!(o.coherence <= b + 1e-10);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn outcome_bound_dominates(seed in any::<u64>(), d in 2usize..=4) {
        let mut rng = SeededRng::new(seed, 3);
        let psi = random_zero_coherence_state(d, d, &mut rng);
        let op = random_kraus_operation(d, &mut rng);
        let (out, _) = post_operation_pure(&psi, &op).unwrap();
        prop_assert!(l1_coherence(&out) <= outcome_coherence_bound(&psi, &op).unwrap() + 1e-10);
    }

    #[test]
    fn marginal_is_incoherent_for_zero_coherence_sampler(seed in any::<u64>(), d in 2usize..=4) {
        let mut rng = SeededRng::new(seed, 4);
        let psi = random_zero_coherence_state(d, d + 1, &mut rng);
        let rho_a = reduced_a(&psi);
        prop_assert!(max_off_diagonal(rho_a.matrix()) < 1e-12);
        prop_assert!(is_incoherent(&rho_a, CLASSIFY_TOL));
    }

    #[test]
    fn trace_preserving_operation_keeps_marginal(seed in any::<u64>(), d in 2usize..=4) {
        let mut rng = SeededRng::new(seed, 5);
        let psi = random_bipartite_state(2, d, &mut rng);
        let op = random_tp_channel(d, &mut rng);
        let out = unselected_state_a(&psi, &op).unwrap();
        prop_assert!(out.max_abs_diff(reduced_a(&psi).matrix()) < 1e-10);
    }
}

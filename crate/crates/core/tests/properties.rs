use proptest::prelude::*;
use twirl_core::linalg::CMatrix;
use twirl_core::{
    choose_tau, closed_form_eigenpairs, dense_matrix, eigendecompose, evolve_exact, evolve_trotter,
    expectation, observable_zbar, overlap_decomposition, run_protocol, run_protocol_with_states,
    schwinger_hamiltonian, twirl_round, Backend, Complex64, PauliAxis, PauliSum, PauliTerm, RoundSpec, StateVector,
    TauMode, TwirlConfig,
};

fn axis() -> impl Strategy<Value = PauliAxis> {
    prop_oneof![Just(PauliAxis::I), Just(PauliAxis::X), Just(PauliAxis::Y), Just(PauliAxis::Z)]
}

fn pauli_sum(n: usize) -> impl Strategy<Value = PauliSum> {
    proptest::collection::vec((-2.0f64..2.0, proptest::collection::vec(axis(), n)), 1..6).prop_map(move |terms| {
        let terms = terms.into_iter().map(|(c, axes)| PauliTerm::new(c, axes).unwrap()).collect();
        PauliSum::from_terms(n, terms).unwrap()
    })
}

fn sized_sum() -> impl Strategy<Value = PauliSum> {
    (1usize..=4).prop_flat_map(pauli_sum)
}

fn state(n: usize) -> impl Strategy<Value = StateVector> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n)
        .prop_filter("non-zero", |v| v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3)
        .prop_map(|v| StateVector::normalized(v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).unwrap())
}

fn sum_with_state() -> impl Strategy<Value = (PauliSum, StateVector)> {
    (1usize..=4).prop_flat_map(|n| (pauli_sum(n), state(n)))
}

fn schwinger_case() -> impl Strategy<Value = (usize, f64, StateVector)> {
    (1usize..=3).prop_flat_map(|n| (Just(n), 0.0f64..4.0, state(n)))
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn dense_matrix_is_hermitian(h in sized_sum()) {
        prop_assert!(dense_matrix(&h).unwrap().hermiticity_defect() < 1e-12);
    }

    #[test]
    fn action_is_linear((h, psi) in sum_with_state(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let n = h.n_qubits();
        let phi = StateVector::basis_index(n, (1 << n) - 1);
        let mixed: Vec<Complex64> =
            psi.amplitudes().iter().zip(phi.amplitudes()).map(|(x, y)| a * x + b * y).collect();
        let m = dense_matrix(&h).unwrap();
        let hp = twirl_core::pauli::apply(&h, &psi).unwrap();
        let hq = twirl_core::pauli::apply(&h, &phi).unwrap();
        let lhs = m.matvec(&mixed);
        let rhs: Vec<Complex64> = hp.iter().zip(&hq).map(|(x, y)| a * x + b * y).collect();
        prop_assert!(max_diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn decomposition_reconstructs(h in sized_sum()) {
        let d = eigendecompose(&h).unwrap();
        let m = dense_matrix(&h).unwrap();
        prop_assert!(d.reconstruct().sub(&m).max_abs() < 1e-10);
        let v = d.eigenvectors();
        prop_assert!(v.adjoint().matmul(v).sub(&CMatrix::identity(d.dim())).max_abs() < 1e-10);
        prop_assert!(d.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn propagator_is_unitary_and_conserves_energy((h, psi) in sum_with_state(), tau in -4.0f64..4.0) {
        let d = eigendecompose(&h).unwrap();
        let u = d.propagator(tau);
        prop_assert!(u.adjoint().matmul(&u).sub(&CMatrix::identity(d.dim())).max_abs() < 1e-10);
        let out = evolve_exact(&psi, &h, tau).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-10);
        let before = expectation(&psi, &h).unwrap();
        prop_assert!((expectation(&out, &h).unwrap() - before).abs() < 1e-9);
    }

    #[test]
    fn trotter_preserves_norm((n, j, psi) in schwinger_case(), tau in -4.0f64..4.0, steps in 1usize..20) {
        let h = schwinger_hamiltonian(n, j).unwrap();
        let out = evolve_trotter(&psi, &h, tau, steps).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn survival_probability_is_a_probability((n, j, psi) in schwinger_case(), tau in -4.0f64..4.0, r in 1usize..4) {
        let h = schwinger_hamiltonian(n, j).unwrap();
        if let Ok((post, p)) = twirl_round(&psi, &h, tau, Complex64::new(0.0, 1.0), r, Backend::Exact) {
            prop_assert!((0.0..=1.0).contains(&p));
            prop_assert!((post.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_energy_component_is_stable((j, psi) in (0.0f64..3.0, state(3)), e in prop_oneof![-1.0f64..-0.05, 0.05f64..1.0]) {
        // Full mode gives theta = 0 to every zero-energy eigenstate.
        let h = schwinger_hamiltonian(3, j).unwrap();
        let spec = eigendecompose(&h).unwrap();
        let zero: Vec<usize> = (0..8).filter(|&k| spec.eigenvalues()[k].abs() < 1e-9).collect();
        let weight = |s: &StateVector| {
            let o = overlap_decomposition(s, &spec).unwrap();
            zero.iter().map(|&k| o.weights[k]).sum::<f64>()
        };
        let (tau, phi) = choose_tau(e, TauMode::Full).unwrap();
        if let Ok((post, _)) = twirl_round(&psi, &h, tau, phi, 1, Backend::Exact) {
            prop_assert!(weight(&post) >= weight(&psi) - 1e-12);
        }
    }

    #[test]
    fn records_are_consistent((n, j, psi) in schwinger_case(), rounds in 0usize..5, seed in any::<u64>()) {
        let h = schwinger_hamiltonian(n, j).unwrap();
        let cfg = TwirlConfig {
            rounds: vec![RoundSpec::full(0.7); rounds],
            shots: Some(1000),
            seed,
            observables: vec![("H".into(), h.clone())],
            ..Default::default()
        };
        if let Ok(recs) = run_protocol(&psi, &h, &cfg) {
            prop_assert!((recs[0].expectation("H").unwrap() - expectation(&psi, &h).unwrap()).abs() < 1e-12);
            let mut prod = 1.0;
            let mut prev = 1000;
            for r in &recs {
                prod *= r.p_round;
                prop_assert!((r.p_cumulative - prod).abs() < 1e-12);
                let a = r.active_count.unwrap();
                prop_assert!(a <= prev);
                prev = a;
            }
        }
    }
}

/// Fidelity with the closed-form target never drops from one round to the next.
#[test]
fn target_fidelity_is_non_decreasing() {
    let cases: [(usize, &str, usize, usize); 6] =
        [(1, "0", 1, 1), (1, "1", 0, 1), (3, "001", 7, 3), (3, "100", 1, 3), (3, "101", 0, 3), (2, "01", 3, 2)];
    for (n, label, target, r) in cases {
        let h = schwinger_hamiltonian(n, 1.0).unwrap();
        let goal = &closed_form_eigenpairs(n, 1.0).unwrap()[target];
        let cfg = TwirlConfig { rounds: vec![RoundSpec::quarter().with_ancillas(r); 6], ..Default::default() };
        let run = run_protocol_with_states(&StateVector::basis(label).unwrap(), &h, &cfg).unwrap();
        let fid: Vec<f64> = run.states.iter().map(|s| s.fidelity(&goal.vector).unwrap()).collect();
        assert!(fid.windows(2).all(|w| w[1] >= w[0] - 1e-12), "{label}: {fid:?}");
        assert!(fid.last().unwrap() > &0.99, "{label}: {fid:?}");
    }
}

#[test]
fn zbar_is_diagonal() {
    let z = dense_matrix(&observable_zbar()).unwrap();
    for i in 0..8 {
        for j in 0..8 {
            if i != j {
                assert_eq!(z[(i, j)], Complex64::new(0.0, 0.0));
            }
        }
    }
}

//! Fixtures shared by the benchmarks.

use twirl_core::{observable_zbar, schwinger_hamiltonian, PauliSum, RoundSpec, StateVector, TwirlConfig};

/// The Schwinger Hamiltonian at `J = 1`.
pub fn hamiltonian(n_qubits: usize) -> PauliSum {
    schwinger_hamiltonian(n_qubits, 1.0).expect("supported qubit count")
}

/// A basis state with support on several eigenvectors.
pub fn initial_state(n_qubits: usize) -> StateVector {
    let label = match n_qubits {
        1 => "0",
        2 => "01",
        _ => "101",
    };
    StateVector::basis(label).expect("valid label")
}

/// `rounds` Quarter rounds with `n` ancillas each, observing `H` (and `Zbar` on three qubits).
pub fn quarter_config(n_qubits: usize, rounds: usize, shots: Option<u64>) -> TwirlConfig {
    let mut observables = vec![("H".to_string(), hamiltonian(n_qubits))];
    if n_qubits == 3 {
        observables.push(("Zbar".to_string(), observable_zbar()));
    }
    TwirlConfig {
        rounds: vec![RoundSpec::quarter().with_ancillas(n_qubits); rounds],
        shots,
        seed: 7,
        observables,
        ..TwirlConfig::default()
    }
}

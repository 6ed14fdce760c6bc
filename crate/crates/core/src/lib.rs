//! Statevector simulation of iterated ancilla twirling: Pauli-string
//! Hamiltonians, dense spectra, Trotterized and exact propagation, shot
//! sampling and an adiabatic preparation baseline.
//!
//! Basis convention: qubit 0 is the most significant bit, so `"101"` is
//! index 5.

pub mod adiabatic;
pub mod error;
pub mod linalg;
pub mod pauli;
pub mod shots;
pub mod spectral;
pub mod state;
pub mod trotter;
pub mod twirl;

pub use num_complex::Complex64;

pub use adiabatic::{adiabatic_prepare, AdiabaticSchedule};
pub use error::{Error, Result};
pub use linalg::CMatrix;
pub use pauli::{
    commutes, dense_matrix, dense_limit, expectation, named_hamiltonian, named_observable, observable_zbar,
    schwinger_hamiltonian, single_qubit, HamiltonianSpec, PauliAxis, PauliSum, PauliTerm, SchwingerCoupling,
};
pub use shots::{sample_shots, Estimate, ShotSampler};
pub use spectral::{
    closed_form_eigenpairs, closed_form_spectrum, eigendecompose, evolve_exact, overlap_decomposition,
    spectral_deviation, LabeledEigenpair, OverlapDecomposition, SpectralDecomposition,
};
pub use state::StateVector;
pub use trotter::{evolve_trotter, trotter_error, trotter_unitary, TrotterPlan};
pub use twirl::{
    choose_tau, phase_profile, run_protocol, run_protocol_partial, run_protocol_with_states, twirl_round, Backend, EnergyEstimator,
    PhaseProfile, Propagator, ProtocolRun, RoundRecord, RoundSpec, TauMode, TwirlConfig, DEFAULT_TROTTER_STEPS,
};

/// Crate version, embedded in exported artifacts.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

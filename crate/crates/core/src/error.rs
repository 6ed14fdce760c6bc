use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported system size: {0} qubits (builders exist for 1, 2 and 3)")]
    UnsupportedSystemSize(usize),

    #[error("dense limit exceeded: {n_qubits} qubits > limit {limit} (set TWIRL_DENSE_LIMIT to raise it)")]
    DenseLimitExceeded { n_qubits: usize, limit: usize },

    #[error("dimension mismatch: expected {expected} qubits, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid Pauli string {0:?}: expected characters from I, X, Y, Z")]
    InvalidPauliString(String),

    #[error("invalid basis label {0:?}: expected a non-empty string of 0/1 characters")]
    InvalidBasisLabel(String),

    #[error("state is not normalized: norm = {0}")]
    NotNormalized(f64),

    #[error("non-finite coefficient {0}")]
    NonFiniteCoefficient(f64),

    #[error("zero energy requires override (round {round}): <H> = {energy:e} cannot fix a twirling period; set an explicit non-zero E and use full mode (tau = 2*pi/E)")]
    ZeroEnergy { round: usize, energy: f64 },

    #[error("post-selection extinguished: survival probability {0:e} below 1e-14")]
    PostSelectionExtinguished(f64),

    #[error("trotter step count must be at least 1")]
    ZeroTrotterSteps,

    #[error("ancilla count per round must be at least 1")]
    ZeroAncillas,

    #[error("shot count must be positive")]
    ZeroShots,

    #[error("prefactor must have unit modulus, got |phi| = {0}")]
    NonUnitPrefactor(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown observable {0:?}")]
    UnknownObservable(String),

    #[error("unknown hamiltonian builder {0:?} (expected schwinger-1q, schwinger-2q or schwinger-3q)")]
    UnknownHamiltonian(String),
}

//! Second-order (symmetric) Suzuki-Trotter propagation over Pauli terms.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::pauli::{check_dense_limit, PauliMasks, PauliSum};
use crate::spectral::eigendecompose;
use crate::state::StateVector;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrotterPlan {
    steps: usize,
    tau: f64,
}

impl TrotterPlan {
    pub fn new(tau: f64, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::ZeroTrotterSteps);
        }
        if !tau.is_finite() {
            return Err(Error::InvalidParameter(format!("non-finite evolution time {tau}")));
        }
        Ok(Self { steps, tau })
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Applies the plan in place. One step is
    /// `prod_k e^{-i dt/2 c_k P_k}` in term order followed by the same
    /// factors in reverse order, with `dt = tau / steps`.
    pub fn apply(&self, h: &PauliSum, amps: &mut [Complex64]) {
        let half = 0.5 * self.tau / self.steps as f64;
        let factors: Vec<(PauliMasks, f64)> = h
            .terms()
            .iter()
            .map(|t| (t.masks(), half * t.coeff()))
            .collect();
        let mut scratch = vec![Complex64::new(0.0, 0.0); amps.len()];
        for _ in 0..self.steps {
            for (masks, theta) in factors.iter().chain(factors.iter().rev()) {
                pauli_rotation(masks, *theta, amps, &mut scratch);
            }
        }
    }
}

/// `psi <- (cos(theta) I - i sin(theta) P) psi`
fn pauli_rotation(masks: &PauliMasks, theta: f64, amps: &mut [Complex64], scratch: &mut [Complex64]) {
    if theta == 0.0 {
        return;
    }
    masks.apply(amps, scratch);
    let (s, c) = theta.sin_cos();
    let mis = Complex64::new(0.0, -s);
    for (a, p) in amps.iter_mut().zip(scratch.iter()) {
        *a = c * *a + mis * p;
    }
}

pub fn evolve_trotter(state: &StateVector, h: &PauliSum, tau: f64, steps: usize) -> Result<StateVector> {
    state.check_same_size(h.n_qubits())?;
    let plan = TrotterPlan::new(tau, steps)?;
    let mut out = state.clone();
    plan.apply(h, out.amplitudes_mut());
    Ok(out)
}

/// Dense matrix of the Trotter product, built column by column.
pub fn trotter_unitary(h: &PauliSum, tau: f64, steps: usize) -> Result<CMatrix> {
    check_dense_limit(h.n_qubits())?;
    let plan = TrotterPlan::new(tau, steps)?;
    let dim = 1usize << h.n_qubits();
    let mut u = CMatrix::zeros(dim);
    for j in 0..dim {
        let mut col = vec![Complex64::new(0.0, 0.0); dim];
        col[j] = Complex64::new(1.0, 0.0);
        plan.apply(h, &mut col);
        u.set_column(j, &col);
    }
    Ok(u)
}

/// Operator norm of `U_trotter - e^{-i tau h}`.
pub fn trotter_error(h: &PauliSum, tau: f64, steps: usize) -> Result<f64> {
    let approx = trotter_unitary(h, tau, steps)?;
    let exact = eigendecompose(h)?.propagator(tau);
    Ok(approx.sub(&exact).operator_norm())
}

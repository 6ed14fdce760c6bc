//! Normalized statevectors over `n` qubits.
//!
//! Basis ordering: qubit 0 is the most significant bit of the basis index, so
//! the label `"101"` (|1>_0 |0>_1 |1>_2) is index 5.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) const NORM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Computational basis state from a bit label, qubit 0 first.
    pub fn basis(label: &str) -> Result<Self> {
        if label.is_empty() || !label.chars().all(|c| c == '0' || c == '1') {
            return Err(Error::InvalidBasisLabel(label.to_string()));
        }
        let n = label.len();
        let index = usize::from_str_radix(label, 2)
            .map_err(|_| Error::InvalidBasisLabel(label.to_string()))?;
        Ok(Self::basis_index(n, index))
    }

    pub fn basis_index(n_qubits: usize, index: usize) -> Self {
        let dim = 1usize << n_qubits;
        assert!(index < dim, "basis index {index} out of range for {n_qubits} qubits");
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self { n_qubits, amplitudes }
    }

    /// Wraps amplitudes that must already be normalized within 1e-9.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let n_qubits = qubits_for_len(amplitudes.len())?;
        let state = Self { n_qubits, amplitudes };
        let norm = state.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(state)
    }

    /// Normalizes arbitrary (non-zero) amplitudes.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let n_qubits = qubits_for_len(amplitudes.len())?;
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::NotNormalized(norm));
        }
        let amplitudes = amplitudes.into_iter().map(|a| a / norm).collect();
        Ok(Self { n_qubits, amplitudes })
    }

    pub(crate) fn from_raw(n_qubits: usize, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), 1 << n_qubits);
        Self { n_qubits, amplitudes }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.check_same_size(other.n_qubits)?;
        Ok(inner(&self.amplitudes, &other.amplitudes))
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub(crate) fn check_same_size(&self, n_qubits: usize) -> Result<()> {
        if self.n_qubits != n_qubits {
            return Err(Error::DimensionMismatch { expected: n_qubits, found: self.n_qubits });
        }
        Ok(())
    }

    /// Applies a 2x2 unitary (row-major) to `qubit`.
    pub fn apply_single_qubit(&mut self, qubit: usize, gate: [[Complex64; 2]; 2]) {
        assert!(qubit < self.n_qubits, "qubit {qubit} out of range");
        let mask = 1usize << (self.n_qubits - 1 - qubit);
        for i in 0..self.amplitudes.len() {
            if i & mask == 0 {
                let j = i | mask;
                let a0 = self.amplitudes[i];
                let a1 = self.amplitudes[j];
                self.amplitudes[i] = gate[0][0] * a0 + gate[0][1] * a1;
                self.amplitudes[j] = gate[1][0] * a0 + gate[1][1] * a1;
            }
        }
    }
}

pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn qubits_for_len(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::InvalidParameter(format!(
            "amplitude vector length {len} is not 2^n with n >= 1"
        )));
    }
    Ok(len.trailing_zeros() as usize)
}

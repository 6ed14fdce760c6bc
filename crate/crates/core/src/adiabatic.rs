//! Piecewise-constant adiabatic ramp from a trivial Hamiltonian to a target.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::PauliSum;
use crate::state::StateVector;
use crate::twirl::{Backend, Propagator};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdiabaticSchedule {
    pub total_time: f64,
    pub steps: usize,
}

impl Default for AdiabaticSchedule {
    fn default() -> Self {
        Self { total_time: 20.0, steps: 400 }
    }
}

impl AdiabaticSchedule {
    pub fn new(total_time: f64, steps: usize) -> Result<Self> {
        let s = Self { total_time, steps };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::InvalidParameter("adiabatic schedule needs at least one step".into()));
        }
        if !(self.total_time.is_finite() && self.total_time > 0.0) {
            return Err(Error::InvalidParameter(format!("adiabatic total time must be positive, got {}", self.total_time)));
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        self.total_time / self.steps as f64
    }

    /// Interpolation parameter of step `k`, sampled at the step midpoint.
    pub fn s(&self, k: usize) -> f64 {
        (k as f64 + 0.5) / self.steps as f64
    }
}

impl fmt::Display for AdiabaticSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "adiabatic:T={},steps={}", self.total_time, self.steps)
    }
}

impl FromStr for AdiabaticSchedule {
    type Err = Error;

    /// `adiabatic`, or `adiabatic:T=<f64>,steps=<usize>` with either key optional.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("cannot parse adiabatic schedule {s:?}"));
        let mut out = Self::default();
        let rest = match s.trim().strip_prefix("adiabatic") {
            Some("") => return Ok(out),
            Some(r) => r.strip_prefix(':').ok_or_else(bad)?,
            None => return Err(bad()),
        };
        for kv in rest.split(',').filter(|p| !p.is_empty()) {
            let (k, v) = kv.split_once('=').ok_or_else(bad)?;
            match k.trim() {
                "T" => out.total_time = v.trim().parse().map_err(|_| bad())?,
                "steps" => out.steps = v.trim().parse().map_err(|_| bad())?,
                _ => return Err(bad()),
            }
        }
        out.validate()?;
        Ok(out)
    }
}

/// Evolves `initial` under `H(s) = (1 - s) h0 + s h1`, frozen over each step.
pub fn adiabatic_prepare(
    h0: &PauliSum,
    h1: &PauliSum,
    schedule: &AdiabaticSchedule,
    initial: &StateVector,
    backend: Backend,
) -> Result<StateVector> {
    schedule.validate()?;
    if h0.n_qubits() != h1.n_qubits() {
        return Err(Error::DimensionMismatch { expected: h1.n_qubits(), found: h0.n_qubits() });
    }
    initial.check_same_size(h1.n_qubits())?;
    let dt = schedule.dt();
    let mut psi = initial.amplitudes().to_vec();
    for k in 0..schedule.steps {
        let s = schedule.s(k);
        let h = h0.linear_combination(1.0 - s, h1, s)?;
        psi = Propagator::new(&h, backend)?.evolve(&psi, dt)?;
    }
    StateVector::normalized(psi)
}

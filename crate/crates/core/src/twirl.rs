//! Iterated ancilla twirling with post-selection.
//!
//! One twirl with a single ancilla (Hadamard, controlled `phi * e^{-i tau H}`,
//! Hadamard, keep ancilla `|0>`) acts on the system as
//! `psi -> (I + phi U(tau)) psi / 2`. The ancilla register is never
//! materialized: a round with `r` ancillas applies that operator `r` times,
//! and the squared norm of the result is the round's survival probability.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{expectation, PauliSum};
use crate::shots::{Estimate, ShotSampler, ENERGY_SLOT};
use crate::spectral::{eigendecompose, overlap_decomposition, SpectralDecomposition};
use crate::state::StateVector;
use crate::trotter::TrotterPlan;

/// Trotter steps per twirl application when none are given.
pub const DEFAULT_TROTTER_STEPS: usize = 64;

/// Survival probabilities below this abort the run.
pub const MIN_SURVIVAL: f64 = 1e-14;

/// A measured energy within this fraction of the Hamiltonian's coefficient
/// norm is treated as zero.
pub const ZERO_ENERGY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TauMode {
    /// `tau = pi / (2E)`, prefactor `i`.
    Quarter,
    /// `tau = 2 pi / E`, prefactor `1`.
    Full,
}

impl TauMode {
    pub fn prefactor(self) -> Complex64 {
        match self {
            TauMode::Quarter => Complex64::new(0.0, 1.0),
            TauMode::Full => Complex64::new(1.0, 0.0),
        }
    }
}

impl fmt::Display for TauMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TauMode::Quarter => "quarter",
            TauMode::Full => "full",
        })
    }
}

/// Twirling period and control-branch prefactor for a target energy.
pub fn choose_tau(energy: f64, mode: TauMode) -> Result<(f64, Complex64)> {
    if energy == 0.0 || !energy.is_finite() {
        return Err(Error::ZeroEnergy { round: 0, energy });
    }
    let tau = match mode {
        TauMode::Quarter => PI / (2.0 * energy),
        TauMode::Full => 2.0 * PI / energy,
    };
    Ok((tau, mode.prefactor()))
}

/// How `e^{-i tau H}` is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backend {
    #[default]
    Exact,
    Trotter { steps: usize },
}

impl Backend {
    pub fn trotter_steps(&self) -> Option<usize> {
        match self {
            Backend::Exact => None,
            Backend::Trotter { steps } => Some(*steps),
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Exact => f.write_str("exact"),
            Backend::Trotter { steps } => write!(f, "trotter:{steps}"),
        }
    }
}

impl FromStr for Backend {
    type Err = Error;

    /// `exact`, `trotter` (64 steps) or `trotter:N`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "exact" => Ok(Backend::Exact),
            "trotter" => Ok(Backend::Trotter { steps: DEFAULT_TROTTER_STEPS }),
            other => {
                let steps = other
                    .strip_prefix("trotter:")
                    .and_then(|n| n.parse::<usize>().ok())
                    .ok_or_else(|| Error::InvalidParameter(format!("unknown backend {other:?}")))?;
                if steps == 0 {
                    return Err(Error::ZeroTrotterSteps);
                }
                Ok(Backend::Trotter { steps })
            }
        }
    }
}

impl Serialize for Backend {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Backend {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A propagator prepared once per Hamiltonian.
#[derive(Debug, Clone)]
pub enum Propagator {
    Exact(SpectralDecomposition),
    Trotter { h: PauliSum, steps: usize },
}

impl Propagator {
    pub fn new(h: &PauliSum, backend: Backend) -> Result<Self> {
        match backend {
            Backend::Exact => Ok(Propagator::Exact(eigendecompose(h)?)),
            Backend::Trotter { steps } => {
                if steps == 0 {
                    return Err(Error::ZeroTrotterSteps);
                }
                Ok(Propagator::Trotter { h: h.clone(), steps })
            }
        }
    }

    pub fn n_qubits(&self) -> usize {
        match self {
            Propagator::Exact(d) => d.n_qubits(),
            Propagator::Trotter { h, .. } => h.n_qubits(),
        }
    }

    /// `e^{-i tau H} psi` on raw amplitudes.
    pub fn evolve(&self, psi: &[Complex64], tau: f64) -> Result<Vec<Complex64>> {
        match self {
            Propagator::Exact(d) => {
                let state = StateVector::from_raw(self.n_qubits(), psi.to_vec());
                Ok(d.evolve(&state, tau)?.into_amplitudes())
            }
            Propagator::Trotter { h, steps } => {
                let mut out = psi.to_vec();
                TrotterPlan::new(tau, *steps)?.apply(h, &mut out);
                Ok(out)
            }
        }
    }

    /// Applies `[(I + phi U(tau)) / 2]^r` and post-selects.
    pub fn twirl(&self, state: &StateVector, tau: f64, prefactor: Complex64, ancillas: usize) -> Result<(StateVector, f64)> {
        state.check_same_size(self.n_qubits())?;
        if ancillas == 0 {
            return Err(Error::ZeroAncillas);
        }
        if ((prefactor.norm()) - 1.0).abs() > 1e-12 {
            return Err(Error::NonUnitPrefactor(prefactor.norm()));
        }
        let mut psi = state.amplitudes().to_vec();
        for _ in 0..ancillas {
            let evolved = self.evolve(&psi, tau)?;
            for (a, u) in psi.iter_mut().zip(evolved) {
                *a = 0.5 * (*a + prefactor * u);
            }
        }
        let p = psi.iter().map(|a| a.norm_sqr()).sum::<f64>();
        if p < MIN_SURVIVAL {
            return Err(Error::PostSelectionExtinguished(p));
        }
        let norm = p.sqrt();
        psi.iter_mut().for_each(|a| *a /= norm);
        Ok((StateVector::from_raw(state.n_qubits(), psi), p.min(1.0)))
    }
}

/// One twirling round: returns the post-selected state and its probability.
pub fn twirl_round(
    state: &StateVector,
    h: &PauliSum,
    tau: f64,
    prefactor: Complex64,
    ancillas: usize,
    backend: Backend,
) -> Result<(StateVector, f64)> {
    state.check_same_size(h.n_qubits())?;
    Propagator::new(h, backend)?.twirl(state, tau, prefactor, ancillas)
}

/// Per-eigenstate phase `theta_j = arg(phi e^{-i tau eps_j})` and weight.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseProfile {
    pub energies: Vec<f64>,
    pub thetas: Vec<f64>,
    pub weights: Vec<f64>,
}

impl PhaseProfile {
    /// `sum_j w_j cos^2(theta_j / 2)`: the single-ancilla survival probability.
    pub fn survival_probability(&self) -> f64 {
        self.weights.iter().zip(&self.thetas).map(|(w, t)| w * (0.5 * t).cos().powi(2)).sum()
    }

    /// Survival probability with `r` ancillas: `sum_j w_j cos^{2r}(theta_j / 2)`.
    pub fn survival_probability_r(&self, ancillas: usize) -> f64 {
        self.weights
            .iter()
            .zip(&self.thetas)
            .map(|(w, t)| w * (0.5 * t).cos().abs().powi(2 * ancillas as i32))
            .sum()
    }
}

pub fn phase_profile(state: &StateVector, h: &PauliSum, tau: f64, prefactor: Complex64) -> Result<PhaseProfile> {
    let spec = eigendecompose(h)?;
    let overlap = overlap_decomposition(state, &spec)?;
    let thetas = spec
        .eigenvalues()
        .iter()
        .map(|&eps| wrap_angle((prefactor * Complex64::from_polar(1.0, -tau * eps)).arg()))
        .collect();
    Ok(PhaseProfile { energies: spec.eigenvalues().to_vec(), thetas, weights: overlap.weights })
}

/// Maps into `(-pi, pi]`.
fn wrap_angle(theta: f64) -> f64 {
    if theta <= -PI {
        theta + 2.0 * PI
    } else {
        theta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundSpec {
    pub tau_mode: TauMode,
    pub energy_override: Option<f64>,
    pub ancillas: usize,
}

impl RoundSpec {
    pub fn quarter() -> Self {
        Self { tau_mode: TauMode::Quarter, energy_override: None, ancillas: 1 }
    }

    pub fn full(energy: f64) -> Self {
        Self { tau_mode: TauMode::Full, energy_override: Some(energy), ancillas: 1 }
    }

    pub fn with_override(mut self, energy: f64) -> Self {
        self.energy_override = Some(energy);
        self
    }

    pub fn with_ancillas(mut self, ancillas: usize) -> Self {
        self.ancillas = ancillas;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.ancillas == 0 {
            return Err(Error::ZeroAncillas);
        }
        if let Some(e) = self.energy_override {
            if e == 0.0 || !e.is_finite() {
                return Err(Error::InvalidParameter(format!("energy override must be finite and non-zero, got {e}")));
            }
        }
        Ok(())
    }
}

/// Where the energy that fixes `tau` comes from when no override is given.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnergyEstimator {
    /// Exact `<psi|H|psi>` of the post-selected state.
    #[default]
    Exact,
    /// Shot estimate of `<H>` (requires shots).
    Sampled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwirlConfig {
    pub rounds: Vec<RoundSpec>,
    pub backend: Backend,
    pub shots: Option<u64>,
    pub seed: u64,
    /// Distinguishes RNG streams of configurations sharing a seed.
    pub stream_id: u64,
    pub observables: Vec<(String, PauliSum)>,
    pub energy_estimator: EnergyEstimator,
}

impl Default for TwirlConfig {
    fn default() -> Self {
        Self {
            rounds: Vec::new(),
            backend: Backend::Exact,
            shots: None,
            seed: 0,
            stream_id: 0,
            observables: Vec::new(),
            energy_estimator: EnergyEstimator::Exact,
        }
    }
}

impl TwirlConfig {
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        for r in &self.rounds {
            r.validate()?;
        }
        if self.shots == Some(0) {
            return Err(Error::ZeroShots);
        }
        if self.energy_estimator == EnergyEstimator::Sampled && self.shots.is_none() {
            return Err(Error::InvalidParameter("sampled energy estimates need a shot count".into()));
        }
        if let Backend::Trotter { steps: 0 } = self.backend {
            return Err(Error::ZeroTrotterSteps);
        }
        for (_, obs) in &self.observables {
            if obs.n_qubits() != n_qubits {
                return Err(Error::DimensionMismatch { expected: n_qubits, found: obs.n_qubits() });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundRecord {
    pub round_index: usize,
    /// `None` for round 0 (measurement only).
    pub e_used: Option<f64>,
    pub tau: Option<f64>,
    pub prefactor: Option<Complex64>,
    pub ancillas: usize,
    pub p_round: f64,
    pub p_cumulative: f64,
    pub active_count: Option<u64>,
    /// Exact expectations of the configured observables, in config order.
    pub expectations: Vec<(String, f64)>,
    /// Shot estimates, in config order, when shots are configured.
    pub estimates: Option<Vec<Estimate>>,
}

impl RoundRecord {
    pub fn expectation(&self, name: &str) -> Option<f64> {
        self.expectations.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn estimate(&self, name: &str) -> Option<&Estimate> {
        self.estimates.as_ref()?.iter().find(|e| e.name == name)
    }
}

/// Result of a protocol run: per-round records plus the final state.
#[derive(Debug, Clone)]
pub struct ProtocolRun {
    pub records: Vec<RoundRecord>,
    pub states: Vec<StateVector>,
}

impl ProtocolRun {
    pub fn final_state(&self) -> &StateVector {
        self.states.last().expect("round 0 is always recorded")
    }
}

/// Runs round 0 (measurement only) and every configured round.
pub fn run_protocol(initial: &StateVector, h: &PauliSum, config: &TwirlConfig) -> Result<Vec<RoundRecord>> {
    Ok(run_protocol_with_states(initial, h, config)?.records)
}

/// [`run_protocol`], also returning the post-selected state after each round.
pub fn run_protocol_with_states(initial: &StateVector, h: &PauliSum, config: &TwirlConfig) -> Result<ProtocolRun> {
    match run_protocol_partial(initial, h, config)? {
        (run, None) => Ok(run),
        (_, Some(err)) => Err(err),
    }
}

/// Exact expectations per observable, plus shot estimates when sampling.
type Measurements = (Vec<(String, f64)>, Option<Vec<Estimate>>);

/// Like [`run_protocol_with_states`], but a failing round stops the schedule
/// instead of discarding it: the completed rounds come back together with the
/// error that stopped the run. Invalid inputs are still reported as `Err`.
pub fn run_protocol_partial(
    initial: &StateVector,
    h: &PauliSum,
    config: &TwirlConfig,
) -> Result<(ProtocolRun, Option<Error>)> {
    initial.check_same_size(h.n_qubits())?;
    config.validate(h.n_qubits())?;
    let propagator = Propagator::new(h, config.backend)?;
    let sampler = config.shots.map(|n| ShotSampler::new(config.seed, config.stream_id, n));
    let zero_tol = ZERO_ENERGY_TOL * h.coefficient_norm().max(1.0);

    let measure = |round: usize, state: &StateVector| -> Result<Measurements> {
        let exact = config
            .observables
            .iter()
            .map(|(name, obs)| Ok((name.clone(), expectation(state, obs)?)))
            .collect::<Result<Vec<_>>>()?;
        let estimates = sampler.as_ref().map(|s| {
            config
                .observables
                .iter()
                .enumerate()
                .map(|(k, (name, obs))| s.estimate(round, k as u64 + 1, name, state, obs))
                .collect()
        });
        Ok((exact, estimates))
    };

    let mut state = initial.clone();
    let (expectations, estimates) = measure(0, &state)?;
    let mut records = vec![RoundRecord {
        round_index: 0,
        e_used: None,
        tau: None,
        prefactor: None,
        ancillas: 0,
        p_round: 1.0,
        p_cumulative: 1.0,
        active_count: config.shots,
        expectations,
        estimates,
    }];
    let mut states = vec![state.clone()];

    for (i, spec) in config.rounds.iter().enumerate() {
        let round = i + 1;
        let prev = records.last().expect("round 0 is recorded");
        let step = || -> Result<(StateVector, RoundRecord)> {
            let energy = match spec.energy_override {
                Some(e) => e,
                None => {
                    let e = match (config.energy_estimator, &sampler) {
                        (EnergyEstimator::Sampled, Some(s)) => s.estimate(round - 1, ENERGY_SLOT, "H", &state, h).value,
                        _ => expectation(&state, h)?,
                    };
                    if e.abs() <= zero_tol {
                        return Err(Error::ZeroEnergy { round, energy: e });
                    }
                    e
                }
            };
            let (tau, prefactor) = choose_tau(energy, spec.tau_mode).map_err(|_| Error::ZeroEnergy { round, energy })?;
            let (next, p_round) = propagator.twirl(&state, tau, prefactor, spec.ancillas)?;
            let active_count = match (&sampler, prev.active_count) {
                (Some(s), Some(active)) => Some(s.thin_active(round, active, p_round)),
                _ => None,
            };
            let (expectations, estimates) = measure(round, &next)?;
            let record = RoundRecord {
                round_index: round,
                e_used: Some(energy),
                tau: Some(tau),
                prefactor: Some(prefactor),
                ancillas: spec.ancillas,
                p_round,
                p_cumulative: prev.p_cumulative * p_round,
                active_count,
                expectations,
                estimates,
            };
            Ok((next, record))
        };
        match step() {
            Ok((next, record)) => {
                state = next;
                records.push(record);
                states.push(state.clone());
            }
            Err(err) => return Ok((ProtocolRun { records, states }, Some(err))),
        }
    }
    Ok((ProtocolRun { records, states }, None))
}

//! Experiment manifests: JSON files binding a Hamiltonian, an initial state
//! and a round schedule to optional theoretical targets.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use twirl_core::{
    named_hamiltonian, named_observable, AdiabaticSchedule, Backend, EnergyEstimator, PauliSum, RoundSpec,
    StateVector, TauMode, TwirlConfig,
};

/// A schema or semantic error located by a JSON pointer into the manifest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestError {
    pub pointer: String,
    pub message: String,
}

impl ManifestError {
    fn at(pointer: impl Into<String>, message: impl fmt::Display) -> Self {
        Self { pointer: pointer.into(), message: message.to_string() }
    }
}

impl fmt::Display for ManifestError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pointer = if self.pointer.is_empty() { "/" } else { &self.pointer };
        write!(f, "{pointer}: {}", self.message)
    }
}

impl std::error::Error for ManifestError {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoundEntry {
    pub mode: TauMode,
    #[serde(rename = "E_override", default, skip_serializing_if = "Option::is_none")]
    pub e_override: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ancillas: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Target {
    pub observable: String,
    pub value: f64,
    pub tolerance: f64,
    /// Round the target applies to; the last round when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub round: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentManifest {
    pub name: String,
    pub hamiltonian: String,
    #[serde(rename = "J")]
    pub j: f64,
    pub initial: String,
    /// Adiabatic prelude, e.g. `adiabatic:T=20,steps=400`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prepare: Option<String>,
    #[serde(default)]
    pub rounds: Vec<RoundEntry>,
    /// Ancillas per round when a round does not say; defaults to 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ancillas: Option<usize>,
    #[serde(default = "default_backend")]
    pub backend: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub energy_estimator: EnergyEstimator,
    pub observables: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub expected: Vec<Target>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// File stem for written outputs; the manifest name when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

fn default_backend() -> String {
    "exact".into()
}

/// Fully resolved experiment, ready to run.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub manifest: ExperimentManifest,
    pub hamiltonian: PauliSum,
    pub initial: StateVector,
    pub prepare: Option<AdiabaticSchedule>,
    pub config: TwirlConfig,
}

/// Command-line settings that take precedence over the manifest.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub shots: Option<u64>,
    pub backend: Option<String>,
    pub prepare: Option<String>,
}

impl ExperimentManifest {
    pub fn from_json(text: &str) -> Result<Self, ManifestError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let pointer = json_pointer(e.path());
            ManifestError::at(pointer, e.into_inner())
        })
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| anyhow::anyhow!("reading {}: {e}", path.display()))?;
        Self::from_json(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
    }

    pub fn apply(&mut self, overrides: &Overrides) {
        if let Some(seed) = overrides.seed {
            self.seed = seed;
        }
        if let Some(shots) = overrides.shots {
            self.shots = Some(shots);
        }
        if let Some(backend) = &overrides.backend {
            self.backend = backend.clone();
        }
        if let Some(prepare) = &overrides.prepare {
            self.prepare = Some(prepare.clone());
        }
    }

    pub fn output_stem(&self) -> &str {
        self.output.as_deref().unwrap_or(&self.name)
    }

    /// Resolves names and checks semantic constraints.
    pub fn resolve(&self) -> Result<Experiment, ManifestError> {
        if self.name.trim().is_empty() {
            return Err(ManifestError::at("/name", "must not be empty"));
        }
        if !self.j.is_finite() {
            return Err(ManifestError::at("/J", "must be finite"));
        }
        let hamiltonian = named_hamiltonian(&self.hamiltonian, self.j).map_err(|e| ManifestError::at("/hamiltonian", e))?;
        let initial = StateVector::basis(&self.initial).map_err(|e| ManifestError::at("/initial", e))?;
        if initial.n_qubits() != hamiltonian.n_qubits() {
            return Err(ManifestError::at(
                "/initial",
                format!("{} qubits, Hamiltonian has {}", initial.n_qubits(), hamiltonian.n_qubits()),
            ));
        }
        let prepare = self
            .prepare
            .as_deref()
            .map(str::parse::<AdiabaticSchedule>)
            .transpose()
            .map_err(|e| ManifestError::at("/prepare", e))?;
        let backend: Backend = self.backend.parse().map_err(|e| ManifestError::at("/backend", e))?;
        if self.ancillas == Some(0) {
            return Err(ManifestError::at("/ancillas", "must be at least 1"));
        }
        let default_ancillas = self.ancillas.unwrap_or(1);
        let mut rounds = Vec::with_capacity(self.rounds.len());
        for (i, entry) in self.rounds.iter().enumerate() {
            let spec = RoundSpec {
                tau_mode: entry.mode,
                energy_override: entry.e_override,
                ancillas: entry.ancillas.unwrap_or(default_ancillas),
            };
            spec.validate().map_err(|e| {
                let field = if entry.ancillas == Some(0) { "ancillas" } else { "E_override" };
                ManifestError::at(format!("/rounds/{i}/{field}"), e)
            })?;
            rounds.push(spec);
        }
        if self.shots == Some(0) {
            return Err(ManifestError::at("/shots", "must be positive"));
        }
        if self.energy_estimator == EnergyEstimator::Sampled && self.shots.is_none() {
            return Err(ManifestError::at("/energy_estimator", "sampled energies need shots"));
        }
        let mut observables = Vec::with_capacity(self.observables.len());
        for (i, name) in self.observables.iter().enumerate() {
            if self.observables[..i].contains(name) {
                return Err(ManifestError::at(format!("/observables/{i}"), format!("duplicate observable {name:?}")));
            }
            let obs = named_observable(name, &hamiltonian).map_err(|e| ManifestError::at(format!("/observables/{i}"), e))?;
            observables.push((name.clone(), obs));
        }
        for (i, t) in self.expected.iter().enumerate() {
            if !self.observables.contains(&t.observable) {
                return Err(ManifestError::at(
                    format!("/expected/{i}/observable"),
                    format!("{:?} is not among the observables", t.observable),
                ));
            }
            if !(t.tolerance.is_finite() && t.tolerance >= 0.0) {
                return Err(ManifestError::at(format!("/expected/{i}/tolerance"), "must be finite and non-negative"));
            }
            if t.round.is_some_and(|r| r > self.rounds.len()) {
                return Err(ManifestError::at(format!("/expected/{i}/round"), "beyond the last round"));
            }
        }
        let config = TwirlConfig {
            rounds,
            backend,
            shots: self.shots,
            seed: self.seed,
            stream_id: 0,
            observables,
            energy_estimator: self.energy_estimator,
        };
        Ok(Experiment { manifest: self.clone(), hamiltonian, initial, prepare, config })
    }
}

fn json_pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{}", key.replace('~', "~0").replace('/', "~1"))),
            Segment::Enum { variant } => out.push_str(&format!("/{variant}")),
            Segment::Unknown => out.push_str("/?"),
        }
    }
    out
}

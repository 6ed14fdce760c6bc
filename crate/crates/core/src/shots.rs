//! Monte-Carlo shot sampling of active counts and Pauli expectations.
//!
//! Every draw uses its own ChaCha8 stream keyed by `(seed, stream_id)` and
//! positioned by `(round, slot)`, so results do not depend on evaluation
//! order or thread scheduling.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pauli::{PauliAxis, PauliSum, PauliTerm};
use crate::state::StateVector;
use crate::twirl::RoundRecord;

/// Observable slot reserved for sampled energy estimates.
pub const ENERGY_SLOT: u64 = 0xFFFF;

const ACTIVE_SLOT: u64 = 0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub name: String,
    pub value: f64,
    /// `sqrt(sum_k c_k^2 (1 - m_k^2) / n)` with `m_k` the sampled term means.
    pub std_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShotSampler {
    key: u64,
    shots: u64,
}

impl ShotSampler {
    pub fn new(seed: u64, stream_id: u64, shots: u64) -> Self {
        Self { key: mix(seed, stream_id), shots }
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    fn rng(&self, round: usize, slot: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.key);
        rng.set_stream(((round as u64) << 32) | slot);
        rng
    }

    /// Survivors of round `round` among `active` shots. Chained over rounds
    /// this is marginally `Binomial(n, p_cumulative)`.
    pub fn thin_active(&self, round: usize, active: u64, p_round: f64) -> u64 {
        binomial(&mut self.rng(round, ACTIVE_SLOT), active, p_round)
    }

    /// Shot estimate of `<obs>`: each term is measured in its eigenbasis with
    /// the full shot budget and the results are combined linearly.
    pub fn estimate(&self, round: usize, obs_slot: u64, name: &str, state: &StateVector, obs: &PauliSum) -> Estimate {
        let n = self.shots as f64;
        let mut value = 0.0;
        let mut var = 0.0;
        for (k, term) in obs.terms().iter().enumerate() {
            if term.is_identity() {
                value += term.coeff();
                continue;
            }
            let p_even = even_parity_probability(state, term);
            let slot = (obs_slot << 16) | k as u64;
            let even = binomial(&mut self.rng(round, slot), self.shots, p_even);
            let mean = (2.0 * even as f64 - n) / n;
            value += term.coeff() * mean;
            var += term.coeff().powi(2) * (1.0 - mean * mean) / n;
        }
        Estimate { name: name.to_string(), value, std_error: var.max(0.0).sqrt() }
    }
}

fn binomial(rng: &mut ChaCha8Rng, n: u64, p: f64) -> u64 {
    let p = p.clamp(0.0, 1.0);
    Binomial::new(n, p).expect("p clamped to [0, 1]").sample(rng)
}

/// SplitMix64 finalizer over the pair.
fn mix(seed: u64, stream_id: u64) -> u64 {
    let mut z = seed ^ stream_id.wrapping_mul(0x9E37_79B9_7F4A_7C15).rotate_left(17);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Probability that the computational-basis parity over the term's support
/// is even after rotating each X into Z (H) and each Y into Z (H S^dagger).
pub(crate) fn even_parity_probability(state: &StateVector, term: &PauliTerm) -> f64 {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let hadamard = [[Complex64::new(h, 0.0), Complex64::new(h, 0.0)], [Complex64::new(h, 0.0), Complex64::new(-h, 0.0)]];
    // H S^dagger
    let y_to_z = [[Complex64::new(h, 0.0), Complex64::new(0.0, -h)], [Complex64::new(h, 0.0), Complex64::new(0.0, h)]];
    let n = state.n_qubits();
    let mut rotated = state.clone();
    let mut support = 0usize;
    for (q, axis) in term.axes().iter().enumerate() {
        match axis {
            PauliAxis::I => continue,
            PauliAxis::X => rotated.apply_single_qubit(q, hadamard),
            PauliAxis::Y => rotated.apply_single_qubit(q, y_to_z),
            PauliAxis::Z => {}
        }
        support |= 1 << (n - 1 - q);
    }
    rotated
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(b, _)| (b & support).count_ones() & 1 == 0)
        .map(|(_, a)| a.norm_sqr())
        .sum::<f64>()
        .clamp(0.0, 1.0)
}

/// Re-samples active counts and observable estimates for records produced by
/// an exact run, given the post-selected state of every round.
pub fn sample_shots(
    records: &mut [RoundRecord],
    states: &[StateVector],
    observables: &[(String, PauliSum)],
    sampler: &ShotSampler,
) -> Result<()> {
    if sampler.shots == 0 {
        return Err(Error::ZeroShots);
    }
    if records.len() != states.len() {
        return Err(Error::DimensionMismatch { expected: records.len(), found: states.len() });
    }
    let mut active = sampler.shots;
    for (record, state) in records.iter_mut().zip(states) {
        if record.round_index > 0 {
            active = sampler.thin_active(record.round_index, active, record.p_round);
        }
        record.active_count = Some(active);
        record.estimates = Some(
            observables
                .iter()
                .enumerate()
                .map(|(k, (name, obs))| sampler.estimate(record.round_index, k as u64 + 1, name, state, obs))
                .collect(),
        );
    }
    Ok(())
}

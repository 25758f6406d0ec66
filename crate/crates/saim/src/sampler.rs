//! Software emulation of a probabilistic-bit Ising machine.
//!
//! Each p-bit sees the local input `I_i = sum_j J_ij m_j + h_i` and resolves
//! to `m_i = sign[tanh(beta * I_i) + u]` with `u` uniform on (-1, 1), i.e.
//! `P(m_i = +1) = (1 + tanh(beta * I_i)) / 2`. One sweep updates all spins
//! sequentially in ascending index order; repeated sweeps at fixed `beta`
//! perform Gibbs sampling of the Boltzmann distribution, and a linear
//! `beta` ramp from 0 to `beta_max` performs one annealed minimization run
//! whose last sample is read out.

use crate::model::IsingCoefficients;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

/// Histograms over all 2^N states stop being practical beyond this size.
pub const MAX_HISTOGRAM_SPINS: usize = 15;

#[derive(Debug, Error, PartialEq)]
pub enum SamplerError {
    #[error("{n} spins exceed the exact-histogram limit of {max}")]
    TooManySpins { n: usize, max: usize },
    #[error("annealing schedule needs at least one sweep")]
    EmptySchedule,
    #[error("beta_max must be finite and nonnegative, got {0}")]
    InvalidBeta(f64),
}

/// A spin configuration with entries in {-1, +1}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinState {
    spins: Vec<i8>,
}

impl SpinState {
    pub fn new(spins: Vec<i8>) -> Self {
        assert!(
            spins.iter().all(|&s| s == 1 || s == -1),
            "spins must be exactly +1 or -1"
        );
        Self { spins }
    }

    /// Fresh configuration with each spin +1 or -1 uniformly at random.
    pub fn uniform_random(n: usize, rng: &mut impl Rng) -> Self {
        Self {
            spins: (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }

    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    /// Binary image `x = (m+1)/2`.
    pub fn to_bits(&self) -> Vec<u8> {
        crate::model::spins_to_bits(&self.spins)
    }

    /// Histogram index: bit `i` of the result is `(m_i + 1) / 2`.
    pub fn index(&self) -> usize {
        crate::model::bits_index(&self.to_bits())
    }
}

/// Linear inverse-temperature ramp: `beta_t = beta_max * t / (T - 1)` for
/// `t = 0..T`, so the ramp starts at 0 and ends at `beta_max`. A single-sweep
/// schedule jumps straight to `beta_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealSchedule {
    beta_max: f64,
    sweeps: usize,
}

impl AnnealSchedule {
    pub fn new(beta_max: f64, sweeps: usize) -> Result<Self, SamplerError> {
        if sweeps == 0 {
            return Err(SamplerError::EmptySchedule);
        }
        if !beta_max.is_finite() || beta_max < 0.0 {
            return Err(SamplerError::InvalidBeta(beta_max));
        }
        Ok(Self { beta_max, sweeps })
    }

    pub fn beta_max(&self) -> f64 {
        self.beta_max
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    pub fn beta_at(&self, t: usize) -> f64 {
        debug_assert!(t < self.sweeps);
        if self.sweeps == 1 {
            self.beta_max
        } else {
            self.beta_max * t as f64 / (self.sweeps - 1) as f64
        }
    }
}

/// Reproducible random source: identical `(seed, stream)` yields the
/// identical sample sequence, distinct stream ids yield statistically
/// independent sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn rng(&self) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// Probability that a p-bit with input `input` resolves to +1.
pub fn pbit_probability(beta: f64, input: f64) -> f64 {
    (1.0 + (beta * input).tanh()) / 2.0
}

/// Sweep state with cached local fields, so an update that flips nothing
/// costs O(1) and a flip costs one row pass.
struct SweepEngine<'a> {
    coeffs: &'a IsingCoefficients,
    spins: Vec<f64>,
    fields: Vec<f64>,
}

impl<'a> SweepEngine<'a> {
    fn new(coeffs: &'a IsingCoefficients, init: &SpinState) -> Self {
        assert_eq!(init.len(), coeffs.n_spins(), "state/coefficients mismatch");
        let spins: Vec<f64> = init.spins().iter().map(|&s| f64::from(s)).collect();
        let n = spins.len();
        let mut fields = vec![0.0; n];
        for (i, field) in fields.iter_mut().enumerate() {
            let row = coeffs.j().row(i);
            *field = row
                .iter()
                .zip(&spins)
                .map(|(j, m)| j * m)
                .sum();
        }
        Self {
            coeffs,
            spins,
            fields,
        }
    }

    /// One Monte Carlo sweep: N sequential single-spin updates in ascending
    /// index order, each seeing the partially updated state. `noise` must
    /// return one uniform draw from (-1, 1) per call; exactly one draw is
    /// consumed per spin update.
    fn sweep(&mut self, beta: f64, noise: &mut impl FnMut() -> f64) {
        let n = self.spins.len();
        for i in 0..n {
            let input = self.fields[i] + self.coeffs.h_field()[i];
            let activation = (beta * input).tanh() + noise();
            // ties resolve to +1
            let new = if activation >= 0.0 { 1.0 } else { -1.0 };
            let old = self.spins[i];
            if new != old {
                self.spins[i] = new;
                let delta = new - old;
                let row = self.coeffs.j().row(i);
                let row = row.as_slice().expect("row-major couplings");
                for (field, j) in self.fields.iter_mut().zip(row) {
                    *field += j * delta;
                }
            }
        }
    }

    fn state(&self) -> SpinState {
        SpinState::new(self.spins.iter().map(|&s| if s > 0.0 { 1 } else { -1 }).collect())
    }
}

/// One Monte Carlo sweep with an explicit noise source. The closure stands
/// in for the p-bit noise term rand(-1, 1); tests use it to mirror or rig
/// the noise.
pub fn gibbs_sweep_with(
    state: &mut SpinState,
    coeffs: &IsingCoefficients,
    beta: f64,
    noise: &mut impl FnMut() -> f64,
) {
    let mut engine = SweepEngine::new(coeffs, state);
    engine.sweep(beta, noise);
    *state = engine.state();
}

/// One Monte Carlo sweep (one MCS): N sequential p-bit updates in ascending
/// index order.
pub fn gibbs_sweep(
    state: &mut SpinState,
    coeffs: &IsingCoefficients,
    beta: f64,
    rng: &mut impl Rng,
) {
    gibbs_sweep_with(state, coeffs, beta, &mut || rng.random_range(-1.0..1.0));
}

/// One annealed minimization run: start from a fresh uniform-random state,
/// sweep once per schedule step with the ramped `beta`, and return the state
/// after the final sweep (last-sample readout, no best-of-run tracking).
pub fn anneal_run(
    coeffs: &IsingCoefficients,
    schedule: &AnnealSchedule,
    rng: &mut impl Rng,
) -> SpinState {
    let init = SpinState::uniform_random(coeffs.n_spins(), rng);
    let mut engine = SweepEngine::new(coeffs, &init);
    for t in 0..schedule.sweeps() {
        let beta = schedule.beta_at(t);
        engine.sweep(beta, &mut || rng.random_range(-1.0..1.0));
    }
    engine.state()
}

/// Gibbs sampling at fixed `beta`: run `burn_in` sweeps, then record the
/// state after each of `n_samples` further sweeps. Returns the empirical
/// probability of each of the 2^N states, indexed by [`SpinState::index`].
pub fn sample_equilibrium(
    coeffs: &IsingCoefficients,
    beta: f64,
    n_samples: usize,
    burn_in: usize,
    rng: &mut impl Rng,
) -> Result<Vec<f64>, SamplerError> {
    let n = coeffs.n_spins();
    if n > MAX_HISTOGRAM_SPINS {
        return Err(SamplerError::TooManySpins {
            n,
            max: MAX_HISTOGRAM_SPINS,
        });
    }
    let init = SpinState::uniform_random(n, rng);
    let mut engine = SweepEngine::new(coeffs, &init);
    let mut counts = vec![0u64; 1usize << n];
    for _ in 0..burn_in {
        engine.sweep(beta, &mut || rng.random_range(-1.0..1.0));
    }
    for _ in 0..n_samples {
        engine.sweep(beta, &mut || rng.random_range(-1.0..1.0));
        let idx = engine
            .spins
            .iter()
            .enumerate()
            .fold(0usize, |acc, (i, &s)| acc | (usize::from(s > 0.0) << i));
        counts[idx] += 1;
    }
    let total = n_samples as f64;
    Ok(counts.into_iter().map(|c| c as f64 / total).collect())
}

//! Self-adaptive Ising machine for constrained binary optimization.
//!
//! An emulated probabilistic-bit Ising machine anneals a penalized
//! Lagrangian energy, while an outer loop adapts the Lagrange multipliers
//! by subgradient ascent from the sampled states. The adaptation removes
//! the usual need to hand-tune quadratic penalty strengths: start from a
//! deliberately small penalty and let the multipliers reshape the energy
//! landscape until good feasible solutions become ground states.
//!
//! The crate is organized around the solve pipeline:
//!
//! - [`model`] — problem/energy representations and the exact algebraic
//!   transformations between them (slack extension, normalization,
//!   Lagrangian compilation, spin mapping).
//! - [`sampler`] — the p-bit Gibbs sampler with a linear annealing
//!   schedule and reproducible RNG streams.
//! - [`solver`] — the adaptive outer loop, the fixed-penalty baseline,
//!   and result metrics.
//! - [`instances`] — knapsack instance types, loaders (OR-Library MKP,
//!   community QKP, canonical JSON), and generators.
//! - [`oracle`] — exhaustive reference solvers used to validate
//!   everything else at small sizes.
//! - [`cli`] — the `saim` command-line harness (`solve`, `validate`,
//!   `generate`, `oracle`).
//!
//! See the `examples/` directory for one runnable example per capability;
//! `examples/qkp_end_to_end.rs` is the recommended starting point.

pub mod cli;
pub mod instances;
pub mod model;
pub mod oracle;
pub mod sampler;
pub mod solver;

pub use model::{
    add_slack_variables, compile_energy, compute_density, evaluate_f, evaluate_g,
    evaluate_lagrangian, normalize, to_ising, BinaryQuadraticEnergy, ConstrainedQuadraticProblem,
    ConstraintSense, IsingCoefficients, LagrangeState, ModelError, ObjectiveKind,
};
pub use sampler::{anneal_run, gibbs_sweep, sample_equilibrium, AnnealSchedule, RngStream, SpinState};
pub use solver::{
    compute_accuracy, run_penalty_baseline, run_saim, summarize, update_multipliers, RunOutcome,
    SaimConfig, SaimResult,
};

#[cfg(test)]
pub(crate) mod test_util {
    use crate::model::{ConstrainedQuadraticProblem, ConstraintSense, ObjectiveKind};
    use ndarray::{Array1, Array2};
    use rand::Rng;
    use rand_chacha::ChaCha12Rng;

    /// Random equality-form problem for exhaustive cross-checks.
    pub fn random_equality_problem(
        n: usize,
        m: usize,
        rng: &mut ChaCha12Rng,
    ) -> ConstrainedQuadraticProblem {
        let mut w = Array2::zeros((n, n));
        for i in 0..n {
            for j in (i + 1)..n {
                let v = rng.random_range(-3.0..3.0);
                w[[i, j]] = v;
                w[[j, i]] = v;
            }
        }
        let h = Array1::from_shape_fn(n, |_| rng.random_range(-3.0..3.0));
        let a = Array2::from_shape_fn((m, n), |_| rng.random_range(-2.0..2.0));
        let b = Array1::from_shape_fn(m, |_| rng.random_range(0.5..3.0));
        ConstrainedQuadraticProblem::new(
            w,
            h,
            a,
            b,
            vec![ConstraintSense::Equal; m],
            ObjectiveKind::Quadratic,
        )
        .unwrap()
    }

    /// Random integer knapsack in inequality form (quadratic objective).
    pub fn random_integer_knapsack(
        n: usize,
        density: f64,
        max_value: i64,
        max_weight: i64,
        rng: &mut ChaCha12Rng,
    ) -> ConstrainedQuadraticProblem {
        let mut w = Array2::zeros((n, n));
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.random::<f64>() < density {
                    let v = -(rng.random_range(1..=max_value) as f64);
                    w[[i, j]] = v;
                    w[[j, i]] = v;
                }
            }
        }
        let h = Array1::from_shape_fn(n, |_| -(rng.random_range(1..=max_value) as f64));
        let a = Array2::from_shape_fn((1, n), |_| rng.random_range(1..=max_weight) as f64);
        let max_w = a.iter().fold(0.0f64, |acc, v| acc.max(*v));
        let b_val = rng.random_range(max_w..=a.sum()).floor().max(1.0);
        ConstrainedQuadraticProblem::new(
            w,
            h,
            a,
            ndarray::arr1(&[b_val]),
            vec![ConstraintSense::LessEq],
            ObjectiveKind::Quadratic,
        )
        .unwrap()
    }
}

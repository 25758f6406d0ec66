//! Exact brute-force reference implementations. Everything here enumerates
//! the full state space, so it is only usable at small sizes, and exists to
//! validate the other modules: ground truths for optimal values, lower
//! bounds, and Boltzmann probabilities.
//!
//! Enumeration follows the binary-reflected Gray code so each step flips a
//! single bit and values update incrementally; results are independent of
//! that order (ties resolve to the lexicographically smallest state).

use crate::model::{
    compile_energy, BinaryQuadraticEnergy, ConstrainedQuadraticProblem, ConstraintSense,
    IsingCoefficients, LagrangeState, ModelError,
};
use thiserror::Error;

/// Enumerating past this many variables stops being a desk-scale check.
pub const MAX_EXHAUSTIVE_VARS: usize = 25;

/// Feasibility slop for constraint rows built from integer data.
const FEAS_EPS: f64 = 1e-9;

/// Values within this of the best are counted as ties.
const TIE_EPS: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("{n} variables exceed the exhaustive enumeration limit of {max}")]
    TooManyVariables { n: usize, max: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Result of an exhaustive minimization.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactSolution {
    /// Minimum value found.
    pub value: f64,
    /// Lexicographically smallest state attaining it.
    pub state: Vec<u8>,
    /// Number of states attaining the minimum (within 1e-9).
    pub optimal_count: usize,
}

fn check_limit(n: usize) -> Result<(), OracleError> {
    if n > MAX_EXHAUSTIVE_VARS {
        Err(OracleError::TooManyVariables {
            n,
            max: MAX_EXHAUSTIVE_VARS,
        })
    } else {
        Ok(())
    }
}

/// Lexicographic order on bit vectors (x[0] most significant).
fn lex_less(a: &[u8], b: &[u8]) -> bool {
    a < b
}

struct Incumbent {
    value: f64,
    state: Vec<u8>,
    count: usize,
}

impl Incumbent {
    fn new() -> Self {
        Self {
            value: f64::INFINITY,
            state: Vec::new(),
            count: 0,
        }
    }

    /// Offer an exactly evaluated candidate.
    fn offer(&mut self, value: f64, state: &[u8]) {
        if value < self.value - TIE_EPS {
            self.value = value;
            self.state = state.to_vec();
            self.count = 1;
        } else if (value - self.value).abs() <= TIE_EPS {
            self.count += 1;
            if lex_less(state, &self.state) {
                self.state = state.to_vec();
                self.value = self.value.min(value);
            }
        }
    }

    fn into_solution(self) -> ExactSolution {
        ExactSolution {
            value: self.value,
            state: self.state,
            optimal_count: self.count,
        }
    }
}

/// Walks all 2^n binary states along the Gray code. The first call passes
/// `None` with the all-zeros state; every later call carries the single
/// bit transition `(j, on)` that produced the state.
fn gray_walk(n: usize, mut step: impl FnMut(Option<(usize, bool)>, &[u8])) {
    let mut x = vec![0u8; n];
    step(None, &x);
    for t in 1u64..(1u64 << n) {
        let j = t.trailing_zeros() as usize;
        let on = x[j] == 0;
        x[j] = u8::from(on);
        step(Some((j, on)), &x);
    }
}

/// Exact constrained minimum of `f` over all binary states. Accepts both
/// inequality and equality rows; the all-zeros state is feasible for any
/// pure `<=` problem (capacities are positive), so knapsack-form problems
/// always report an optimum.
pub fn exhaustive_solve(
    problem: &ConstrainedQuadraticProblem,
) -> Result<ExactSolution, OracleError> {
    let n = problem.n_vars();
    check_limit(n)?;
    let m = problem.n_constraints();

    // incremental objective and constraint rows
    let w = problem.w();
    let h = problem.h();
    let a = problem.a();
    let mut f_val = 0.0;
    let mut pair_acc = vec![0.0; n]; // pair_acc[j] = sum_{i set} w[i][j]
    let mut ax = vec![0.0; m];
    let mut best = Incumbent::new();

    gray_walk(n, |change, x| {
        if let Some((j, on)) = change {
            let sign = if on { 1.0 } else { -1.0 };
            f_val += sign * (h[j] + pair_acc[j]);
            for k in 0..n {
                pair_acc[k] += sign * w[[j, k]];
            }
            for r in 0..m {
                ax[r] += sign * a[[r, j]];
            }
        }
        for ((sense, &ax_r), &b_r) in problem.senses().iter().zip(&ax).zip(problem.b()) {
            let ok = match sense {
                ConstraintSense::LessEq => ax_r <= b_r + FEAS_EPS,
                ConstraintSense::Equal => (ax_r - b_r).abs() <= FEAS_EPS,
            };
            if !ok {
                return;
            }
        }
        // near-candidates are re-evaluated exactly to wash out drift
        if f_val <= best.value + 1e-7 {
            let exact = crate::model::evaluate_f(problem, x).expect("length fixed");
            best.offer(exact, x);
        }
    });
    Ok(best.into_solution())
}

/// Exact unconstrained minimum of a compiled binary energy.
pub fn exhaustive_min_energy(
    energy: &BinaryQuadraticEnergy,
) -> Result<ExactSolution, OracleError> {
    let n = energy.n_vars();
    check_limit(n)?;
    // symmetric image of the strictly-upper coefficients
    let quad = energy.quad();
    let mut qsym = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            qsym[i][j] = quad[[i, j]];
            qsym[j][i] = quad[[i, j]];
        }
    }
    let mut val = energy.constant();
    let mut acc = vec![0.0; n]; // acc[j] = sum_{i set} qsym[i][j]
    let mut best = Incumbent::new();
    gray_walk(n, |change, x| {
        if let Some((j, on)) = change {
            let sign = if on { 1.0 } else { -1.0 };
            val += sign * (energy.lin()[j] + acc[j]);
            for k in 0..n {
                acc[k] += sign * qsym[j][k];
            }
        }
        if val <= best.value + 1e-7 {
            best.offer(energy.energy(x), x);
        }
    });
    Ok(best.into_solution())
}

/// Lower bound `LB_L = min_x L(x)` at a given penalty and multiplier
/// vector, computed exhaustively.
pub fn lagrangian_bound(
    problem: &ConstrainedQuadraticProblem,
    state: &LagrangeState,
) -> Result<f64, OracleError> {
    let energy = compile_energy(problem, state)?;
    Ok(exhaustive_min_energy(&energy)?.value)
}

/// Exact Boltzmann table `P(m) = exp(-beta H(m)) / Z` over all 2^N spin
/// states, indexed like [`crate::sampler::SpinState::index`]. Probabilities
/// are normalized to sum to 1 within 1e-12.
pub fn boltzmann_distribution(
    coeffs: &IsingCoefficients,
    beta: f64,
) -> Result<Vec<f64>, OracleError> {
    let n = coeffs.n_spins();
    if n > crate::sampler::MAX_HISTOGRAM_SPINS {
        return Err(OracleError::TooManyVariables {
            n,
            max: crate::sampler::MAX_HISTOGRAM_SPINS,
        });
    }
    let size = 1usize << n;
    let mut energies = Vec::with_capacity(size);
    let mut min_e = f64::INFINITY;
    for idx in 0..size {
        let m = crate::model::bits_to_spins(&crate::model::index_bits(idx, n));
        let e = coeffs.energy(&m);
        min_e = min_e.min(e);
        energies.push(e);
    }
    let mut weights: Vec<f64> = energies
        .into_iter()
        .map(|e| (-beta * (e - min_e)).exp())
        .collect();
    let z: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= z;
    }
    Ok(weights)
}

/// Total variation distance between two distributions over the same states.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len(), "distribution size mismatch");
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{
        add_slack_variables, evaluate_f, index_bits, to_ising, ConstrainedQuadraticProblem,
        ObjectiveKind,
    };
    use crate::test_util::{random_equality_problem, random_integer_knapsack};
    use approx::assert_abs_diff_eq;
    use ndarray::{array, Array1, Array2};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn two_item_mkp_toy() -> ConstrainedQuadraticProblem {
        // values (5, 3), weights (4, 2), capacity 6
        ConstrainedQuadraticProblem::new(
            Array2::zeros((2, 2)),
            array![-5.0, -3.0],
            array![[4.0, 2.0]],
            array![6.0],
            vec![ConstraintSense::LessEq],
            ObjectiveKind::Linear,
        )
        .unwrap()
    }

    #[test]
    fn solves_two_item_toy() {
        let sol = exhaustive_solve(&two_item_mkp_toy()).unwrap();
        assert_eq!(sol.value, -8.0);
        assert_eq!(sol.state, vec![1, 1]);
        assert_eq!(sol.optimal_count, 1);
    }

    #[test]
    fn zero_vector_always_feasible_for_knapsacks() {
        // nothing fits, so the optimum is the empty selection at cost 0
        let problem = ConstrainedQuadraticProblem::new(
            Array2::zeros((2, 2)),
            array![-5.0, -3.0],
            array![[40.0, 20.0]],
            array![6.0],
            vec![ConstraintSense::LessEq],
            ObjectiveKind::Linear,
        )
        .unwrap();
        let sol = exhaustive_solve(&problem).unwrap();
        assert_eq!(sol.value, 0.0);
        assert_eq!(sol.state, vec![0, 0]);
    }

    /// Independent recursive enumeration, depth-first over items.
    fn recursive_knapsack_min(
        problem: &ConstrainedQuadraticProblem,
        item: usize,
        x: &mut Vec<u8>,
        best: &mut f64,
    ) {
        let n = problem.n_vars();
        if item == n {
            let feasible = (0..problem.n_constraints()).all(|r| {
                let ax: f64 = x
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| problem.a()[[r, i]] * f64::from(v))
                    .sum();
                ax <= problem.b()[r] + 1e-9
            });
            if feasible {
                let f = evaluate_f(problem, x).unwrap();
                if f < *best {
                    *best = f;
                }
            }
            return;
        }
        for bit in [1u8, 0u8] {
            x.push(bit);
            recursive_knapsack_min(problem, item + 1, x, best);
            x.pop();
        }
    }

    #[test]
    fn matches_independent_recursive_enumeration() {
        let mut rng = ChaCha12Rng::seed_from_u64(51);
        for _ in 0..5 {
            let problem = random_integer_knapsack(12, 0.5, 100, 50, &mut rng);
            let sol = exhaustive_solve(&problem).unwrap();
            let mut best = f64::INFINITY;
            recursive_knapsack_min(&problem, 0, &mut Vec::new(), &mut best);
            assert_abs_diff_eq!(sol.value, best, epsilon = 1e-9);
        }
    }

    #[test]
    fn rejects_oversized_problems() {
        let n = MAX_EXHAUSTIVE_VARS + 1;
        let problem = ConstrainedQuadraticProblem::new(
            Array2::zeros((n, n)),
            Array1::from_elem(n, -1.0),
            Array2::from_elem((1, n), 1.0),
            array![3.0],
            vec![ConstraintSense::LessEq],
            ObjectiveKind::Linear,
        )
        .unwrap();
        assert_eq!(
            exhaustive_solve(&problem).unwrap_err(),
            OracleError::TooManyVariables { n, max: MAX_EXHAUSTIVE_VARS }
        );
    }

    #[test]
    fn unconstrained_minimum_without_penalty() {
        // with P = 0 and lambda = 0 the energy is f alone; for nonnegative
        // item values the unconstrained minimum selects everything
        let mut rng = ChaCha12Rng::seed_from_u64(52);
        let problem = random_integer_knapsack(8, 0.6, 50, 10, &mut rng);
        let ext = add_slack_variables(&problem).unwrap();
        let energy = compile_energy(&ext, &LagrangeState::penalty_only(0.0, 1)).unwrap();
        let sol = exhaustive_min_energy(&energy).unwrap();
        let all_items: f64 =
            evaluate_f(&ext, &vec![1u8; ext.n_items()]).unwrap();
        assert_abs_diff_eq!(sol.value, all_items, epsilon = 1e-9);
        assert!(sol.state[..ext.n_items()].iter().all(|&b| b == 1));
    }

    #[test]
    fn huge_penalty_forces_feasibility() {
        let mut rng = ChaCha12Rng::seed_from_u64(53);
        let problem = random_integer_knapsack(8, 0.5, 30, 8, &mut rng);
        let ext = add_slack_variables(&problem).unwrap();
        // instance-specific bound: P > (f_max - f_min) / min nonzero ||g||^2
        // guarantees the penalized minimum satisfies g = 0
        let n = ext.n_vars();
        let mut f_min = f64::INFINITY;
        let mut f_max = f64::NEG_INFINITY;
        let mut min_gap = f64::INFINITY;
        for idx in 0..1usize << n {
            let x = index_bits(idx, n);
            let f = evaluate_f(&ext, &x).unwrap();
            f_min = f_min.min(f);
            f_max = f_max.max(f);
            let g = crate::model::evaluate_g(&ext, &x).unwrap();
            let norm = g.dot(&g);
            if norm > 1e-12 {
                min_gap = min_gap.min(norm);
            }
        }
        let p = 1.01 * (f_max - f_min) / min_gap;
        let energy = compile_energy(&ext, &LagrangeState::penalty_only(p, 1)).unwrap();
        let sol = exhaustive_min_energy(&energy).unwrap();
        let g = crate::model::evaluate_g(&ext, &sol.state).unwrap();
        assert!(g.iter().all(|v| v.abs() < 1e-6), "residual {g}");
        // and the penalized minimum equals the constrained optimum
        let opt = exhaustive_solve(&problem).unwrap();
        assert_abs_diff_eq!(sol.value, opt.value, epsilon = 1e-6);
    }

    #[test]
    fn penalty_bound_is_below_optimum() {
        let mut rng = ChaCha12Rng::seed_from_u64(54);
        for _ in 0..5 {
            let problem = random_integer_knapsack(8, 0.5, 30, 8, &mut rng);
            let ext = add_slack_variables(&problem).unwrap();
            let opt = exhaustive_solve(&ext).unwrap();
            for p in [0.0, 0.5, 2.0, 10.0] {
                let lb = lagrangian_bound(&ext, &LagrangeState::penalty_only(p, 1)).unwrap();
                assert!(
                    lb <= opt.value + 1e-9,
                    "penalty bound {lb} above optimum {}",
                    opt.value
                );
            }
        }
    }

    #[test]
    fn relaxation_can_close_the_gap() {
        // one-constraint toy with a penalty below its critical value: the
        // penalty bound alone misses the optimum, but some multiplier
        // raises the bound strictly above the lambda = 0 value
        let problem = ConstrainedQuadraticProblem::new(
            Array2::zeros((3, 3)),
            array![-4.0, -3.0, -1.0],
            array![[3.0, 2.0, 1.0]],
            array![4.0],
            vec![ConstraintSense::LessEq],
            ObjectiveKind::Linear,
        )
        .unwrap();
        let ext = add_slack_variables(&problem).unwrap();
        let opt = exhaustive_solve(&ext).unwrap();
        let p = 0.2; // deliberately below critical
        let at_zero = lagrangian_bound(&ext, &LagrangeState::penalty_only(p, 1)).unwrap();
        assert!(at_zero < opt.value - 1e-9, "penalty already sufficient");
        let mut best_bound = at_zero;
        for step in 0..60 {
            let lambda = array![0.05 * f64::from(step)];
            let lb = lagrangian_bound(&ext, &LagrangeState::new(p, lambda)).unwrap();
            best_bound = best_bound.max(lb);
        }
        assert!(
            best_bound > at_zero + 1e-9,
            "no multiplier improved the bound"
        );
    }

    #[test]
    fn dual_is_concave_in_multipliers() {
        // subgradient inequality across random multiplier pairs
        let mut rng = ChaCha12Rng::seed_from_u64(55);
        let problem = random_equality_problem(6, 2, &mut rng);
        let p = 1.0;
        for _ in 0..100 {
            let l1 = Array1::from_shape_fn(2, |_| rng.random_range(-3.0..3.0));
            let l2 = Array1::from_shape_fn(2, |_| rng.random_range(-3.0..3.0));
            let state1 = LagrangeState::new(p, l1.clone());
            let energy1 = compile_energy(&problem, &state1).unwrap();
            let argmin = exhaustive_min_energy(&energy1).unwrap();
            let lb1 = argmin.value;
            let g1 = crate::model::evaluate_g(&problem, &argmin.state).unwrap();
            let lb2 = lagrangian_bound(&problem, &LagrangeState::new(p, l2.clone())).unwrap();
            let linearized = lb1 + g1.dot(&(&l2 - &l1));
            assert!(
                lb2 <= linearized + 1e-9,
                "concavity violated: {lb2} > {linearized}"
            );
        }
    }

    #[test]
    fn boltzmann_uniform_at_zero_beta() {
        let coeffs = IsingCoefficients::new(
            array![[0.0, 2.0], [2.0, 0.0]],
            array![1.0, -1.0],
            3.0,
        )
        .unwrap();
        let probs = boltzmann_distribution(&coeffs, 0.0).unwrap();
        for p in &probs {
            assert_abs_diff_eq!(*p, 0.25, epsilon = 1e-12);
        }
    }

    #[test]
    fn boltzmann_two_spin_closed_form() {
        let coeffs = IsingCoefficients::new(
            array![[0.0, 1.0], [1.0, 0.0]],
            Array1::zeros(2),
            0.0,
        )
        .unwrap();
        let probs = boltzmann_distribution(&coeffs, 1.0).unwrap();
        let aligned = probs[0] + probs[3];
        let expect = 1f64.exp() / (1f64.exp() + (-1f64).exp());
        assert_abs_diff_eq!(aligned, expect, epsilon = 1e-12);
        assert_abs_diff_eq!(probs.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn exhaustive_matches_spin_side_minimum() {
        let mut rng = ChaCha12Rng::seed_from_u64(56);
        let problem = random_equality_problem(6, 1, &mut rng);
        let state = LagrangeState::new(1.5, array![0.3]);
        let energy = compile_energy(&problem, &state).unwrap();
        let sol = exhaustive_min_energy(&energy).unwrap();
        let ising = to_ising(&energy);
        let mut spin_min = f64::INFINITY;
        for idx in 0..1usize << 6 {
            let m = crate::model::bits_to_spins(&index_bits(idx, 6));
            spin_min = spin_min.min(ising.energy(&m));
        }
        assert_abs_diff_eq!(sol.value, spin_min, epsilon = 1e-9);
    }

    #[test]
    fn total_variation_basics() {
        assert_eq!(total_variation(&[1.0, 0.0], &[0.0, 1.0]), 1.0);
        assert_eq!(total_variation(&[0.5, 0.5], &[0.5, 0.5]), 0.0);
    }
}

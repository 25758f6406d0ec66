//! The self-adaptive outer loop and its fixed-penalty baseline.
//!
//! Each iteration anneals the current Lagrangian energy on the p-bit
//! sampler, reads the last sample, records feasibility and cost against
//! the original inequality constraints, then moves the multipliers along
//! the constraint residual: `lambda <- lambda + eta * g(x_k)`. The penalty
//! weight `P = alpha * d * N` is set once and held fixed; only the linear
//! part of the energy changes across iterations, so the couplings are
//! compiled a single time.

use crate::model::{
    compile_energy, compute_density, evaluate_f, evaluate_g, to_ising,
    ConstrainedQuadraticProblem, ConstraintSense, LagrangeState, ModelError,
};
use crate::sampler::{anneal_run, AnnealSchedule, RngStream, SamplerError};
use ndarray::Array1;
use serde::Serialize;
use std::time::{Duration, Instant};
use thiserror::Error;

/// Slop when checking `A x <= b` on data that went through normalization.
const FEAS_EPS: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum SolverError {
    #[error("config: {0}")]
    InvalidConfig(String),
    #[error("accuracy is undefined for a zero optimum")]
    UndefinedAccuracy,
    #[error("summary needs at least one run outcome")]
    EmptySummary,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
}

/// Knobs of one solve campaign. `penalty_override`, when set, replaces the
/// `alpha * d * N` rule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SaimConfig {
    /// Penalty prefactor in `P = alpha * d * N`.
    pub alpha: f64,
    /// Explicit penalty weight, overriding the alpha rule.
    pub penalty_override: Option<f64>,
    /// Multiplier step size.
    pub eta: f64,
    /// Number of annealed runs (outer iterations).
    pub runs: usize,
    /// Monte Carlo sweeps per run.
    pub mcs_per_run: usize,
    /// Ceiling of the linear inverse-temperature ramp.
    pub beta_max: f64,
    /// Base RNG seed.
    pub seed: u64,
    /// RNG stream id; replicates use distinct streams.
    pub stream: u64,
}

impl SaimConfig {
    fn validate(&self) -> Result<(), SolverError> {
        if self.runs == 0 {
            return Err(SolverError::InvalidConfig("runs must be >= 1".into()));
        }
        if self.mcs_per_run == 0 {
            return Err(SolverError::InvalidConfig(
                "mcs_per_run must be >= 1".into(),
            ));
        }
        if self.eta.is_nan() || self.eta < 0.0 {
            return Err(SolverError::InvalidConfig("eta must be >= 0".into()));
        }
        Ok(())
    }
}

/// What one outer iteration produced.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub index: usize,
    /// Raw last sample, including slack bits.
    pub sample: Vec<u8>,
    /// Equality-form residual `g(x_k)` of the raw sample.
    pub g: Vec<f64>,
    /// Whether the item bits satisfy the original inequalities.
    pub feasible: bool,
    /// Item-bit objective value, present exactly when feasible.
    pub cost: Option<f64>,
    /// Multipliers in effect during this iteration (before the update).
    pub lambda: Vec<f64>,
}

/// Best feasible solution seen during a campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct BestSolution {
    /// Item bits only (slack stripped).
    pub items: Vec<u8>,
    pub cost: f64,
    /// Iteration that first attained this cost.
    pub iteration: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaimResult {
    /// Absent when no sampled state was feasible.
    pub best: Option<BestSolution>,
    /// Percentage of iterations whose sample was feasible.
    pub feasibility_pct: f64,
    pub iterations: Vec<IterationRecord>,
    /// Penalty weight actually used.
    pub penalty: f64,
    /// Coupling density that entered the penalty rule.
    pub density: f64,
    pub total_sweeps: u64,
    pub wall_time: Duration,
}

impl SaimResult {
    pub fn found_feasible(&self) -> bool {
        self.best.is_some()
    }
}

/// Subgradient step on the multipliers: `lambda + eta * g`, elementwise.
/// No projection and no clipping; equality multipliers are sign-free.
pub fn update_multipliers(lambda: &Array1<f64>, g: &Array1<f64>, eta: f64) -> Array1<f64> {
    assert_eq!(lambda.len(), g.len(), "multiplier/residual length mismatch");
    lambda + &(g * eta)
}

/// Feasibility of the item bits against the original inequality rows,
/// ignoring slack bits. Problems without a slack layout are checked
/// against their own senses instead.
fn sample_is_feasible(problem: &ConstrainedQuadraticProblem, x: &[u8]) -> bool {
    let n_items = problem.n_items();
    let m = problem.n_constraints();
    for r in 0..m {
        let mut ax = 0.0;
        for (i, &xi) in x.iter().enumerate().take(n_items) {
            if xi != 0 {
                ax += problem.a()[[r, i]];
            }
        }
        let ok = if problem.slack_layout().is_some() {
            ax <= problem.b()[r] + FEAS_EPS
        } else {
            match problem.senses()[r] {
                ConstraintSense::LessEq => ax <= problem.b()[r] + FEAS_EPS,
                ConstraintSense::Equal => (ax - problem.b()[r]).abs() <= FEAS_EPS,
            }
        };
        if !ok {
            return false;
        }
    }
    true
}

/// Runs the self-adaptive loop on an equality-form (slack-extended,
/// normalized) problem. Multipliers start at zero, the penalty stays
/// fixed for the whole campaign, and the update uses the raw last sample
/// whether or not it was feasible. Finding no feasible sample is reported
/// in the result, not as an error.
pub fn run_saim(
    problem: &ConstrainedQuadraticProblem,
    config: &SaimConfig,
) -> Result<SaimResult, SolverError> {
    config.validate()?;
    if !problem.is_equality_form() {
        return Err(SolverError::Model(ModelError::NotEqualityForm));
    }
    let started = Instant::now();
    let n = problem.n_vars();
    let m = problem.n_constraints();
    let density = compute_density(problem);
    let penalty = config
        .penalty_override
        .unwrap_or(config.alpha * density * n as f64);

    // Only the linear terms depend on lambda, so the couplings compile once.
    let base_energy = compile_energy(problem, &LagrangeState::penalty_only(penalty, m))?;
    let base_ising = to_ising(&base_energy);

    let schedule = AnnealSchedule::new(config.beta_max, config.mcs_per_run)?;
    let mut rng = RngStream::new(config.seed, config.stream).rng();
    let mut lambda = Array1::<f64>::zeros(m);

    let mut iterations = Vec::with_capacity(config.runs);
    let mut best: Option<BestSolution> = None;
    let mut feasible_count = 0usize;

    for k in 0..config.runs {
        // lambda' (Ax - b) adds (A'lambda)'x - lambda'b to the energy
        let atl = problem.a().t().dot(&lambda);
        let offset = -lambda.dot(problem.b());
        let coeffs = base_ising.with_linear_binary_term(&atl, offset);

        let sample = anneal_run(&coeffs, &schedule, &mut rng);
        let x = sample.to_bits();
        let g = evaluate_g(problem, &x)?;
        let feasible = sample_is_feasible(problem, &x);
        let cost = if feasible {
            let items = &x[..problem.n_items()];
            let c = evaluate_f(problem, items)?;
            feasible_count += 1;
            // strictly-better only, so ties keep the earliest find
            if best.as_ref().is_none_or(|b| c < b.cost) {
                best = Some(BestSolution {
                    items: items.to_vec(),
                    cost: c,
                    iteration: k,
                });
            }
            Some(c)
        } else {
            None
        };

        iterations.push(IterationRecord {
            index: k,
            sample: x,
            g: g.to_vec(),
            feasible,
            cost,
            lambda: lambda.to_vec(),
        });

        lambda = update_multipliers(&lambda, &g, config.eta);
    }

    Ok(SaimResult {
        best,
        feasibility_pct: 100.0 * feasible_count as f64 / config.runs as f64,
        iterations,
        penalty,
        density,
        total_sweeps: (config.runs * config.mcs_per_run) as u64,
        wall_time: started.elapsed(),
    })
}

/// Fixed-penalty baseline: the identical loop with the multiplier step
/// forced to zero. The penalty is usually supplied explicitly through
/// `penalty_override` (tuned-P experiments); otherwise the alpha rule
/// applies unchanged.
pub fn run_penalty_baseline(
    problem: &ConstrainedQuadraticProblem,
    config: &SaimConfig,
) -> Result<SaimResult, SolverError> {
    let mut frozen = config.clone();
    frozen.eta = 0.0;
    run_saim(problem, &frozen)
}

/// Accuracy percentage of a feasible cost against the known optimum:
/// `100 * cost / opt`. Both are negative by the minimization convention;
/// 100 means optimal, less means worse.
pub fn compute_accuracy(cost: f64, opt: f64) -> Result<f64, SolverError> {
    if opt == 0.0 {
        return Err(SolverError::UndefinedAccuracy);
    }
    Ok(100.0 * cost / opt)
}

/// One campaign result tagged with its instance, for aggregation.
/// `cost_scale` converts the result's (normalized) costs back into the
/// units of `opt`.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub instance: String,
    pub opt: Option<f64>,
    pub cost_scale: f64,
    pub result: SaimResult,
}

/// Per-instance aggregation across replicates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceStats {
    pub instance: String,
    /// Best accuracy over all replicates; `None` when the optimum is unknown.
    pub best_accuracy: Option<f64>,
    /// Mean accuracy over every feasible sample of every replicate.
    pub avg_accuracy: Option<f64>,
    /// Best (most negative) cost over all replicates, in `opt` units.
    pub best_cost: Option<f64>,
    /// Mean feasibility percentage over replicates.
    pub feasibility_pct: f64,
    pub replicates: usize,
}

/// Campaign-level statistics: per-instance rows plus quartile spreads
/// across instances.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryStats {
    pub instances: Vec<InstanceStats>,
    pub median_best_accuracy: Option<f64>,
    pub iqr_best_accuracy: Option<f64>,
    pub median_feasibility_pct: f64,
    pub iqr_feasibility_pct: f64,
}

/// Linear-interpolation percentile of a sorted sample, `q` in [0, 1].
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    assert!(n > 0);
    if n == 1 {
        return sorted[0];
    }
    let pos = q * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

fn median_iqr(values: &[f64]) -> (f64, f64) {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let med = percentile(&sorted, 0.5);
    let iqr = percentile(&sorted, 0.75) - percentile(&sorted, 0.25);
    (med, iqr)
}

/// Aggregates campaign outcomes per instance and across the instance set.
pub fn summarize(outcomes: &[RunOutcome]) -> Result<SummaryStats, SolverError> {
    if outcomes.is_empty() {
        return Err(SolverError::EmptySummary);
    }
    // group by instance, preserving first-seen order
    let mut order: Vec<&str> = Vec::new();
    for o in outcomes {
        if !order.contains(&o.instance.as_str()) {
            order.push(&o.instance);
        }
    }

    let mut instances = Vec::with_capacity(order.len());
    for name in &order {
        let group: Vec<&RunOutcome> = outcomes
            .iter()
            .filter(|o| o.instance == *name)
            .collect();
        let opt = group[0].opt;
        let mut best_cost: Option<f64> = None;
        let mut feas_sum = 0.0;
        let mut sample_costs = Vec::new();
        for o in &group {
            feas_sum += o.result.feasibility_pct;
            if let Some(b) = &o.result.best {
                let scaled = b.cost * o.cost_scale;
                if best_cost.is_none_or(|cur| scaled < cur) {
                    best_cost = Some(scaled);
                }
            }
            for it in &o.result.iterations {
                if let Some(c) = it.cost {
                    sample_costs.push(c * o.cost_scale);
                }
            }
        }
        let (best_accuracy, avg_accuracy) = match opt {
            Some(opt) if opt != 0.0 => {
                let best = best_cost.map(|c| 100.0 * c / opt);
                let avg = if sample_costs.is_empty() {
                    None
                } else {
                    let mean = sample_costs.iter().sum::<f64>() / sample_costs.len() as f64;
                    Some(100.0 * mean / opt)
                };
                (best, avg)
            }
            _ => (None, None),
        };
        instances.push(InstanceStats {
            instance: (*name).to_string(),
            best_accuracy,
            avg_accuracy,
            best_cost,
            feasibility_pct: feas_sum / group.len() as f64,
            replicates: group.len(),
        });
    }

    let feas: Vec<f64> = instances.iter().map(|i| i.feasibility_pct).collect();
    let (median_feas, iqr_feas) = median_iqr(&feas);
    let accs: Vec<f64> = instances
        .iter()
        .filter_map(|i| i.best_accuracy)
        .collect();
    let (median_acc, iqr_acc) = if accs.len() == instances.len() {
        let (m, i) = median_iqr(&accs);
        (Some(m), Some(i))
    } else {
        (None, None)
    };

    Ok(SummaryStats {
        instances,
        median_best_accuracy: median_acc,
        iqr_best_accuracy: iqr_acc,
        median_feasibility_pct: median_feas,
        iqr_feasibility_pct: iqr_feas,
    })
}

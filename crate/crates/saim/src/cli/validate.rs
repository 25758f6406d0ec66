//! Built-in validation suites: each check computes a measured statistic and
//! compares it against a fixed threshold. Failures are report content, not
//! errors.

use crate::model::{
    add_slack_variables, bits_index, compile_energy, evaluate_g, evaluate_lagrangian, index_bits,
    to_ising, LagrangeState,
};
use crate::oracle::{boltzmann_distribution, exhaustive_min_energy, lagrangian_bound, total_variation};
use crate::sampler::{sample_equilibrium, RngStream};
use ndarray::{Array1, Array2};
use rand::Rng;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckName {
    TvDistance,
    EnergyRoundtrip,
    SlackCompleteness,
    SubgradientConcavity,
}

impl CheckName {
    pub const ALL: [CheckName; 4] = [
        CheckName::TvDistance,
        CheckName::EnergyRoundtrip,
        CheckName::SlackCompleteness,
        CheckName::SubgradientConcavity,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CheckName::TvDistance => "tv-distance",
            CheckName::EnergyRoundtrip => "energy-roundtrip",
            CheckName::SlackCompleteness => "slack-completeness",
            CheckName::SubgradientConcavity => "subgradient-concavity",
        }
    }
}

impl FromStr for CheckName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tv-distance" => Ok(CheckName::TvDistance),
            "energy-roundtrip" => Ok(CheckName::EnergyRoundtrip),
            "slack-completeness" => Ok(CheckName::SlackCompleteness),
            "subgradient-concavity" => Ok(CheckName::SubgradientConcavity),
            other => Err(format!(
                "unknown check {other:?}; known checks: tv-distance, energy-roundtrip, \
                 slack-completeness, subgradient-concavity"
            )),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
    pub detail: String,
}

pub fn run_checks(checks: &[CheckName], seed: u64) -> Vec<CheckOutcome> {
    checks
        .iter()
        .map(|check| match check {
            CheckName::TvDistance => tv_distance_check(seed),
            CheckName::EnergyRoundtrip => energy_roundtrip_check(seed),
            CheckName::SlackCompleteness => slack_completeness_check(seed),
            CheckName::SubgradientConcavity => subgradient_concavity_check(seed),
        })
        .collect()
}

/// Equilibrium sampling must reproduce the exact Boltzmann table.
fn tv_distance_check(seed: u64) -> CheckOutcome {
    let threshold = 0.02;
    let mut worst = 0.0f64;
    for system in 0..2u64 {
        let mut rng = RngStream::new(seed, 1_000 + system).rng();
        let n = 8;
        let mut j = Array2::zeros((n, n));
        for i in 0..n {
            for k in (i + 1)..n {
                let v = rng.random_range(-1.0..1.0);
                j[[i, k]] = v;
                j[[k, i]] = v;
            }
        }
        let h = Array1::from_shape_fn(n, |_| rng.random_range(-1.0..1.0));
        let coeffs = crate::model::IsingCoefficients::new(j, h, 0.0).unwrap();
        let exact = boltzmann_distribution(&coeffs, 1.0).unwrap();
        let empirical = sample_equilibrium(&coeffs, 1.0, 1_000_000, 10_000, &mut rng).unwrap();
        worst = worst.max(total_variation(&empirical, &exact));
    }
    CheckOutcome {
        name: CheckName::TvDistance.as_str(),
        statistic: worst,
        threshold,
        pass: worst < threshold,
        detail: "max TV over 2 random 8-spin systems, beta=1, 1e6 samples".into(),
    }
}

/// Direct, compiled, and spin-side evaluations must agree on every state.
fn energy_roundtrip_check(seed: u64) -> CheckOutcome {
    let threshold = 1e-9;
    let mut worst = 0.0f64;
    let mut rng = RngStream::new(seed, 101).rng();
    for _ in 0..50 {
        let n = 2 + (rng.random::<u32>() % 7) as usize;
        let m = 1 + (rng.random::<u32>() % 2) as usize;
        let problem = random_equality(n, m, &mut rng);
        let state = LagrangeState::new(
            rng.random_range(0.0..4.0),
            Array1::from_shape_fn(m, |_| rng.random_range(-3.0..3.0)),
        );
        let energy = compile_energy(&problem, &state).unwrap();
        let ising = to_ising(&energy);
        for idx in 0..1usize << n {
            let x = index_bits(idx, n);
            let direct = evaluate_lagrangian(&problem, &state, &x).unwrap();
            worst = worst.max((energy.energy(&x) - direct).abs());
            let spins = crate::model::bits_to_spins(&x);
            worst = worst.max((ising.energy(&spins) - direct).abs());
        }
    }
    CheckOutcome {
        name: CheckName::EnergyRoundtrip.as_str(),
        statistic: worst,
        threshold,
        pass: worst < threshold,
        detail: "max |deviation| across 50 random problems, all states".into(),
    }
}

/// The slack-extended equality formulation must reach exactly the item
/// assignments that satisfy the original inequalities.
fn slack_completeness_check(seed: u64) -> CheckOutcome {
    let mut mismatches = 0usize;
    let mut rng = RngStream::new(seed, 202).rng();
    for _ in 0..20 {
        let n = 4 + (rng.random::<u32>() % 4) as usize;
        let m = 1 + (rng.random::<u32>() % 2) as usize;
        let a = Array2::from_shape_fn((m, n), |_| f64::from(rng.random_range(0..=4u32)));
        let b = Array1::from_shape_fn(m, |_| f64::from(rng.random_range(1..=10u32)));
        let problem = crate::model::ConstrainedQuadraticProblem::new(
            Array2::zeros((n, n)),
            Array1::from_elem(n, -1.0),
            a,
            b,
            vec![crate::model::ConstraintSense::LessEq; m],
            crate::model::ObjectiveKind::Linear,
        )
        .unwrap();
        let ext = add_slack_variables(&problem).unwrap();
        let total = ext.n_vars();
        let mut reachable = vec![false; 1 << n];
        for idx in 0..1usize << total {
            let x = index_bits(idx, total);
            let g = evaluate_g(&ext, &x).unwrap();
            if g.iter().all(|v| v.abs() < 1e-9) {
                reachable[bits_index(&x[..n])] = true;
            }
        }
        for (idx, &reach) in reachable.iter().enumerate() {
            let x = index_bits(idx, n);
            let feasible = (0..m).all(|r| {
                let ax: f64 = x
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| problem.a()[[r, i]] * f64::from(v))
                    .sum();
                ax <= problem.b()[r] + 1e-9
            });
            if reach != feasible {
                mismatches += 1;
            }
        }
    }
    CheckOutcome {
        name: CheckName::SlackCompleteness.as_str(),
        statistic: mismatches as f64,
        threshold: 0.0,
        pass: mismatches == 0,
        detail: "item sets reachable with slack vs direct inequality, 20 instances".into(),
    }
}

/// The exhaustive lower bound must satisfy the subgradient inequality of a
/// concave dual.
fn subgradient_concavity_check(seed: u64) -> CheckOutcome {
    let threshold = 1e-9;
    let mut worst = f64::NEG_INFINITY;
    let mut rng = RngStream::new(seed, 303).rng();
    for _ in 0..10 {
        let n = 5 + (rng.random::<u32>() % 3) as usize;
        let m = 2;
        let problem = random_equality(n, m, &mut rng);
        let p = rng.random_range(0.1..2.0);
        for _ in 0..10 {
            let l1 = Array1::from_shape_fn(m, |_| rng.random_range(-3.0..3.0));
            let l2 = Array1::from_shape_fn(m, |_| rng.random_range(-3.0..3.0));
            let state1 = LagrangeState::new(p, l1.clone());
            let argmin = exhaustive_min_energy(&compile_energy(&problem, &state1).unwrap()).unwrap();
            let lb1 = argmin.value;
            let g1 = evaluate_g(&problem, &argmin.state).unwrap();
            let lb2 = lagrangian_bound(&problem, &LagrangeState::new(p, l2.clone())).unwrap();
            let violation = lb2 - (lb1 + g1.dot(&(&l2 - &l1)));
            worst = worst.max(violation);
        }
    }
    CheckOutcome {
        name: CheckName::SubgradientConcavity.as_str(),
        statistic: worst,
        threshold,
        pass: worst < threshold,
        detail: "max subgradient-inequality violation over 100 multiplier pairs".into(),
    }
}

fn random_equality(
    n: usize,
    m: usize,
    rng: &mut impl Rng,
) -> crate::model::ConstrainedQuadraticProblem {
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
    crate::model::ConstrainedQuadraticProblem::new(
        w,
        h,
        a,
        b,
        vec![crate::model::ConstraintSense::Equal; m],
        crate::model::ObjectiveKind::Quadratic,
    )
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::SpinState;

    #[test]
    fn fresh_build_passes_all_checks() {
        let outcomes = run_checks(&CheckName::ALL, 0);
        assert_eq!(outcomes.len(), 4);
        for outcome in &outcomes {
            assert!(
                outcome.pass,
                "{} failed: {} vs {}",
                outcome.name, outcome.statistic, outcome.threshold
            );
        }
    }

    #[test]
    fn check_names_parse() {
        assert_eq!(
            "tv-distance".parse::<CheckName>().unwrap(),
            CheckName::TvDistance
        );
        assert!("bogus".parse::<CheckName>().is_err());
    }

    #[test]
    fn sign_bug_in_update_rule_fails_tv_check() {
        // rig a sampler whose activation uses the wrong tanh sign and push
        // its histogram through the same statistic: it must blow past the
        // threshold that the correct sampler stays under
        let mut rng = RngStream::new(1, 0).rng();
        let n = 6;
        let mut j = Array2::zeros((n, n));
        for i in 0..n {
            for k in (i + 1)..n {
                let v = rng.random_range(-1.0..1.0);
                j[[i, k]] = v;
                j[[k, i]] = v;
            }
        }
        let h = Array1::from_shape_fn(n, |_| rng.random_range(-1.0..1.0));
        let coeffs = crate::model::IsingCoefficients::new(j, h, 0.0).unwrap();
        let beta = 1.0;
        let exact = boltzmann_distribution(&coeffs, beta).unwrap();

        let mut state = SpinState::uniform_random(n, &mut rng);
        let mut counts = vec![0u64; 1 << n];
        let samples = 200_000;
        for _ in 0..samples {
            // buggy single sweep: tanh(-beta I) instead of tanh(beta I)
            let mut spins: Vec<i8> = state.spins().to_vec();
            for i in 0..n {
                let input = coeffs.local_field(&spins, i);
                let activation = (-beta * input).tanh() + rng.random_range(-1.0..1.0);
                spins[i] = if activation >= 0.0 { 1 } else { -1 };
            }
            state = SpinState::new(spins);
            counts[state.index()] += 1;
        }
        let empirical: Vec<f64> = counts
            .into_iter()
            .map(|c| c as f64 / samples as f64)
            .collect();
        let tv = total_variation(&empirical, &exact);
        assert!(tv > 0.02, "sign bug went undetected, TV = {tv}");
    }
}

//! The self-adaptive trajectory in three acts: an all-infeasible transient
//! while the multiplier is still small, a climb as each infeasible sample
//! pushes the multiplier up along the constraint residual, and a plateau
//! where the sampler emits feasible near-optimal solutions.
//!
//! ```bash
//! cargo run --release --example multiplier_dynamics
//! ```

use saim::instances::{generate_qkp, Instance};
use saim::model::{add_slack_variables, normalize};
use saim::solver::{run_saim, SaimConfig};

fn main() {
    let instance = Instance::Qkp(generate_qkp(60, 0.5, 1, (1, 100), (1, 50)).unwrap());
    let raw = instance.to_problem().unwrap();
    let (problem, scale_obj, _) = normalize(&add_slack_variables(&raw).unwrap()).unwrap();

    let config = SaimConfig {
        alpha: 2.0,
        penalty_override: None,
        eta: 20.0,
        runs: 800,
        mcs_per_run: 500,
        beta_max: 10.0,
        seed: 2,
        stream: 0,
    };
    let result = run_saim(&problem, &config).unwrap();
    println!(
        "{} spins, P = {:.1}, eta = {}, {} iterations",
        problem.n_vars(),
        result.penalty,
        config.eta,
        config.runs
    );
    println!();
    println!(
        "{:>10} {:>12} {:>12} {:>10}",
        "iteration", "lambda", "cost", "feasible"
    );

    let k = result.iterations.len();
    let window = 80;
    for chunk_start in (0..k).step_by(window) {
        let chunk = &result.iterations[chunk_start..(chunk_start + window).min(k)];
        let lambda = chunk.iter().map(|it| it.lambda[0]).sum::<f64>() / chunk.len() as f64;
        let feasible = chunk.iter().filter(|it| it.feasible).count();
        let best_cost = chunk
            .iter()
            .filter_map(|it| it.cost)
            .fold(f64::INFINITY, f64::min);
        let cost = if best_cost.is_finite() {
            format!("{:.0}", best_cost * scale_obj)
        } else {
            "-".into()
        };
        println!(
            "{:>10} {lambda:>12.2} {cost:>12} {:>6}/{:<3}",
            format!("{}..{}", chunk_start, chunk_start + chunk.len()),
            feasible,
            chunk.len()
        );
    }

    if let Some(first) = result.iterations.iter().find(|it| it.feasible) {
        println!();
        println!("first feasible sample at iteration {}", first.index);
    }
    if let Some(best) = &result.best {
        println!(
            "best cost {:.0} found at iteration {}",
            best.cost * scale_obj,
            best.iteration
        );
    }
    println!("feasibility over the whole run: {:.1}%", result.feasibility_pct);
}

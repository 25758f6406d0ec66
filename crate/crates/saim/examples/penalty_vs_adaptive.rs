//! Head-to-head at an equal sweep budget: the fixed-penalty baseline with
//! an untuned weight (P = 2dN) against the self-adaptive loop starting
//! from the same weight. The baseline's samples sit at infeasible minima;
//! the adaptive loop reshapes the landscape until feasible near-optimal
//! samples appear.
//!
//! ```bash
//! cargo run --release --example penalty_vs_adaptive
//! ```

use saim::instances::{generate_qkp, Instance};
use saim::model::{add_slack_variables, normalize};
use saim::solver::{run_penalty_baseline, run_saim, SaimConfig, SaimResult};

fn describe(tag: &str, result: &SaimResult, scale_obj: f64, reference: f64) {
    let best = result
        .best
        .as_ref()
        .map(|b| format!("{:.0}", b.cost * scale_obj))
        .unwrap_or_else(|| "none".into());
    let accuracy = result
        .best
        .as_ref()
        .map(|b| format!("{:.2}%", 100.0 * b.cost * scale_obj / reference))
        .unwrap_or_else(|| "-".into());
    println!(
        "{tag:<10} best cost {best:>8}  accuracy {accuracy:>8}  feasible {:.1}%",
        result.feasibility_pct
    );
}

fn main() {
    let instance = Instance::Qkp(generate_qkp(50, 0.5, 600, (1, 100), (1, 50)).unwrap());
    let raw = instance.to_problem().unwrap();
    let (problem, scale_obj, _) = normalize(&add_slack_variables(&raw).unwrap()).unwrap();
    println!(
        "instance {}: {} items, {} spins",
        instance.name(),
        problem.n_items(),
        problem.n_vars()
    );

    let config = SaimConfig {
        alpha: 2.0,
        penalty_override: None,
        eta: 20.0,
        runs: 300,
        mcs_per_run: 500,
        beta_max: 10.0,
        seed: 11,
        stream: 0,
    };

    // long reference run to normalize the comparison
    let reference = {
        let mut long = config.clone();
        long.runs = 3000;
        long.seed = 99;
        let r = run_saim(&problem, &long).unwrap();
        r.best.expect("reference run finds a solution").cost * scale_obj
    };
    println!("reference best over a 10x budget: {reference:.0}");
    println!();

    let adaptive = run_saim(&problem, &config).unwrap();
    let baseline = run_penalty_baseline(&problem, &config).unwrap();
    println!(
        "equal budget: {} runs x {} sweeps, P = {:.1}",
        config.runs, config.mcs_per_run, adaptive.penalty
    );
    describe("adaptive", &adaptive, scale_obj, reference);
    describe("penalty", &baseline, scale_obj, reference);
    println!();
    println!("same penalty weight, same sweeps — only the multiplier update differs");
}

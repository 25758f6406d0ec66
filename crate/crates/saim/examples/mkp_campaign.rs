//! A small campaign over multidimensional knapsacks: several instances,
//! several replicates each, aggregated into per-instance and campaign
//! statistics. With multiple capacity constraints there is one multiplier
//! per knapsack and feasible samples are rarer, so the step size is much
//! smaller than in the single-constraint case.
//!
//! ```bash
//! cargo run --release --example mkp_campaign
//! ```

use rayon::prelude::*;
use saim::instances::{generate_mkp, Instance};
use saim::model::{add_slack_variables, normalize};
use saim::oracle::exhaustive_solve;
use saim::solver::{run_saim, summarize, RunOutcome, SaimConfig};

fn main() {
    let instances: Vec<Instance> = (0..4u64)
        .map(|s| Instance::Mkp(generate_mkp(16, 3, s, 0.5, (1, 60)).unwrap()))
        .collect();
    let replicates = 2u64;

    let outcomes: Vec<RunOutcome> = instances
        .par_iter()
        .flat_map_iter(|instance| {
            let raw = instance.to_problem().unwrap();
            let opt = exhaustive_solve(&raw).unwrap().value;
            let (problem, scale_obj, _) =
                normalize(&add_slack_variables(&raw).unwrap()).unwrap();
            (0..replicates).map(move |rep| {
                let config = SaimConfig {
                    alpha: 5.0,
                    penalty_override: None,
                    eta: 0.05,
                    runs: 2500,
                    mcs_per_run: 500,
                    beta_max: 50.0,
                    seed: 3,
                    stream: rep,
                };
                let result = run_saim(&problem, &config).unwrap();
                RunOutcome {
                    instance: instance.name().to_string(),
                    opt: Some(opt),
                    cost_scale: scale_obj,
                    result,
                }
            })
        })
        .collect();

    let summary = summarize(&outcomes).unwrap();
    println!(
        "{:<12} {:>10} {:>10} {:>12}",
        "instance", "best acc", "avg acc", "feasibility"
    );
    for row in &summary.instances {
        println!(
            "{:<12} {:>9.2}% {:>9.2}% {:>11.1}%",
            row.instance,
            row.best_accuracy.unwrap_or(f64::NAN),
            row.avg_accuracy.unwrap_or(f64::NAN),
            row.feasibility_pct
        );
    }
    println!();
    println!(
        "median best accuracy {:.2}% (IQR {:.2}), median feasibility {:.1}%",
        summary.median_best_accuracy.unwrap(),
        summary.iqr_best_accuracy.unwrap(),
        summary.median_feasibility_pct
    );
}

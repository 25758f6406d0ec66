//! End-to-end quadratic knapsack solve: generate a small instance, run it
//! through the standard pipeline (minimization form, slack bits,
//! normalization), let the self-adaptive loop find a solution, and compare
//! against the exhaustive optimum.
//!
//! ```bash
//! cargo run --release --example qkp_end_to_end
//! ```

use saim::instances::{generate_qkp, Instance};
use saim::model::{add_slack_variables, normalize};
use saim::oracle::exhaustive_solve;
use saim::solver::{compute_accuracy, run_saim, SaimConfig};

fn main() {
    let instance = Instance::Qkp(generate_qkp(14, 0.5, 7, (1, 100), (1, 50)).unwrap());
    println!("instance {}: {} items", instance.name(), instance.n());

    // exhaustive ground truth on the raw inequality problem
    let raw = instance.to_problem().unwrap();
    let opt = exhaustive_solve(&raw).unwrap();
    println!("exhaustive optimum: cost {}", opt.value);

    // pipeline: slack bits turn a'x <= b into a'x + s = b, then everything
    // is rescaled so one beta schedule fits all instances
    let extended = add_slack_variables(&raw).unwrap();
    let (problem, scale_obj, scale_con) = normalize(&extended).unwrap();
    println!(
        "{} items + {} slack bits = {} spins (scales: objective {}, constraints {})",
        problem.n_items(),
        problem.n_vars() - problem.n_items(),
        problem.n_vars(),
        scale_obj,
        scale_con,
    );

    let config = SaimConfig {
        alpha: 2.0,
        penalty_override: None,
        eta: 20.0,
        runs: 300,
        mcs_per_run: 500,
        beta_max: 10.0,
        seed: 1,
        stream: 0,
    };
    let result = run_saim(&problem, &config).unwrap();
    println!(
        "penalty P = {:.2} from alpha * d * N = 2.0 * {:.3} * {}",
        result.penalty,
        result.density,
        problem.n_vars()
    );
    println!("feasible samples: {:.1}%", result.feasibility_pct);

    match &result.best {
        Some(best) => {
            let cost = best.cost * scale_obj;
            let accuracy = compute_accuracy(cost, opt.value).unwrap();
            println!(
                "best feasible cost {cost:.1} at iteration {} — accuracy {accuracy:.2}%",
                best.iteration
            );
            let picked: Vec<usize> = best
                .items
                .iter()
                .enumerate()
                .filter_map(|(i, &b)| (b == 1).then_some(i))
                .collect();
            println!("selected items: {picked:?}");
        }
        None => println!("no feasible solution found — increase runs"),
    }
}

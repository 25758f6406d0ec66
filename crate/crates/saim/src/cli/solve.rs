//! Campaign runner behind `saim solve`: pipelines each instance through
//! slack extension and normalization, fans (instance, replicate) jobs over
//! a bounded worker pool, and writes self-describing result files.
//!
//! Each replicate owns RNG stream id equal to its replicate index, so the
//! records are identical whether jobs run sequentially or in parallel.

use super::records::{config_hash, RunRecord, SummaryDoc, TraceRecord, FORMAT_VERSION};
use super::{CliError, Mode};
use crate::instances::Instance;
use crate::model::{add_slack_variables, evaluate_f, normalize, ConstrainedQuadraticProblem};
use crate::oracle::{exhaustive_solve, MAX_EXHAUSTIVE_VARS};
use crate::solver::{run_penalty_baseline, run_saim, RunOutcome, SaimConfig, SaimResult};
use rayon::prelude::*;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

pub struct Campaign {
    pub mode: Mode,
    pub base: SaimConfig,
    pub replicates: usize,
    pub workers: usize,
    pub out: PathBuf,
    pub instances: Vec<Instance>,
}

struct Prepared {
    name: String,
    safe_name: String,
    problem: ConstrainedQuadraticProblem,
    scale_obj: f64,
    scale_con: f64,
    opt: Option<f64>,
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' })
        .collect()
}

fn prepare(instance: &Instance) -> Result<Prepared, CliError> {
    let raw = instance.to_problem()?;
    let ext = add_slack_variables(&raw)?;
    let (problem, scale_obj, scale_con) = normalize(&ext)?;
    // known optimum, or the exhaustive one when the instance is small
    let opt = match instance.opt() {
        Some(o) => Some(o),
        None if instance.n() <= MAX_EXHAUSTIVE_VARS => {
            Some(exhaustive_solve(&raw).map_err(CliError::from)?.value)
        }
        None => None,
    };
    Ok(Prepared {
        name: instance.name().to_string(),
        safe_name: sanitize(instance.name()),
        problem,
        scale_obj,
        scale_con,
        opt,
    })
}

fn write_trace(
    path: &Path,
    prepared: &Prepared,
    hash: &str,
    replicate: usize,
    seed: u64,
    result: &SaimResult,
) -> Result<(), CliError> {
    let mut out = Vec::new();
    for it in &result.iterations {
        let items = &it.sample[..prepared.problem.n_items()];
        let sample_cost =
            evaluate_f(&prepared.problem, items).map_err(CliError::from)? * prepared.scale_obj;
        let record = TraceRecord {
            format_version: FORMAT_VERSION,
            config_hash: hash.to_string(),
            instance: prepared.name.clone(),
            replicate,
            seed,
            iteration: it.index,
            lambda: it.lambda.clone(),
            sample_cost,
            feasible: it.feasible,
            cost: it.cost.map(|c| c * prepared.scale_obj),
            g_norm: it.g.iter().map(|v| v * v).sum::<f64>().sqrt(),
        };
        serde_json::to_writer(&mut out, &record).map_err(|e| CliError::Io(e.to_string()))?;
        out.push(b'\n');
    }
    fs::write(path, out).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(())
}

pub fn run_campaign(campaign: &Campaign) -> Result<(), CliError> {
    if campaign.instances.is_empty() {
        return Err(CliError::Usage("no instances resolved".into()));
    }
    if campaign.replicates == 0 {
        return Err(CliError::Usage("replicates must be >= 1".into()));
    }
    if campaign.workers == 0 {
        return Err(CliError::Usage("workers must be >= 1".into()));
    }
    fs::create_dir_all(&campaign.out)
        .map_err(|e| CliError::Io(format!("{}: {e}", campaign.out.display())))?;

    let prepared: Vec<Prepared> = campaign
        .instances
        .iter()
        .map(prepare)
        .collect::<Result<_, _>>()?;
    let names: Vec<String> = prepared.iter().map(|p| p.name.clone()).collect();
    let mode_str = campaign.mode.as_str();
    let hash = config_hash(mode_str, &campaign.base, campaign.replicates, &names);

    let jobs: Vec<(usize, usize)> = (0..prepared.len())
        .flat_map(|i| (0..campaign.replicates).map(move |r| (i, r)))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(campaign.workers)
        .build()
        .map_err(|e| CliError::Io(e.to_string()))?;

    let results: Vec<Result<(usize, usize, RunRecord, RunOutcome), CliError>> =
        pool.install(|| {
            jobs.par_iter()
                .map(|&(idx, replicate)| {
                    let p = &prepared[idx];
                    let config = SaimConfig {
                        stream: replicate as u64,
                        ..campaign.base.clone()
                    };
                    let result = match campaign.mode {
                        Mode::Saim => run_saim(&p.problem, &config)?,
                        Mode::Penalty => run_penalty_baseline(&p.problem, &config)?,
                    };
                    let trace_path = campaign
                        .out
                        .join(format!("trace_{}_r{replicate}.jsonl", p.safe_name));
                    write_trace(&trace_path, p, &hash, replicate, config.seed, &result)?;

                    let best_norm = result.best.as_ref().map(|b| b.cost);
                    let best_cost = best_norm.map(|c| c * p.scale_obj);
                    let accuracy = match (best_cost, p.opt) {
                        (Some(c), Some(o)) if o != 0.0 => Some(100.0 * c / o),
                        _ => None,
                    };
                    let record = RunRecord {
                        format_version: FORMAT_VERSION,
                        config_hash: hash.clone(),
                        instance: p.name.clone(),
                        replicate,
                        seed: config.seed,
                        stream: config.stream,
                        mode: mode_str.to_string(),
                        n_items: p.problem.n_items(),
                        n_spins: p.problem.n_vars(),
                        n_constraints: p.problem.n_constraints(),
                        density: result.density,
                        penalty: result.penalty,
                        scale_obj: p.scale_obj,
                        scale_con: p.scale_con,
                        opt: p.opt,
                        best_cost,
                        best_cost_normalized: best_norm,
                        accuracy,
                        feasibility_pct: result.feasibility_pct,
                        total_sweeps: result.total_sweeps,
                    };
                    let outcome = RunOutcome {
                        instance: p.name.clone(),
                        opt: p.opt,
                        cost_scale: p.scale_obj,
                        result,
                    };
                    Ok((idx, replicate, record, outcome))
                })
                .collect()
        });

    let mut rows = Vec::with_capacity(results.len());
    for r in results {
        rows.push(r?);
    }
    rows.sort_by_key(|(idx, replicate, _, _)| (*idx, *replicate));

    let results_path = campaign.out.join("results.jsonl");
    let mut file = fs::File::create(&results_path)
        .map_err(|e| CliError::Io(format!("{}: {e}", results_path.display())))?;
    for (_, _, record, _) in &rows {
        serde_json::to_writer(&mut file, record).map_err(|e| CliError::Io(e.to_string()))?;
        file.write_all(b"\n")
            .map_err(|e| CliError::Io(e.to_string()))?;
    }

    let outcomes: Vec<RunOutcome> = rows.into_iter().map(|(_, _, _, o)| o).collect();
    let summary = crate::solver::summarize(&outcomes)?;
    let doc = SummaryDoc {
        format_version: FORMAT_VERSION,
        config_hash: hash,
        mode: mode_str.to_string(),
        replicates: campaign.replicates,
        summary,
    };
    let summary_path = campaign.out.join("summary.json");
    let mut text =
        serde_json::to_string_pretty(&doc).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    fs::write(&summary_path, text)
        .map_err(|e| CliError::Io(format!("{}: {e}", summary_path.display())))?;

    for stats in &doc.summary.instances {
        let acc = stats
            .best_accuracy
            .map_or("n/a".to_string(), |a| format!("{a:.2}"));
        println!(
            "{}: best accuracy {}, feasibility {:.1}%",
            stats.instance, acc, stats.feasibility_pct
        );
    }
    println!(
        "wrote {} records to {}",
        outcomes.len(),
        campaign.out.display()
    );
    Ok(())
}

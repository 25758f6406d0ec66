//! On-disk result schema for solve campaigns.
//!
//! `results.jsonl` carries one [`RunRecord`] line per (instance, replicate)
//! pair; `trace_<instance>_r<k>.jsonl` carries one [`TraceRecord`] line per
//! outer iteration. Every record is self-describing: it embeds the format
//! version, the campaign config hash, and the seed that produced it.
//! Records carry no timestamps, so a rerun with the same seed is
//! byte-identical.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const FORMAT_VERSION: u32 = 1;

/// One line of `results.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub format_version: u32,
    pub config_hash: String,
    pub instance: String,
    pub replicate: usize,
    pub seed: u64,
    pub stream: u64,
    pub mode: String,
    pub n_items: usize,
    pub n_spins: usize,
    pub n_constraints: usize,
    pub density: f64,
    pub penalty: f64,
    /// Scale factors applied by normalization; costs below are already
    /// converted back into original instance units.
    pub scale_obj: f64,
    pub scale_con: f64,
    pub opt: Option<f64>,
    pub best_cost: Option<f64>,
    pub best_cost_normalized: Option<f64>,
    /// `100 * best_cost / opt`; null when the optimum is unknown.
    pub accuracy: Option<f64>,
    pub feasibility_pct: f64,
    pub total_sweeps: u64,
}

/// One line of a per-run trace file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub format_version: u32,
    pub config_hash: String,
    pub instance: String,
    pub replicate: usize,
    pub seed: u64,
    pub iteration: usize,
    pub lambda: Vec<f64>,
    /// Objective of the raw sample's item bits (original units), whether
    /// or not the sample was feasible.
    pub sample_cost: f64,
    pub feasible: bool,
    /// Present exactly when feasible; equals `sample_cost` then.
    pub cost: Option<f64>,
    /// Euclidean norm of the equality-form residual.
    pub g_norm: f64,
}

/// Campaign-level summary document (`summary.json`).
#[derive(Debug, Clone, Serialize)]
pub struct SummaryDoc {
    pub format_version: u32,
    pub config_hash: String,
    pub mode: String,
    pub replicates: usize,
    pub summary: crate::solver::SummaryStats,
}

/// Deterministic digest of the solver-relevant campaign configuration.
/// Worker count and output paths are deliberately excluded: they must not
/// change what gets computed.
pub fn config_hash(
    mode: &str,
    config: &crate::solver::SaimConfig,
    replicates: usize,
    instance_names: &[String],
) -> String {
    #[derive(Serialize)]
    struct Echo<'a> {
        format_version: u32,
        mode: &'a str,
        config: &'a crate::solver::SaimConfig,
        replicates: usize,
        instances: &'a [String],
    }
    let echo = Echo {
        format_version: FORMAT_VERSION,
        mode,
        config,
        replicates,
        instances: instance_names,
    };
    let json = serde_json::to_string(&echo).expect("config serializes infallibly");
    let digest = Sha256::digest(json.as_bytes());
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    hex[..16].to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_config() -> crate::solver::SaimConfig {
        crate::solver::SaimConfig {
            alpha: 2.0,
            penalty_override: None,
            eta: 20.0,
            runs: 10,
            mcs_per_run: 100,
            beta_max: 10.0,
            seed: 7,
            stream: 0,
        }
    }

    #[test]
    fn config_hash_is_stable_and_sensitive() {
        let names = vec!["a".to_string(), "b".to_string()];
        let h1 = config_hash("saim", &sample_config(), 3, &names);
        let h2 = config_hash("saim", &sample_config(), 3, &names);
        assert_eq!(h1, h2);
        assert_eq!(h1.len(), 16);

        let mut other = sample_config();
        other.seed = 8;
        assert_ne!(h1, config_hash("saim", &other, 3, &names));
        assert_ne!(h1, config_hash("penalty", &sample_config(), 3, &names));
    }

    #[test]
    fn run_record_round_trips_through_json() {
        let record = RunRecord {
            format_version: FORMAT_VERSION,
            config_hash: "abc".into(),
            instance: "i".into(),
            replicate: 0,
            seed: 1,
            stream: 2,
            mode: "saim".into(),
            n_items: 5,
            n_spins: 8,
            n_constraints: 1,
            density: 0.5,
            penalty: 8.0,
            scale_obj: 100.0,
            scale_con: 50.0,
            opt: None,
            best_cost: Some(-42.0),
            best_cost_normalized: Some(-0.42),
            accuracy: None,
            feasibility_pct: 50.0,
            total_sweeps: 1000,
        };
        let line = serde_json::to_string(&record).unwrap();
        // unknown optimum serializes as null, not 0
        assert!(line.contains("\"accuracy\":null"));
        let back: RunRecord = serde_json::from_str(&line).unwrap();
        assert_eq!(back, record);
    }
}

//! Text formats for knapsack instances.
//!
//! Three layouts are supported:
//!
//! 1. **OR-Library MKP**: a whitespace-delimited numeric stream. The first
//!    token is the number of instances in the file; each instance is
//!    `n m opt`, then `n` profits, then `m` rows of `n` weights, then `m`
//!    capacities. A zero header optimum means "unknown".
//! 2. **Community QKP**: a name line, then `n`, a line of `n` linear
//!    values, `n-1` upper-triangular rows of pairwise values, a constraint
//!    type token (`0` for the knapsack inequality), the capacity, and a
//!    line of `n` weights.
//! 3. **Canonical JSON**: a self-describing versioned document
//!    (`"format": "saim-instance", "version": 1`) carrying either family
//!    with explicit field names. This is the repository's own format and
//!    the one `generate` emits.
//!
//! All text parsing is whitespace-tolerant and line-ending agnostic;
//! errors carry the 1-based token position.

use super::{Instance, InstanceError, MkpInstance, QkpInstance};
use serde::{Deserialize, Serialize};

pub const CANONICAL_FORMAT: &str = "saim-instance";
pub const CANONICAL_VERSION: u32 = 1;

/// Whitespace tokenizer that tracks the 1-based token position for errors.
struct Tokens<'a> {
    iter: std::str::SplitWhitespace<'a>,
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            iter: text.split_whitespace(),
            pos: 0,
        }
    }

    fn next_raw(&mut self, what: &str) -> Result<&'a str, InstanceError> {
        self.pos += 1;
        self.iter.next().ok_or_else(|| InstanceError::Parse {
            token: self.pos,
            message: format!("unexpected end of input, expected {what}"),
        })
    }

    fn next_i64(&mut self, what: &str) -> Result<i64, InstanceError> {
        let raw = self.next_raw(what)?;
        raw.parse().map_err(|_| InstanceError::Parse {
            token: self.pos,
            message: format!("expected {what}, found {raw:?}"),
        })
    }

    fn next_usize(&mut self, what: &str) -> Result<usize, InstanceError> {
        let v = self.next_i64(what)?;
        usize::try_from(v).map_err(|_| InstanceError::Parse {
            token: self.pos,
            message: format!("expected nonnegative {what}, found {v}"),
        })
    }

    fn expect_end(&mut self) -> Result<(), InstanceError> {
        if self.iter.next().is_some() {
            return Err(InstanceError::Parse {
                token: self.pos + 1,
                message: "trailing data after the last instance".into(),
            });
        }
        Ok(())
    }
}

/// Parses an OR-Library MKP file, possibly containing several instances.
/// Header optima of zero leave `opt` unset; nonzero optima are stored with
/// the minimization sign convention (negated).
pub fn load_mkp_orlib(text: &str) -> Result<Vec<MkpInstance>, InstanceError> {
    let mut tokens = Tokens::new(text);
    let count = tokens.next_usize("instance count")?;
    if count == 0 {
        return Err(InstanceError::Parse {
            token: tokens.pos,
            message: "instance count must be positive".into(),
        });
    }
    let mut instances = Vec::with_capacity(count);
    for idx in 0..count {
        let n = tokens.next_usize("item count n")?;
        let m = tokens.next_usize("constraint count m")?;
        let opt_raw = tokens.next_i64("header optimum")?;
        let mut item_values = Vec::with_capacity(n);
        for _ in 0..n {
            let v = tokens.next_i64("profit")?;
            if v < 0 {
                return Err(InstanceError::Parse {
                    token: tokens.pos,
                    message: format!("negative profit {v}"),
                });
            }
            item_values.push(v);
        }
        let mut weights = Vec::with_capacity(m);
        for _ in 0..m {
            let mut row = Vec::with_capacity(n);
            for _ in 0..n {
                let w = tokens.next_i64("weight")?;
                if w < 0 {
                    return Err(InstanceError::Parse {
                        token: tokens.pos,
                        message: format!("negative weight {w}"),
                    });
                }
                row.push(w);
            }
            weights.push(row);
        }
        let mut capacities = Vec::with_capacity(m);
        for _ in 0..m {
            let b = tokens.next_i64("capacity")?;
            if b < 1 {
                return Err(InstanceError::Parse {
                    token: tokens.pos,
                    message: format!("capacity {b} must be positive"),
                });
            }
            capacities.push(b);
        }
        let instance = MkpInstance {
            name: format!("{}_{}_{}", n, m, idx + 1),
            n,
            m,
            item_values,
            weights,
            capacities,
            opt: (opt_raw != 0).then_some(-(opt_raw as f64)),
        };
        instance.validate()?;
        instances.push(instance);
    }
    tokens.expect_end()?;
    Ok(instances)
}

/// Serializes MKP instances back into the OR-Library layout.
pub fn write_mkp_orlib(instances: &[MkpInstance]) -> String {
    let mut out = String::new();
    out.push_str(&format!("{}\n", instances.len()));
    for inst in instances {
        let opt = inst.opt.map_or(0i64, |o| (-o).round() as i64);
        out.push_str(&format!("{} {} {}\n", inst.n, inst.m, opt));
        out.push_str(&join(&inst.item_values));
        out.push('\n');
        for row in &inst.weights {
            out.push_str(&join(row));
            out.push('\n');
        }
        out.push_str(&join(&inst.capacities));
        out.push('\n');
    }
    out
}

fn join(values: &[i64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Parses one community-format QKP file.
pub fn load_qkp(text: &str) -> Result<QkpInstance, InstanceError> {
    let name = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty())
        .ok_or(InstanceError::Parse {
            token: 1,
            message: "empty file, expected a name line".into(),
        })?
        .to_string();
    let rest = &text[text.find(&name).expect("name came from text") + name.len()..];

    let mut tokens = Tokens::new(rest);
    let n = tokens.next_usize("item count n")?;
    if n < 1 {
        return Err(InstanceError::Parse {
            token: tokens.pos,
            message: "item count must be positive".into(),
        });
    }
    let mut item_values = Vec::with_capacity(n);
    for _ in 0..n {
        item_values.push(tokens.next_i64("linear value")?);
    }
    let mut pair_values = vec![vec![0i64; n]; n];
    #[allow(clippy::needless_range_loop)] // writes both triangles
    for i in 0..n {
        for j in (i + 1)..n {
            let v = tokens.next_i64("pairwise value")?;
            pair_values[i][j] = v;
            pair_values[j][i] = v;
        }
    }
    let ctype = tokens.next_i64("constraint type")?;
    if ctype != 0 {
        return Err(InstanceError::Parse {
            token: tokens.pos,
            message: format!("unsupported constraint type {ctype}, expected 0 (inequality)"),
        });
    }
    let capacity = tokens.next_i64("capacity")?;
    let mut weights = Vec::with_capacity(n);
    for _ in 0..n {
        weights.push(tokens.next_i64("weight")?);
    }
    tokens.expect_end()?;

    let mut instance = QkpInstance {
        name,
        n,
        density: 0.0,
        pair_values,
        item_values,
        weights,
        capacity,
        opt: None,
    };
    instance.density = instance.measured_density();
    instance.validate()?;
    Ok(instance)
}

/// Serializes a QKP instance into the community layout.
pub fn write_qkp(instance: &QkpInstance) -> String {
    let n = instance.n;
    let mut out = String::new();
    out.push_str(&instance.name);
    out.push('\n');
    out.push_str(&format!("{n}\n"));
    out.push_str(&join(&instance.item_values));
    out.push('\n');
    for i in 0..n.saturating_sub(1) {
        let row: Vec<i64> = ((i + 1)..n).map(|j| instance.pair_values[i][j]).collect();
        out.push_str(&join(&row));
        out.push('\n');
    }
    out.push_str("0\n");
    out.push_str(&format!("{}\n", instance.capacity));
    out.push_str(&join(&instance.weights));
    out.push('\n');
    out
}

#[derive(Serialize, Deserialize)]
struct CanonicalDoc {
    format: String,
    version: u32,
    #[serde(flatten)]
    instance: Instance,
}

/// Parses the canonical JSON document.
pub fn load_canonical(text: &str) -> Result<Instance, InstanceError> {
    let doc: CanonicalDoc = serde_json::from_str(text).map_err(|e| InstanceError::Parse {
        token: 0,
        message: e.to_string(),
    })?;
    if doc.format != CANONICAL_FORMAT {
        return Err(InstanceError::BadHeader(format!(
            "format {:?}, expected {CANONICAL_FORMAT:?}",
            doc.format
        )));
    }
    if doc.version != CANONICAL_VERSION {
        return Err(InstanceError::BadHeader(format!(
            "version {}, expected {CANONICAL_VERSION}",
            doc.version
        )));
    }
    match &doc.instance {
        Instance::Qkp(i) => i.validate()?,
        Instance::Mkp(i) => i.validate()?,
    }
    Ok(doc.instance)
}

/// Serializes an instance into the canonical JSON document.
pub fn write_canonical(instance: &Instance) -> String {
    let doc = CanonicalDoc {
        format: CANONICAL_FORMAT.into(),
        version: CANONICAL_VERSION,
        instance: instance.clone(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("instances serialize infallibly");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{generate_mkp, generate_qkp};
    use proptest::prelude::*;

    #[test]
    fn parses_crafted_orlib_text() {
        let parsed = load_mkp_orlib("1 2 1 10 5 3 4 2 6").unwrap();
        assert_eq!(parsed.len(), 1);
        let inst = &parsed[0];
        assert_eq!(inst.n, 2);
        assert_eq!(inst.m, 1);
        assert_eq!(inst.item_values, vec![5, 3]);
        assert_eq!(inst.weights, vec![vec![4, 2]]);
        assert_eq!(inst.capacities, vec![6]);
        assert_eq!(inst.opt, Some(-10.0));
    }

    #[test]
    fn zero_header_optimum_means_unknown() {
        let parsed = load_mkp_orlib("1 2 1 0 5 3 4 2 6").unwrap();
        assert_eq!(parsed[0].opt, None);
    }

    #[test]
    fn orlib_rejects_malformed_streams() {
        assert!(matches!(
            load_mkp_orlib(""),
            Err(InstanceError::Parse { token: 1, .. })
        ));
        // truncated after the profits
        assert!(load_mkp_orlib("1 2 1 10 5 3").is_err());
        // negative weight
        let err = load_mkp_orlib("1 2 1 10 5 3 -4 2 6").unwrap_err();
        assert!(matches!(err, InstanceError::Parse { token: 7, .. }), "{err}");
        // surplus instance data after the declared count
        assert!(load_mkp_orlib("1 2 1 10 5 3 4 2 6 99").is_err());
        // non-numeric token
        assert!(load_mkp_orlib("1 2 x 10 5 3 4 2 6").is_err());
    }

    #[test]
    fn parses_crafted_qkp_text() {
        let text = "toy2\n2\n3 1\n4\n0\n4\n2 3\n";
        let inst = load_qkp(text).unwrap();
        assert_eq!(inst.name, "toy2");
        assert_eq!(inst.n, 2);
        assert_eq!(inst.item_values, vec![3, 1]);
        assert_eq!(inst.pair_values, vec![vec![0, 4], vec![4, 0]]);
        assert_eq!(inst.capacity, 4);
        assert_eq!(inst.weights, vec![2, 3]);
        // symmetry of the assembled matrix
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(inst.pair_values[i][j], inst.pair_values[j][i]);
            }
        }
    }

    #[test]
    fn qkp_rejects_malformed_files() {
        assert!(load_qkp("").is_err());
        assert!(load_qkp("name\n2\n3 1\n4\n1\n4\n2 3\n").is_err()); // bad type
        assert!(load_qkp("name\n2\n3 1\n4\n0\n4\n2\n").is_err()); // truncated
        assert!(load_qkp("name\n2\n3 1\n4\n0\n4\n2 3 9\n").is_err()); // trailing
    }

    #[test]
    fn canonical_round_trip_exact() {
        let qkp = Instance::Qkp(generate_qkp(7, 0.6, 3, (1, 40), (1, 12)).unwrap());
        let text = write_canonical(&qkp);
        assert_eq!(load_canonical(&text).unwrap(), qkp);

        let mkp = Instance::Mkp(generate_mkp(6, 2, 4, 0.5, (1, 30)).unwrap());
        let text = write_canonical(&mkp);
        assert_eq!(load_canonical(&text).unwrap(), mkp);
    }

    #[test]
    fn canonical_rejects_wrong_header() {
        let qkp = Instance::Qkp(generate_qkp(4, 0.5, 0, (1, 10), (1, 5)).unwrap());
        let text = write_canonical(&qkp);
        let bad_format = text.replace("saim-instance", "other-format");
        assert!(matches!(
            load_canonical(&bad_format),
            Err(InstanceError::BadHeader(_))
        ));
        let bad_version = text.replace("\"version\": 1", "\"version\": 9");
        assert!(matches!(
            load_canonical(&bad_version),
            Err(InstanceError::BadHeader(_))
        ));
        assert!(load_canonical("{}").is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn orlib_reparse_is_identity(
            n in 2usize..12,
            m in 1usize..4,
            seed in 0u64..1000,
            tightness in 0.2f64..0.9,
        ) {
            let inst = generate_mkp(n, m, seed, tightness, (1, 50)).unwrap();
            let text = write_mkp_orlib(&[inst]);
            let first = load_mkp_orlib(&text).unwrap();
            let second = load_mkp_orlib(&write_mkp_orlib(&first)).unwrap();
            prop_assert_eq!(first, second);
        }

        #[test]
        fn qkp_reparse_is_identity(
            n in 2usize..12,
            seed in 0u64..1000,
            density in 0.2f64..1.0,
        ) {
            let inst = generate_qkp(n, density, seed, (1, 90), (1, 40)).unwrap();
            let text = write_qkp(&inst);
            let first = load_qkp(&text).unwrap();
            let second = load_qkp(&write_qkp(&first)).unwrap();
            prop_assert_eq!(first, second);
        }

        #[test]
        fn canonical_reparse_preserves_everything(
            n in 2usize..10,
            seed in 0u64..1000,
        ) {
            let mut inst = generate_qkp(n, 0.5, seed, (1, 60), (1, 20)).unwrap();
            inst.opt = Some(-123.5);
            let wrapped = Instance::Qkp(inst);
            let reparsed = load_canonical(&write_canonical(&wrapped)).unwrap();
            prop_assert_eq!(reparsed, wrapped);
        }
    }
}

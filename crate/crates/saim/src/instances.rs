//! Knapsack instance types, generators, and the mapping into the solver's
//! minimization form. Instances are stored with positive coefficients, the
//! way the benchmark files carry them; [`Instance::to_problem`] applies
//! the minimization negation.
//!
//! Text formats (OR-Library MKP, community QKP, canonical JSON) live in
//! [`formats`].

pub mod formats;

use crate::model::{ConstrainedQuadraticProblem, ConstraintSense, ModelError, ObjectiveKind};
use ndarray::{Array1, Array2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum InstanceError {
    #[error("parse error at token {token}: {message}")]
    Parse { token: usize, message: String },
    #[error("unsupported instance document: {0}")]
    BadHeader(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
}

/// Quadratic knapsack: items with individual values, pairwise values for
/// selecting pairs, one capacity constraint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QkpInstance {
    pub name: String,
    pub n: usize,
    /// Nominal density of the pairwise value matrix.
    pub density: f64,
    /// Symmetric n-by-n pairwise values, zero diagonal.
    pub pair_values: Vec<Vec<i64>>,
    /// Individual item values.
    pub item_values: Vec<i64>,
    pub weights: Vec<i64>,
    pub capacity: i64,
    /// Known optimal cost in minimization convention (negative), if any.
    pub opt: Option<f64>,
}

impl QkpInstance {
    pub fn validate(&self) -> Result<(), InstanceError> {
        let n = self.n;
        if n < 1 {
            return Err(InstanceError::InvalidInstance("empty instance".into()));
        }
        if self.pair_values.len() != n
            || self.pair_values.iter().any(|r| r.len() != n)
            || self.item_values.len() != n
            || self.weights.len() != n
        {
            return Err(InstanceError::InvalidInstance(
                "inconsistent dimensions".into(),
            ));
        }
        for i in 0..n {
            if self.pair_values[i][i] != 0 {
                return Err(InstanceError::InvalidInstance(
                    "pairwise values must have zero diagonal".into(),
                ));
            }
            for j in 0..n {
                if self.pair_values[i][j] != self.pair_values[j][i] {
                    return Err(InstanceError::InvalidInstance(
                        "pairwise values must be symmetric".into(),
                    ));
                }
                if self.pair_values[i][j] < 0 {
                    return Err(InstanceError::InvalidInstance(
                        "pairwise values must be nonnegative".into(),
                    ));
                }
            }
        }
        if self.item_values.iter().any(|&v| v < 0) {
            return Err(InstanceError::InvalidInstance(
                "item values must be nonnegative".into(),
            ));
        }
        if self.weights.iter().any(|&w| w < 1) {
            return Err(InstanceError::InvalidInstance(
                "weights must be positive".into(),
            ));
        }
        if self.capacity < 1 {
            return Err(InstanceError::InvalidInstance(
                "capacity must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Fraction of nonzero strictly-upper pairwise values.
    pub fn measured_density(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let mut nonzero = 0usize;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.pair_values[i][j] != 0 {
                    nonzero += 1;
                }
            }
        }
        nonzero as f64 / (self.n * (self.n - 1) / 2) as f64
    }
}

/// Multidimensional knapsack: linear item values under several capacity
/// constraints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MkpInstance {
    pub name: String,
    pub n: usize,
    pub m: usize,
    pub item_values: Vec<i64>,
    /// m rows of n weights.
    pub weights: Vec<Vec<i64>>,
    pub capacities: Vec<i64>,
    /// Known optimal cost in minimization convention (negative), if any.
    pub opt: Option<f64>,
}

impl MkpInstance {
    pub fn validate(&self) -> Result<(), InstanceError> {
        if self.n < 1 || self.m < 1 {
            return Err(InstanceError::InvalidInstance("empty instance".into()));
        }
        if self.item_values.len() != self.n
            || self.weights.len() != self.m
            || self.weights.iter().any(|r| r.len() != self.n)
            || self.capacities.len() != self.m
        {
            return Err(InstanceError::InvalidInstance(
                "inconsistent dimensions".into(),
            ));
        }
        if self.item_values.iter().any(|&v| v < 0) {
            return Err(InstanceError::InvalidInstance(
                "item values must be nonnegative".into(),
            ));
        }
        if self.weights.iter().flatten().any(|&w| w < 0) {
            return Err(InstanceError::InvalidInstance(
                "weights must be nonnegative".into(),
            ));
        }
        if self.capacities.iter().any(|&b| b < 1) {
            return Err(InstanceError::InvalidInstance(
                "capacities must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Either knapsack family, as held by loaders and the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Instance {
    Qkp(QkpInstance),
    Mkp(MkpInstance),
}

impl Instance {
    pub fn name(&self) -> &str {
        match self {
            Instance::Qkp(i) => &i.name,
            Instance::Mkp(i) => &i.name,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Instance::Qkp(i) => i.n,
            Instance::Mkp(i) => i.n,
        }
    }

    pub fn opt(&self) -> Option<f64> {
        match self {
            Instance::Qkp(i) => i.opt,
            Instance::Mkp(i) => i.opt,
        }
    }

    pub fn to_problem(&self) -> Result<ConstrainedQuadraticProblem, ModelError> {
        match self {
            Instance::Qkp(i) => to_problem_qkp(i),
            Instance::Mkp(i) => to_problem_mkp(i),
        }
    }
}

/// Generates a random QKP instance: each strictly-upper pairwise value is
/// nonzero with probability `density` and uniform in `value_range`, as are
/// the item values; weights are uniform in `weight_range`; the capacity is
/// uniform between the largest single weight and the total weight.
/// Deterministic in `seed`.
pub fn generate_qkp(
    n: usize,
    density: f64,
    seed: u64,
    value_range: (i64, i64),
    weight_range: (i64, i64),
) -> Result<QkpInstance, InstanceError> {
    if n < 2 {
        return Err(InstanceError::InvalidParameter("n must be >= 2".into()));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(InstanceError::InvalidParameter(
            "density must lie in (0, 1]".into(),
        ));
    }
    check_range("value_range", value_range, 0)?;
    check_range("weight_range", weight_range, 1)?;

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let (vlo, vhi) = value_range;
    let (wlo, whi) = weight_range;

    let mut pair_values = vec![vec![0i64; n]; n];
    #[allow(clippy::needless_range_loop)] // writes both triangles
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < density {
                let v = rng.random_range(vlo..=vhi);
                pair_values[i][j] = v;
                pair_values[j][i] = v;
            }
        }
    }
    let item_values: Vec<i64> = (0..n)
        .map(|_| {
            if rng.random::<f64>() < density {
                rng.random_range(vlo..=vhi)
            } else {
                0
            }
        })
        .collect();
    let weights: Vec<i64> = (0..n).map(|_| rng.random_range(wlo..=whi)).collect();
    let max_w = *weights.iter().max().expect("n >= 2");
    let total_w: i64 = weights.iter().sum();
    let capacity = rng.random_range(max_w..=total_w);

    let instance = QkpInstance {
        name: format!("qkp_{}_{}_{}", n, (density * 100.0).round() as i64, seed),
        n,
        density,
        pair_values,
        item_values,
        weights,
        capacity,
        opt: None,
    };
    instance.validate()?;
    Ok(instance)
}

/// Generates a random MKP instance: weights uniform in `weight_range`,
/// capacities a `tightness` fraction of each row's total weight, and item
/// values correlated with the item's average weight plus uniform noise.
/// Deterministic in `seed`.
pub fn generate_mkp(
    n: usize,
    m: usize,
    seed: u64,
    tightness: f64,
    weight_range: (i64, i64),
) -> Result<MkpInstance, InstanceError> {
    if n < 2 {
        return Err(InstanceError::InvalidParameter("n must be >= 2".into()));
    }
    if m < 1 {
        return Err(InstanceError::InvalidParameter("m must be >= 1".into()));
    }
    if !(tightness > 0.0 && tightness <= 1.0) {
        return Err(InstanceError::InvalidParameter(
            "tightness must lie in (0, 1]".into(),
        ));
    }
    check_range("weight_range", weight_range, 1)?;

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let (wlo, whi) = weight_range;
    let weights: Vec<Vec<i64>> = (0..m)
        .map(|_| (0..n).map(|_| rng.random_range(wlo..=whi)).collect())
        .collect();
    let item_values: Vec<i64> = (0..n)
        .map(|j| {
            let avg: i64 = weights.iter().map(|row| row[j]).sum::<i64>() / m as i64;
            avg + rng.random_range(0..=whi)
        })
        .collect();
    let capacities: Vec<i64> = weights
        .iter()
        .map(|row| {
            let total: i64 = row.iter().sum();
            ((total as f64 * tightness).floor() as i64).max(1)
        })
        .collect();

    let instance = MkpInstance {
        name: format!("mkp_{n}_{m}_{seed}"),
        n,
        m,
        item_values,
        weights,
        capacities,
        opt: None,
    };
    instance.validate()?;
    Ok(instance)
}

fn check_range(what: &str, range: (i64, i64), min_lo: i64) -> Result<(), InstanceError> {
    if range.0 < min_lo || range.1 < range.0 {
        return Err(InstanceError::InvalidParameter(format!(
            "{what} ({}, {}) is not a valid range with lower bound >= {min_lo}",
            range.0, range.1
        )));
    }
    Ok(())
}

/// QKP in minimization form: `min -1/2 x'Wx - h'x` subject to `a'x <= b`.
fn to_problem_qkp(instance: &QkpInstance) -> Result<ConstrainedQuadraticProblem, ModelError> {
    let n = instance.n;
    let w = Array2::from_shape_fn((n, n), |(i, j)| -instance.pair_values[i][j] as f64);
    let h = Array1::from_shape_fn(n, |i| -instance.item_values[i] as f64);
    let a = Array2::from_shape_fn((1, n), |(_, i)| instance.weights[i] as f64);
    let b = Array1::from_elem(1, instance.capacity as f64);
    ConstrainedQuadraticProblem::new(
        w,
        h,
        a,
        b,
        vec![ConstraintSense::LessEq],
        ObjectiveKind::Quadratic,
    )
}

/// MKP in minimization form: `min -h'x` subject to `Ax <= B`.
fn to_problem_mkp(instance: &MkpInstance) -> Result<ConstrainedQuadraticProblem, ModelError> {
    let n = instance.n;
    let m = instance.m;
    let h = Array1::from_shape_fn(n, |i| -instance.item_values[i] as f64);
    let a = Array2::from_shape_fn((m, n), |(r, i)| instance.weights[r][i] as f64);
    let b = Array1::from_shape_fn(m, |r| instance.capacities[r] as f64);
    ConstrainedQuadraticProblem::new(
        Array2::zeros((n, n)),
        h,
        a,
        b,
        vec![ConstraintSense::LessEq; m],
        ObjectiveKind::Linear,
    )
}

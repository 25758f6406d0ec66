//! Problem and energy representations, plus the exact algebraic
//! transformations between them: a constrained quadratic problem over
//! binary variables is compiled into a penalized Lagrangian energy,
//! which in turn maps onto spin couplings for the sampler.
//!
//! All types are immutable after construction and all operations are
//! pure functions, so values can be shared freely across threads.

use ndarray::{Array1, Array2};
use thiserror::Error;

/// Exhaustive checks use this tolerance when comparing energies computed
/// along different algebraic routes.
pub const ENERGY_EPS: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("dimension mismatch: expected {expected}, got {got} ({what})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("objective matrix must be symmetric with zero diagonal")]
    MalformedObjective,
    #[error("coupling matrix must be symmetric with zero diagonal")]
    MalformedCoupling,
    #[error("quadratic coefficients must be strictly upper-triangular")]
    NotUpperTriangular,
    #[error("capacity {value} in row {row} must be positive")]
    NonPositiveCapacity { row: usize, value: f64 },
    #[error("capacity {value} in row {row} must be an integer to admit a binary slack decomposition")]
    NonIntegerCapacity { row: usize, value: f64 },
    #[error("row {row} already has equality sense; slack variables apply to inequality rows only")]
    AlreadyEquality { row: usize },
    #[error("slack variables were already added")]
    SlackAlreadyPresent,
    #[error("cannot normalize: all objective coefficients are zero")]
    ZeroObjective,
    #[error("cannot normalize: all constraint coefficients are zero")]
    ZeroConstraints,
    #[error("operation requires the problem in equality form (add slack variables first)")]
    NotEqualityForm,
}

/// Sense of one linear constraint row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintSense {
    /// `a·x <= b`
    LessEq,
    /// `a·x = b`
    Equal,
}

/// Whether the objective carries pairwise terms. Decides how the coupling
/// density is measured: linear objectives have no pairwise couplings of
/// their own and use the `2/(N+1)` surrogate instead.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveKind {
    Quadratic,
    Linear,
}

/// Placement of the binary slack bits appended to one constraint row.
/// The bit at `start + q` carries weight `2^q`, so the weights are exactly
/// `1, 2, ..., 2^(bits-1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlackRow {
    pub constraint: usize,
    pub start: usize,
    pub bits: usize,
}

/// Records which variables of an extended problem are slack bits.
/// Variables `0..n_items` are the original decision variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlackLayout {
    pub n_items: usize,
    pub rows: Vec<SlackRow>,
}

/// A quadratic objective with linear constraints over binary variables:
/// minimize `f(x) = 1/2 x'Wx + h'x` subject to `Ax <= b` (or `= b`).
///
/// `W` is symmetric with zero diagonal; diagonal contributions belong in
/// `h` because `x_i^2 = x_i` for binary `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstrainedQuadraticProblem {
    w: Array2<f64>,
    h: Array1<f64>,
    a: Array2<f64>,
    b: Array1<f64>,
    senses: Vec<ConstraintSense>,
    kind: ObjectiveKind,
    slack: Option<SlackLayout>,
}

impl ConstrainedQuadraticProblem {
    pub fn new(
        w: Array2<f64>,
        h: Array1<f64>,
        a: Array2<f64>,
        b: Array1<f64>,
        senses: Vec<ConstraintSense>,
        kind: ObjectiveKind,
    ) -> Result<Self, ModelError> {
        let n = h.len();
        if w.nrows() != n || w.ncols() != n {
            return Err(ModelError::DimensionMismatch {
                what: "objective matrix",
                expected: n,
                got: w.nrows().max(w.ncols()),
            });
        }
        let m = b.len();
        if a.nrows() != m || (m > 0 && a.ncols() != n) {
            return Err(ModelError::DimensionMismatch {
                what: "constraint matrix",
                expected: m * n,
                got: a.nrows() * a.ncols(),
            });
        }
        if senses.len() != m {
            return Err(ModelError::DimensionMismatch {
                what: "constraint senses",
                expected: m,
                got: senses.len(),
            });
        }
        for i in 0..n {
            if w[[i, i]] != 0.0 {
                return Err(ModelError::MalformedObjective);
            }
            for j in (i + 1)..n {
                if w[[i, j]] != w[[j, i]] {
                    return Err(ModelError::MalformedObjective);
                }
            }
        }
        for (row, &cap) in b.iter().enumerate() {
            if cap.is_nan() || cap <= 0.0 {
                return Err(ModelError::NonPositiveCapacity { row, value: cap });
            }
        }
        Ok(Self {
            w,
            h,
            a,
            b,
            senses,
            kind,
            slack: None,
        })
    }

    pub fn n_vars(&self) -> usize {
        self.h.len()
    }

    /// Count of original decision variables (excludes slack bits).
    pub fn n_items(&self) -> usize {
        self.slack.as_ref().map_or(self.n_vars(), |s| s.n_items)
    }

    pub fn n_constraints(&self) -> usize {
        self.b.len()
    }

    pub fn w(&self) -> &Array2<f64> {
        &self.w
    }

    pub fn h(&self) -> &Array1<f64> {
        &self.h
    }

    pub fn a(&self) -> &Array2<f64> {
        &self.a
    }

    pub fn b(&self) -> &Array1<f64> {
        &self.b
    }

    pub fn senses(&self) -> &[ConstraintSense] {
        &self.senses
    }

    pub fn kind(&self) -> ObjectiveKind {
        self.kind
    }

    pub fn slack_layout(&self) -> Option<&SlackLayout> {
        self.slack.as_ref()
    }

    pub fn is_equality_form(&self) -> bool {
        self.senses.iter().all(|s| *s == ConstraintSense::Equal)
    }
}

/// Penalty weight and Lagrange multipliers entering the compiled energy
/// `L(x) = f(x) + P ||g(x)||^2 + lambda' g(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangeState {
    pub penalty: f64,
    pub lambda: Array1<f64>,
}

impl LagrangeState {
    pub fn new(penalty: f64, lambda: Array1<f64>) -> Self {
        Self { penalty, lambda }
    }

    /// Penalty-only state: `lambda = 0`.
    pub fn penalty_only(penalty: f64, n_constraints: usize) -> Self {
        Self {
            penalty,
            lambda: Array1::zeros(n_constraints),
        }
    }
}

/// Compiled energy over binary variables:
/// `energy(x) = sum_{i<j} quad[i][j] x_i x_j + sum_i lin[i] x_i + constant`.
/// `quad` is strictly upper-triangular.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryQuadraticEnergy {
    quad: Array2<f64>,
    lin: Array1<f64>,
    constant: f64,
}

impl BinaryQuadraticEnergy {
    pub fn new(quad: Array2<f64>, lin: Array1<f64>, constant: f64) -> Result<Self, ModelError> {
        let n = lin.len();
        if quad.nrows() != n || quad.ncols() != n {
            return Err(ModelError::DimensionMismatch {
                what: "quadratic coefficients",
                expected: n,
                got: quad.nrows().max(quad.ncols()),
            });
        }
        for i in 0..n {
            for j in 0..=i {
                if quad[[i, j]] != 0.0 {
                    return Err(ModelError::NotUpperTriangular);
                }
            }
        }
        Ok(Self {
            quad,
            lin,
            constant,
        })
    }

    pub fn n_vars(&self) -> usize {
        self.lin.len()
    }

    pub fn quad(&self) -> &Array2<f64> {
        &self.quad
    }

    pub fn lin(&self) -> &Array1<f64> {
        &self.lin
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    /// Exact evaluation at a binary point.
    pub fn energy(&self, x: &[u8]) -> f64 {
        let n = self.n_vars();
        assert_eq!(x.len(), n, "binary state length mismatch");
        let mut total = self.constant;
        for i in 0..n {
            if x[i] == 0 {
                continue;
            }
            total += self.lin[i];
            for (j, &xj) in x.iter().enumerate().skip(i + 1) {
                if xj != 0 {
                    total += self.quad[[i, j]];
                }
            }
        }
        total
    }
}

/// Spin-side coefficients: `H(m) = -sum_{i<j} J_ij m_i m_j - sum_i h_i m_i + constant`
/// over `m in {-1,+1}^N`. `J` is symmetric with zero diagonal, and the
/// constant keeps `H` exactly equal to the source binary energy under
/// `x = (m+1)/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingCoefficients {
    j: Array2<f64>,
    h_field: Array1<f64>,
    constant: f64,
}

impl IsingCoefficients {
    pub fn new(j: Array2<f64>, h_field: Array1<f64>, constant: f64) -> Result<Self, ModelError> {
        let n = h_field.len();
        if j.nrows() != n || j.ncols() != n {
            return Err(ModelError::DimensionMismatch {
                what: "coupling matrix",
                expected: n,
                got: j.nrows().max(j.ncols()),
            });
        }
        for i in 0..n {
            if j[[i, i]] != 0.0 {
                return Err(ModelError::MalformedCoupling);
            }
            for k in (i + 1)..n {
                if j[[i, k]] != j[[k, i]] {
                    return Err(ModelError::MalformedCoupling);
                }
            }
        }
        Ok(Self {
            j,
            h_field,
            constant,
        })
    }

    pub fn n_spins(&self) -> usize {
        self.h_field.len()
    }

    pub fn j(&self) -> &Array2<f64> {
        &self.j
    }

    pub fn h_field(&self) -> &Array1<f64> {
        &self.h_field
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    /// Hamiltonian value at a spin state.
    pub fn energy(&self, m: &[i8]) -> f64 {
        let n = self.n_spins();
        assert_eq!(m.len(), n, "spin state length mismatch");
        let mut pair = 0.0;
        for i in 0..n {
            let row = self.j.row(i);
            let mut acc = 0.0;
            for k in (i + 1)..n {
                acc += row[k] * f64::from(m[k]);
            }
            pair += f64::from(m[i]) * acc;
        }
        let field: f64 = self
            .h_field
            .iter()
            .zip(m)
            .map(|(h, &s)| h * f64::from(s))
            .sum();
        -pair - field + self.constant
    }

    /// Local input seen by spin `i`: `I_i = sum_j J_ij m_j + h_i`.
    pub fn local_field(&self, m: &[i8], i: usize) -> f64 {
        let row = self.j.row(i);
        let mut acc = 0.0;
        for (k, &s) in m.iter().enumerate() {
            acc += row[k] * f64::from(s);
        }
        acc + self.h_field[i]
    }

    /// Adds a linear binary term `sum_i lin[i] x_i + offset` to the
    /// Hamiltonian without touching the couplings. Used by the outer loop
    /// to fold multiplier terms into precompiled coefficients.
    pub fn with_linear_binary_term(&self, lin: &Array1<f64>, offset: f64) -> IsingCoefficients {
        assert_eq!(lin.len(), self.n_spins(), "linear term length mismatch");
        let mut h_field = self.h_field.clone();
        let mut constant = self.constant + offset;
        for (i, &l) in lin.iter().enumerate() {
            h_field[i] -= l / 2.0;
            constant += l / 2.0;
        }
        IsingCoefficients {
            j: self.j.clone(),
            h_field,
            constant,
        }
    }
}

/// Converts each `a·x <= b` row into `a·x + slack = b` by appending binary
/// slack bits with weights `1, 2, ..., 2^(Q-1)` where `Q = floor(log2 b) + 1`.
/// Capacities must be positive integers; the objective is zero-extended over
/// the new variables.
pub fn add_slack_variables(
    problem: &ConstrainedQuadraticProblem,
) -> Result<ConstrainedQuadraticProblem, ModelError> {
    if problem.slack.is_some() {
        return Err(ModelError::SlackAlreadyPresent);
    }
    let n = problem.n_vars();
    let m = problem.n_constraints();
    let mut bits = Vec::with_capacity(m);
    for row in 0..m {
        if problem.senses[row] != ConstraintSense::LessEq {
            return Err(ModelError::AlreadyEquality { row });
        }
        let cap = problem.b[row];
        if cap.fract() != 0.0 {
            return Err(ModelError::NonIntegerCapacity { row, value: cap });
        }
        if cap < 1.0 {
            return Err(ModelError::NonPositiveCapacity { row, value: cap });
        }
        // Q = floor(log2 b) + 1 is the bit length of the integer capacity.
        let q = 64 - (cap as u64).leading_zeros() as usize;
        bits.push(q);
    }

    let total_slack: usize = bits.iter().sum();
    let n_ext = n + total_slack;
    let mut w = Array2::zeros((n_ext, n_ext));
    w.slice_mut(ndarray::s![..n, ..n]).assign(&problem.w);
    let mut h = Array1::zeros(n_ext);
    h.slice_mut(ndarray::s![..n]).assign(&problem.h);
    let mut a = Array2::zeros((m, n_ext));
    a.slice_mut(ndarray::s![.., ..n]).assign(&problem.a);

    let mut rows = Vec::with_capacity(m);
    let mut next = n;
    for (row, &q) in bits.iter().enumerate() {
        for bit in 0..q {
            a[[row, next + bit]] = (1u64 << bit) as f64;
        }
        rows.push(SlackRow {
            constraint: row,
            start: next,
            bits: q,
        });
        next += q;
    }

    Ok(ConstrainedQuadraticProblem {
        w,
        h,
        a,
        b: problem.b.clone(),
        senses: vec![ConstraintSense::Equal; m],
        kind: problem.kind,
        slack: Some(SlackLayout {
            n_items: n,
            rows,
        }),
    })
}

/// Rescales the objective by `max(|W|,|h|)` and the constraints by
/// `max(|A|,|b|)`. The feasible set and the argmin set are unchanged;
/// only coefficient magnitudes shrink into `[-1, 1]`.
pub fn normalize(
    problem: &ConstrainedQuadraticProblem,
) -> Result<(ConstrainedQuadraticProblem, f64, f64), ModelError> {
    let scale_obj = problem
        .w
        .iter()
        .chain(problem.h.iter())
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    if scale_obj == 0.0 {
        return Err(ModelError::ZeroObjective);
    }
    let scale_con = problem
        .a
        .iter()
        .chain(problem.b.iter())
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    if scale_con == 0.0 {
        return Err(ModelError::ZeroConstraints);
    }
    let normalized = ConstrainedQuadraticProblem {
        w: &problem.w / scale_obj,
        h: &problem.h / scale_obj,
        a: &problem.a / scale_con,
        b: &problem.b / scale_con,
        senses: problem.senses.clone(),
        kind: problem.kind,
        slack: problem.slack.clone(),
    };
    Ok((normalized, scale_obj, scale_con))
}

/// Compiles `L(x) = f(x) + P ||Ax - b||^2 + lambda' (Ax - b)` into explicit
/// binary coefficients. Requires the problem in equality form. Squaring the
/// constraints produces diagonal terms `x_i^2` which fold into the linear
/// part; the multiplier term touches only `lin` and `constant`.
pub fn compile_energy(
    problem: &ConstrainedQuadraticProblem,
    state: &LagrangeState,
) -> Result<BinaryQuadraticEnergy, ModelError> {
    if !problem.is_equality_form() {
        return Err(ModelError::NotEqualityForm);
    }
    let m = problem.n_constraints();
    if state.lambda.len() != m {
        return Err(ModelError::DimensionMismatch {
            what: "multiplier vector",
            expected: m,
            got: state.lambda.len(),
        });
    }
    let n = problem.n_vars();
    let p = state.penalty;
    let a = &problem.a;
    let b = &problem.b;

    let mut quad = Array2::zeros((n, n));
    for i in 0..n {
        for jj in (i + 1)..n {
            let mut ata = 0.0;
            for r in 0..m {
                ata += a[[r, i]] * a[[r, jj]];
            }
            quad[[i, jj]] = problem.w[[i, jj]] + 2.0 * p * ata;
        }
    }

    let mut lin = problem.h.clone();
    for i in 0..n {
        let mut diag = 0.0;
        let mut atb = 0.0;
        let mut atl = 0.0;
        for r in 0..m {
            diag += a[[r, i]] * a[[r, i]];
            atb += a[[r, i]] * b[r];
            atl += a[[r, i]] * state.lambda[r];
        }
        lin[i] += p * (diag - 2.0 * atb) + atl;
    }

    let constant = p * b.dot(b) - state.lambda.dot(b);
    BinaryQuadraticEnergy::new(quad, lin, constant)
}

/// Change of variables `x = (m+1)/2` from binary coefficients to spin
/// couplings. Energy equivalence is exact: every offset lands in the
/// constant term.
pub fn to_ising(energy: &BinaryQuadraticEnergy) -> IsingCoefficients {
    let n = energy.n_vars();
    let mut j = Array2::zeros((n, n));
    let mut h_field = Array1::zeros(n);
    let mut constant = energy.constant;
    for i in 0..n {
        for k in (i + 1)..n {
            let q = energy.quad[[i, k]];
            if q == 0.0 {
                continue;
            }
            j[[i, k]] = -q / 4.0;
            j[[k, i]] = -q / 4.0;
            h_field[i] -= q / 4.0;
            h_field[k] -= q / 4.0;
            constant += q / 4.0;
        }
    }
    for i in 0..n {
        let l = energy.lin[i];
        h_field[i] -= l / 2.0;
        constant += l / 2.0;
    }
    IsingCoefficients {
        j,
        h_field,
        constant,
    }
}

fn check_state_len(problem: &ConstrainedQuadraticProblem, x: &[u8]) -> Result<(), ModelError> {
    if x.len() == problem.n_vars() || x.len() == problem.n_items() {
        Ok(())
    } else {
        Err(ModelError::DimensionMismatch {
            what: "binary state",
            expected: problem.n_vars(),
            got: x.len(),
        })
    }
}

/// Objective value `f(x) = 1/2 x'Wx + h'x`. Accepts either the full
/// variable vector or just the item bits (slack bits never contribute
/// to the objective).
pub fn evaluate_f(problem: &ConstrainedQuadraticProblem, x: &[u8]) -> Result<f64, ModelError> {
    check_state_len(problem, x)?;
    let mut total = 0.0;
    for (i, &xi) in x.iter().enumerate() {
        if xi == 0 {
            continue;
        }
        total += problem.h[i];
        for (k, &xk) in x.iter().enumerate().skip(i + 1) {
            if xk != 0 {
                total += problem.w[[i, k]];
            }
        }
    }
    Ok(total)
}

/// Constraint residual `g(x) = Ax - b` over the full variable vector.
pub fn evaluate_g(
    problem: &ConstrainedQuadraticProblem,
    x: &[u8],
) -> Result<Array1<f64>, ModelError> {
    if x.len() != problem.n_vars() {
        return Err(ModelError::DimensionMismatch {
            what: "binary state",
            expected: problem.n_vars(),
            got: x.len(),
        });
    }
    let m = problem.n_constraints();
    let mut g = Array1::zeros(m);
    for r in 0..m {
        let mut ax = 0.0;
        for (i, &xi) in x.iter().enumerate() {
            if xi != 0 {
                ax += problem.a[[r, i]];
            }
        }
        g[r] = ax - problem.b[r];
    }
    Ok(g)
}

/// Penalized Lagrangian `L(x) = f(x) + P ||g(x)||^2 + lambda' g(x)`,
/// evaluated directly (without compiling coefficients).
pub fn evaluate_lagrangian(
    problem: &ConstrainedQuadraticProblem,
    state: &LagrangeState,
    x: &[u8],
) -> Result<f64, ModelError> {
    if x.len() != problem.n_vars() {
        return Err(ModelError::DimensionMismatch {
            what: "binary state",
            expected: problem.n_vars(),
            got: x.len(),
        });
    }
    if state.lambda.len() != problem.n_constraints() {
        return Err(ModelError::DimensionMismatch {
            what: "multiplier vector",
            expected: problem.n_constraints(),
            got: state.lambda.len(),
        });
    }
    let f = evaluate_f(problem, x)?;
    let g = evaluate_g(problem, x)?;
    Ok(f + state.penalty * g.dot(&g) + state.lambda.dot(&g))
}

/// Fraction of nonzero strictly-upper entries of a coupling matrix.
pub fn coupling_density(j: &Array2<f64>) -> f64 {
    let n = j.nrows();
    if n < 2 {
        return 0.0;
    }
    let mut nonzero = 0usize;
    for i in 0..n {
        for k in (i + 1)..n {
            if j[[i, k]] != 0.0 {
                nonzero += 1;
            }
        }
    }
    nonzero as f64 / (n * (n - 1) / 2) as f64
}

/// Density `d` entering the penalty rule `P = alpha * d * N`, measured on
/// the problem as handed in (so after slack extension, over all N
/// variables). Quadratic objectives count their nonzero pairwise
/// couplings; linear objectives use the `2/(N+1)` surrogate, as if the
/// fields hung off one extra reference spin.
pub fn compute_density(problem: &ConstrainedQuadraticProblem) -> f64 {
    let n = problem.n_vars();
    match problem.kind {
        ObjectiveKind::Quadratic => coupling_density(&problem.w),
        ObjectiveKind::Linear => 2.0 / (n as f64 + 1.0),
    }
}

/// Index of a binary state: bit `i` of the result is `x[i]`.
pub fn bits_index(x: &[u8]) -> usize {
    x.iter()
        .enumerate()
        .fold(0usize, |acc, (i, &b)| acc | ((b as usize) << i))
}

/// Inverse of [`bits_index`].
pub fn index_bits(index: usize, n: usize) -> Vec<u8> {
    (0..n).map(|i| ((index >> i) & 1) as u8).collect()
}

/// Binary image of a spin state: `x = (m+1)/2`.
pub fn spins_to_bits(m: &[i8]) -> Vec<u8> {
    m.iter().map(|&s| if s > 0 { 1 } else { 0 }).collect()
}

/// Spin image of a binary state: `m = 2x - 1`.
pub fn bits_to_spins(x: &[u8]) -> Vec<i8> {
    x.iter().map(|&b| if b != 0 { 1 } else { -1 }).collect()
}

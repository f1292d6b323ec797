//! Sparse linear programs with bounded variables and an embedded simplex
//! solver.

mod lp_format;
mod lu;
mod simplex;

use serde::{Deserialize, Serialize};

pub use lp_format::write_lp_format;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub terms: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

/// A minimization problem `min c.x` subject to sparse rows and variable
/// bounds. Infinite bounds are allowed.
#[derive(Debug, Clone, Default)]
pub struct SparseLp {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub objective: Vec<f64>,
    pub rows: Vec<Constraint>,
}

impl SparseLp {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn add_var(&mut self, lower: f64, upper: f64, cost: f64) -> usize {
        self.lower.push(lower);
        self.upper.push(upper);
        self.objective.push(cost);
        self.objective.len() - 1
    }

    pub fn add_row(&mut self, terms: Vec<(usize, f64)>, relation: Relation, rhs: f64) -> usize {
        self.rows.push(Constraint {
            terms,
            relation,
            rhs,
        });
        self.rows.len() - 1
    }

    /// Checks the structural invariants: ordered finite-or-infinite bounds,
    /// finite coefficients and in-range column references.
    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.n_vars();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(LpError::Malformed("bound vectors differ in length".into()));
        }
        for j in 0..n {
            let (l, u) = (self.lower[j], self.upper[j]);
            if l.is_nan() || u.is_nan() || l > u || l == f64::INFINITY || u == f64::NEG_INFINITY {
                return Err(LpError::Malformed(format!(
                    "variable {j} has bounds [{l}, {u}]"
                )));
            }
            if !self.objective[j].is_finite() {
                return Err(LpError::Malformed(format!(
                    "variable {j} has non-finite cost"
                )));
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            if !row.rhs.is_finite() {
                return Err(LpError::Malformed(format!("row {i} has non-finite rhs")));
            }
            for &(j, a) in &row.terms {
                if j >= n {
                    return Err(LpError::Malformed(format!("row {i} references column {j}")));
                }
                if !a.is_finite() {
                    return Err(LpError::Malformed(format!(
                        "row {i} has non-finite coefficient"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn row_activity(&self, row: usize, x: &[f64]) -> f64 {
        self.rows[row].terms.iter().map(|&(j, a)| a * x[j]).sum()
    }

    pub fn objective_at(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum LpError {
    #[error("malformed LP: {0}")]
    Malformed(String),
    #[error("dimension mismatch: LP has {expected} variables, point has {got}")]
    Dimension { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisStatus {
    Basic,
    AtLower,
    AtUpper,
    Free,
}

/// Basis statuses for the structural variables and the row logicals.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    pub vars: Vec<BasisStatus>,
    pub rows: Vec<BasisStatus>,
}

impl Basis {
    /// Drop the first `var_shift` variables and `row_shift` rows, then pad the
    /// tail by repeating the last block of the same size. Used to roll a basis
    /// forward when the problem is laid out in uniform time blocks.
    pub fn shifted(&self, var_shift: usize, row_shift: usize) -> Basis {
        fn roll(v: &[BasisStatus], k: usize) -> Vec<BasisStatus> {
            if k == 0 || k > v.len() {
                return v.to_vec();
            }
            let mut out = v[k..].to_vec();
            out.extend_from_slice(&v[v.len() - k..]);
            out
        }
        Basis {
            vars: roll(&self.vars, var_shift),
            rows: roll(&self.rows, row_shift),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective_value: f64,
    pub iterations: usize,
    pub basis: Option<Basis>,
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Relative primal feasibility tolerance.
    pub feas_tol: f64,
    /// Reduced-cost tolerance on the scaled objective.
    pub opt_tol: f64,
    pub pivot_tol: f64,
    pub max_iterations: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            feas_tol: 1e-7,
            opt_tol: 1e-9,
            pivot_tol: 1e-9,
            max_iterations: 200_000,
        }
    }
}

/// Solve from the slack basis.
pub fn solve_lp(lp: &SparseLp, opts: &SolveOptions) -> Result<LpSolution, LpError> {
    solve_lp_from(lp, opts, None)
}

/// Solve starting from `warm`, falling back to the slack basis when the
/// shape does not match. Singular warm bases are repaired with logicals.
pub fn solve_lp_from(
    lp: &SparseLp,
    opts: &SolveOptions,
    warm: Option<&Basis>,
) -> Result<LpSolution, LpError> {
    lp.validate()?;
    let mut s = simplex::Simplex::new(lp, opts);
    s.install_basis(warm);
    let (status, iterations) = s.run();
    Ok(s.solution(lp, status, iterations))
}

/// Seam for swapping the numerical engine.
pub trait LpBackend: Send + Sync {
    fn solve(
        &self,
        lp: &SparseLp,
        opts: &SolveOptions,
        warm: Option<&Basis>,
    ) -> Result<LpSolution, LpError>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EmbeddedSimplex;

impl LpBackend for EmbeddedSimplex {
    fn solve(
        &self,
        lp: &SparseLp,
        opts: &SolveOptions,
        warm: Option<&Basis>,
    ) -> Result<LpSolution, LpError> {
        solve_lp_from(lp, opts, warm)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    LowerBound { var: usize, residual: f64 },
    UpperBound { var: usize, residual: f64 },
    Row { row: usize, residual: f64 },
}

impl Violation {
    pub fn residual(&self) -> f64 {
        match *self {
            Violation::LowerBound { residual, .. }
            | Violation::UpperBound { residual, .. }
            | Violation::Row { residual, .. } => residual,
        }
    }
}

/// Lists every bound or row violated by more than `tol * max(1, |bound|)`.
pub fn check_solution(lp: &SparseLp, x: &[f64], tol: f64) -> Result<Vec<Violation>, LpError> {
    if x.len() != lp.n_vars() {
        return Err(LpError::Dimension {
            expected: lp.n_vars(),
            got: x.len(),
        });
    }
    let scaled = |b: f64| tol * b.abs().max(1.0);
    let mut out = Vec::new();
    for (j, &v) in x.iter().enumerate() {
        let (l, u) = (lp.lower[j], lp.upper[j]);
        if l.is_finite() && l - v > scaled(l) {
            out.push(Violation::LowerBound {
                var: j,
                residual: l - v,
            });
        }
        if u.is_finite() && v - u > scaled(u) {
            out.push(Violation::UpperBound {
                var: j,
                residual: v - u,
            });
        }
    }
    for (i, row) in lp.rows.iter().enumerate() {
        let act = lp.row_activity(i, x);
        let residual = match row.relation {
            Relation::Le => act - row.rhs,
            Relation::Ge => row.rhs - act,
            Relation::Eq => (act - row.rhs).abs(),
        };
        if residual > scaled(row.rhs) {
            out.push(Violation::Row { row: i, residual });
        }
    }
    Ok(out)
}

//! Bounded-variable primal revised simplex.
//!
//! Every row gets a logical variable `s_i` with `a_i . x - s_i = 0`, so the
//! relation and right-hand side become bounds on `s_i`. Phase one minimizes
//! the sum of bound violations of the basic variables; phase two the true
//! objective. Both phases share one loop and the phase is re-decided every
//! iteration, so drift back into infeasibility is repaired automatically.
//! Ratio tests use Harris' two-pass rule; after a run of degenerate pivots
//! the solver switches to Bland's rule until progress resumes.

use super::lu::{BasisFactor, SparseCol};
use super::{Basis, BasisStatus, LpSolution, LpStatus, Relation, SolveOptions, SparseLp};

const REFACTOR_INTERVAL: usize = 100;
const DEGENERATE_RUN_FOR_BLAND: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic(usize),
    Lower,
    Upper,
    Zero,
}

pub(crate) struct Simplex {
    m: usize,
    n: usize,
    cols: Vec<SparseCol>,
    cost: Vec<f64>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    col_scale: Vec<f64>,
    x: Vec<f64>,
    state: Vec<VarState>,
    head: Vec<usize>,
    factor: Option<BasisFactor>,
    opts: SolveOptions,
    // Scratch.
    y: Vec<f64>,
    alpha: Vec<f64>,
}

fn pow2_round(v: f64) -> f64 {
    if !v.is_finite() || v <= 0.0 {
        return 1.0;
    }
    2f64.powi(v.log2().round() as i32)
}

impl Simplex {
    pub(crate) fn new(lp: &SparseLp, opts: &SolveOptions) -> Self {
        let n = lp.n_vars();
        let m = lp.n_rows();

        // Geometric-mean scaling, a few alternating passes.
        let mut row_scale = vec![1.0; m];
        let mut col_scale = vec![1.0; n];
        let mut col_min = vec![f64::INFINITY; n];
        let mut col_max = vec![0.0_f64; n];
        for _ in 0..4 {
            for (i, row) in lp.rows.iter().enumerate() {
                let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
                for &(j, a) in &row.terms {
                    let v = (a * col_scale[j]).abs();
                    if v > 0.0 {
                        lo = lo.min(v);
                        hi = hi.max(v);
                    }
                }
                if hi > 0.0 {
                    row_scale[i] = pow2_round(1.0 / (lo * hi).sqrt());
                }
            }
            col_min.iter_mut().for_each(|v| *v = f64::INFINITY);
            col_max.iter_mut().for_each(|v| *v = 0.0);
            for (i, row) in lp.rows.iter().enumerate() {
                for &(j, a) in &row.terms {
                    let v = (a * row_scale[i]).abs();
                    if v > 0.0 {
                        col_min[j] = col_min[j].min(v);
                        col_max[j] = col_max[j].max(v);
                    }
                }
            }
            for j in 0..n {
                if col_max[j] > 0.0 {
                    col_scale[j] = pow2_round(1.0 / (col_min[j] * col_max[j]).sqrt());
                }
            }
        }

        let mut cols: Vec<SparseCol> = vec![Vec::new(); n + m];
        for (i, row) in lp.rows.iter().enumerate() {
            for &(j, a) in &row.terms {
                if a != 0.0 {
                    cols[j].push((i, a * row_scale[i] * col_scale[j]));
                }
            }
        }
        for (i, col) in cols[n..].iter_mut().enumerate() {
            col.push((i, -1.0));
        }

        let mut cost = vec![0.0; n + m];
        let mut lb = vec![0.0; n + m];
        let mut ub = vec![0.0; n + m];
        for j in 0..n {
            cost[j] = lp.objective[j] * col_scale[j];
            lb[j] = lp.lower[j] / col_scale[j];
            ub[j] = lp.upper[j] / col_scale[j];
        }
        let cmax = cost.iter().fold(0.0_f64, |a, c| a.max(c.abs()));
        if cmax > 0.0 {
            let s = pow2_round(1.0 / cmax);
            cost.iter_mut().for_each(|c| *c *= s);
        }
        for (i, row) in lp.rows.iter().enumerate() {
            let r = row.rhs * row_scale[i];
            let (l, u) = match row.relation {
                Relation::Le => (f64::NEG_INFINITY, r),
                Relation::Ge => (r, f64::INFINITY),
                Relation::Eq => (r, r),
            };
            lb[n + i] = l;
            ub[n + i] = u;
        }

        Self {
            m,
            n,
            cols,
            cost,
            lb,
            ub,
            col_scale,
            x: vec![0.0; n + m],
            state: vec![VarState::Lower; n + m],
            head: Vec::with_capacity(m),
            factor: None,
            opts: opts.clone(),
            y: vec![0.0; m],
            alpha: vec![0.0; m],
        }
    }

    fn nonbasic_state(&self, j: usize, hint: BasisStatus) -> VarState {
        let (l, u) = (self.lb[j], self.ub[j]);
        match hint {
            BasisStatus::AtUpper if u.is_finite() => VarState::Upper,
            _ if l.is_finite() => VarState::Lower,
            _ if u.is_finite() => VarState::Upper,
            _ => VarState::Zero,
        }
    }

    fn set_nonbasic(&mut self, j: usize, hint: BasisStatus) {
        let st = self.nonbasic_state(j, hint);
        self.state[j] = st;
        self.x[j] = match st {
            VarState::Lower => self.lb[j],
            VarState::Upper => self.ub[j],
            _ => 0.0,
        };
    }

    /// Install a starting basis: the slack basis when `warm` is `None`.
    pub(crate) fn install_basis(&mut self, warm: Option<&Basis>) {
        let (n, m) = (self.n, self.m);
        let mut statuses = vec![BasisStatus::AtLower; n + m];
        match warm {
            Some(b) if b.vars.len() == n && b.rows.len() == m => {
                statuses[..n].copy_from_slice(&b.vars);
                statuses[n..].copy_from_slice(&b.rows);
            }
            _ => {
                for s in &mut statuses[n..] {
                    *s = BasisStatus::Basic;
                }
                self.crash(&mut statuses);
            }
        }
        let mut basic: Vec<usize> = (0..n + m)
            .filter(|&j| statuses[j] == BasisStatus::Basic)
            .collect();
        while basic.len() > m {
            let j = basic.pop().unwrap();
            statuses[j] = BasisStatus::AtLower;
        }
        if basic.len() < m {
            for i in (0..m).rev() {
                if basic.len() == m {
                    break;
                }
                if statuses[n + i] != BasisStatus::Basic {
                    statuses[n + i] = BasisStatus::Basic;
                    basic.push(n + i);
                }
            }
            basic.sort_unstable();
        }
        for (j, &st) in statuses.iter().enumerate() {
            if st != BasisStatus::Basic {
                self.set_nonbasic(j, st);
            }
        }
        self.head = basic;
        for (p, &j) in self.head.iter().enumerate() {
            self.state[j] = VarState::Basic(p);
        }
        self.refactor();
    }

    /// Replace logicals by structural columns before phase one: free
    /// columns first (they never need to leave), then one column per
    /// equality row, so phase one does not open with a long run of
    /// degenerate pivots. Each pick takes the largest entry among unused
    /// columns; `refactor` repairs any dependent choice.
    fn crash(&self, statuses: &mut [BasisStatus]) {
        let (n, m) = (self.n, self.m);
        let mut row_taken = vec![false; m];
        let mut used = vec![false; n];
        for j in 0..n {
            if self.lb[j].is_finite() || self.ub[j].is_finite() {
                continue;
            }
            // An equality row suits a free column best: it stays satisfied.
            let key = |&(i, a): &(usize, f64)| (self.lb[n + i] == self.ub[n + i], a.abs());
            let pick = self.cols[j]
                .iter()
                .filter(|&&(i, _)| !row_taken[i])
                .max_by(|a, b| {
                    let (ka, kb) = (key(a), key(b));
                    ka.0.cmp(&kb.0)
                        .then(ka.1.total_cmp(&kb.1))
                        .then(b.0.cmp(&a.0))
                });
            if let Some(&(i, _)) = pick {
                row_taken[i] = true;
                used[j] = true;
                statuses[j] = BasisStatus::Basic;
                statuses[n + i] = BasisStatus::AtLower;
            }
        }
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); m];
        for (j, col) in self.cols[..n].iter().enumerate() {
            if !used[j] && self.lb[j] < self.ub[j] {
                for &(i, a) in col {
                    rows[i].push((j, a.abs()));
                }
            }
        }
        for i in 0..m {
            if row_taken[i] || self.lb[n + i] != self.ub[n + i] {
                continue;
            }
            let pick = rows[i]
                .iter()
                .filter(|&&(j, _)| !used[j])
                .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)));
            if let Some(&(j, _)) = pick {
                used[j] = true;
                statuses[j] = BasisStatus::Basic;
                statuses[n + i] = BasisStatus::AtLower;
            }
        }
    }

    /// Factor the current basis, swapping dependent columns for logicals.
    fn refactor(&mut self) {
        loop {
            let cols: Vec<&SparseCol> = self.head.iter().map(|&j| &self.cols[j]).collect();
            match BasisFactor::factorize(&cols, self.m, self.opts.pivot_tol) {
                Ok(f) => {
                    self.factor = Some(f);
                    break;
                }
                Err(sing) => {
                    for (&p, &r) in sing.dependent.iter().zip(&sing.free_rows) {
                        let out = self.head[p];
                        self.set_nonbasic(out, BasisStatus::AtLower);
                        let logical = self.n + r;
                        self.head[p] = logical;
                        self.state[logical] = VarState::Basic(p);
                    }
                }
            }
        }
        self.recompute_basics();
    }

    fn recompute_basics(&mut self) {
        let mut rhs = vec![0.0; self.m];
        for j in 0..self.n + self.m {
            if !matches!(self.state[j], VarState::Basic(_)) && self.x[j] != 0.0 {
                for &(i, a) in &self.cols[j] {
                    rhs[i] -= a * self.x[j];
                }
            }
        }
        self.factor.as_mut().unwrap().ftran(&mut rhs);
        for (p, &j) in self.head.iter().enumerate() {
            self.x[j] = rhs[p];
        }
    }

    fn tol(&self, bound: f64) -> f64 {
        self.opts.feas_tol * bound.abs().max(1.0)
    }

    /// Phase-one cost of basic variable `j`, or 0 when feasible.
    fn infeasibility_cost(&self, j: usize) -> f64 {
        let v = self.x[j];
        if v < self.lb[j] - self.tol(self.lb[j]) {
            -1.0
        } else if v > self.ub[j] + self.tol(self.ub[j]) {
            1.0
        } else {
            0.0
        }
    }

    fn column_dot(&self, j: usize, y: &[f64]) -> f64 {
        self.cols[j].iter().map(|&(i, a)| a * y[i]).sum()
    }

    pub(crate) fn run(&mut self) -> (LpStatus, usize) {
        let (n, m) = (self.n, self.m);
        let mut iterations = 0usize;
        let mut degenerate_run = 0usize;
        let mut bland = false;
        let mut rejected: Vec<usize> = Vec::new();
        let mut verified = false;

        loop {
            if iterations >= self.opts.max_iterations {
                return (LpStatus::IterationLimit, iterations);
            }
            if self.factor.as_ref().unwrap().eta_count() >= REFACTOR_INTERVAL {
                self.refactor();
            }

            let mut phase_one = false;
            let mut c_b = std::mem::take(&mut self.y);
            for (p, &j) in self.head.iter().enumerate() {
                let c = self.infeasibility_cost(j);
                if c != 0.0 {
                    phase_one = true;
                }
                c_b[p] = c;
            }
            if !phase_one {
                for (p, &j) in self.head.iter().enumerate() {
                    c_b[p] = self.cost[j];
                }
            }
            self.factor.as_mut().unwrap().btran(&mut c_b);
            let y = c_b;

            // Pricing.
            let dtol = self.opts.opt_tol;
            let mut entering: Option<(usize, f64, f64)> = None;
            for j in 0..n + m {
                let st = self.state[j];
                if matches!(st, VarState::Basic(_)) || self.lb[j] == self.ub[j] {
                    continue;
                }
                let cj = if phase_one { 0.0 } else { self.cost[j] };
                let d = cj - self.column_dot(j, &y);
                let dir = match st {
                    VarState::Lower if d < -dtol => 1.0,
                    VarState::Upper if d > dtol => -1.0,
                    VarState::Zero if d.abs() > dtol => -d.signum(),
                    _ => continue,
                };
                if rejected.contains(&j) {
                    continue;
                }
                let better = match entering {
                    None => true,
                    Some((_, _, best)) => !bland && d.abs() > best,
                };
                if better {
                    entering = Some((j, dir, d.abs()));
                }
            }
            self.y = y;

            let Some((q, dir, _)) = entering else {
                if !verified {
                    // Confirm on a fresh factorization before declaring.
                    verified = true;
                    rejected.clear();
                    self.refactor();
                    continue;
                }
                return if phase_one {
                    (LpStatus::Infeasible, iterations)
                } else {
                    (LpStatus::Optimal, iterations)
                };
            };
            verified = false;

            let mut alpha = std::mem::take(&mut self.alpha);
            alpha.iter_mut().for_each(|a| *a = 0.0);
            for &(i, a) in &self.cols[q] {
                alpha[i] = a;
            }
            self.factor.as_mut().unwrap().ftran(&mut alpha);

            let (leave, theta) = self.ratio_test(&alpha, dir, bland);
            let range = self.ub[q] - self.lb[q];
            iterations += 1;

            let flip = range.is_finite() && leave.is_none_or(|(_, _)| range <= theta);
            if leave.is_none() && !flip {
                self.alpha = alpha;
                if phase_one {
                    rejected.push(q);
                    continue;
                }
                return (LpStatus::Unbounded, iterations);
            }
            let step = if flip { range } else { theta };

            if step <= 1e-12 {
                degenerate_run += 1;
                if degenerate_run >= DEGENERATE_RUN_FOR_BLAND {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
                bland = false;
            }

            if step != 0.0 {
                for (p, &j) in self.head.iter().enumerate() {
                    if alpha[p] != 0.0 {
                        self.x[j] -= dir * step * alpha[p];
                    }
                }
            }
            if flip {
                if dir > 0.0 {
                    self.x[q] = self.ub[q];
                    self.state[q] = VarState::Upper;
                } else {
                    self.x[q] = self.lb[q];
                    self.state[q] = VarState::Lower;
                }
            } else {
                self.x[q] += dir * step;
                let (p, target_upper) = leave.unwrap();
                let out = self.head[p];
                if target_upper {
                    self.x[out] = self.ub[out];
                    self.state[out] = VarState::Upper;
                } else {
                    self.x[out] = self.lb[out];
                    self.state[out] = VarState::Lower;
                }
                self.head[p] = q;
                self.state[q] = VarState::Basic(p);
                self.factor.as_mut().unwrap().push_eta(p, &alpha);
            }
            rejected.clear();
            self.alpha = alpha;
        }
    }

    /// Returns the leaving position (and whether it leaves at its upper
    /// bound) plus the step length, or `None` when nothing blocks.
    fn ratio_test(&self, alpha: &[f64], dir: f64, bland: bool) -> (Option<(usize, bool)>, f64) {
        let ptol = self.opts.pivot_tol;
        // (pos, distance, |rate|, to_upper)
        let mut cands: Vec<(usize, f64, f64, bool)> = Vec::new();
        let mut theta_max = f64::INFINITY;
        for (p, &j) in self.head.iter().enumerate() {
            let a = alpha[p];
            if a.abs() <= ptol {
                continue;
            }
            let rate = -dir * a;
            let v = self.x[j];
            let (l, u) = (self.lb[j], self.ub[j]);
            let (target, to_upper, t) = if rate < 0.0 {
                if v > u + self.tol(u) {
                    (u, true, self.tol(u))
                } else if l.is_finite() {
                    (l, false, self.tol(l))
                } else {
                    continue;
                }
            } else if v < l - self.tol(l) {
                (l, false, self.tol(l))
            } else if u.is_finite() {
                (u, true, self.tol(u))
            } else {
                continue;
            };
            let dist = if rate < 0.0 { v - target } else { target - v };
            let r = rate.abs();
            theta_max = theta_max.min((dist + t) / r);
            cands.push((p, dist, r, to_upper));
        }
        if cands.is_empty() {
            return (None, f64::INFINITY);
        }
        if bland {
            let mut best: Option<(usize, f64, bool)> = None;
            let mut best_var = usize::MAX;
            for &(p, dist, r, up) in &cands {
                let ratio = (dist / r).max(0.0);
                let j = self.head[p];
                match best {
                    Some((_, br, _)) if ratio > br || (ratio == br && j > best_var) => {}
                    _ => {
                        best = Some((p, ratio, up));
                        best_var = j;
                    }
                }
            }
            let (p, ratio, up) = best.unwrap();
            return (Some((p, up)), ratio);
        }
        let mut chosen: Option<(usize, f64, f64, bool)> = None;
        for &(p, dist, r, up) in &cands {
            if dist / r <= theta_max {
                let a = alpha[p].abs();
                if chosen.is_none_or(|(_, _, ba, _)| a > ba) {
                    chosen = Some((p, (dist / r).max(0.0), a, up));
                }
            }
        }
        let (p, ratio, _, up) = chosen.unwrap();
        (Some((p, up)), ratio)
    }

    pub(crate) fn solution(
        &self,
        lp: &SparseLp,
        status: LpStatus,
        iterations: usize,
    ) -> LpSolution {
        let x: Vec<f64> = (0..self.n).map(|j| self.x[j] * self.col_scale[j]).collect();
        let objective_value = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        let to_status = |j: usize| match self.state[j] {
            VarState::Basic(_) => BasisStatus::Basic,
            VarState::Upper => BasisStatus::AtUpper,
            VarState::Lower => BasisStatus::AtLower,
            VarState::Zero => BasisStatus::Free,
        };
        let basis = Basis {
            vars: (0..self.n).map(to_status).collect(),
            rows: (self.n..self.n + self.m).map(to_status).collect(),
        };
        LpSolution {
            status,
            x,
            objective_value,
            iterations,
            basis: Some(basis),
        }
    }
}

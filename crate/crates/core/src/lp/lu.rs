//! Sparse LU factorization of a simplex basis with product-form updates.
//!
//! The basis is factored left-looking: columns are processed shortest-first,
//! each one is reduced against the lower factor built so far, and the pivot is
//! chosen by threshold partial pivoting among the rows not yet used. After a
//! factorization, basis changes are appended as eta columns until the next
//! refactorization.

/// A sparse column: `(row, value)` pairs.
pub type SparseCol = Vec<(usize, f64)>;

const DROP_TOL: f64 = 1e-14;
const PIVOT_THRESHOLD: f64 = 0.1;

#[derive(Debug)]
pub struct Singular {
    /// Basis positions whose column could not be pivoted.
    pub dependent: Vec<usize>,
    /// Rows left without a pivot; one per dependent position.
    pub free_rows: Vec<usize>,
}

#[derive(Debug, Clone)]
struct Eta {
    pos: usize,
    pivot: f64,
    others: Vec<(usize, f64)>,
}

#[derive(Debug, Clone)]
pub struct BasisFactor {
    m: usize,
    /// Pivot row of step `k`.
    pivot_row: Vec<usize>,
    /// Basis position factored at step `k`.
    step_pos: Vec<usize>,
    /// Sub-diagonal part of the unit lower factor, row-indexed.
    lower: Vec<SparseCol>,
    /// Strictly upper part of `U`, indexed by earlier step.
    upper: Vec<Vec<(usize, f64)>>,
    diag: Vec<f64>,
    etas: Vec<Eta>,
    work: Vec<f64>,
}

impl BasisFactor {
    /// Factor the `m x m` matrix whose column at basis position `p` is `cols[p]`.
    pub fn factorize(cols: &[&SparseCol], m: usize, pivot_tol: f64) -> Result<Self, Singular> {
        debug_assert_eq!(cols.len(), m);
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by_key(|&p| cols[p].len());

        let mut row_step = vec![usize::MAX; m];
        let mut pivot_row: Vec<usize> = Vec::with_capacity(m);
        let mut step_pos = Vec::with_capacity(m);
        let mut lower: Vec<SparseCol> = Vec::with_capacity(m);
        let mut upper = Vec::with_capacity(m);
        let mut diag = Vec::with_capacity(m);
        let mut dependent = Vec::new();

        let mut x = vec![0.0_f64; m];
        let mut mark = vec![false; m];
        let mut touched: Vec<usize> = Vec::new();
        for &pos in &order {
            for &(r, v) in cols[pos] {
                if !mark[r] {
                    mark[r] = true;
                    touched.push(r);
                }
                x[r] += v;
            }
            let col_max = cols[pos].iter().fold(0.0_f64, |a, &(_, v)| a.max(v.abs()));
            // Apply the lower factor in step order.
            let mut ucol = Vec::new();
            for t in 0..pivot_row.len() {
                let xr = x[pivot_row[t]];
                if xr == 0.0 {
                    continue;
                }
                if xr.abs() > DROP_TOL {
                    ucol.push((t, xr));
                    for &(i, l) in &lower[t] {
                        if !mark[i] {
                            mark[i] = true;
                            touched.push(i);
                        }
                        x[i] -= l * xr;
                    }
                }
                x[pivot_row[t]] = 0.0;
            }
            let mut best = 0.0_f64;
            for &r in &touched {
                if row_step[r] == usize::MAX {
                    best = best.max(x[r].abs());
                }
            }
            if best <= pivot_tol * col_max.max(1.0) {
                dependent.push(pos);
                for &r in &touched {
                    x[r] = 0.0;
                    mark[r] = false;
                }
                touched.clear();
                continue;
            }
            let mut prow = usize::MAX;
            for &r in &touched {
                if row_step[r] == usize::MAX
                    && x[r].abs() >= PIVOT_THRESHOLD * best
                    && (prow == usize::MAX || r < prow)
                {
                    prow = r;
                }
            }
            let piv = x[prow];
            let mut lcol = Vec::new();
            for &r in &touched {
                if r != prow && row_step[r] == usize::MAX && x[r].abs() > DROP_TOL {
                    lcol.push((r, x[r] / piv));
                }
            }
            lcol.sort_unstable_by_key(|e| e.0);
            for &r in &touched {
                x[r] = 0.0;
                mark[r] = false;
            }
            touched.clear();
            row_step[prow] = pivot_row.len();
            pivot_row.push(prow);
            step_pos.push(pos);
            lower.push(lcol);
            upper.push(ucol);
            diag.push(piv);
        }

        if !dependent.is_empty() {
            let free_rows = (0..m).filter(|&r| row_step[r] == usize::MAX).collect();
            return Err(Singular {
                dependent,
                free_rows,
            });
        }
        Ok(Self {
            m,
            pivot_row,
            step_pos,
            lower,
            upper,
            diag,
            etas: Vec::new(),
            work: vec![0.0; m],
        })
    }

    pub fn eta_count(&self) -> usize {
        self.etas.len()
    }

    /// Solve `B x = rhs` in place. `rhs` is row-indexed on entry and
    /// position-indexed on exit.
    pub fn ftran(&mut self, rhs: &mut [f64]) {
        let m = self.m;
        let z = &mut self.work;
        for t in 0..m {
            let zt = rhs[self.pivot_row[t]];
            z[t] = zt;
            if zt != 0.0 {
                for &(i, l) in &self.lower[t] {
                    rhs[i] -= l * zt;
                }
            }
        }
        for k in (0..m).rev() {
            let yk = z[k] / self.diag[k];
            z[k] = yk;
            if yk != 0.0 {
                for &(t, u) in &self.upper[k] {
                    z[t] -= u * yk;
                }
            }
        }
        for k in 0..m {
            rhs[self.step_pos[k]] = z[k];
        }
        for eta in &self.etas {
            let xp = rhs[eta.pos];
            if xp == 0.0 {
                continue;
            }
            let xp = xp / eta.pivot;
            rhs[eta.pos] = xp;
            for &(i, a) in &eta.others {
                rhs[i] -= a * xp;
            }
        }
    }

    /// Solve `B^T y = c` in place. `c` is position-indexed on entry and
    /// row-indexed on exit.
    pub fn btran(&mut self, c: &mut [f64]) {
        let m = self.m;
        for eta in self.etas.iter().rev() {
            let mut s = c[eta.pos];
            for &(i, a) in &eta.others {
                s -= a * c[i];
            }
            c[eta.pos] = s / eta.pivot;
        }
        let v = &mut self.work;
        for k in 0..m {
            let mut s = c[self.step_pos[k]];
            for &(t, u) in &self.upper[k] {
                s -= u * v[t];
            }
            v[k] = s / self.diag[k];
        }
        for t in (0..m).rev() {
            let mut s = v[t];
            for &(i, l) in &self.lower[t] {
                s -= l * c[i];
            }
            c[self.pivot_row[t]] = s;
        }
    }

    /// Record that the column at position `pos` was replaced by one whose
    /// FTRAN image is `alpha`.
    pub fn push_eta(&mut self, pos: usize, alpha: &[f64]) {
        let others = alpha
            .iter()
            .enumerate()
            .filter(|&(i, a)| i != pos && a.abs() > DROP_TOL)
            .map(|(i, &a)| (i, a))
            .collect();
        self.etas.push(Eta {
            pos,
            pivot: alpha[pos],
            others,
        });
    }
}

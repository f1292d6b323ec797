//! Brute-force LP oracle: enumerate every basic point of a small bounded LP.

use bess_core::lp::{Relation, SparseLp};

/// One hyperplane `a . x = b` taken from a row or a finite bound.
struct Plane {
    a: Vec<f64>,
    b: f64,
}

fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-10 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in 0..n {
            if r != c {
                let f = a[r][c] / a[c][c];
                if f != 0.0 {
                    for k in c..n {
                        a[r][k] -= f * a[c][k];
                    }
                    b[r] -= f * b[c];
                }
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

fn feasible(lp: &SparseLp, x: &[f64], tol: f64) -> bool {
    for j in 0..lp.n_vars() {
        if x[j] < lp.lower[j] - tol || x[j] > lp.upper[j] + tol {
            return false;
        }
    }
    lp.rows.iter().enumerate().all(|(i, r)| {
        let act = lp.row_activity(i, x);
        match r.relation {
            Relation::Le => act <= r.rhs + tol,
            Relation::Ge => act >= r.rhs - tol,
            Relation::Eq => (act - r.rhs).abs() <= tol,
        }
    })
}

/// Minimum objective over all basic feasible points, or `None` if there is
/// no feasible vertex. Requires every variable to have finite bounds.
pub fn vertex_min(lp: &SparseLp) -> Option<f64> {
    let n = lp.n_vars();
    let mut planes = Vec::new();
    for r in &lp.rows {
        let mut a = vec![0.0; n];
        for &(j, v) in &r.terms {
            a[j] += v;
        }
        planes.push(Plane { a, b: r.rhs });
    }
    for j in 0..n {
        for bound in [lp.lower[j], lp.upper[j]] {
            assert!(bound.is_finite(), "oracle needs a bounded LP");
            let mut a = vec![0.0; n];
            a[j] = 1.0;
            planes.push(Plane { a, b: bound });
        }
    }
    // Every vertex has n independent tight planes; equality rows hold at
    // any feasible point, so the feasibility check enforces them.
    let total = planes.len();
    let k = n;
    let mut best: Option<f64> = None;
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let a = idx.iter().map(|&i| planes[i].a.clone()).collect();
        let b = idx.iter().map(|&i| planes[i].b).collect();
        if let Some(x) = solve_square(a, b) {
            if feasible(lp, &x, 1e-9) {
                let v = lp.objective_at(&x);
                best = Some(best.map_or(v, |b: f64| b.min(v)));
            }
        }
        // next combination
        let Some(i) = (0..k).rev().find(|&i| idx[i] != total - k + i) else {
            return best;
        };
        idx[i] += 1;
        for t in i + 1..k {
            idx[t] = idx[t - 1] + 1;
        }
    }
}

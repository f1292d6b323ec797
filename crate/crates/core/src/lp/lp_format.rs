//! CPLEX LP text format writer, for cross-checking a problem in an external
//! solver.

use std::fmt::Write;

use super::{Relation, SparseLp};

/// Readers cap line length, so long expressions continue on new lines.
const WRAP_AT: usize = 200;

fn term(out: &mut String, coeff: f64, var: usize, first: bool) {
    let line_len = out.len() - out.rfind('\n').map_or(0, |k| k + 1);
    if line_len > WRAP_AT {
        out.push_str("\n   ");
    }
    if coeff >= 0.0 && !first {
        out.push_str(" + ");
    } else if coeff < 0.0 {
        out.push_str(if first { "- " } else { " - " });
    }
    let _ = write!(out, "{:e} x{}", coeff.abs(), var);
}

pub fn write_lp_format(lp: &SparseLp) -> String {
    let mut out = String::from("\\ generated by bess-core\nMinimize\n obj: ");
    let mut first = true;
    for (j, &c) in lp.objective.iter().enumerate() {
        if c != 0.0 {
            term(&mut out, c, j, first);
            first = false;
        }
    }
    if first {
        out.push_str("0 x0");
    }
    out.push_str("\nSubject To\n");
    for (i, row) in lp.rows.iter().enumerate() {
        let _ = write!(out, " c{i}: ");
        let mut first = true;
        for &(j, a) in &row.terms {
            term(&mut out, a, j, first);
            first = false;
        }
        if first {
            out.push_str("0 x0");
        }
        let op = match row.relation {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        };
        let _ = writeln!(out, " {op} {:e}", row.rhs);
    }
    out.push_str("Bounds\n");
    for j in 0..lp.n_vars() {
        let (l, u) = (lp.lower[j], lp.upper[j]);
        match (l.is_finite(), u.is_finite()) {
            (false, false) => {
                let _ = writeln!(out, " x{j} free");
            }
            (true, true) if l == u => {
                let _ = writeln!(out, " x{j} = {l:e}");
            }
            (true, true) => {
                let _ = writeln!(out, " {l:e} <= x{j} <= {u:e}");
            }
            (true, false) => {
                let _ = writeln!(out, " x{j} >= {l:e}");
            }
            (false, true) => {
                let _ = writeln!(out, " -inf <= x{j} <= {u:e}");
            }
        }
    }
    out.push_str("End\n");
    out
}

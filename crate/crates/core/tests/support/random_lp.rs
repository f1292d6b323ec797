use bess_core::lp::{Relation, SparseLp};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Random bounded LP that is feasible by construction around an interior point.
pub fn random_lp(rng: &mut ChaCha8Rng, n: usize, m: usize) -> SparseLp {
    let mut lp = SparseLp::new();
    let mut x0 = Vec::new();
    for _ in 0..n {
        let lo = rng.random_range(-5.0..0.0);
        let hi = rng.random_range(0.5..5.0);
        lp.add_var(lo, hi, rng.random_range(-3.0..3.0));
        x0.push(rng.random_range(lo..hi));
    }
    for i in 0..m {
        let mut terms: Vec<(usize, f64)> = Vec::new();
        for j in 0..n {
            if rng.random_bool(0.7) {
                terms.push((j, rng.random_range(-4.0..4.0)));
            }
        }
        if terms.is_empty() {
            terms.push((rng.random_range(0..n), 1.0));
        }
        let act: f64 = terms.iter().map(|&(j, a)| a * x0[j]).sum();
        let (rel, rhs) = match i % 5 {
            4 => (Relation::Eq, act),
            2 => (Relation::Ge, act - rng.random_range(0.0..2.0)),
            _ => (Relation::Le, act + rng.random_range(0.0..2.0)),
        };
        lp.add_row(terms, rel, rhs);
    }
    lp
}

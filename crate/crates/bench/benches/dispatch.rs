use std::hint::black_box;

use bess_bench::{first_window, year_for};
use bess_core::life::{run_life_with, LifeOptions};
use bess_core::lp::{EmbeddedSimplex, SolveOptions};
use bess_core::{build_window_lp, solve_lp, Config, LambdaPolicy, PlantState};
use criterion::{criterion_group, criterion_main, Criterion};

fn window_solve(c: &mut Criterion) {
    let mut g = c.benchmark_group("window_lp");
    // A cold week-long quarter-hour window takes most of a second.
    g.sample_size(10);
    for (name, cfg) in [
        ("reduced", Config::reduced_preset()),
        ("default", Config::default_preset()),
    ] {
        let prices = year_for(&cfg);
        let wp = first_window(&cfg, &prices, 4.0);
        let (lp, _) = build_window_lp(&wp, &cfg).unwrap();
        let opts = SolveOptions::default();
        g.bench_function(format!("build_{name}"), |b| {
            b.iter(|| build_window_lp(black_box(&wp), &cfg).unwrap())
        });
        g.bench_function(format!("solve_{name}"), |b| {
            b.iter(|| solve_lp(black_box(&lp), &opts).unwrap())
        });
    }
    g.finish();
}

fn life_loop(c: &mut Criterion) {
    let cfg = Config::reduced_preset();
    let prices = year_for(&cfg);
    let mut g = c.benchmark_group("life_30_days");
    g.sample_size(10);
    for warm_start in [true, false] {
        let opts = LifeOptions {
            max_days: 30,
            warm_start,
            ..LifeOptions::default()
        };
        let name = if warm_start { "warm" } else { "cold" };
        g.bench_function(name, |b| {
            b.iter(|| {
                run_life_with(
                    &cfg,
                    &prices,
                    LambdaPolicy::both(4.0),
                    PlantState::initial(&cfg),
                    &opts,
                    &EmbeddedSimplex,
                )
                .unwrap()
            })
        });
    }
    g.finish();
}

criterion_group!(benches, window_solve, life_loop);
criterion_main!(benches);

mod support;

use bess_core::Config;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use support::dispatch_grid::{brute_force, check_instance, lp_optimum, random_instance, Instance};
use support::model_oracle::schedule_cost;

#[test]
fn window_lp_matches_power_grid_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0D15);
    let started = std::time::Instant::now();
    for k in 0..20 {
        let inst = random_instance(&mut rng);
        if let Err(e) = check_instance(&inst) {
            panic!("instance {k}: {e}");
        }
    }
    assert!(started.elapsed().as_secs_f64() < 60.0);
}

#[test]
fn two_step_arbitrage_moves_full_power() {
    let mut cfg = Config::reduced_preset();
    cfg.battery.eta_chg = 1.0;
    cfg.battery.eta_dis = 1.0;
    let p_hi = 0.3;
    let inst = Instance {
        prices: vec![0.0, p_hi],
        lambda_cyc: 1.0,
        lambda_cal: 1.0,
        t0: cfg.thermal.t_amb,
        cfg,
    };
    let e0 = 0.0;
    let lp = lp_optimum(&inst, e0, 0.0);
    // Charge one hour at the power limit, then sell it all.
    let moved = inst.cfg.battery.p_max_chg() * inst.cfg.horizon.dt_hours;
    assert!((lp + p_hi * moved).abs() < 1e-9, "objective {lp}");
    let bf = brute_force(&inst, e0, 0.0);
    assert!((bf - lp).abs() < 1e-12);
}

#[test]
fn zero_prices_from_empty_rest() {
    let mut cfg = Config::reduced_preset();
    cfg.horizon.dt_hours = 0.25;
    let inst = Instance {
        prices: vec![0.0; 4],
        lambda_cyc: 1.0,
        lambda_cal: 1.0,
        t0: cfg.thermal.t_amb,
        cfg,
    };
    let c_ag = inst.cfg.c_ag();
    let lp = lp_optimum(&inst, 0.0, c_ag);
    let rest = schedule_cost(
        &inst.cfg,
        0.0,
        inst.t0,
        1.0,
        &inst.prices,
        &[0.0; 4],
        &[0.0; 4],
        1.0,
        1.0,
        c_ag,
    )
    .unwrap();
    assert!((lp - rest).abs() <= 1e-9 * rest.abs());
    assert!((brute_force(&inst, 0.0, c_ag) - rest).abs() <= 1e-12 * rest.abs());
}

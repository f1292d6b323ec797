//! Exhaustive search over a power grid for short dispatch windows, and a
//! bound on how far the grid optimum can sit above the continuous one.

use bess_core::dispatch::{build_window_lp, extract_schedule, WindowAnchor, WindowProblem};
use bess_core::lp::{solve_lp, LpStatus, SolveOptions};
use bess_core::Config;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::model_oracle::schedule_cost;

pub const GRID: usize = 21;

pub struct Instance {
    pub cfg: Config,
    pub prices: Vec<f64>,
    pub lambda_cyc: f64,
    pub lambda_cal: f64,
    pub t0: f64,
}

pub fn net_grid(cfg: &Config) -> Vec<f64> {
    let lo = -cfg.battery.p_max_dis();
    let hi = cfg.battery.p_max_chg();
    (0..GRID)
        .map(|k| lo + (hi - lo) * k as f64 / (GRID - 1) as f64)
        .collect()
}

pub fn split(net: f64) -> (f64, f64) {
    (net.max(0.0), (-net).max(0.0))
}

/// Best cost over every combination of grid powers.
pub fn brute_force(inst: &Instance, e0: f64, c_ag: f64) -> f64 {
    let grid = net_grid(&inst.cfg);
    let n = inst.prices.len();
    let mut idx = vec![0usize; n];
    let mut best = f64::INFINITY;
    let mut pc = vec![0.0; n];
    let mut pd = vec![0.0; n];
    loop {
        for t in 0..n {
            (pc[t], pd[t]) = split(grid[idx[t]]);
        }
        if let Some(c) = schedule_cost(
            &inst.cfg,
            e0,
            inst.t0,
            1.0,
            &inst.prices,
            &pc,
            &pd,
            inst.lambda_cyc,
            inst.lambda_cal,
            c_ag,
        ) {
            best = best.min(c);
        }
        let mut t = 0;
        loop {
            if t == n {
                return best;
            }
            idx[t] += 1;
            if idx[t] < GRID {
                break;
            }
            idx[t] = 0;
            t += 1;
        }
    }
}

/// Upper bound on how much the cost can change when every step's net power
/// moves by at most half a grid cell. Every cost term is Lipschitz in the
/// net power of each step; the calendar term sees a step's power through the
/// energy and temperature of all later steps.
pub fn resolution_bound(inst: &Instance, c_ag: f64) -> f64 {
    let c = &inst.cfg;
    let b = &c.battery;
    let th = &c.thermal;
    let a = &c.aging;
    let dt = c.horizon.dt_hours;
    let n = inst.prices.len() as f64;
    let grid = net_grid(c);
    let half = 0.5 * (grid[1] - grid[0]);
    let b_cyc = a
        .cyc_chg_planes
        .iter()
        .map(|p| p.per_c_rate.abs())
        .fold(0.0, f64::max);
    let b_cal = a
        .cal_planes
        .iter()
        .map(|p| p.per_soc.abs())
        .fold(0.0, f64::max);
    let c_cal = a
        .cal_planes
        .iter()
        .map(|p| p.per_celsius.abs())
        .fold(0.0, f64::max);
    let beta = th.beta_chg.max(th.beta_dis);
    let energy_slope = (1.0 / b.eta_chg).max(b.eta_dis) * dt;
    let cyc_slope =
        c_ag * inst.lambda_cyc * (a.k_cyc_dis * dt / (2.0 * b.e_nom) + b_cyc * dt / b.e_nom);
    let cal_slope = c_ag
        * inst.lambda_cal
        * n
        * dt
        * (b_cal * dt / b.e_nom + c_cal * th.k_t * dt * beta / b.e_nom);
    inst.prices
        .iter()
        .map(|p| half * (p * energy_slope + cyc_slope + cal_slope))
        .sum()
}

pub fn random_instance(rng: &mut ChaCha8Rng) -> Instance {
    let mut cfg = Config::reduced_preset();
    // Short steps keep the energy box slack from a half-full start, so any
    // schedule rounded onto the grid stays feasible.
    cfg.horizon.dt_hours = 0.25;
    let n = rng.random_range(2..=4);
    Instance {
        prices: (0..n).map(|_| rng.random_range(0.0..0.2)).collect(),
        lambda_cyc: 2f64.powf(rng.random_range(-2.0..4.0)),
        lambda_cal: 2f64.powf(rng.random_range(-2.0..4.0)),
        t0: cfg.thermal.t_amb + rng.random_range(-3.0..6.0),
        cfg,
    }
}

pub fn lp_optimum(inst: &Instance, e0: f64, c_ag: f64) -> f64 {
    let wp = WindowProblem {
        prices: &inst.prices,
        anchor: WindowAnchor {
            e0,
            soh0: 1.0,
            t0: inst.t0,
        },
        lambda_cyc: inst.lambda_cyc,
        lambda_cal: inst.lambda_cal,
        c_ag,
    };
    let (lp, layout) = build_window_lp(&wp, &inst.cfg).unwrap();
    let sol = solve_lp(&lp, &SolveOptions::default()).unwrap();
    assert_eq!(sol.status, LpStatus::Optimal);
    let s = extract_schedule(&sol, &layout, &inst.cfg).unwrap();
    // The LP's own objective must equal the oracle cost of its schedule.
    let replay = schedule_cost(
        &inst.cfg,
        e0,
        inst.t0,
        1.0,
        &inst.prices,
        &s.p_chg,
        &s.p_dis,
        inst.lambda_cyc,
        inst.lambda_cal,
        c_ag,
    )
    .expect("LP schedule stays in the energy box");
    assert!(
        (replay - sol.objective_value).abs() <= 1e-7 * (1.0 + replay.abs()),
        "replayed {replay} vs LP {}",
        sol.objective_value
    );
    sol.objective_value
}

/// One random instance checked against the grid: `Err` describes the miss.
pub fn check_instance(inst: &Instance) -> Result<(), String> {
    let c_ag = inst.cfg.c_ag();
    let e0 = 0.5 * inst.cfg.battery.e_nom;
    let lp = lp_optimum(inst, e0, c_ag);
    let bf = brute_force(inst, e0, c_ag);
    let bound = resolution_bound(inst, c_ag);
    let slack = 1e-9 * (1.0 + bf.abs());
    if lp > bf + slack {
        return Err(format!("LP {lp} worse than grid {bf}"));
    }
    if bf - lp > bound + slack {
        return Err(format!("gap {} above bound {bound}", bf - lp));
    }
    Ok(())
}

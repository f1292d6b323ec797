//! Plant versus formulation on identical schedules.

use bess_core::dispatch::{build_window_lp, evaluate_schedule, WindowAnchor, WindowProblem};
use bess_core::plant::step_plant;
use bess_core::{Config, PlantState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Feasible random schedule: each step charges, discharges, rests, or (now
/// and then) does both, without leaving the energy box.
pub fn random_schedule(
    rng: &mut ChaCha8Rng,
    cfg: &Config,
    e0: f64,
    cap: f64,
    n: usize,
) -> (Vec<f64>, Vec<f64>) {
    let b = &cfg.battery;
    let dt = cfg.horizon.dt_hours;
    let mut e = e0;
    let mut pc = Vec::with_capacity(n);
    let mut pd = Vec::with_capacity(n);
    for _ in 0..n {
        let room_c = ((cap - e) / dt).min(b.p_max_chg()).max(0.0);
        let room_d = (e / dt).min(b.p_max_dis()).max(0.0);
        let (c, d) = match rng.random_range(0..4) {
            0 => (rng.random_range(0.0..=1.0) * room_c, 0.0),
            1 => (0.0, rng.random_range(0.0..=1.0) * room_d),
            2 => (0.0, 0.0),
            _ => {
                let d = rng.random_range(0.0..=1.0) * room_d;
                let c = rng.random_range(0.0..=1.0) * ((cap - e + d * dt) / dt).min(b.p_max_chg());
                (c, d)
            }
        };
        e = (e + (c - d) * dt).clamp(0.0, cap);
        pc.push(c);
        pd.push(d);
    }
    (pc, pd)
}

/// Drive plant and formulation with the same random schedules and require
/// per-step agreement. Returns the largest relative fade mismatch seen.
pub fn fuzz_model_identity(seed: u64, cases: usize) -> Result<f64, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for case in 0..cases {
        let mut cfg = Config::reduced_preset();
        cfg.horizon.dt_hours = [0.25, 0.5, 1.0][case % 3];
        if case % 5 == 4 {
            cfg.aging.throughput = bess_core::CycleThroughput::DischargeOnly;
        }
        let n = rng.random_range(1..=24);
        let soh0 = rng.random_range(0.8..=1.0);
        let cap = cfg.battery.e_nom * soh0;
        let e0 = rng.random_range(0.0..=cap);
        let t0 = cfg.thermal.t_amb + rng.random_range(-5.0..10.0);
        let prices: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..0.3)).collect();
        let (pc, pd) = random_schedule(&mut rng, &cfg, e0, cap, n);

        let wp = WindowProblem {
            prices: &prices,
            anchor: WindowAnchor { e0, soh0, t0 },
            lambda_cyc: 1.0,
            lambda_cal: 1.0,
            c_ag: cfg.c_ag(),
        };
        let (lp, layout) = build_window_lp(&wp, &cfg).unwrap();
        let ev = evaluate_schedule(&lp, &layout, &cfg, &pc, &pd);

        let mut state = PlantState::initial(&cfg);
        state.e_batt = e0;
        state.soh = soh0;
        state.temp = t0;
        let (mut q_cal, mut q_cyc) = (0.0, 0.0);
        for t in 0..n {
            let (next, o) = step_plant(&state, pc[t], pd[t], prices[t], soh0, &cfg, t)
                .map_err(|e| format!("case {case}: {e}"))?;
            let plant = o.q_cal + o.q_cyc;
            let lp = ev.q_cal[t] + ev.q_cyc[t];
            if plant > 0.0 || lp > 0.0 {
                worst = worst.max((plant - lp).abs() / plant.abs().max(lp.abs()));
            }
            if !rel_close(o.q_cal, ev.q_cal[t], 1e-10) {
                return Err(format!(
                    "case {case} step {t}: calendar {} vs {}",
                    o.q_cal, ev.q_cal[t]
                ));
            }
            if !(rel_close(o.q_cyc, ev.q_cyc[t], 1e-10) || (o.q_cyc - ev.q_cyc[t]).abs() < 1e-22) {
                return Err(format!(
                    "case {case} step {t}: cycle {} vs {}",
                    o.q_cyc, ev.q_cyc[t]
                ));
            }
            if (next.e_batt - ev.energy[t]).abs() > 1e-12 || (next.temp - ev.temp[t]).abs() > 1e-10
            {
                return Err(format!("case {case} step {t}: state trajectories diverge"));
            }
            q_cal += o.q_cal;
            q_cyc += o.q_cyc;
            state = next;
        }
        let lp_cal: f64 = ev.q_cal.iter().sum();
        let lp_cyc: f64 = ev.q_cyc.iter().sum();
        if !rel_close(q_cal + q_cyc, lp_cal + lp_cyc, 1e-10) {
            return Err(format!("case {case}: total fade differs"));
        }
        // Subtracting from an O(1) state of health costs absolute precision.
        if (soh0 - state.soh - (q_cal + q_cyc)).abs() > 1e-14 {
            return Err(format!("case {case}: state of health bookkeeping"));
        }
    }
    Ok(worst)
}

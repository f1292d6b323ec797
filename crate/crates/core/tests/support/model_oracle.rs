//! Straight-line re-implementation of one dispatch step's physics and cost,
//! written against the configuration fields only.

use bess_core::{Config, CycleThroughput};

#[derive(Debug, Clone, Copy)]
pub struct OracleState {
    pub e: f64,
    pub temp: f64,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct OracleStep {
    pub q_cal: f64,
    pub q_cyc: f64,
    pub cash_out: f64,
}

pub fn step(
    cfg: &Config,
    s: OracleState,
    p_chg: f64,
    p_dis: f64,
    price: f64,
    soh0: f64,
) -> (OracleState, OracleStep) {
    let b = &cfg.battery;
    let th = &cfg.thermal;
    let a = &cfg.aging;
    let dt = cfg.horizon.dt_hours;
    let e = s.e + p_chg * dt - p_dis * dt;
    let heat = (th.beta_chg * p_chg + th.beta_dis * p_dis) / b.e_nom;
    let temp = s.temp + th.k_t * dt * (th.alpha_t * (th.t_amb - s.temp) + heat);
    let soc = (s.e + e) / (2.0 * b.e_nom * soh0);
    let t_avg = (s.temp + temp) / 2.0;
    let mut cal = f64::NEG_INFINITY;
    for p in &a.cal_planes {
        cal = cal.max(p.intercept + p.per_soc * soc + p.per_celsius * t_avg);
    }
    let mut chg = f64::NEG_INFINITY;
    for p in &a.cyc_chg_planes {
        chg = chg.max(p.intercept + p.per_c_rate * p_chg / b.e_nom);
    }
    let throughput = match a.throughput {
        CycleThroughput::Both => p_chg + p_dis,
        CycleThroughput::DischargeOnly => p_dis,
    };
    let fec = throughput * dt / (2.0 * b.e_nom);
    (
        OracleState { e, temp },
        OracleStep {
            q_cal: cal * dt,
            q_cyc: a.k_cyc_dis * fec + chg * dt,
            cash_out: price * (p_chg / b.eta_chg - p_dis * b.eta_dis) * dt,
        },
    )
}

/// Cost of a whole power schedule, or `None` if it leaves the energy box.
#[allow(clippy::too_many_arguments)]
pub fn schedule_cost(
    cfg: &Config,
    e0: f64,
    t0: f64,
    soh0: f64,
    prices: &[f64],
    p_chg: &[f64],
    p_dis: &[f64],
    lambda_cyc: f64,
    lambda_cal: f64,
    c_ag: f64,
) -> Option<f64> {
    let cap = cfg.battery.e_nom * soh0;
    let mut s = OracleState { e: e0, temp: t0 };
    let mut cost = 0.0;
    for t in 0..prices.len() {
        let (n, o) = step(cfg, s, p_chg[t], p_dis[t], prices[t], soh0);
        if n.e < -1e-12 || n.e > cap + 1e-12 {
            return None;
        }
        cost += o.cash_out + c_ag * (lambda_cyc * o.q_cyc + lambda_cal * o.q_cal);
        s = n;
    }
    Some(cost)
}

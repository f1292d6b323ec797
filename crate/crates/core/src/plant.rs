//! Forward simulation of the battery under a committed dispatch.
//!
//! The plant uses the same storage, thermal and aging equations as the
//! window LP, but without any cost weights: it is the ground truth that
//! revenue and fade are scored against.

use crate::config::Config;
use crate::error::SimError;
use crate::state::PlantState;

/// Relative tolerance on power and energy bounds.
pub const PLANT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepOutcome {
    /// Earned revenue [EUR]; purchases are negative.
    pub revenue: f64,
    pub q_cal: f64,
    pub q_cyc: f64,
    pub fec: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DayOutcome {
    pub revenue: f64,
    pub q_cal: f64,
    pub q_cyc: f64,
    pub fec: f64,
    pub state_out: PlantState,
}

impl DayOutcome {
    pub fn fade(&self) -> f64 {
        self.q_cal + self.q_cyc
    }
}

/// Advance one step. `soh_ref` is the state of health frozen at the start of
/// the committed day; it caps stored energy and normalizes SOC.
pub fn step_plant(
    state: &PlantState,
    p_chg: f64,
    p_dis: f64,
    price: f64,
    soh_ref: f64,
    cfg: &Config,
    step: usize,
) -> Result<(PlantState, StepOutcome), SimError> {
    let b = &cfg.battery;
    let th = &cfg.thermal;
    let ag = &cfg.aging;
    let dt = cfg.horizon.dt_hours;
    let tol = PLANT_TOL * b.e_nom;
    let fault = |reason: String| SimError::Plant { step, reason };

    if !(p_chg >= -tol && p_chg <= b.p_max_chg() + tol) {
        return Err(fault(format!(
            "charge power {p_chg} outside [0, {}]",
            b.p_max_chg()
        )));
    }
    if !(p_dis >= -tol && p_dis <= b.p_max_dis() + tol) {
        return Err(fault(format!(
            "discharge power {p_dis} outside [0, {}]",
            b.p_max_dis()
        )));
    }

    let e_cap = b.e_nom * soh_ref;
    let e_next = state.e_batt + (p_chg - p_dis) * dt;
    if e_next < -tol || e_next > e_cap + tol {
        return Err(fault(format!(
            "stored energy {e_next} outside [0, {e_cap}]"
        )));
    }

    let q_dot = (th.beta_chg * p_chg + th.beta_dis * p_dis) / b.e_nom;
    let t_next = state.temp + th.k_t * (th.alpha_t * (th.t_amb - state.temp) + q_dot) * dt;
    let t_avg = 0.5 * (state.temp + t_next);
    let soc_avg = (state.e_batt + e_next) / (2.0 * e_cap);

    let fec = (p_chg + p_dis) * dt / (2.0 * b.e_nom);
    let q_cal = dt * ag.calendar_rate(soc_avg, t_avg);
    let q_cyc = ag.k_cyc_dis * ag.aging_fec(p_chg, p_dis, dt, b.e_nom)
        + dt * ag.cycle_charge_rate(p_chg / b.e_nom);
    let p_ac = p_chg / b.eta_chg - p_dis * b.eta_dis;
    let revenue = -price * p_ac * dt;

    let next = PlantState {
        e_batt: e_next,
        soh: state.soh - q_cal - q_cyc,
        temp: t_next,
        fec_total: state.fec_total + fec,
        q_cal_total: state.q_cal_total + q_cal,
        q_cyc_total: state.q_cyc_total + q_cyc,
        day_index: state.day_index,
    };
    Ok((
        next,
        StepOutcome {
            revenue,
            q_cal,
            q_cyc,
            fec,
        },
    ))
}

/// Fold [`step_plant`] over one committed day, with the state of health
/// frozen at its value at the start of the day.
pub fn apply_day(
    state: &PlantState,
    p_chg: &[f64],
    p_dis: &[f64],
    prices: &[f64],
    cfg: &Config,
) -> Result<DayOutcome, SimError> {
    apply_day_frozen(state, p_chg, p_dis, prices, cfg, state.soh)
}

/// As [`apply_day`] but with an explicit frozen state of health, for days
/// after the first in a multi-day commit.
pub fn apply_day_frozen(
    state: &PlantState,
    p_chg: &[f64],
    p_dis: &[f64],
    prices: &[f64],
    cfg: &Config,
    soh_ref: f64,
) -> Result<DayOutcome, SimError> {
    let spd = cfg.horizon.steps_per_day();
    if p_chg.len() != spd || p_dis.len() != spd || prices.len() != spd {
        return Err(SimError::Input(format!(
            "day schedule needs {spd} steps, got {}/{}/{}",
            p_chg.len(),
            p_dis.len(),
            prices.len()
        )));
    }
    let mut cur = state.clone();
    let mut out = DayOutcome {
        revenue: 0.0,
        q_cal: 0.0,
        q_cyc: 0.0,
        fec: 0.0,
        state_out: state.clone(),
    };
    for t in 0..spd {
        let (next, o) = step_plant(&cur, p_chg[t], p_dis[t], prices[t], soh_ref, cfg, t)?;
        cur = next;
        out.revenue += o.revenue;
        out.q_cal += o.q_cal;
        out.q_cyc += o.q_cyc;
        out.fec += o.fec;
    }
    cur.day_index += 1;
    out.state_out = cur;
    Ok(out)
}

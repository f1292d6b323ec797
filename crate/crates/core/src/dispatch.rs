//! One rolling window as a linear program.
//!
//! Per step `t` the LP carries six variables: charge and discharge power on
//! the battery side, stored energy at the end of the step, temperature at the
//! end of the step, and two epigraph variables for the charge-rate cycle
//! fade and the calendar fade. AC power, equivalent cycles, average SOC,
//! average temperature, heat generation and the linear cycle term are affine
//! in these and are substituted directly into rows and costs.
//!
//! Epigraph variables are carried in micro-fade units so their magnitude is
//! comparable to power and energy; [`extract_schedule`] converts back.

use crate::config::Config;
use crate::error::SimError;
use crate::lp::{LpSolution, LpStatus, Relation, SparseLp};

/// Fade units per LP epigraph unit.
pub const FADE_UNIT: f64 = 1e-6;

const VARS_PER_STEP: usize = 6;

/// Initial conditions of a window: stored energy, the frozen state of health
/// that caps it, and temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowAnchor {
    pub e0: f64,
    pub soh0: f64,
    pub t0: f64,
}

#[derive(Debug, Clone)]
pub struct WindowProblem<'a> {
    /// Energy price per step [EUR/kWh], non-negative.
    pub prices: &'a [f64],
    pub anchor: WindowAnchor,
    pub lambda_cyc: f64,
    pub lambda_cal: f64,
    /// Penalty per unit fade fraction [EUR].
    pub c_ag: f64,
}

/// Dense index map from per-step quantities to LP columns and rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VariableLayout {
    pub n_steps: usize,
    pub n_cyc_planes: usize,
    pub n_cal_planes: usize,
}

impl VariableLayout {
    pub fn n_vars(&self) -> usize {
        VARS_PER_STEP * self.n_steps
    }
    pub fn vars_per_step(&self) -> usize {
        VARS_PER_STEP
    }
    pub fn rows_per_step(&self) -> usize {
        2 + self.n_cyc_planes + self.n_cal_planes
    }
    pub fn p_chg(&self, t: usize) -> usize {
        VARS_PER_STEP * t
    }
    pub fn p_dis(&self, t: usize) -> usize {
        VARS_PER_STEP * t + 1
    }
    pub fn energy(&self, t: usize) -> usize {
        VARS_PER_STEP * t + 2
    }
    pub fn temp(&self, t: usize) -> usize {
        VARS_PER_STEP * t + 3
    }
    pub fn q_cyc_chg(&self, t: usize) -> usize {
        VARS_PER_STEP * t + 4
    }
    pub fn q_cal(&self, t: usize) -> usize {
        VARS_PER_STEP * t + 5
    }
    pub fn energy_row(&self, t: usize) -> usize {
        self.rows_per_step() * t
    }
    pub fn temp_row(&self, t: usize) -> usize {
        self.rows_per_step() * t + 1
    }
    pub fn cyc_row(&self, t: usize, i: usize) -> usize {
        self.rows_per_step() * t + 2 + i
    }
    pub fn cal_row(&self, t: usize, i: usize) -> usize {
        self.rows_per_step() * t + 2 + self.n_cyc_planes + i
    }
}

pub fn build_window_lp(
    wp: &WindowProblem<'_>,
    cfg: &Config,
) -> Result<(SparseLp, VariableLayout), SimError> {
    let b = &cfg.battery;
    let th = &cfg.thermal;
    let ag = &cfg.aging;
    let dt = cfg.horizon.dt_hours;
    let WindowAnchor { e0, soh0, t0 } = wp.anchor;
    let e_cap = b.e_nom * soh0;
    if !(e0 >= 0.0 && e0 <= e_cap * (1.0 + 1e-12)) {
        return Err(SimError::InfeasibleInput(format!(
            "initial energy {e0} outside [0, {e_cap}]"
        )));
    }
    if let Some(p) = wp.prices.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
        return Err(SimError::InfeasibleInput(format!(
            "price {p} is not non-negative"
        )));
    }
    let layout = VariableLayout {
        n_steps: wp.prices.len(),
        n_cyc_planes: ag.cyc_chg_planes.len(),
        n_cal_planes: ag.cal_planes.len(),
    };

    let c_cyc = wp.c_ag * wp.lambda_cyc;
    let c_cal = wp.c_ag * wp.lambda_cal;
    let fec_per_kw = dt / (2.0 * b.e_nom);
    let (fec_chg, fec_dis) = match ag.throughput {
        crate::config::CycleThroughput::Both => (fec_per_kw, fec_per_kw),
        crate::config::CycleThroughput::DischargeOnly => (0.0, fec_per_kw),
    };
    let decay = 1.0 - th.k_t * th.alpha_t * dt;
    let heat = th.k_t * dt / b.e_nom;
    let soc_coef = 1.0 / (2.0 * b.e_nom * soh0);

    let mut lp = SparseLp::new();
    for &price in wp.prices {
        lp.add_var(
            0.0,
            b.p_max_chg(),
            price * dt / b.eta_chg + c_cyc * ag.k_cyc_dis * fec_chg,
        );
        lp.add_var(
            0.0,
            b.p_max_dis(),
            -price * dt * b.eta_dis + c_cyc * ag.k_cyc_dis * fec_dis,
        );
        lp.add_var(0.0, e_cap, 0.0);
        lp.add_var(f64::NEG_INFINITY, f64::INFINITY, 0.0);
        lp.add_var(f64::NEG_INFINITY, f64::INFINITY, c_cyc * FADE_UNIT);
        lp.add_var(f64::NEG_INFINITY, f64::INFINITY, c_cal * FADE_UNIT);
    }

    for t in 0..layout.n_steps {
        let (pc, pd, e, tmp) = (
            layout.p_chg(t),
            layout.p_dis(t),
            layout.energy(t),
            layout.temp(t),
        );
        // Stored energy recursion.
        let mut terms = vec![(e, 1.0), (pc, -dt), (pd, dt)];
        let mut rhs = 0.0;
        if t == 0 {
            rhs = e0;
        } else {
            terms.push((layout.energy(t - 1), -1.0));
        }
        lp.add_row(terms, Relation::Eq, rhs);

        // Thermal recursion.
        let mut terms = vec![
            (tmp, 1.0),
            (pc, -heat * th.beta_chg),
            (pd, -heat * th.beta_dis),
        ];
        let mut rhs = th.k_t * th.alpha_t * dt * th.t_amb;
        if t == 0 {
            rhs += decay * t0;
        } else {
            terms.push((layout.temp(t - 1), -decay));
        }
        lp.add_row(terms, Relation::Eq, rhs);

        for plane in &ag.cyc_chg_planes {
            lp.add_row(
                vec![
                    (layout.q_cyc_chg(t), FADE_UNIT),
                    (pc, -dt * plane.per_c_rate / b.e_nom),
                ],
                Relation::Ge,
                dt * plane.intercept,
            );
        }

        for plane in &ag.cal_planes {
            let ks = dt * plane.per_soc * soc_coef;
            let kt = dt * plane.per_celsius * 0.5;
            let mut terms = vec![(layout.q_cal(t), FADE_UNIT), (e, -ks), (tmp, -kt)];
            let mut rhs = dt * plane.intercept;
            if t == 0 {
                rhs += ks * e0 + kt * t0;
            } else {
                terms.push((layout.energy(t - 1), -ks));
                terms.push((layout.temp(t - 1), -kt));
            }
            lp.add_row(terms, Relation::Ge, rhs);
        }
    }
    Ok((lp, layout))
}

/// Per-step dispatch read back from a window solution.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Schedule {
    pub p_chg: Vec<f64>,
    pub p_dis: Vec<f64>,
    pub energy: Vec<f64>,
    pub temp: Vec<f64>,
    pub q_cal: Vec<f64>,
    pub q_cyc_chg: Vec<f64>,
    /// Steps where charging and discharging overlap.
    pub simultaneity_warnings: Vec<usize>,
}

impl Schedule {
    pub fn len(&self) -> usize {
        self.p_chg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p_chg.is_empty()
    }
}

/// Read the schedule out of an optimal solution. Powers are clipped into
/// their bounds to remove solver round-off.
pub fn extract_schedule(
    sol: &LpSolution,
    layout: &VariableLayout,
    cfg: &Config,
) -> Result<Schedule, SimError> {
    if sol.status != LpStatus::Optimal {
        return Err(SimError::NotOptimal { status: sol.status });
    }
    let b = &cfg.battery;
    let eps = 1e-6 * b.e_nom;
    let x = &sol.x;
    let mut s = Schedule::default();
    for t in 0..layout.n_steps {
        let pc = x[layout.p_chg(t)].clamp(0.0, b.p_max_chg());
        let pd = x[layout.p_dis(t)].clamp(0.0, b.p_max_dis());
        if pc * pd > eps {
            s.simultaneity_warnings.push(t);
        }
        s.p_chg.push(pc);
        s.p_dis.push(pd);
        s.energy.push(x[layout.energy(t)]);
        s.temp.push(x[layout.temp(t)]);
        s.q_cal.push(x[layout.q_cal(t)] * FADE_UNIT);
        s.q_cyc_chg.push(x[layout.q_cyc_chg(t)] * FADE_UNIT);
    }
    Ok(s)
}

/// Per-step quantities obtained by evaluating the window LP's own rows on a
/// fixed power schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct FormulationEvaluation {
    pub energy: Vec<f64>,
    pub temp: Vec<f64>,
    /// Calendar fade per step (tight epigraph).
    pub q_cal: Vec<f64>,
    /// Cycle fade per step: linear term plus tight charge-rate epigraph.
    pub q_cyc: Vec<f64>,
    /// Objective value with every epigraph variable at its tight value.
    pub objective: f64,
}

/// Evaluate the formulation on a power schedule: energy and temperature come
/// from the equality rows, each epigraph variable is set to the largest
/// lower bound its rows impose, and the objective is the LP cost vector
/// applied to the resulting point.
pub fn evaluate_schedule(
    lp: &SparseLp,
    layout: &VariableLayout,
    cfg: &Config,
    p_chg: &[f64],
    p_dis: &[f64],
) -> FormulationEvaluation {
    let n = layout.n_steps;
    let mut x = vec![0.0; layout.n_vars()];
    for t in 0..n {
        x[layout.p_chg(t)] = p_chg[t];
        x[layout.p_dis(t)] = p_dis[t];
    }
    // Solve a row for its one unknown column given everything else in `x`.
    let solve_for = |x: &[f64], row: usize, col: usize| -> f64 {
        let r = &lp.rows[row];
        let mut rest = 0.0;
        let mut coef = 0.0;
        for &(j, a) in &r.terms {
            if j == col {
                coef += a;
            } else {
                rest += a * x[j];
            }
        }
        (r.rhs - rest) / coef
    };
    let ag = &cfg.aging;
    let dt = cfg.horizon.dt_hours;
    let mut out = FormulationEvaluation {
        energy: Vec::with_capacity(n),
        temp: Vec::with_capacity(n),
        q_cal: Vec::with_capacity(n),
        q_cyc: Vec::with_capacity(n),
        objective: 0.0,
    };
    for t in 0..n {
        x[layout.energy(t)] = solve_for(&x, layout.energy_row(t), layout.energy(t));
        x[layout.temp(t)] = solve_for(&x, layout.temp_row(t), layout.temp(t));
        let q_cyc = (0..layout.n_cyc_planes)
            .map(|i| solve_for(&x, layout.cyc_row(t, i), layout.q_cyc_chg(t)))
            .fold(f64::NEG_INFINITY, f64::max);
        let q_cal = (0..layout.n_cal_planes)
            .map(|i| solve_for(&x, layout.cal_row(t, i), layout.q_cal(t)))
            .fold(f64::NEG_INFINITY, f64::max);
        x[layout.q_cyc_chg(t)] = q_cyc;
        x[layout.q_cal(t)] = q_cal;
        out.energy.push(x[layout.energy(t)]);
        out.temp.push(x[layout.temp(t)]);
        out.q_cal.push(q_cal * FADE_UNIT);
        let linear = ag.k_cyc_dis * ag.aging_fec(p_chg[t], p_dis[t], dt, cfg.battery.e_nom);
        out.q_cyc.push(linear + q_cyc * FADE_UNIT);
    }
    out.objective = lp.objective_at(&x);
    out
}

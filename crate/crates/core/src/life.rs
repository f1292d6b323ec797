//! Rolling-horizon driver: optimize a window, commit its first day to the
//! plant, re-anchor, repeat until end of life.

use serde::{Deserialize, Serialize};

use crate::config::{soh_at_eol, Config};
use crate::dispatch::{build_window_lp, extract_schedule, WindowAnchor, WindowProblem};
use crate::economics::{adaptive_update, AdaptiveLambdaState};
use crate::error::SimError;
use crate::lp::{Basis, EmbeddedSimplex, LpBackend, LpStatus, SolveOptions};
use crate::plant::apply_day_frozen;
use crate::state::PlantState;

/// Days per price year and per discounting period.
pub const DAYS_PER_YEAR: usize = 365;
/// Days per year used only to report life in years.
pub const REPORTING_DAYS_PER_YEAR: f64 = 365.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LambdaPolicy {
    Static { lambda_cyc: f64, lambda_cal: f64 },
    Adaptive { window_days: usize },
}

impl LambdaPolicy {
    pub fn from_config(cfg: &Config) -> Self {
        let e = &cfg.economic;
        if e.adaptive.enabled {
            LambdaPolicy::Adaptive {
                window_days: e.adaptive.window_days,
            }
        } else {
            LambdaPolicy::Static {
                lambda_cyc: e.lambda_cyc,
                lambda_cal: e.lambda_cal,
            }
        }
    }

    pub fn both(lambda: f64) -> Self {
        LambdaPolicy::Static {
            lambda_cyc: lambda,
            lambda_cal: lambda,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DayRecord {
    pub day: usize,
    pub revenue_eur: f64,
    pub q_cal: f64,
    pub q_cyc: f64,
    pub soh: f64,
    pub fec: f64,
    pub lambda_used: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LifeResult {
    pub days: Vec<DayRecord>,
    pub t_eol_years: f64,
    /// Revenue per 365-day block; the last block may be partial.
    pub yearly_revenues: Vec<f64>,
    pub final_state: PlantState,
    /// False when the run stopped at the day cap before reaching EOL.
    pub eol_reached: bool,
    /// Committed steps where charge and discharge overlapped.
    pub simultaneity_warnings: usize,
}

impl LifeResult {
    pub fn total_fec(&self) -> f64 {
        self.final_state.fec_total
    }

    pub fn total_revenue(&self) -> f64 {
        self.days.iter().map(|d| d.revenue_eur).sum()
    }
}

#[derive(Debug, Clone)]
pub struct LifeOptions {
    pub solve: SolveOptions,
    /// Hard cap on simulated days.
    pub max_days: usize,
    pub warm_start: bool,
}

impl Default for LifeOptions {
    fn default() -> Self {
        Self {
            solve: SolveOptions::default(),
            max_days: 100 * DAYS_PER_YEAR,
            warm_start: true,
        }
    }
}

/// Re-anchor the next window at the plant's actual state. Stored energy is
/// clipped to the capacity implied by the updated state of health.
pub fn update_quasi_steady_state(state: &mut PlantState, cfg: &Config) -> WindowAnchor {
    let cap = cfg.battery.e_nom * state.soh.max(0.0);
    state.e_batt = state.e_batt.clamp(0.0, cap);
    WindowAnchor {
        e0: state.e_batt,
        soh0: state.soh,
        t0: state.temp,
    }
}

/// Copy `len` prices starting at `start`, wrapping around the series.
pub fn tiled_window(prices: &[f64], start: usize, len: usize) -> Vec<f64> {
    let n = prices.len();
    (0..len).map(|k| prices[(start + k) % n]).collect()
}

pub fn run_life(
    cfg: &Config,
    prices: &[f64],
    policy: LambdaPolicy,
) -> Result<LifeResult, SimError> {
    run_life_with(
        cfg,
        prices,
        policy,
        PlantState::initial(cfg),
        &LifeOptions::default(),
        &EmbeddedSimplex,
    )
}

/// Full-control variant: explicit starting state, options and LP backend.
pub fn run_life_with(
    cfg: &Config,
    prices: &[f64],
    policy: LambdaPolicy,
    initial: PlantState,
    opts: &LifeOptions,
    backend: &dyn LpBackend,
) -> Result<LifeResult, SimError> {
    let h = &cfg.horizon;
    let spd = h.steps_per_day();
    let window = h.window_steps();
    if prices.is_empty() || !prices.len().is_multiple_of(spd) {
        return Err(SimError::Input(format!(
            "price series of {} steps is not a whole number of {spd}-step days",
            prices.len()
        )));
    }
    if prices.len() < window {
        return Err(SimError::Input(format!(
            "price series of {} steps shorter than the {window}-step window",
            prices.len()
        )));
    }
    let series_days = prices.len() / spd;
    let c_ag = cfg.c_ag();
    let eol = soh_at_eol(&cfg.battery);

    let mut state = initial;
    let mut days = Vec::new();
    let mut estimator = match policy {
        LambdaPolicy::Adaptive { window_days } => Some(AdaptiveLambdaState::new(window_days)),
        LambdaPolicy::Static { .. } => None,
    };
    let mut basis: Option<Basis> = None;
    let mut warnings = 0usize;
    let mut eol_reached = state.soh <= eol;
    let mut window_index = 0usize;

    while !eol_reached && days.len() < opts.max_days {
        let (lambda_cyc, lambda_cal) = match (&policy, &estimator) {
            (
                LambdaPolicy::Static {
                    lambda_cyc,
                    lambda_cal,
                },
                _,
            ) => (*lambda_cyc, *lambda_cal),
            (_, Some(est)) => (est.current_lambda(), est.current_lambda()),
            _ => unreachable!(),
        };
        let anchor = update_quasi_steady_state(&mut state, cfg);
        let start = (state.day_index % series_days) * spd;
        let window_prices = tiled_window(prices, start, window);
        let wp = WindowProblem {
            prices: &window_prices,
            anchor,
            lambda_cyc,
            lambda_cal,
            c_ag,
        };
        let wrap = |e: SimError| SimError::Window {
            window: window_index,
            source: Box::new(e),
        };
        let (lp, layout) = build_window_lp(&wp, cfg).map_err(wrap)?;
        let warm = if opts.warm_start {
            basis.as_ref()
        } else {
            None
        };
        let mut sol = backend
            .solve(&lp, &opts.solve, warm)
            .map_err(|e| wrap(e.into()))?;
        if sol.status != LpStatus::Optimal && warm.is_some() {
            sol = backend
                .solve(&lp, &opts.solve, None)
                .map_err(|e| wrap(e.into()))?;
        }
        let schedule = extract_schedule(&sol, &layout, cfg).map_err(wrap)?;
        let commit_steps = h.commit_days * spd;
        warnings += schedule
            .simultaneity_warnings
            .iter()
            .filter(|&&t| t < commit_steps)
            .count();
        basis = sol.basis.map(|b| {
            b.shifted(
                commit_steps * layout.vars_per_step(),
                commit_steps * layout.rows_per_step(),
            )
        });

        for d in 0..h.commit_days {
            let range = d * spd..(d + 1) * spd;
            let outcome = apply_day_frozen(
                &state,
                &schedule.p_chg[range.clone()],
                &schedule.p_dis[range.clone()],
                &window_prices[range],
                cfg,
                anchor.soh0,
            )
            .map_err(wrap)?;
            days.push(DayRecord {
                day: outcome.state_out.day_index,
                revenue_eur: outcome.revenue,
                q_cal: outcome.q_cal,
                q_cyc: outcome.q_cyc,
                soh: outcome.state_out.soh,
                fec: outcome.fec,
                lambda_used: lambda_cyc,
            });
            if let Some(est) = estimator.take() {
                let next = adaptive_update(est, &outcome, c_ag);
                if !next.current_lambda().is_finite() {
                    return Err(SimError::LambdaNotFinite {
                        day: outcome.state_out.day_index,
                    });
                }
                estimator = Some(next);
            }
            state = outcome.state_out;
            if state.soh <= eol {
                eol_reached = true;
                break;
            }
        }
        window_index += 1;
    }

    let yearly_revenues = days
        .chunks(DAYS_PER_YEAR)
        .map(|c| c.iter().map(|d| d.revenue_eur).sum())
        .collect();
    Ok(LifeResult {
        t_eol_years: days.len() as f64 / REPORTING_DAYS_PER_YEAR,
        days,
        yearly_revenues,
        final_state: state,
        eol_reached,
        simultaneity_warnings: warnings,
    })
}

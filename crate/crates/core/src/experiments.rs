//! Lambda sweeps and the analyses built on them.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::economics::{npv, profitability_index};
use crate::error::{IoError, SimError};
use crate::life::{run_life, DayRecord, LambdaPolicy, LifeResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepMode {
    /// Vary the calendar weight, cycle weight held at 1.
    CalOnly,
    /// Vary the cycle weight, calendar weight held at 1.
    CycOnly,
    /// One shared weight.
    Both,
    /// Full cross product of the two weights.
    Grid2d,
}

impl std::str::FromStr for SweepMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cal-only" => Ok(SweepMode::CalOnly),
            "cyc-only" => Ok(SweepMode::CycOnly),
            "both" => Ok(SweepMode::Both),
            "grid2d" => Ok(SweepMode::Grid2d),
            _ => Err(format!(
                "unknown sweep mode `{s}` (cal-only, cyc-only, both, grid2d)"
            )),
        }
    }
}

/// Powers of two from 1/4 to 64.
pub fn default_lambda_grid() -> Vec<f64> {
    (-2..=6).map(|k| 2f64.powi(k)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub mode: SweepMode,
    pub lambda_values: Vec<f64>,
    pub interest_rates: Vec<f64>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            mode: SweepMode::Both,
            lambda_values: default_lambda_grid(),
            interest_rates: vec![0.0],
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), String> {
        if self.lambda_values.is_empty() {
            return Err("lambda grid is empty".into());
        }
        if self
            .lambda_values
            .iter()
            .any(|l| !(l.is_finite() && *l > 0.0))
        {
            return Err("lambda values must be positive".into());
        }
        if self.lambda_values.windows(2).any(|w| w[1] <= w[0]) {
            return Err("lambda values must be strictly ascending".into());
        }
        if self.interest_rates.is_empty()
            || self
                .interest_rates
                .iter()
                .any(|i| !(i.is_finite() && *i >= 0.0))
        {
            return Err("interest rates must be non-negative".into());
        }
        Ok(())
    }

    /// Grid points as (lambda_cal, lambda_cyc).
    pub fn points(&self) -> Vec<(f64, f64)> {
        let l = &self.lambda_values;
        match self.mode {
            SweepMode::CalOnly => l.iter().map(|&x| (x, 1.0)).collect(),
            SweepMode::CycOnly => l.iter().map(|&x| (1.0, x)).collect(),
            SweepMode::Both => l.iter().map(|&x| (x, x)).collect(),
            SweepMode::Grid2d => l
                .iter()
                .flat_map(|&c| l.iter().map(move |&y| (c, y)))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub lambda_cal: f64,
    pub lambda_cyc: f64,
    pub interest_rate: f64,
    pub npv_eur: f64,
    pub pi: f64,
    pub t_eol_years: f64,
    pub total_fec: f64,
    pub q_cal_share: f64,
    pub eol_reached: bool,
    /// Set when the run failed; the numeric fields are then NaN.
    pub error: Option<String>,
}

impl SweepRow {
    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }
}

/// Shares of calendar and cycle fade in the total.
pub fn aging_portions(result: &LifeResult) -> Result<(f64, f64), SimError> {
    let s = &result.final_state;
    let total = s.q_cal_total + s.q_cyc_total;
    if total.is_nan() || total <= 0.0 {
        return Err(SimError::Input("no fade accumulated".into()));
    }
    let cal = s.q_cal_total / total;
    Ok((cal, 1.0 - cal))
}

fn rows_for(
    lambda_cal: f64,
    lambda_cyc: f64,
    rates: &[f64],
    c_battery: f64,
    outcome: Result<LifeResult, SimError>,
) -> Vec<SweepRow> {
    rates
        .iter()
        .map(|&i| match &outcome {
            Ok(r) => {
                let value = npv(&r.yearly_revenues, i);
                SweepRow {
                    lambda_cal,
                    lambda_cyc,
                    interest_rate: i,
                    npv_eur: value,
                    pi: profitability_index(value, c_battery).unwrap_or(f64::NAN),
                    t_eol_years: r.t_eol_years,
                    total_fec: r.total_fec(),
                    q_cal_share: aging_portions(r).map_or(f64::NAN, |p| p.0),
                    eol_reached: r.eol_reached,
                    error: None,
                }
            }
            Err(e) => SweepRow {
                lambda_cal,
                lambda_cyc,
                interest_rate: i,
                npv_eur: f64::NAN,
                pi: f64::NAN,
                t_eol_years: f64::NAN,
                total_fec: f64::NAN,
                q_cal_share: f64::NAN,
                eol_reached: false,
                error: Some(e.to_string()),
            },
        })
        .collect()
}

/// One life per grid point, run in parallel. Interest rates only change the
/// discounting, so each life is reused for every rate. Rows come back
/// ordered by grid point, then rate.
pub fn run_sweep(
    spec: &SweepSpec,
    cfg: &Config,
    prices: &[f64],
) -> Result<Vec<SweepRow>, SimError> {
    spec.validate().map_err(SimError::Input)?;
    let c_battery = cfg.battery.c_battery;
    let rows: Vec<Vec<SweepRow>> = spec
        .points()
        .par_iter()
        .map(|&(cal, cyc)| {
            let outcome = run_life(
                cfg,
                prices,
                LambdaPolicy::Static {
                    lambda_cyc: cyc,
                    lambda_cal: cal,
                },
            );
            rows_for(cal, cyc, &spec.interest_rates, c_battery, outcome)
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub lambda_cal: f64,
    pub lambda_cyc: f64,
    pub pi: f64,
    pub npv_eur: f64,
}

/// Row with the largest NPV among successful rows. Ties go to the smaller
/// weights.
pub fn find_peak(rows: &[SweepRow]) -> Result<Peak, SimError> {
    let key = |r: &SweepRow| r.lambda_cal + r.lambda_cyc;
    rows.iter()
        .filter(|r| r.is_ok() && r.npv_eur.is_finite())
        .fold(None::<&SweepRow>, |best, r| match best {
            Some(b) if b.npv_eur > r.npv_eur => Some(b),
            Some(b) if b.npv_eur == r.npv_eur && key(b) <= key(r) => Some(b),
            _ => Some(r),
        })
        .map(|r| Peak {
            lambda_cal: r.lambda_cal,
            lambda_cyc: r.lambda_cyc,
            pi: r.pi,
            npv_eur: r.npv_eur,
        })
        .ok_or_else(|| SimError::Input("sweep table has no successful rows".into()))
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| IoError::Other(e.to_string()))?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeeklyEstimate {
    pub week: usize,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeeklyScatter {
    pub points: Vec<WeeklyEstimate>,
    pub mean: f64,
}

/// Revenue per fade over `c_ag`, aggregated over consecutive 7-day blocks.
/// A trailing partial week and weeks without fade are skipped.
pub fn weekly_lambda_scatter(days: &[DayRecord], c_ag: f64) -> WeeklyScatter {
    let points: Vec<WeeklyEstimate> = days
        .chunks_exact(7)
        .enumerate()
        .filter_map(|(week, c)| {
            let revenue: f64 = c.iter().map(|d| d.revenue_eur).sum();
            let fade: f64 = c.iter().map(|d| d.q_cal + d.q_cyc).sum();
            (fade > 0.0 && c_ag > 0.0).then(|| WeeklyEstimate {
                week,
                lambda: revenue / fade / c_ag,
            })
        })
        .collect();
    let mean = if points.is_empty() {
        f64::NAN
    } else {
        points.iter().map(|p| p.lambda).sum::<f64>() / points.len() as f64
    };
    WeeklyScatter { points, mean }
}

//! Configuration types shared by every stage of a simulation, and their
//! validation.
//!
//! Capacity fade is a fraction of nominal capacity throughout (0.20 is the
//! usual end-of-life budget). Aging plane coefficients are fade rates per
//! hour; the formulation and the plant both multiply them by the step length.
//! Temperatures are in °C.

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::lp::{solve_lp, LpStatus, Relation, SolveOptions, SparseLp};

fn default_q_eol() -> f64 {
    0.20
}
fn default_one() -> f64 {
    1.0
}
fn default_fill() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatteryConfig {
    /// Nominal beginning-of-life energy capacity [kWh].
    pub e_nom: f64,
    /// Maximum charge C-rate [1/h].
    pub c_rate_max_chg: f64,
    /// Maximum discharge C-rate [1/h].
    pub c_rate_max_dis: f64,
    pub eta_chg: f64,
    pub eta_dis: f64,
    /// Upfront investment cost [EUR].
    pub c_battery: f64,
    /// Fractional capacity loss that ends economic life.
    #[serde(default = "default_q_eol")]
    pub q_eol: f64,
    #[serde(default = "default_one")]
    pub soh_initial: f64,
    /// Stored energy at start of life as a fraction of usable capacity.
    #[serde(default = "default_fill")]
    pub initial_fill: f64,
}

impl BatteryConfig {
    pub fn p_max_chg(&self) -> f64 {
        self.e_nom * self.c_rate_max_chg
    }

    pub fn p_max_dis(&self) -> f64 {
        self.e_nom * self.c_rate_max_dis
    }
}

/// State of health at which the battery is retired.
pub fn soh_at_eol(cfg: &BatteryConfig) -> f64 {
    cfg.soh_initial - cfg.q_eol
}

/// Lumped thermal model: `T' = T + k (alpha (T_amb - T) + Qdot) dt` with
/// `Qdot = (beta_chg P_chg + beta_dis P_dis) / E_nom`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalConfig {
    pub k_t: f64,
    pub alpha_t: f64,
    pub beta_chg: f64,
    pub beta_dis: f64,
    pub t_amb: f64,
    pub t_initial: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CyclePlane {
    /// Fade per hour at zero charge rate.
    pub intercept: f64,
    /// Additional fade per hour per unit charge C-rate.
    pub per_c_rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalendarPlane {
    pub intercept: f64,
    pub per_soc: f64,
    pub per_celsius: f64,
}

/// Which throughput the linear cycle-aging coefficient multiplies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleThroughput {
    /// Full equivalent cycles from charge plus discharge power.
    #[default]
    Both,
    /// Only discharge power counts.
    DischargeOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgingModel {
    /// Fade per full equivalent cycle.
    pub k_cyc_dis: f64,
    #[serde(default)]
    pub throughput: CycleThroughput,
    pub cyc_chg_planes: Vec<CyclePlane>,
    pub cal_planes: Vec<CalendarPlane>,
}

impl AgingModel {
    /// Charge-rate-dependent cycle fade per hour: max over planes.
    pub fn cycle_charge_rate(&self, c_rate: f64) -> f64 {
        self.cyc_chg_planes
            .iter()
            .map(|p| p.intercept + p.per_c_rate * c_rate)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Calendar fade per hour: max over planes.
    pub fn calendar_rate(&self, soc: f64, temp: f64) -> f64 {
        self.cal_planes
            .iter()
            .map(|p| p.intercept + p.per_soc * soc + p.per_celsius * temp)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Equivalent-cycle increment that the linear cycle term multiplies.
    pub fn aging_fec(&self, p_chg: f64, p_dis: f64, dt_hours: f64, e_nom: f64) -> f64 {
        match self.throughput {
            CycleThroughput::Both => (p_chg + p_dis) * dt_hours / (2.0 * e_nom),
            CycleThroughput::DischargeOnly => p_dis * dt_hours / (2.0 * e_nom),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdaptiveConfig {
    pub enabled: bool,
    pub window_days: usize,
}

impl Default for AdaptiveConfig {
    fn default() -> Self {
        Self {
            enabled: false,
            window_days: 365,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EconomicConfig {
    pub lambda_cyc: f64,
    pub lambda_cal: f64,
    /// Annual interest rate used for discounting.
    pub interest_rate: f64,
    #[serde(default)]
    pub adaptive: AdaptiveConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HorizonConfig {
    pub dt_hours: f64,
    pub window_days: usize,
    pub commit_days: usize,
}

impl Default for HorizonConfig {
    fn default() -> Self {
        Self {
            dt_hours: 0.25,
            window_days: 7,
            commit_days: 1,
        }
    }
}

impl HorizonConfig {
    pub fn steps_per_day(&self) -> usize {
        (24.0 / self.dt_hours).round() as usize
    }

    pub fn window_steps(&self) -> usize {
        self.window_days * self.steps_per_day()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub battery: BatteryConfig,
    pub thermal: ThermalConfig,
    pub aging: AgingModel,
    pub economic: EconomicConfig,
    #[serde(default)]
    pub horizon: HorizonConfig,
}

/// Bundled configuration files.
pub mod presets {
    /// Full-resolution setup: 15 minute steps, 7 day window, 1 day commit.
    pub const DEFAULT: &str = include_str!("../../../configs/default.json");
    /// Hourly steps and a 2 day window; same battery and aging model.
    pub const REDUCED: &str = include_str!("../../../configs/reduced.json");
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn default_preset() -> Self {
        Self::from_json(presets::DEFAULT).expect("bundled config parses")
    }

    pub fn reduced_preset() -> Self {
        Self::from_json(presets::REDUCED).expect("bundled config parses")
    }

    /// Degradation penalty per unit of fade fraction.
    pub fn c_ag(&self) -> f64 {
        crate::economics::compute_c_ag(self.battery.c_battery, self.battery.q_eol)
            .expect("validated q_eol is positive")
    }

    /// Check every invariant, returning the configuration unchanged or the
    /// full list of violations.
    pub fn validate(self) -> Result<Self, ConfigError> {
        let v = violations(&self);
        if v.is_empty() {
            Ok(self)
        } else {
            Err(ConfigError::Invalid(v))
        }
    }
}

/// Smallest value over a box of the pointwise maximum of affine functions,
/// found with one small LP. `planes` are `(intercept, slopes)`.
fn min_of_plane_max(planes: &[(f64, Vec<f64>)], bounds: &[(f64, f64)]) -> Option<f64> {
    let mut lp = SparseLp::new();
    let xs: Vec<usize> = bounds.iter().map(|&(l, u)| lp.add_var(l, u, 0.0)).collect();
    let t = lp.add_var(f64::NEG_INFINITY, f64::INFINITY, 1.0);
    for (a, slopes) in planes {
        let mut terms = vec![(t, 1.0)];
        for (&x, &b) in xs.iter().zip(slopes) {
            terms.push((x, -b));
        }
        lp.add_row(terms, Relation::Ge, *a);
    }
    let sol = solve_lp(&lp, &SolveOptions::default()).ok()?;
    (sol.status == LpStatus::Optimal).then_some(sol.objective_value)
}

fn violations(cfg: &Config) -> Vec<String> {
    let mut out = Vec::new();
    let mut check = |ok: bool, msg: &str| {
        if !ok {
            out.push(msg.to_string());
        }
    };
    let b = &cfg.battery;
    let finite = |v: f64| v.is_finite();
    check(
        finite(b.e_nom) && b.e_nom > 0.0,
        "battery.e_nom: must be positive",
    );
    check(
        finite(b.c_rate_max_chg) && b.c_rate_max_chg > 0.0,
        "battery.c_rate_max_chg: must be positive",
    );
    check(
        finite(b.c_rate_max_dis) && b.c_rate_max_dis > 0.0,
        "battery.c_rate_max_dis: must be positive",
    );
    check(
        b.eta_chg > 0.0 && b.eta_chg <= 1.0,
        "battery.eta_chg: efficiency out of (0,1]",
    );
    check(
        b.eta_dis > 0.0 && b.eta_dis <= 1.0,
        "battery.eta_dis: efficiency out of (0,1]",
    );
    check(
        finite(b.c_battery) && b.c_battery >= 0.0,
        "battery.c_battery: must be non-negative",
    );
    check(
        b.q_eol > 0.0 && b.q_eol < 1.0,
        "battery.q_eol: must lie in (0,1)",
    );
    check(
        b.soh_initial > 0.0 && b.soh_initial <= 1.0,
        "battery.soh_initial: must lie in (0,1]",
    );
    check(
        (0.0..=1.0).contains(&b.initial_fill),
        "battery.initial_fill: must lie in [0,1]",
    );

    let t = &cfg.thermal;
    check(
        finite(t.k_t) && t.k_t >= 0.0,
        "thermal.k_t: must be non-negative",
    );
    check(
        finite(t.alpha_t) && t.alpha_t >= 0.0,
        "thermal.alpha_t: must be non-negative",
    );
    check(
        finite(t.beta_chg) && t.beta_chg >= 0.0,
        "thermal.beta_chg: must be non-negative",
    );
    check(
        finite(t.beta_dis) && t.beta_dis >= 0.0,
        "thermal.beta_dis: must be non-negative",
    );
    check(
        finite(t.t_amb) && finite(t.t_initial),
        "thermal: temperatures must be finite",
    );

    let e = &cfg.economic;
    check(
        finite(e.lambda_cyc) && e.lambda_cyc >= 0.0,
        "economic.lambda_cyc: must be non-negative",
    );
    check(
        finite(e.lambda_cal) && e.lambda_cal >= 0.0,
        "economic.lambda_cal: must be non-negative",
    );
    check(
        finite(e.interest_rate) && e.interest_rate >= 0.0,
        "economic.interest_rate: must be non-negative",
    );
    check(
        e.adaptive.window_days >= 1,
        "economic.adaptive.window_days: must be at least 1",
    );

    let h = &cfg.horizon;
    let spd = 24.0 / h.dt_hours;
    check(
        h.dt_hours > 0.0 && (spd - spd.round()).abs() < 1e-9,
        "horizon.dt_hours: must divide 24 evenly",
    );
    check(
        h.window_days >= h.commit_days && h.commit_days >= 1,
        "horizon: need window_days >= commit_days >= 1",
    );

    let a = &cfg.aging;
    check(
        finite(a.k_cyc_dis) && a.k_cyc_dis >= 0.0,
        "aging.k_cyc_dis: must be non-negative",
    );
    let coeffs_finite = a
        .cyc_chg_planes
        .iter()
        .all(|p| p.intercept.is_finite() && p.per_c_rate.is_finite())
        && a.cal_planes
            .iter()
            .all(|p| p.intercept.is_finite() && p.per_soc.is_finite() && p.per_celsius.is_finite());
    check(coeffs_finite, "aging: plane coefficients must be finite");
    if a.cyc_chg_planes.is_empty() {
        out.push("aging.cyc_chg_planes: plane set empty".into());
    }
    if a.cal_planes.is_empty() {
        out.push("aging.cal_planes: plane set empty".into());
    }
    if coeffs_finite && !a.cyc_chg_planes.is_empty() && b.c_rate_max_chg > 0.0 {
        let planes: Vec<_> = a
            .cyc_chg_planes
            .iter()
            .map(|p| (p.intercept, vec![p.per_c_rate]))
            .collect();
        match min_of_plane_max(&planes, &[(0.0, b.c_rate_max_chg)]) {
            Some(v) if v >= -1e-15 => {}
            _ => out.push("aging.cyc_chg_planes: maximum of planes is negative somewhere".into()),
        }
    }
    if coeffs_finite && !a.cal_planes.is_empty() && t.t_amb.is_finite() {
        let planes: Vec<_> = a
            .cal_planes
            .iter()
            .map(|p| (p.intercept, vec![p.per_soc, p.per_celsius]))
            .collect();
        match min_of_plane_max(&planes, &[(0.0, 1.0), (t.t_amb - 20.0, t.t_amb + 40.0)]) {
            Some(v) if v >= -1e-15 => {}
            _ => out.push("aging.cal_planes: maximum of planes is negative somewhere".into()),
        }
    }
    out
}

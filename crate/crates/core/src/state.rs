use serde::{Deserialize, Serialize};

use crate::config::Config;

/// Mutable life state of one simulated battery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantState {
    /// Stored energy [kWh].
    pub e_batt: f64,
    pub soh: f64,
    /// Battery temperature [°C].
    pub temp: f64,
    pub fec_total: f64,
    pub q_cal_total: f64,
    pub q_cyc_total: f64,
    pub day_index: usize,
}

impl PlantState {
    pub fn initial(cfg: &Config) -> Self {
        let b = &cfg.battery;
        Self {
            e_batt: b.initial_fill * b.e_nom * b.soh_initial,
            soh: b.soh_initial,
            temp: cfg.thermal.t_initial,
            fec_total: 0.0,
            q_cal_total: 0.0,
            q_cyc_total: 0.0,
            day_index: 0,
        }
    }

    pub fn fade_total(&self) -> f64 {
        self.q_cal_total + self.q_cyc_total
    }
}

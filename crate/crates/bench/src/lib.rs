//! Benchmark fixtures shared by the bench targets.

use bess_core::prices::bundled_year;
use bess_core::{Config, PlantState, WindowAnchor, WindowProblem};

/// The bundled synthetic year at the config's step length.
pub fn year_for(cfg: &Config) -> Vec<f64> {
    let minutes = (cfg.horizon.dt_hours * 60.0).round() as u32;
    bundled_year(minutes)
        .expect("bundled year resamples")
        .values
}

/// First optimization window of a fresh battery.
pub fn first_window<'a>(cfg: &Config, prices: &'a [f64], lambda: f64) -> WindowProblem<'a> {
    let s = PlantState::initial(cfg);
    WindowProblem {
        prices: &prices[..cfg.horizon.window_steps()],
        anchor: WindowAnchor {
            e0: s.e_batt,
            soh0: s.soh,
            t0: s.temp,
        },
        lambda_cyc: lambda,
        lambda_cal: lambda,
        c_ag: cfg.c_ag(),
    }
}

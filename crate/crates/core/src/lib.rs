//! Degradation-aware battery arbitrage: a rolling-horizon LP dispatcher, a
//! forward plant model, lifetime economics and the experiments built on them.

pub mod config;
pub mod dispatch;
pub mod economics;
pub mod error;
pub mod experiments;
pub mod life;
pub mod lp;
pub mod plant;
pub mod prices;
pub mod report;
pub mod state;

pub use config::{
    soh_at_eol, AgingModel, BatteryConfig, CalendarPlane, Config, CyclePlane, CycleThroughput,
    EconomicConfig, HorizonConfig, ThermalConfig,
};
pub use dispatch::{
    build_window_lp, extract_schedule, Schedule, VariableLayout, WindowAnchor, WindowProblem,
};
pub use economics::{
    adaptive_update, compute_c_ag, hypothesized_lambda, npv, profitability_index,
    AdaptiveLambdaState,
};
pub use error::{ConfigError, IoError, SimError};
pub use experiments::{find_peak, run_sweep, SweepMode, SweepRow, SweepSpec};
pub use life::{run_life, DayRecord, LambdaPolicy, LifeResult};
pub use lp::{solve_lp, LpSolution, LpStatus, SparseLp};
pub use plant::{apply_day, step_plant, DayOutcome};
pub use prices::{generate_synthetic_prices, ingest_prices, PriceSeries, SyntheticParams};
pub use report::{summarize, Summary};
pub use state::PlantState;

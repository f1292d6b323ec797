//! `bess`: simulate, sweep and analyze degradation-aware battery arbitrage.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use bess_core::dispatch::{build_window_lp, WindowProblem};
use bess_core::experiments::{find_peak, run_sweep, write_sweep_csv, SweepMode, SweepSpec};
use bess_core::life::{update_quasi_steady_state, LambdaPolicy};
use bess_core::lp::write_lp_format;
use bess_core::prices::{generate_synthetic_prices, ingest_prices, SyntheticParams, BUNDLED_SEED};
use bess_core::report::{read_daily_log_file, summarize, summarize_days, write_daily_log_file};
use bess_core::{run_life, Config, PlantState};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "bess",
    version,
    about = "Degradation-aware battery arbitrage simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one battery life and write the daily log and summary.
    Simulate(SimulateArgs),
    /// Run a lambda sweep and write the result table.
    Sweep(SweepArgs),
    /// Write a synthetic price CSV.
    GenPrices(GenPricesArgs),
    /// Recompute NPV, PI and aging shares from a daily log.
    Analyze(AnalyzeArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Configuration JSON; the reduced preset when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Price CSV (`timestamp,price_eur_mwh`); a synthetic year when omitted.
    #[arg(long)]
    prices: Option<PathBuf>,
    /// Seed of the synthetic year used when no price file is given.
    #[arg(long, default_value_t = BUNDLED_SEED)]
    seed: u64,
    /// Override the optimization window length.
    #[arg(long)]
    window_days: Option<usize>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    lambda_cyc: Option<f64>,
    #[arg(long)]
    lambda_cal: Option<f64>,
    /// Use the moving-average weight estimator instead of fixed weights.
    #[arg(long)]
    adaptive: bool,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Also write the first window's LP in CPLEX LP format.
    #[arg(long)]
    dump_lp: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    input: InputArgs,
    /// cal-only, cyc-only, both or grid2d.
    #[arg(long, default_value = "both")]
    mode: SweepMode,
    /// Comma-separated weights; powers of two from 0.25 to 64 by default.
    #[arg(long, value_delimiter = ',')]
    lambdas: Option<Vec<f64>>,
    /// Comma-separated annual interest rates.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    rates: Vec<f64>,
    /// Sweep table CSV.
    #[arg(long, default_value = "sweep.csv")]
    out: PathBuf,
    /// Peak summary JSON, one entry per interest rate.
    #[arg(long)]
    peak_out: Option<PathBuf>,
}

#[derive(Args)]
struct GenPricesArgs {
    #[arg(long, default_value_t = BUNDLED_SEED)]
    seed: u64,
    #[arg(long, default_value_t = 365)]
    days: usize,
    #[arg(long, default_value = "prices.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Daily log CSV written by `simulate`.
    #[arg(long)]
    log: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    rate: f64,
    /// Configuration the log came from (for the battery cost).
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Failures split by exit code.
enum Failure {
    /// Bad configuration or input data.
    Invalid(anyhow::Error),
    /// The run itself failed.
    Runtime(anyhow::Error),
}

impl Failure {
    fn invalid(e: impl Into<anyhow::Error>) -> Self {
        Failure::Invalid(e.into())
    }

    fn runtime(e: impl Into<anyhow::Error>) -> Self {
        Failure::Runtime(e.into())
    }
}

type CmdResult = Result<(), Failure>;

fn load_config(path: Option<&Path>, window_days: Option<usize>) -> Result<Config, Failure> {
    let mut cfg = match path {
        Some(p) => Config::load(p).map_err(Failure::invalid)?,
        None => Config::reduced_preset(),
    };
    if let Some(w) = window_days {
        cfg.horizon.window_days = w;
    }
    cfg.validate().map_err(Failure::invalid)
}

fn step_minutes(cfg: &Config) -> Result<u32, Failure> {
    let m = cfg.horizon.dt_hours * 60.0;
    if (m - m.round()).abs() > 1e-9 || m < 1.0 {
        return Err(Failure::invalid(anyhow!(
            "horizon.dt_hours must be a whole number of minutes"
        )));
    }
    Ok(m.round() as u32)
}

fn load_prices(input: &InputArgs, cfg: &Config) -> Result<Vec<f64>, Failure> {
    let step = step_minutes(cfg)?;
    let series = match &input.prices {
        Some(p) => ingest_prices(p, step).map_err(Failure::invalid)?,
        None => generate_synthetic_prices(input.seed, 365, &SyntheticParams::default())
            .resample(step)
            .map_err(Failure::invalid)?,
    };
    Ok(series.values)
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(Failure::Runtime)
}

fn simulate(args: SimulateArgs) -> CmdResult {
    let mut cfg = load_config(args.input.config.as_deref(), args.input.window_days)?;
    if let Some(l) = args.lambda_cyc {
        cfg.economic.lambda_cyc = l;
    }
    if let Some(l) = args.lambda_cal {
        cfg.economic.lambda_cal = l;
    }
    if args.adaptive {
        cfg.economic.adaptive.enabled = true;
    }
    let cfg = cfg.validate().map_err(Failure::invalid)?;
    let prices = load_prices(&args.input, &cfg)?;
    fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))
        .map_err(Failure::Runtime)?;

    if let Some(path) = &args.dump_lp {
        let mut state = PlantState::initial(&cfg);
        let anchor = update_quasi_steady_state(&mut state, &cfg);
        let window = cfg.horizon.window_steps().min(prices.len());
        let wp = WindowProblem {
            prices: &prices[..window],
            anchor,
            lambda_cyc: cfg.economic.lambda_cyc,
            lambda_cal: cfg.economic.lambda_cal,
            c_ag: cfg.c_ag(),
        };
        let (lp, _) = build_window_lp(&wp, &cfg).map_err(Failure::invalid)?;
        write_text(path, &write_lp_format(&lp))?;
    }

    let result =
        run_life(&cfg, &prices, LambdaPolicy::from_config(&cfg)).map_err(Failure::runtime)?;
    write_daily_log_file(&result.days, &args.out_dir.join("daily_log.csv"))
        .map_err(Failure::runtime)?;
    let summary = summarize(&result, &cfg);
    write_text(&args.out_dir.join("summary.json"), &summary.to_json())?;
    if !result.eol_reached {
        eprintln!("warning: stopped at the day cap before end of life");
    }
    if result.simultaneity_warnings > 0 {
        eprintln!(
            "warning: {} committed steps charged and discharged at once",
            result.simultaneity_warnings
        );
    }
    print!("{}", summary.to_json());
    Ok(())
}

fn sweep(args: SweepArgs) -> CmdResult {
    let cfg = load_config(args.input.config.as_deref(), args.input.window_days)?;
    let prices = load_prices(&args.input, &cfg)?;
    let mut spec = SweepSpec {
        mode: args.mode,
        interest_rates: args.rates,
        ..SweepSpec::default()
    };
    if let Some(l) = args.lambdas {
        spec.lambda_values = l;
    }
    spec.validate().map_err(|e| Failure::invalid(anyhow!(e)))?;
    let rows = run_sweep(&spec, &cfg, &prices).map_err(Failure::runtime)?;
    let f = fs::File::create(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))
        .map_err(Failure::Runtime)?;
    write_sweep_csv(&rows, std::io::BufWriter::new(f)).map_err(Failure::runtime)?;

    let failed = rows.iter().filter(|r| !r.is_ok()).count();
    if failed > 0 {
        eprintln!("warning: {failed} sweep rows failed; see the error column");
    }
    let mut peaks = Vec::new();
    for &i in &spec.interest_rates {
        let sub: Vec<_> = rows
            .iter()
            .filter(|r| r.interest_rate == i)
            .cloned()
            .collect();
        if let Ok(p) = find_peak(&sub) {
            peaks.push(serde_json::json!({
                "interest_rate": i,
                "lambda_cal": p.lambda_cal,
                "lambda_cyc": p.lambda_cyc,
                "pi": p.pi,
                "npv_eur": p.npv_eur,
            }));
        }
    }
    let text = serde_json::to_string_pretty(&peaks).expect("json values serialize") + "\n";
    match &args.peak_out {
        Some(p) => write_text(p, &text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn gen_prices(args: GenPricesArgs) -> CmdResult {
    let series = generate_synthetic_prices(args.seed, args.days, &SyntheticParams::default());
    series.write_csv_file(&args.out).map_err(Failure::runtime)
}

fn analyze(args: AnalyzeArgs) -> CmdResult {
    if !(args.rate.is_finite() && args.rate >= 0.0) {
        return Err(Failure::invalid(anyhow!("--rate must be non-negative")));
    }
    let cfg = load_config(args.config.as_deref(), None)?;
    let days = read_daily_log_file(&args.log).map_err(Failure::invalid)?;
    let summary = summarize_days(&days, cfg.battery.c_battery, args.rate);
    print!("{}", summary.to_json());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Sweep(a) => sweep(a),
        Command::GenPrices(a) => gen_prices(a),
        Command::Analyze(a) => analyze(a),
    };
    let _ = std::io::stdout().flush();
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

//! Price series: CSV ingestion, resampling and a seeded synthetic generator.

use std::f64::consts::PI;
use std::io::{Read, Write};
use std::path::Path;

use chrono::{DateTime, Duration, NaiveDateTime, TimeZone, Utc};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::IoError;

pub const CSV_HEADER: [&str; 2] = ["timestamp", "price_eur_mwh"];
const MWH_PER_KWH: f64 = 1000.0;

/// Uniformly spaced prices in EUR/kWh.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    pub start: DateTime<Utc>,
    pub step_minutes: u32,
    pub values: Vec<f64>,
}

impl PriceSeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn timestamp(&self, k: usize) -> DateTime<Utc> {
        self.start + Duration::minutes(self.step_minutes as i64 * k as i64)
    }

    pub fn mean(&self) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Change the step. Finer steps hold each value; coarser steps average
    /// whole groups of samples (a trailing partial group is dropped).
    pub fn resample(&self, target_minutes: u32) -> Result<PriceSeries, IoError> {
        let from = self.step_minutes;
        if target_minutes == 0 || from == 0 {
            return Err(IoError::Other("step must be positive".into()));
        }
        let values = if target_minutes == from {
            self.values.clone()
        } else if target_minutes < from {
            if !from.is_multiple_of(target_minutes) {
                return Err(IoError::Other(format!(
                    "cannot hold {from}-minute data onto a {target_minutes}-minute grid"
                )));
            }
            let k = (from / target_minutes) as usize;
            self.values
                .iter()
                .flat_map(|&v| std::iter::repeat_n(v, k))
                .collect()
        } else {
            if !target_minutes.is_multiple_of(from) {
                return Err(IoError::Other(format!(
                    "cannot average {from}-minute data onto a {target_minutes}-minute grid"
                )));
            }
            let k = (target_minutes / from) as usize;
            self.values
                .chunks_exact(k)
                .map(|c| c.iter().sum::<f64>() / k as f64)
                .collect()
        };
        Ok(PriceSeries {
            start: self.start,
            step_minutes: target_minutes,
            values,
        })
    }

    /// Write as `timestamp,price_eur_mwh`. Values that came from ingestion
    /// or the generator read back bit-for-bit.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), IoError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER)?;
        for (k, &v) in self.values.iter().enumerate() {
            let ts = self.timestamp(k).format("%Y-%m-%dT%H:%M:%SZ").to_string();
            w.write_record([ts, mwh_text(v)])?;
        }
        w.flush().map_err(|e| IoError::Other(e.to_string()))?;
        Ok(())
    }

    pub fn write_csv_file(&self, path: &Path) -> Result<(), IoError> {
        let f = std::fs::File::create(path).map_err(|e| IoError::file(path, e))?;
        self.write_csv(std::io::BufWriter::new(f))
    }
}

/// Shortest decimal EUR/MWh text whose parse divided by 1000 gives back `v`.
/// Not every double is a quotient by 1000; those get the nearest text.
fn mwh_text(v: f64) -> String {
    let mut x = v * MWH_PER_KWH;
    // Multiplication can land a few ulps off; walk toward a round-tripping
    // neighbour.
    for _ in 0..8 {
        if x / MWH_PER_KWH == v {
            return format!("{x}");
        }
        x = if x / MWH_PER_KWH < v {
            x.next_up()
        } else {
            x.next_down()
        };
    }
    // No representable pre-image; the nearest one is the best possible.
    format!("{}", v * MWH_PER_KWH)
}

fn parse_timestamp(s: &str) -> Option<DateTime<Utc>> {
    let s = s.trim();
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Some(t.with_timezone(&Utc));
    }
    for fmt in [
        "%Y-%m-%dT%H:%M:%S",
        "%Y-%m-%d %H:%M:%S",
        "%Y-%m-%dT%H:%M",
        "%Y-%m-%d %H:%M",
    ] {
        if let Ok(t) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(Utc.from_utc_datetime(&t));
        }
    }
    None
}

/// Read a price CSV, apply the absolute-value transform, convert to EUR/kWh
/// and resample onto `target_step` minutes.
///
/// The native step is the smallest spacing in the file. A single missing
/// sample is filled by holding the previous value; longer gaps are errors.
pub fn read_prices<R: Read>(input: R, target_step: u32) -> Result<PriceSeries, IoError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let header = rdr.headers()?.clone();
    if header.len() != 2
        || header.get(0) != Some(CSV_HEADER[0])
        || header.get(1) != Some(CSV_HEADER[1])
    {
        return Err(IoError::Malformed {
            line: 1,
            reason: format!("expected header `{}`", CSV_HEADER.join(",")),
        });
    }

    let mut rows: Vec<(DateTime<Utc>, f64)> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| IoError::Malformed {
            line,
            reason: e.to_string(),
        })?;
        if rec.len() != 2 {
            return Err(IoError::Malformed {
                line,
                reason: format!("expected 2 fields, found {}", rec.len()),
            });
        }
        let ts = parse_timestamp(&rec[0]).ok_or_else(|| IoError::Malformed {
            line,
            reason: format!("bad timestamp `{}`", &rec[0]),
        })?;
        let price: f64 = rec[1].parse().map_err(|_| IoError::Malformed {
            line,
            reason: format!("bad price `{}`", &rec[1]),
        })?;
        if !price.is_finite() {
            return Err(IoError::Malformed {
                line,
                reason: "price not finite".into(),
            });
        }
        if let Some(&(prev, _)) = rows.last() {
            if ts <= prev {
                return Err(IoError::NonMonotone { line });
            }
        }
        rows.push((ts, price));
    }
    if rows.len() < 2 {
        return Err(IoError::Other("need at least two price rows".into()));
    }

    let step = rows
        .windows(2)
        .map(|w| w[1].0 - w[0].0)
        .min()
        .expect("two rows");
    let step_minutes = step.num_minutes();
    if step_minutes <= 0 || step != Duration::minutes(step_minutes) {
        return Err(IoError::Other(format!("unsupported sample spacing {step}")));
    }

    let mut values = Vec::with_capacity(rows.len());
    values.push(rows[0].1.abs() / MWH_PER_KWH);
    for w in rows.windows(2) {
        let gap = w[1].0 - w[0].0;
        if gap.num_seconds() % step.num_seconds() != 0 {
            return Err(IoError::Other(format!(
                "timestamp {} is off the {step_minutes}-minute grid",
                w[1].0
            )));
        }
        match gap.num_seconds() / step.num_seconds() {
            1 => {}
            2 => values.push(*values.last().expect("non-empty")),
            _ => {
                return Err(IoError::Gap {
                    from: w[0].0.to_rfc3339(),
                    to: w[1].0.to_rfc3339(),
                })
            }
        }
        values.push(w[1].1.abs() / MWH_PER_KWH);
    }

    PriceSeries {
        start: rows[0].0,
        step_minutes: step_minutes as u32,
        values,
    }
    .resample(target_step)
}

pub fn ingest_prices(path: &Path, target_step: u32) -> Result<PriceSeries, IoError> {
    let f = std::fs::File::open(path).map_err(|e| IoError::file(path, e))?;
    read_prices(std::io::BufReader::new(f), target_step)
}

/// Shape of the synthetic price generator, EUR/kWh.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticParams {
    pub base: f64,
    pub daily_amplitude: f64,
    pub weekly_amplitude: f64,
    /// Standard deviation of the AR(1) noise process.
    pub noise: f64,
    /// Lag-one autocorrelation of the noise.
    pub noise_persistence: f64,
}

impl Default for SyntheticParams {
    fn default() -> Self {
        Self {
            base: 0.05,
            daily_amplitude: 0.02,
            weekly_amplitude: 0.005,
            noise: 0.01,
            noise_persistence: 0.9,
        }
    }
}

pub const SYNTHETIC_STEP_MINUTES: u32 = 15;

/// Deterministic quarter-hourly prices: daily and weekly sinusoids plus
/// stationary AR(1) noise, clamped at zero.
pub fn generate_synthetic_prices(seed: u64, days: usize, params: &SyntheticParams) -> PriceSeries {
    let per_day = (24 * 60 / SYNTHETIC_STEP_MINUTES) as usize;
    let n = days * per_day;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rho = params.noise_persistence.clamp(0.0, 0.999);
    let innovation = params.noise * (1.0 - rho * rho).sqrt();
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut ar = params.noise * normal.sample(&mut rng);
    let mut values = Vec::with_capacity(n);
    for k in 0..n {
        let hour = k as f64 * SYNTHETIC_STEP_MINUTES as f64 / 60.0;
        // Evening peak, early-morning trough.
        let daily = params.daily_amplitude * (2.0 * PI * (hour - 12.0) / 24.0).sin();
        // Cheaper weekends.
        let weekly = params.weekly_amplitude * (2.0 * PI * (hour - 48.0) / (24.0 * 7.0)).cos();
        let v = (params.base + daily + weekly + ar).max(0.0);
        // Keep every value reachable from a EUR/MWh figure so CSV output
        // reads back bit-for-bit.
        values.push(v * MWH_PER_KWH / MWH_PER_KWH);
        ar = rho * ar + innovation * normal.sample(&mut rng);
    }
    PriceSeries {
        start: Utc.with_ymd_and_hms(2021, 1, 1, 0, 0, 0).unwrap(),
        step_minutes: SYNTHETIC_STEP_MINUTES,
        values,
    }
}

/// Seed of the bundled synthetic year.
pub const BUNDLED_SEED: u64 = 2021;

/// The bundled synthetic year: default parameters and seed, resampled onto
/// `step_minutes`.
pub fn bundled_year(step_minutes: u32) -> Result<PriceSeries, IoError> {
    generate_synthetic_prices(BUNDLED_SEED, 365, &SyntheticParams::default()).resample(step_minutes)
}

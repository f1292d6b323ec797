//! Daily log CSV and life summary JSON.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::economics::{npv, profitability_index};
use crate::error::IoError;
use crate::life::{DayRecord, LifeResult, DAYS_PER_YEAR, REPORTING_DAYS_PER_YEAR};

pub const DAILY_LOG_COLUMNS: [&str; 7] = [
    "day",
    "revenue_eur",
    "q_cal",
    "q_cyc",
    "soh",
    "fec",
    "lambda_used",
];

pub fn write_daily_log<W: Write>(days: &[DayRecord], out: W) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(DAILY_LOG_COLUMNS)?;
    for d in days {
        w.write_record([
            d.day.to_string(),
            d.revenue_eur.to_string(),
            d.q_cal.to_string(),
            d.q_cyc.to_string(),
            d.soh.to_string(),
            d.fec.to_string(),
            d.lambda_used.to_string(),
        ])?;
    }
    w.flush().map_err(|e| IoError::Other(e.to_string()))?;
    Ok(())
}

pub fn read_daily_log<R: Read>(input: R) -> Result<Vec<DayRecord>, IoError> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers()?.clone();
    if !header.iter().eq(DAILY_LOG_COLUMNS.iter().copied()) {
        return Err(IoError::Malformed {
            line: 1,
            reason: format!("expected header `{}`", DAILY_LOG_COLUMNS.join(",")),
        });
    }
    let mut days = Vec::new();
    for rec in rdr.deserialize() {
        days.push(rec?);
    }
    Ok(days)
}

pub fn write_daily_log_file(days: &[DayRecord], path: &Path) -> Result<(), IoError> {
    let f = std::fs::File::create(path).map_err(|e| IoError::file(path, e))?;
    write_daily_log(days, std::io::BufWriter::new(f))
}

pub fn read_daily_log_file(path: &Path) -> Result<Vec<DayRecord>, IoError> {
    let f = std::fs::File::open(path).map_err(|e| IoError::file(path, e))?;
    read_daily_log(std::io::BufReader::new(f))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub t_eol_years: f64,
    pub npv_eur: f64,
    pub pi: f64,
    pub total_fec: f64,
    pub q_cal_share: f64,
}

impl Summary {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain struct serializes");
        s.push('\n');
        s
    }
}

/// Revenue per 365-day block of a daily log.
pub fn yearly_revenues(days: &[DayRecord]) -> Vec<f64> {
    days.chunks(DAYS_PER_YEAR)
        .map(|c| c.iter().map(|d| d.revenue_eur).sum())
        .collect()
}

/// Summarize a daily log. Zero total fade reports a calendar share of 0.
pub fn summarize_days(days: &[DayRecord], c_battery: f64, interest_rate: f64) -> Summary {
    let value = npv(&yearly_revenues(days), interest_rate);
    let q_cal: f64 = days.iter().map(|d| d.q_cal).sum();
    let q_cyc: f64 = days.iter().map(|d| d.q_cyc).sum();
    let fade = q_cal + q_cyc;
    Summary {
        t_eol_years: days.len() as f64 / REPORTING_DAYS_PER_YEAR,
        npv_eur: value,
        pi: profitability_index(value, c_battery).unwrap_or(f64::NAN),
        total_fec: days.iter().map(|d| d.fec).sum(),
        q_cal_share: if fade > 0.0 { q_cal / fade } else { 0.0 },
    }
}

pub fn summarize(result: &LifeResult, cfg: &Config) -> Summary {
    let value = npv(&result.yearly_revenues, cfg.economic.interest_rate);
    let s = &result.final_state;
    let fade = s.q_cal_total + s.q_cyc_total;
    Summary {
        t_eol_years: result.t_eol_years,
        npv_eur: value,
        pi: profitability_index(value, cfg.battery.c_battery).unwrap_or(f64::NAN),
        total_fec: result.total_fec(),
        q_cal_share: if fade > 0.0 {
            s.q_cal_total / fade
        } else {
            0.0
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(day: usize, revenue: f64) -> DayRecord {
        DayRecord {
            day,
            revenue_eur: revenue,
            q_cal: 1e-5,
            q_cyc: 3e-5,
            soh: 1.0 - 4e-5 * day as f64,
            fec: 0.7,
            lambda_used: 2.5,
        }
    }

    #[test]
    fn header_is_exact() {
        let mut buf = Vec::new();
        write_daily_log(&[rec(1, 0.1)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("day,revenue_eur,q_cal,q_cyc,soh,fec,lambda_used\n"));
    }

    #[test]
    fn log_round_trip() {
        let days: Vec<_> = (1..=40).map(|d| rec(d, 0.1 * d as f64 / 3.0)).collect();
        let mut buf = Vec::new();
        write_daily_log(&days, &mut buf).unwrap();
        assert_eq!(read_daily_log(buf.as_slice()).unwrap(), days);
    }

    #[test]
    fn wrong_header_rejected() {
        assert!(read_daily_log("day,revenue\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn summary_keys() {
        let s = summarize_days(&[rec(1, 1.0), rec(2, 2.0)], 100.0, 0.0);
        let v: serde_json::Value = serde_json::from_str(&s.to_json()).unwrap();
        let mut keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        keys.sort();
        assert_eq!(
            keys,
            ["npv_eur", "pi", "q_cal_share", "t_eol_years", "total_fec"]
        );
        assert_eq!(s.npv_eur, 3.0);
        assert!((s.q_cal_share - 0.25).abs() < 1e-12);
    }

    #[test]
    fn yearly_blocks() {
        let days: Vec<_> = (1..=400).map(|d| rec(d, 1.0)).collect();
        assert_eq!(yearly_revenues(&days), vec![365.0, 35.0]);
    }
}

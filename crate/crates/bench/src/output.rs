//! CSV and JSON files for a finished report.
//!
//! Floats are written with Rust's shortest round-trip formatting, so every
//! value parses back to the same `f64`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::BenchError;
use crate::experiment::{ExperimentReport, MethodRecord};

pub const LEVELS_CSV: &str = "levels.csv";
pub const COST_CSV: &str = "cost.csv";
pub const RATES_CSV: &str = "rates.csv";
pub const REPORT_JSON: &str = "report.json";
pub const TIMING_JSON: &str = "timing.json";

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| BenchError::output(path, e))?;
    w.write_record(header).map_err(|e| BenchError::output(path, e))?;
    for row in rows {
        w.write_record(row).map_err(|e| BenchError::output(path, e))?;
    }
    w.flush().map_err(|e| BenchError::output(path, e))
}

fn cost_row(epsilon: f64, method: &str, runs: &[&MethodRecord]) -> Option<Vec<String>> {
    let ok: Vec<_> = runs.iter().filter_map(|m| m.estimate.as_ref()).collect();
    if ok.is_empty() {
        return None;
    }
    let n = ok.len() as f64;
    let avg = |f: &dyn Fn(&mlmc::Estimate64) -> f64| ok.iter().map(|e| f(e)).sum::<f64>() / n;
    let cost = avg(&|e| e.total_cost as f64);
    Some(vec![
        epsilon.to_string(),
        method.to_owned(),
        cost.to_string(),
        (cost * epsilon * epsilon).to_string(),
        avg(&|e| e.value).to_string(),
        avg(&|e| e.half_width).to_string(),
    ])
}

/// Writes `levels.csv`, `cost.csv` and `rates.csv` into `out_dir`.
///
/// `levels.csv` holds the first repetition's MLMC levels; `cost.csv` holds
/// means over the repetitions that succeeded, one row per method.
pub fn emit_csv(report: &ExperimentReport, out_dir: &Path) -> Result<Vec<PathBuf>, BenchError> {
    fs::create_dir_all(out_dir).map_err(|e| BenchError::output(out_dir, e))?;

    let mut levels = Vec::new();
    let mut costs = Vec::new();
    for rec in &report.records {
        if let Some(est) = &rec.runs[0].mlmc.estimate {
            for s in &est.levels {
                levels.push(vec![
                    rec.epsilon.to_string(),
                    s.level.to_string(),
                    s.n_samples.to_string(),
                    opt(s.variance()),
                    opt(s.mean()),
                    s.cost.to_string(),
                ]);
            }
        }
        let ml: Vec<_> = rec.runs.iter().map(|r| &r.mlmc).collect();
        let sm: Vec<_> = rec.runs.iter().map(|r| &r.std_mc).collect();
        costs.extend(cost_row(rec.epsilon, "mlmc", &ml));
        costs.extend(cost_row(rec.epsilon, "standard-mc", &sm));
    }
    let rates: Vec<Vec<String>> = report
        .rates
        .iter()
        .map(|r| vec![r.alpha.to_string(), r.beta.to_string(), r.gamma.to_string()])
        .collect();

    let files = [
        (LEVELS_CSV, &["epsilon", "level", "N_l", "var_l", "mean_l", "cost_l"][..], levels),
        (COST_CSV, &["epsilon", "method", "total_cost", "cost_times_eps2", "value", "half_width"][..], costs),
        (RATES_CSV, &["alpha", "beta", "gamma"][..], rates),
    ];
    let mut written = Vec::new();
    for (name, header, rows) in files {
        let path = out_dir.join(name);
        write_csv(&path, header, &rows)?;
        written.push(path);
    }
    Ok(written)
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), BenchError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| BenchError::output(path, std::io::Error::other(e)))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| BenchError::output(path, e))
}

/// Writes `report.json`, which depends only on the config and seed.
pub fn emit_json(report: &ExperimentReport, out_dir: &Path) -> Result<PathBuf, BenchError> {
    fs::create_dir_all(out_dir).map_err(|e| BenchError::output(out_dir, e))?;
    let path = out_dir.join(REPORT_JSON);
    write_json(&path, report)?;
    Ok(path)
}

#[derive(Serialize)]
struct TimingRow {
    epsilon: f64,
    mlmc_seconds: f64,
    std_mc_seconds: f64,
}

/// Writes `timing.json` with the wall time per tolerance.
pub fn emit_timing(report: &ExperimentReport, out_dir: &Path) -> Result<PathBuf, BenchError> {
    let rows: Vec<TimingRow> = report
        .records
        .iter()
        .map(|r| TimingRow {
            epsilon: r.epsilon,
            mlmc_seconds: r.wall_seconds.mlmc,
            std_mc_seconds: r.wall_seconds.std_mc,
        })
        .collect();
    let path = out_dir.join(TIMING_JSON);
    write_json(&path, &rows)?;
    Ok(path)
}

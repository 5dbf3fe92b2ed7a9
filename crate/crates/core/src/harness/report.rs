//! CSV and plain-text output.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::runner::{AggregateResult, SweepPoint};
use crate::error::{Error, Result};
use crate::metrics::{complexity_counts, ComplexityAlgorithm, ComplexityParams};

/// Nine significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.8e}")
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    csv::Writer::from_path(path).map_err(|e| csv_error(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::io(path, std::io::Error::other(format!("{other:?}"))),
    }
}

/// `snapshot,algorithm,mean_sinr_db,mean_delta,update_rate_cum`, one row per
/// snapshot and algorithm, snapshot-major.
pub fn emit_csv(result: &AggregateResult, path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["snapshot", "algorithm", "mean_sinr_db", "mean_delta", "update_rate_cum"])
        .map_err(|e| csv_error(path, e))?;
    for i in 0..result.snapshots {
        for a in &result.algorithms {
            w.write_record([
                (i + 1).to_string(),
                a.label.clone(),
                format_float(a.mean_sinr_db[i]),
                format_float(a.mean_delta[i]),
                format_float(a.update_rate_cum[i]),
            ])
            .map_err(|e| csv_error(path, e))?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// `snr_db,algorithm,tail_sinr_db,update_rate`, where the SINR is the linear
/// mean over the trailing `tail_fraction` of snapshots.
pub fn emit_sweep_csv(points: &[SweepPoint], tail_fraction: f64, path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["snr_db", "algorithm", "tail_sinr_db", "update_rate"])
        .map_err(|e| csv_error(path, e))?;
    for p in points {
        let n = p.result.snapshots;
        let tail = ((n as f64 * tail_fraction).ceil() as usize).clamp(1, n);
        for a in &p.result.algorithms {
            w.write_record([
                format_float(p.snr_db),
                a.label.clone(),
                format_float(a.window_sinr_db(n - tail + 1, n)),
                format_float(a.mean_update_rate),
            ])
            .map_err(|e| csv_error(path, e))?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Update rates reported alongside the complexity comparison; full-rate
/// algorithms use 1.
pub fn default_tau(algorithm: ComplexityAlgorithm) -> f64 {
    match algorithm {
        ComplexityAlgorithm::SmSg => 0.198,
        ComplexityAlgorithm::SmRls => 0.063,
        ComplexityAlgorithm::SmAp => 0.137,
        ComplexityAlgorithm::SmCg => 0.060,
        ComplexityAlgorithm::DsCg => 0.221,
        ComplexityAlgorithm::Sg | ComplexityAlgorithm::Rls | ComplexityAlgorithm::Cg => 1.0,
    }
}

/// One row `m,algorithm,tau,additions,multiplications` per sensor count and
/// algorithm.
pub fn emit_complexity_table(
    m_range: std::ops::RangeInclusive<u64>,
    taus: &[(ComplexityAlgorithm, f64)],
    l: u64,
    n: u64,
    path: &Path,
) -> Result<()> {
    if m_range.is_empty() {
        return Err(Error::invalid("m_range", "must be non-empty"));
    }
    let mut w = writer(path)?;
    w.write_record(["m", "algorithm", "tau", "additions", "multiplications"])
        .map_err(|e| csv_error(path, e))?;
    for m in m_range {
        for &(alg, tau) in taus {
            let c = complexity_counts(alg, &ComplexityParams::new(m, n, tau, l)?);
            w.write_record([
                m.to_string(),
                alg.name().to_string(),
                format!("{tau}"),
                c.additions.to_string(),
                c.multiplications.to_string(),
            ])
            .map_err(|e| csv_error(path, e))?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Human-readable run summary.
pub fn summary(result: &AggregateResult) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "experiment   {}", result.name);
    let _ = writeln!(s, "config hash  {}", result.config_hash);
    let _ = writeln!(s, "master seed  {}", result.master_seed);
    let _ = writeln!(s, "runs         {}", result.runs);
    let _ = writeln!(s, "snapshots    {}", result.snapshots);
    let _ = writeln!(s, "snr_db       {}", result.snr_db);
    let _ = writeln!(s);
    let _ = writeln!(
        s,
        "{:<18} {:>8} {:>12} {:>14} {:>12} {:>14} {:>14}",
        "algorithm", "ok runs", "update rate", "final SINR dB", "max |wᴴa−γ|", "additions", "mults"
    );
    for a in &result.algorithms {
        let (add, mul) = a
            .complexity
            .map(|c| (c.additions.to_string(), c.multiplications.to_string()))
            .unwrap_or_else(|| ("-".into(), "-".into()));
        let last = a.mean_sinr_db.last().copied().unwrap_or(f64::NAN);
        let _ = writeln!(
            s,
            "{:<18} {:>8} {:>11.2}% {:>14.2} {:>12.1e} {:>14} {:>14}",
            a.label,
            a.successful_runs,
            100.0 * a.mean_update_rate,
            last,
            a.max_constraint_error,
            add,
            mul
        );
    }
    if !result.failures.is_empty() {
        let _ = writeln!(s, "\nfailures:");
        for f in &result.failures {
            let _ = writeln!(s, "  run {} {}: {}", f.run, f.algorithm, f.message);
        }
    }
    s
}

pub fn write_text(text: &str, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

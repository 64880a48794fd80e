//! CSV writers. Numbers use Rust's shortest round-trip formatting, which is
//! locale-independent.

use std::fs::File;
use std::path::Path;

use qsched_core::capacity::Slackness;
use qsched_core::experiments::{RunAggregate, TailEstimate};

use crate::CliError;

fn writer(path: &Path) -> Result<csv::Writer<File>, CliError> {
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)?)
}

/// `t,mean_total_q,ci_lo,ci_hi`, one row per recorded slot.
pub fn write_timeseries(path: &Path, agg: &RunAggregate) -> Result<(), CliError> {
    let mut w = writer(path)?;
    w.write_record(["t", "mean_total_q", "ci_lo", "ci_hi"])?;
    for ((t, m), h) in agg.slots.iter().zip(&agg.mean_total).zip(&agg.half_width) {
        w.write_record([t.to_string(), m.to_string(), (m - h).to_string(), (m + h).to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// `policy,time_avg_q,final_mean_q,stable`.
pub fn write_summary(path: &Path, rows: &[(String, RunAggregate)]) -> Result<(), CliError> {
    let mut w = writer(path)?;
    w.write_record(["policy", "time_avg_q", "final_mean_q", "stable"])?;
    for (name, agg) in rows {
        w.write_record([
            name.clone(),
            agg.time_avg.to_string(),
            agg.final_mean().to_string(),
            u8::from(agg.stable()).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `x,survival,log_survival`; the log of a zero survival is written as `-inf`.
pub fn write_tail(path: &Path, est: &TailEstimate) -> Result<(), CliError> {
    let mut w = writer(path)?;
    w.write_record(["x", "survival", "log_survival"])?;
    for (x, s) in est.thresholds.iter().zip(&est.survival) {
        w.write_record([x.to_string(), s.to_string(), s.ln().to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// `job_type,server,alpha`.
pub fn write_allocation(path: &Path, s: &Slackness) -> Result<(), CliError> {
    let mut w = writer(path)?;
    w.write_record(["job_type", "server", "alpha"])?;
    for ((i, j), a) in s.alpha.iter() {
        w.write_record([i.to_string(), j.to_string(), a.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// `t,total_q` for every slot.
pub fn write_totals(path: &Path, totals: &[u64]) -> Result<(), CliError> {
    let mut w = writer(path)?;
    w.write_record(["t", "total_q"])?;
    for (t, q) in totals.iter().enumerate() {
        w.write_record([t.to_string(), q.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

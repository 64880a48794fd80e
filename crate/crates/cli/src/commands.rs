use std::io::Write;
use std::path::{Path, PathBuf};

use qsched_core::capacity::max_slackness;
use qsched_core::experiments::{
    aggregate_runs, percentile_thresholds, run_counterexample_with, run_policy, tail_estimate,
    tail_samples, RunAggregate,
};
use qsched_core::matrix::Matrix;
use qsched_core::policies::PolicyKind;

use crate::config::{self, LoadedConfig};
use crate::output;
use crate::CliError;

/// Options shared by every config-driven command.
#[derive(Clone, Debug)]
pub struct Common {
    pub config: PathBuf,
    pub seed: Option<u64>,
    pub runs: Option<usize>,
    pub out: PathBuf,
    pub threads: Option<usize>,
}

fn load(common: &Common) -> Result<LoadedConfig, CliError> {
    let mut cfg = config::load(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.plan.root_seed = seed;
    }
    if let Some(runs) = common.runs {
        if runs == 0 {
            return Err(CliError::Config("--runs must be at least 1".into()));
        }
        cfg.plan.num_runs = runs;
    }
    std::fs::create_dir_all(&common.out)?;
    Ok(cfg)
}

fn simulate(cfg: &LoadedConfig, kind: &PolicyKind, threads: Option<usize>) -> Result<RunAggregate, CliError> {
    let runs = run_policy(&cfg.plan, kind, threads).map_err(|e| CliError::Runtime(e.to_string()))?;
    if let Some(bad) = runs.iter().find(|r| !r.violations.is_empty()) {
        return Err(CliError::Runtime(format!(
            "{} invariant violations in run with seed {}; first: {}",
            bad.violations.len(),
            bad.seed,
            bad.violations[0]
        )));
    }
    aggregate_runs(&runs).map_err(|e| CliError::Runtime(e.to_string()))
}

fn summary_line(name: &str, agg: &RunAggregate) -> String {
    format!(
        "{name}: time_avg_q={:.4} final_mean_q={:.4} stable={}",
        agg.time_avg,
        agg.final_mean(),
        u8::from(agg.stable())
    )
}

pub fn timeseries_path(out: &Path, policy: &str) -> PathBuf {
    out.join(format!("timeseries_{policy}.csv"))
}

pub fn cmd_run(common: &Common, policy: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = load(common)?;
    let kind = cfg.policy(policy)?.clone();
    let agg = simulate(&cfg, &kind, common.threads)?;
    output::write_timeseries(&timeseries_path(&common.out, policy), &agg)?;
    writeln!(stdout, "{}", summary_line(policy, &agg))?;
    Ok(())
}

pub fn cmd_compare(common: &Common, policies: Option<&[String]>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = load(common)?;
    let names: Vec<String> = match policies {
        Some(list) => list.to_vec(),
        None => cfg.policy_names.clone(),
    };
    let mut distinct = names.clone();
    distinct.sort();
    distinct.dedup();
    if distinct.len() < 2 || distinct.len() != names.len() {
        return Err(CliError::Config(
            "compare needs at least two distinct policies".into(),
        ));
    }
    let kinds = names
        .iter()
        .map(|n| cfg.policy(n).cloned())
        .collect::<Result<Vec<_>, _>>()?;

    let mut rows = Vec::new();
    for (name, kind) in names.iter().zip(&kinds) {
        let agg = simulate(&cfg, kind, common.threads)?;
        output::write_timeseries(&timeseries_path(&common.out, name), &agg)?;
        writeln!(stdout, "{}", summary_line(name, &agg))?;
        rows.push((name.clone(), agg));
    }
    output::write_summary(&common.out.join("summary.csv"), &rows)?;
    Ok(())
}

pub fn cmd_tail(
    common: &Common,
    policy: &str,
    t: u64,
    xs: Option<&[f64]>,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let cfg = load(common)?;
    if !cfg.plan.tail_slots.contains(&t) {
        return Err(CliError::Config(format!(
            "slot {t} is not in experiment.tail_slots {:?}",
            cfg.plan.tail_slots
        )));
    }
    let kind = cfg.policy(policy)?.clone();
    let runs = run_policy(&cfg.plan, &kind, common.threads).map_err(|e| CliError::Runtime(e.to_string()))?;
    let samples = tail_samples(&runs, t).map_err(|e| CliError::Runtime(e.to_string()))?;
    let thresholds = match xs {
        Some(xs) => xs.to_vec(),
        None => percentile_thresholds(&samples, 20),
    };
    let est = tail_estimate(&runs, t, &thresholds).map_err(|e| CliError::Runtime(e.to_string()))?;
    output::write_tail(&common.out.join(format!("tail_{policy}_t{t}.csv")), &est)?;
    match &est.fit {
        Some(fit) => writeln!(
            stdout,
            "{policy} t={t}: slope={:.6} r_squared={:.4} points={}",
            fit.slope, fit.r_squared, fit.points
        )?,
        None => writeln!(stdout, "{policy} t={t}: fit unavailable (too few exceedances)")?,
    }
    Ok(())
}

pub fn cmd_slackness(
    lambda: &[f64],
    mu: &Matrix<f64>,
    csv: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let s = max_slackness(lambda, mu).map_err(|e| CliError::Config(e.to_string()))?;
    writeln!(stdout, "delta_max = {:.6}", s.delta)?;
    writeln!(stdout, "alpha:")?;
    for row in s.alpha.to_rows() {
        let cells: Vec<String> = row.iter().map(|a| format!("{a:.6}")).collect();
        writeln!(stdout, "  {}", cells.join(" "))?;
    }
    if let Some(path) = csv {
        output::write_allocation(path, &s)?;
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CounterexamplePolicy {
    EmpiricalMean,
    Oracle,
}

pub fn cmd_counterexample(
    horizon: u64,
    forced: bool,
    seed: u64,
    policy: CounterexamplePolicy,
    out: &Path,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let kind = match policy {
        CounterexamplePolicy::EmpiricalMean => PolicyKind::EmpiricalMean { default_rate: 1.0 },
        CounterexamplePolicy::Oracle => PolicyKind::Oracle { rates: None },
    };
    if horizon < 10_000 {
        return Err(CliError::Config("--horizon must be at least 10000".into()));
    }
    let result = run_counterexample_with(horizon, forced, seed, &kind)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    std::fs::create_dir_all(out)?;
    output::write_totals(&out.join("counterexample.csv"), &result.totals)?;
    writeln!(
        stdout,
        "slope={:.6} mean_total_q={:.4} final_total_q={}",
        result.slope,
        result.mean_total(),
        result.totals.last().copied().unwrap_or(0)
    )?;
    Ok(())
}

/// `"0.1,0.2"` into numbers.
pub fn parse_list<T: std::str::FromStr>(text: &str) -> Result<Vec<T>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| CliError::Config(format!("`{}` is not a number", s.trim())))
        })
        .collect()
}

/// `"a,b;c,d"` into a matrix, rows separated by `;`.
pub fn parse_matrix(text: &str) -> Result<Matrix<f64>, CliError> {
    let rows = text
        .split(';')
        .map(parse_list::<f64>)
        .collect::<Result<Vec<_>, _>>()?;
    Matrix::from_rows(rows).map_err(|e| CliError::Config(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_flag() {
        let m = parse_matrix("0.5, 0.25; 1,0.1").unwrap();
        assert_eq!(m.to_rows(), vec![vec![0.5, 0.25], vec![1.0, 0.1]]);
        assert!(parse_matrix("1,2;3").is_err());
        assert!(parse_list::<f64>("1,x").is_err());
    }

    #[test]
    fn slackness_output() {
        let mut out = Vec::new();
        cmd_slackness(&[0.2], &parse_matrix("0.5").unwrap(), None, &mut out).unwrap();
        assert!(String::from_utf8(out).unwrap().starts_with("delta_max = 0.300000\n"));

        let mut out = Vec::new();
        cmd_slackness(&[0.3, 0.3], &parse_matrix("0.5,0.5;0.5,0.5").unwrap(), None, &mut out).unwrap();
        assert!(String::from_utf8(out).unwrap().starts_with("delta_max = 0.200000\n"));

        let err = cmd_slackness(&[0.3], &parse_matrix("0.5,0.5;0.5,0.5").unwrap(), None, &mut Vec::new());
        assert_eq!(err.unwrap_err().exit_code(), 2);
    }
}

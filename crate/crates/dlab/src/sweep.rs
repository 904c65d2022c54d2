//! Run every config in a directory and summarize final cumulative regret.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use dlab_core::RegretLedger;

use crate::config::ExperimentConfig;
use crate::output::write_csv_atomic;
use crate::run::run_experiment;

/// Quantile with linear interpolation between order statistics.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    quantile(&v, 0.5)
}

/// Least-squares slope of `ln y` on `ln t`. `None` unless every point is
/// strictly positive and at least two distinct `t` are given.
pub fn fit_exponent(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 || points.iter().any(|&(t, y)| !(t > 0.0 && y > 0.0)) {
        return None;
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / sxx)
}

/// `T/4, T/2, T`, deduplicated, at least round 1.
pub fn checkpoints(horizon: usize) -> Vec<usize> {
    let mut c: Vec<usize> = [horizon / 4, horizon / 2, horizon].iter().map(|&t| t.max(1)).collect();
    c.dedup();
    c
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub name: String,
    pub horizon: usize,
    pub seeds: usize,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    /// `(t, median cumulative regret at t)` at the checkpoints.
    pub checkpoints: Vec<(usize, f64)>,
    pub exponent: Option<f64>,
}

pub fn summarize(name: &str, horizon: usize, ledgers: &[RegretLedger]) -> Summary {
    let mut finals: Vec<f64> = ledgers.iter().map(|l| l.cumulative_at(horizon)).collect();
    finals.sort_by(f64::total_cmp);
    let cps: Vec<(usize, f64)> = checkpoints(horizon)
        .into_iter()
        .map(|t| (t, median(&ledgers.iter().map(|l| l.cumulative_at(t)).collect::<Vec<_>>())))
        .collect();
    let pts: Vec<(f64, f64)> = cps.iter().map(|&(t, y)| (t as f64, y)).collect();
    Summary {
        name: name.to_string(),
        horizon,
        seeds: ledgers.len(),
        median: quantile(&finals, 0.5),
        q1: quantile(&finals, 0.25),
        q3: quantile(&finals, 0.75),
        checkpoints: cps,
        exponent: fit_exponent(&pts),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub summaries: Vec<(PathBuf, Summary)>,
    pub failures: Vec<(PathBuf, String)>,
}

impl SweepReport {
    pub fn table(&self) -> String {
        let mut s = String::from("config\thorizon\tseeds\tmedian\tq1\tq3\texponent\n");
        for (path, m) in &self.summaries {
            let e = m.exponent.map_or("nan".to_string(), |e| format!("{e:.4}"));
            s.push_str(&format!("{}\t{}\t{}\t{:.6}\t{:.6}\t{:.6}\t{}\n", path.display(), m.horizon, m.seeds, m.median, m.q1, m.q3, e));
        }
        s
    }
}

/// `*.json` files directly inside `dir`, sorted by name.
pub fn config_paths(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).with_context(|| format!("reading {}", dir.display()))? {
        let p = entry?.path();
        if p.is_file() && p.extension().is_some_and(|e| e == "json") {
            out.push(p);
        }
    }
    out.sort();
    Ok(out)
}

fn run_one(path: &Path) -> Result<Summary> {
    let cfg = ExperimentConfig::load(path)?;
    let ledgers = run_experiment(&cfg)?;
    let out = match &cfg.out {
        Some(o) if o.is_relative() => path.parent().unwrap_or(Path::new(".")).join(o),
        Some(o) => o.clone(),
        None => path.with_extension("csv"),
    };
    write_csv_atomic(&out, &ledgers)?;
    Ok(summarize(&cfg.name, cfg.horizon, &ledgers))
}

/// A failing config is recorded and the rest still run.
pub fn sweep(dir: &Path, jobs: usize) -> Result<SweepReport> {
    if jobs == 0 {
        bail!("--jobs must be at least 1");
    }
    let paths = config_paths(dir)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
    let results: Vec<(PathBuf, Result<Summary>)> = pool.install(|| paths.par_iter().map(|p| (p.clone(), run_one(p))).collect());
    let mut report = SweepReport { summaries: Vec::new(), failures: Vec::new() };
    for (p, r) in results {
        match r {
            Ok(s) => report.summaries.push((p, s)),
            Err(e) => report.failures.push((p, format!("{e:#}"))),
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quartiles_interpolate() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.5), 2.5);
        assert_eq!(quantile(&v, 0.25), 1.75);
        assert_eq!(quantile(&v, 0.75), 3.25);
        assert_eq!(median(&[5.0, 1.0, 3.0]), 3.0);
    }

    #[test]
    fn exponent_of_power_laws() {
        for &k in &[0.5, 2.0 / 3.0, 1.0] {
            let pts: Vec<(f64, f64)> = [250.0, 500.0, 1000.0].iter().map(|&t: &f64| (t, 3.0 * t.powf(k))).collect();
            assert!((fit_exponent(&pts).unwrap() - k).abs() < 1e-12);
        }
        assert_eq!(fit_exponent(&[(1.0, 0.0), (2.0, 1.0)]), None);
        assert_eq!(checkpoints(1), vec![1]);
        assert_eq!(checkpoints(100), vec![25, 50, 100]);
    }
}

//! Ledger CSV emission.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use dlab_core::RegretLedger;

pub const CSV_HEADER: [&str; 7] = ["t", "inst_regret", "cum_regret", "reward", "seed", "algo", "env"];

/// 17 significant digits, round-trip exact.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(out: W, ledgers: &[RegretLedger]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for l in ledgers {
        let seed = l.seed.to_string();
        for r in &l.rows {
            w.write_record([
                r.t.to_string().as_str(),
                &fmt_f64(r.inst_regret),
                &fmt_f64(r.cum_regret),
                &fmt_f64(r.reward),
                &seed,
                &l.algo,
                &l.env,
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Write to a sibling temporary file, then rename over `path`.
pub fn write_csv_atomic(path: &Path, ledgers: &[RegretLedger]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let name = path.file_name().context("output path has no file name")?.to_string_lossy();
    let tmp = path.with_file_name(format!(".{name}.{}.tmp", std::process::id()));
    {
        let f = std::fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
        write_csv(std::io::BufWriter::new(f), ledgers)?;
    }
    std::fs::rename(&tmp, path).with_context(|| format!("renaming onto {}", path.display()))?;
    Ok(())
}

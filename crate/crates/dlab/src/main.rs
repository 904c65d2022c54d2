use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use dlab::config::ExperimentConfig;
use dlab::output::write_csv_atomic;
use dlab::run::run_experiment;
use dlab::{acceptance, sweep, tools};

#[derive(Parser)]
#[command(name = "dlab", version, about = "Seeded experiments for interactive decision making")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one experiment config and write its regret ledger as CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every *.json config in a directory and summarize.
    Sweep {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Solve an offset DEC problem and print the certificate as JSON.
    Dec {
        #[arg(long)]
        problem: PathBuf,
    },
    /// Eluder dimension of a finite class.
    Eluder {
        #[arg(long)]
        class: PathBuf,
        #[arg(long)]
        eps: f64,
    },
    /// G-optimal design on a finite point set.
    Design {
        #[arg(long)]
        points: PathBuf,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
    },
    /// Run the acceptance suite.
    Accept,
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn print_json<T: serde::Serialize>(v: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res: Result<bool> = match cli.cmd {
        Cmd::Run { config, out } => (|| {
            let cfg = ExperimentConfig::load(&config)?;
            let ledgers = run_experiment(&cfg)?;
            write_csv_atomic(&out, &ledgers)?;
            Ok(true)
        })(),
        Cmd::Sweep { dir, jobs } => sweep::sweep(&dir, jobs).map(|report| {
            print!("{}", report.table());
            for (p, e) in &report.failures {
                eprintln!("FAILED {}: {e}", p.display());
            }
            if !report.failures.is_empty() {
                eprintln!("{} of {} configs failed", report.failures.len(), report.failures.len() + report.summaries.len());
            }
            report.failures.is_empty()
        }),
        Cmd::Dec { problem } => read(&problem).and_then(|t| tools::dec_json(&t)).and_then(|c| print_json(&c)).map(|_| true),
        Cmd::Eluder { class, eps } => read(&class).and_then(|t| tools::eluder_json(&t, eps)).and_then(|r| print_json(&r)).map(|_| true),
        Cmd::Design { points, tol } => read(&points).and_then(|t| tools::design_json(&t, tol)).and_then(|r| print_json(&r)).map(|_| true),
        Cmd::Accept => {
            let reports = acceptance::run_all();
            for r in &reports {
                println!("{}", r.line());
            }
            let passed = reports.iter().filter(|r| r.pass()).count();
            println!("{passed}/{} criteria passed", reports.len());
            Ok(passed == reports.len())
        }
    };
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

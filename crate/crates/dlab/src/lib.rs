//! Experiment harness for `dlab-core`: JSON configs, seeded multi-run
//! execution, CSV ledgers, sweeps and the acceptance suite.

pub mod acceptance;
pub mod config;
pub mod output;
pub mod registry;
pub mod run;
pub mod sweep;
pub mod tools;

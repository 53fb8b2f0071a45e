//! Ensemble orchestration, result files and command-line plumbing around
//! [`shgsim_core`].

pub mod config;
pub mod ensemble;
pub mod error;
pub mod oracle;
pub mod output;
pub mod sweep;

use std::path::PathBuf;
use std::time::Instant;

use log::info;
use shgsim_core::ReportWithErrors;

pub use config::{Profile, SimConfig};
pub use ensemble::{simulate, Ensemble};
pub use error::{Result, RunError};

pub struct RunOutput {
    pub reports: Vec<ReportWithErrors>,
    pub csv: String,
    pub wall_time_s: f64,
    pub workers: usize,
}

/// Integrate the ensemble and format the result table, without touching
/// the filesystem.
pub fn execute(cfg: &SimConfig) -> Result<RunOutput> {
    let start = Instant::now();
    let ensemble = simulate(cfg)?;
    let reports = ensemble.reports()?;
    let csv = output::to_csv(&reports);
    Ok(RunOutput {
        reports,
        csv,
        wall_time_s: start.elapsed().as_secs_f64(),
        workers: cfg.workers.unwrap_or_else(rayon::current_num_threads),
    })
}

/// Paths written by [`run`].
#[derive(Debug, Clone, PartialEq)]
pub struct Written {
    pub csv: PathBuf,
    pub metadata: PathBuf,
}

pub fn run(cfg: &SimConfig) -> Result<(RunOutput, Written)> {
    let out = execute(cfg)?;
    output::write_file(&cfg.out, &out.csv)?;
    let meta = output::Metadata {
        config: cfg,
        seed: cfg.seed,
        code_version: env!("CARGO_PKG_VERSION"),
        wall_time_s: out.wall_time_s,
        divergence_count: 0,
        workers: out.workers,
        columns: output::csv_header().split(',').map(String::from).collect(),
    };
    let metadata = output::write_metadata(&cfg.out, &meta)?;
    info!(
        "{} rows to {} in {:.1} s",
        out.reports.len(),
        cfg.out.display(),
        out.wall_time_s
    );
    Ok((
        out,
        Written {
            csv: cfg.out.clone(),
            metadata,
        },
    ))
}

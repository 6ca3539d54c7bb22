//! Batch front-end for the `casimir` library.
//!
//! One JSON config in; one CSV table (and, for profiles, an SVG chart) out.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::{Path, PathBuf};

pub use commands::{execute, random_slab_bumps, Outcome};
pub use config::{Command, RunConfig};
pub use error::{CliError, Result};

/// Paths written by [`run`] and the summary line printed for it.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub command: Command,
    pub csv: PathBuf,
    pub svg: Option<PathBuf>,
    pub outcome: Outcome,
}

impl RunReport {
    pub fn summary(&self) -> String {
        format!(
            "{}: {} rows, max err {}, wrote {}{}",
            self.command.name(),
            self.outcome.table.rows.len(),
            output::format_num(self.outcome.max_err),
            self.csv.display(),
            self.svg
                .as_ref()
                .map(|p| format!(" and {}", p.display()))
                .unwrap_or_default()
        )
    }
}

/// Runs `command` (or the config's own command) and writes its artifacts under `out_dir`.
pub fn run(command: Option<Command>, cfg: &RunConfig, out_dir: &Path) -> Result<RunReport> {
    let command = command.or(cfg.command).ok_or_else(|| {
        CliError::config(
            "command",
            "no command given on the command line or in the config",
        )
    })?;
    let outcome = execute(command, cfg)?;
    let csv = out_dir.join(
        cfg.output
            .csv
            .clone()
            .unwrap_or_else(|| format!("{}.csv", command.name())),
    );
    output::write_file(&csv, &outcome.table.to_csv())?;
    let svg = match &outcome.plot {
        Some(p) => {
            let path = out_dir.join(
                cfg.output
                    .svg
                    .clone()
                    .unwrap_or_else(|| format!("{}.svg", command.name())),
            );
            output::write_file(&path, &p.to_svg())?;
            Some(path)
        }
        None => None,
    };
    Ok(RunReport {
        command,
        csv,
        svg,
        outcome,
    })
}

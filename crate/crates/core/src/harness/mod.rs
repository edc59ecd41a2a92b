//! Experiment driver: configuration, result tables and the subcommands
//! behind the `bandnorm` binary.

mod commands;
mod config;
mod table;
mod verify;

pub use commands::{
    describe_norm_scan, moments, norm_scan, sample_matrix, semicircle, MomentMode, NormChoice,
    RunOptions, MOMENTS_COLUMNS, NORM_SCAN_COLUMNS, SAMPLE_COLUMNS, SEMICIRCLE_BINS,
    SEMICIRCLE_COLUMNS,
};
pub use config::{ExperimentConfig, GridPoint, OutputFormat};
pub use table::{format_float, Cell, Table};
pub use verify::{verify, Suite, VerifyOutcome, VERIFY_COLUMNS};

use crate::Result;
use std::io::Write;
use std::path::Path;

pub fn render(table: &Table, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => table.to_csv(),
        OutputFormat::Json => table.to_json(),
    }
}

/// Writes `table` to `path`, or to standard output when `path` is empty.
pub fn emit(table: &Table, format: OutputFormat, path: &str) -> Result<()> {
    let text = render(table, format);
    if path.is_empty() {
        std::io::stdout().lock().write_all(text.as_bytes())?;
    } else {
        std::fs::write(Path::new(path), text)?;
    }
    Ok(())
}

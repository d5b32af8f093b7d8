use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::experiments::{RunOutput, Table};

pub const RNG_NAME: &str = "ChaCha8Rng";

fn write_table(path: &Path, table: &Table) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(&table.header)?;
    for row in &table.rows {
        writer.write_record(row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes every table as `<experiment>-<timestamp>[-suffix].csv`, the report
/// (if any) as JSON, and `manifest.json`. Returns the paths written.
pub fn write_run(
    config: &ExperimentConfig,
    run: &RunOutput,
    started: DateTime<Utc>,
    wall_time: f64,
) -> Result<Vec<PathBuf>, CliError> {
    let dir = &config.output_dir;
    fs::create_dir_all(dir)?;
    let stem = format!("{}-{}", config.experiment.name(), started.format("%Y%m%dT%H%M%S%3fZ"));
    let mut written = Vec::new();
    for table in &run.tables {
        let name = match table.suffix {
            Some(s) => format!("{stem}-{s}.csv"),
            None => format!("{stem}.csv"),
        };
        let path = dir.join(name);
        write_table(&path, table)?;
        written.push(path);
    }
    if let Some(report) = &run.report {
        let path = dir.join(format!("{stem}.json"));
        fs::write(&path, serde_json::to_string_pretty(report)?)?;
        written.push(path);
    }
    let outputs: Vec<String> = written
        .iter()
        .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
        .collect();
    let manifest = json!({
        "experiment": config.experiment.name(),
        "version": env!("CARGO_PKG_VERSION"),
        "core_version": shpattern_core::VERSION,
        "started_utc": started.to_rfc3339(),
        "wall_time_seconds": wall_time,
        "rng": RNG_NAME,
        "seed": config.seed,
        "outputs": outputs,
        "warnings": run.warnings,
        "config": config,
    });
    let path = dir.join("manifest.json");
    fs::write(&path, serde_json::to_string_pretty(&manifest)?)?;
    written.push(path);
    Ok(written)
}

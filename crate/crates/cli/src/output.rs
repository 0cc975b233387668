//! CSV tables and the JSON sidecar.

use std::io::Write;
use std::path::{Path, PathBuf};

use caaoi::sim::SweepRow;
use serde::Serialize;

use crate::config::Config;
use crate::error::{CliError, CliResult};

/// Bumped whenever the results columns change.
pub const CSV_SCHEMA: u32 = 1;

pub fn results_header(n_sensors: usize) -> Vec<String> {
    let mut h: Vec<String> = ["sweep_value", "policy", "metric", "avg_weighted_age", "std_error", "throughput"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    h.extend((0..n_sensors).map(|i| format!("frac_sensor_{i}")));
    h.extend(["lower_bound", "horizon", "replications", "seed"].iter().map(|s| s.to_string()));
    h
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One record per row; fraction columns padded to the widest system.
pub fn results_csv(rows: &[SweepRow], horizon: u64, replications: u32, seed: u64) -> CliResult<Vec<u8>> {
    let width = rows.iter().map(|r| r.report.resource_fractions.len()).max().unwrap_or(0);
    let mut w = writer();
    let header = results_header(width);
    w.write_record(&header).map_err(csv_err)?;
    for row in rows {
        let mut rec = vec![
            opt(row.value),
            row.label.clone(),
            row.metric.as_str().to_string(),
            row.report.avg_weighted_age.to_string(),
            row.report.std_error.to_string(),
            row.report.throughput.to_string(),
        ];
        for i in 0..width {
            rec.push(opt(row.report.resource_fractions.get(i).copied()));
        }
        rec.extend([
            opt(row.lower_bound),
            horizon.to_string(),
            replications.to_string(),
            seed.to_string(),
        ]);
        w.write_record(&rec).map_err(csv_err)?;
    }
    finish(w)
}

/// Writes a table with the given header and string rows.
pub fn table_csv(header: &[&str], rows: &[Vec<String>]) -> CliResult<Vec<u8>> {
    let mut w = writer();
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(r).map_err(csv_err)?;
    }
    finish(w)
}

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> CliResult<Vec<u8>> {
    w.into_inner()
        .map_err(|e| CliError::Runtime(format!("csv: {e}")))
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Runtime(format!("csv: {e}"))
}

#[derive(Serialize)]
struct SystemEcho<'a> {
    sweep_value: Option<f64>,
    sensors: &'a caaoi::SystemSpec,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    tool: &'static str,
    version: &'static str,
    csv_schema: u32,
    generator: &'static str,
    preset: Option<&'a str>,
    columns: Vec<String>,
    /// Systems actually simulated, one per sweep value.
    systems: Vec<SystemEcho<'a>>,
    config: &'a Config,
}

pub fn sidecar_json(config: &Config, preset: Option<&str>, rows: &[SweepRow]) -> CliResult<Vec<u8>> {
    let width = rows.iter().map(|r| r.report.resource_fractions.len()).max().unwrap_or(0);
    let mut systems: Vec<SystemEcho> = Vec::new();
    for r in rows {
        if systems.last().is_none_or(|s| s.sweep_value != r.value) {
            systems.push(SystemEcho {
                sweep_value: r.value,
                sensors: &r.system,
            });
        }
    }
    let side = Sidecar {
        tool: "caaoi",
        version: env!("CARGO_PKG_VERSION"),
        csv_schema: CSV_SCHEMA,
        generator: caaoi::rng::GENERATOR,
        preset,
        columns: results_header(width),
        systems,
        config,
    };
    let mut bytes = serde_json::to_vec_pretty(&side).map_err(|e| CliError::Runtime(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// `out.csv` gets `out.json` beside it.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

pub fn emit(out: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| CliError::io(path, e)),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| CliError::io("<stdout>", e)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_is_pinned() {
        assert_eq!(
            results_header(3).join(","),
            "sweep_value,policy,metric,avg_weighted_age,std_error,throughput,\
             frac_sensor_0,frac_sensor_1,frac_sensor_2,lower_bound,horizon,replications,seed"
        );
    }
}

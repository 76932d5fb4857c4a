//! Command-line front end. A run is fully described by a [`RunConfig`]; it
//! writes `summary.json` (embedding the config) plus CSV tables into the
//! output directory.

// `!(x > 0.0)` rejects NaN along with the out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

pub use config::RunConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {field}: {message}")]
    ConfigInvalid { field: String, message: String },
    #[error("{context}: {message}")]
    Compute { context: String, message: String },
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    pub fn compute(context: &str, e: impl std::fmt::Display) -> Self {
        CliError::Compute { context: context.into(), message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    Refuted,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Refuted => 2,
        }
    }
}

pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: Vec<&'static str>) -> Self {
        Table { name: name.into(), header, rows: Vec::new() }
    }

    pub fn push<I: IntoIterator<Item = String>>(&mut self, row: I) {
        self.rows.push(row.into_iter().collect());
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name)
    }
}

/// Extra JSON files written next to the summary.
pub struct Attachment {
    pub file_name: String,
    pub value: serde_json::Value,
}

pub struct Outcome {
    pub status: Status,
    pub result: serde_json::Value,
    pub tables: Vec<Table>,
    pub attachments: Vec<Attachment>,
}

#[derive(Serialize)]
struct Summary<'a> {
    config: &'a RunConfig,
    precision: String,
    status: Status,
    result: &'a serde_json::Value,
    artifacts: Vec<String>,
}

/// Validates, runs and writes artifacts; returns the run status.
pub fn run(config: &RunConfig) -> Result<Status, CliError> {
    config.validate()?;
    let outcome = commands::dispatch(config)?;
    write_outputs(config, &outcome)?;
    Ok(outcome.status)
}

fn write_outputs(config: &RunConfig, outcome: &Outcome) -> Result<(), CliError> {
    let dir = &config.out;
    fs::create_dir_all(dir)?;
    let mut artifacts = Vec::new();
    for t in &outcome.tables {
        let mut w = csv::Writer::from_path(dir.join(t.file_name()))?;
        w.write_record(&t.header)?;
        for r in &t.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        artifacts.push(t.file_name());
    }
    for a in &outcome.attachments {
        write_json(&dir.join(&a.file_name), &a.value)?;
        artifacts.push(a.file_name.clone());
    }
    let summary = Summary {
        config,
        precision: config.precision()?.label(),
        status: outcome.status,
        result: &outcome.result,
        artifacts,
    };
    write_json(&dir.join("summary.json"), &summary)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut f = fs::File::create(path)?;
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    f.write_all(text.as_bytes())?;
    f.write_all(b"\n")?;
    Ok(())
}

//! Output plumbing: the reproducibility header, format selection and the
//! exit-code contract.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use lagspec_core::Error;
use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    AcceptanceFailed = 1,
    Usage = 2,
    Disagreement = 3,
    Numerical = 4,
    Eigensolver = 5,
}

#[derive(Debug)]
pub struct CliError {
    pub exit: Exit,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            exit: Exit::Usage,
            message: message.into(),
        }
    }

    pub fn new(exit: Exit, message: impl Into<String>) -> Self {
        Self {
            exit,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Configuration problems are usage errors, eigensolver failures have their
/// own code, and everything else is a numerical failure.
impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let exit = match e {
            Error::InvalidConfig(_) | Error::UnknownDistribution(_) => Exit::Usage,
            Error::EigenNonConvergence { .. } => Exit::Eigensolver,
            _ => Exit::Numerical,
        };
        Self::new(exit, e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        Self::usage(format!("cannot write output: {e}"))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Everything needed to regenerate an output: no timestamps, no host data.
#[derive(Clone, Debug, Serialize)]
pub struct Header {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: Value,
}

impl Header {
    pub fn new(command: &'static str, config: impl Serialize) -> Self {
        Self {
            tool: "lagspec",
            version: env!("CARGO_PKG_VERSION"),
            command,
            config: serde_json::to_value(config).expect("config serializes"),
        }
    }

    /// `# {...}` comment line for CSV outputs.
    pub fn csv_line(&self) -> String {
        format!("# {}\n", serde_json::to_string(self).expect("header serializes"))
    }
}

/// JSON document `{"header": ..., <payload fields>}`.
pub fn json_document(header: &Header, payload: impl Serialize) -> String {
    let mut doc = serde_json::Map::new();
    doc.insert("header".into(), serde_json::to_value(header).expect("header serializes"));
    match serde_json::to_value(payload).expect("payload serializes") {
        Value::Object(fields) => doc.extend(fields),
        other => {
            doc.insert("data".into(), other);
        }
    }
    let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("document serializes");
    s.push('\n');
    s
}

pub fn emit(out: Option<&Path>, content: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, content)?,
        None => io::stdout().lock().write_all(content.as_bytes())?,
    }
    Ok(())
}

/// `curve.csv` → `curve.cdf.csv`; `curve` → `curve.cdf.csv`.
pub fn cdf_sibling(path: &Path) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = path.extension().map_or_else(|| "csv".to_string(), |e| e.to_string_lossy().into_owned());
    path.with_file_name(format!("{stem}.cdf.{ext}"))
}

//! Run documents, the human table and exit codes.

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;
use serde_json::{Map, Value};

/// Error carrying the exit code it maps to.
#[derive(Debug)]
pub enum Failure {
    /// The input was readable but violates a contract. Exit code 1.
    Contract(anyhow::Error),
    /// A file could not be read, written or parsed. Exit code 2.
    Input(anyhow::Error),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Contract(_) => 1,
            Failure::Input(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Contract(e) | Failure::Input(e) => write!(f, "{e:#}"),
        }
    }
}

pub trait Classify<T> {
    fn input(self, context: impl fmt::Display) -> Result<T, Failure>;
    fn contract(self, context: impl fmt::Display) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn input(self, context: impl fmt::Display) -> Result<T, Failure> {
        self.map_err(|e| Failure::Input(e.into().context(context.to_string())))
    }

    fn contract(self, context: impl fmt::Display) -> Result<T, Failure> {
        self.map_err(|e| Failure::Contract(e.into().context(context.to_string())))
    }
}

pub fn contract_error(message: impl fmt::Display) -> Failure {
    Failure::Contract(anyhow::anyhow!("{message}"))
}

/// The single structured document written per run.
#[derive(Debug, Serialize)]
pub struct Document {
    pub command: &'static str,
    pub instance: String,
    pub parameters: Value,
    pub result: Value,
    pub counters: Map<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

#[derive(Debug, Serialize)]
pub struct Timings {
    pub elapsed_ms: f64,
}

impl Timings {
    pub fn from(elapsed: Duration) -> Self {
        Self { elapsed_ms: elapsed.as_secs_f64() * 1000.0 }
    }
}

/// Everything a subcommand produces.
pub struct Run {
    pub doc: Document,
    pub table: Table,
    /// Text printed after the table, e.g. an OCC block.
    pub trailer: String,
    pub exit_code: u8,
}

impl Run {
    pub fn new(command: &'static str, instance: String, parameters: Value) -> Self {
        Self {
            doc: Document {
                command,
                instance,
                parameters,
                result: Value::Null,
                counters: Map::new(),
                timings: None,
            },
            table: Table::default(),
            trailer: String::new(),
            exit_code: 0,
        }
    }

    pub fn counter(&mut self, name: &str, value: impl Into<Value>) {
        self.doc.counters.insert(name.to_string(), value.into());
    }
}

/// Rows of cells printed with aligned columns.
#[derive(Debug, Default)]
pub struct Table {
    pub header: Option<Vec<String>>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn row(&mut self, key: &str, value: impl fmt::Display) {
        self.rows.push(vec![key.to_string(), value.to_string()]);
    }

    pub fn render(&self) -> String {
        let all: Vec<&Vec<String>> = self.header.iter().chain(&self.rows).collect();
        let columns = all.iter().map(|r| r.len()).max().unwrap_or(0);
        let widths: Vec<usize> = (0..columns)
            .map(|c| all.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for row in all {
            let cells: Vec<String> = row
                .iter()
                .enumerate()
                .map(|(c, s)| if c + 1 == row.len() { s.clone() } else { format!("{s:<w$}", w = widths[c]) })
                .collect();
            out.push_str(cells.join("  ").trim_end());
            out.push('\n');
        }
        out
    }
}

/// Instance id: the file name without its extension.
pub fn instance_id(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| path.display().to_string())
}

/// `<prefix><suffix>`, keeping any dots already in the prefix.
pub fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

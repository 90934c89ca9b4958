//! CSV tables and JSON run manifests, written atomically.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

/// Version of the CSV column layout, recorded in every manifest.
pub const CSV_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv encoding failed: {0}")]
    Csv(#[from] csv::Error),
    #[error("json encoding failed: {0}")]
    Json(#[from] serde_json::Error),
    #[error("row {row} has {found} fields, expected {expected}")]
    RowWidth { row: usize, found: usize, expected: usize },
}

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(u64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(value: f64) -> Self {
        Cell::Float(value)
    }
}

impl From<u64> for Cell {
    fn from(value: u64) -> Self {
        Cell::Int(value)
    }
}

impl From<usize> for Cell {
    fn from(value: usize) -> Self {
        Cell::Int(value as u64)
    }
}

/// Formats a float with 17 significant digits; non-finite values become
/// `NaN`, `inf` or `-inf`.
pub fn format_float(value: f64) -> String {
    if value.is_nan() {
        "NaN".to_owned()
    } else if value.is_infinite() {
        if value > 0.0 { "inf" } else { "-inf" }.to_owned()
    } else {
        format!("{value:.16e}")
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Float(v) => format_float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

/// Header plus rows of equal width.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|h| (*h).to_owned()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        self.rows.push(row);
    }

    /// Column `name` as floats; `None` if absent or not numeric.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let index = self.header.iter().position(|h| h == name)?;
        self.rows
            .iter()
            .map(|row| match row.get(index)? {
                Cell::Float(v) => Some(*v),
                Cell::Int(v) => Some(*v as f64),
                Cell::Text(_) => None,
            })
            .collect()
    }

    /// Comma-separated encoding with `\n` line endings and a header row.
    pub fn to_csv(&self) -> Result<Vec<u8>, IoError> {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        writer.write_record(&self.header)?;
        for (index, row) in self.rows.iter().enumerate() {
            if row.len() != self.header.len() {
                return Err(IoError::RowWidth {
                    row: index,
                    found: row.len(),
                    expected: self.header.len(),
                });
            }
            writer.write_record(row.iter().map(Cell::render))?;
        }
        writer.into_inner().map_err(|e| IoError::Io {
            path: PathBuf::new(),
            source: std::io::Error::other(e.to_string()),
        })
    }
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory followed by a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), IoError> {
    let wrap = |source| IoError::Io {
        path: path.to_owned(),
        source,
    };
    let directory = match path.parent() {
        Some(parent) if !parent.as_os_str().is_empty() => parent.to_owned(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&directory).map_err(wrap)?;
    let mut file = tempfile::NamedTempFile::new_in(&directory).map_err(wrap)?;
    file.write_all(contents).map_err(wrap)?;
    file.as_file().sync_all().map_err(wrap)?;
    file.persist(path).map_err(|e| wrap(e.error))?;
    Ok(())
}

/// Writes a table as CSV, atomically.
pub fn write_csv(path: &Path, table: &Table) -> Result<(), IoError> {
    write_atomic(path, &table.to_csv()?)
}

/// Record of one command invocation, stored next to its outputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub parameters: serde_json::Value,
    pub master_seed: Option<u64>,
    pub tool_version: String,
    pub git_describe: String,
    pub csv_schema_version: u32,
    pub wall_time_seconds: f64,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(subcommand: &str, parameters: serde_json::Value, master_seed: Option<u64>) -> Self {
        Self {
            subcommand: subcommand.to_owned(),
            parameters,
            master_seed,
            tool_version: env!("CARGO_PKG_VERSION").to_owned(),
            git_describe: git_describe(),
            csv_schema_version: CSV_SCHEMA_VERSION,
            wall_time_seconds: 0.0,
            outputs: Vec::new(),
        }
    }

    /// Pretty-printed JSON, written atomically.
    pub fn write(&self, path: &Path) -> Result<(), IoError> {
        let mut json = serde_json::to_vec_pretty(self)?;
        json.push(b'\n');
        write_atomic(path, &json)
    }
}

/// `git describe --always --dirty` of the working directory, or `unknown`.
pub fn git_describe() -> String {
    std::process::Command::new("git")
        .args(["describe", "--always", "--dirty"])
        .output()
        .ok()
        .filter(|out| out.status.success())
        .and_then(|out| String::from_utf8(out.stdout).ok())
        .map(|s| s.trim().to_owned())
        .filter(|s| !s.is_empty())
        .unwrap_or_else(|| "unknown".to_owned())
}

/// Manifest path for a CSV output: `runs/curve.csv` → `runs/curve.json`.
pub fn manifest_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

/// Companion path with a suffix before the extension:
/// `runs/mc.csv` + `summary` → `runs/mc.summary.csv`.
pub fn companion_path(csv_path: &Path, suffix: &str) -> PathBuf {
    let stem = csv_path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    csv_path.with_file_name(format!("{stem}.{suffix}.csv"))
}

/// Gnuplot script header describing the columns of `table`, as comments,
/// followed by a plot command for the first two columns.
pub fn gnuplot_hints(csv_path: &Path, table: &Table) -> String {
    let mut script = String::from("# gnuplot companion script\n");
    for (index, name) in table.header.iter().enumerate() {
        script.push_str(&format!("# column {}: {name}\n", index + 1));
    }
    script.push_str("set datafile separator ','\nset key autotitle columnhead\n");
    script.push_str(&format!("plot '{}' using 1:2 with lines\n", csv_path.display()));
    script
}

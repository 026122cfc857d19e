//! CSV tables: one `#` metadata line, a column header, then rows of
//! 17-significant-digit floats.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::Int(x)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        // Keeps −0 and +0 byte-identical.
        return format!("{:.16e}", 0.0);
    }
    format!("{x:.16e}")
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => format_float(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

/// Provenance carried into every artifact.
#[derive(Clone, Debug, PartialEq)]
pub struct Metadata {
    pub command: String,
    pub config_sha256: String,
    pub extra: Vec<(String, String)>,
}

impl Metadata {
    pub fn new(command: &str, config_bytes: &[u8]) -> Self {
        Self { command: command.to_string(), config_sha256: sha256_hex(config_bytes), extra: Vec::new() }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.extra.push((key.to_string(), value.to_string()));
        self
    }

    pub fn line(&self) -> String {
        let mut s = format!("polariton {VERSION} command={} config_sha256={}", self.command, self.config_sha256);
        for (k, v) in &self.extra {
            let _ = write!(s, " {k}={v}");
        }
        s
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Self { columns: columns.iter().map(|c| c.as_ref().to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn render(&self, meta: &Metadata) -> String {
        let mut out = format!("# {}\n{}\n", meta.line(), self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, dir: &Path, name: &str, meta: &Metadata) -> Result<PathBuf, CliError> {
        let path = dir.join(name);
        fs::write(&path, self.render(meta)).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Ok(path)
    }
}

/// Numeric view of a CSV produced by [`Table::render`] (text cells become NaN).
#[derive(Clone, Debug, PartialEq)]
pub struct CsvData {
    pub metadata: Option<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvData {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut metadata = None;
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let mut header = None;
        for line in lines.by_ref() {
            if let Some(m) = line.strip_prefix('#') {
                metadata.get_or_insert_with(|| m.trim().to_string());
                continue;
            }
            header = Some(line);
            break;
        }
        let header = header.ok_or_else(|| CliError::Validation("CSV has no header row".into()))?;
        let columns: Vec<String> = header.split(',').map(|c| c.trim().to_string()).collect();
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            let cells: Vec<f64> = line.split(',').map(|c| c.trim().parse().unwrap_or(f64::NAN)).collect();
            if cells.len() != columns.len() {
                return Err(CliError::Validation(format!(
                    "CSV row {} has {} cells, header has {}",
                    i + 1,
                    cells.len(),
                    columns.len()
                )));
            }
            rows.push(cells);
        }
        Ok(Self { metadata, columns, rows })
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>, CliError> {
        let k = self.columns.iter().position(|c| c == name).ok_or_else(|| {
            CliError::Validation(format!("missing column `{name}`; available: {}", self.columns.join(", ")))
        })?;
        Ok(self.rows.iter().map(|r| r[k]).collect())
    }
}

use serde::Serialize;
use std::fs::{File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use super::BenchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Int,
    Float,
    Text,
    Bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn kind(&self) -> Kind {
        match self {
            Cell::Int(_) => Kind::Int,
            Cell::Float(_) => Kind::Float,
            Cell::Text(_) => Kind::Text,
            Cell::Bool(_) => Kind::Bool,
        }
    }

    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:e}"),
            Cell::Text(v) => v.clone(),
            Cell::Bool(v) => v.to_string(),
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}
impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}
impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}
impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}
impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}
impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// Typed result table for one experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub experiment: String,
    pub columns: Vec<(String, Kind)>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(experiment: &str, columns: &[(&str, Kind)]) -> Self {
        Table { experiment: experiment.to_string(), columns: columns.iter().map(|(n, k)| (n.to_string(), *k)).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        self.rows.push(row);
    }

    /// Every row has one cell per column, of the declared kind; floats are
    /// finite unless NaN marks a missing value.
    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |m: String| Err(BenchError::Schema(format!("{}: {m}", self.experiment)));
        if self.columns.is_empty() {
            return bad("no columns".into());
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != self.columns.len() {
                return bad(format!("row {i} has {} cells, expected {}", row.len(), self.columns.len()));
            }
            for (cell, (name, kind)) in row.iter().zip(&self.columns) {
                if cell.kind() != *kind {
                    return bad(format!("row {i} column `{name}` holds {:?}, expected {kind:?}", cell.kind()));
                }
                if let Cell::Float(v) = cell {
                    if v.is_infinite() {
                        return bad(format!("row {i} column `{name}` is infinite"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|(n, _)| n == name)
    }

    /// Comma-separated text with a header row.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), BenchError> {
        self.validate()?;
        let mut out = csv::Writer::from_writer(w);
        out.write_record(self.columns.iter().map(|(n, _)| n.as_str()))?;
        for row in &self.rows {
            out.write_record(row.iter().map(Cell::render))?;
        }
        out.flush()?;
        Ok(())
    }

    /// Write `<experiment>_<utc timestamp>.csv` plus a `.json` sidecar with
    /// `config` into `dir`. Never overwrites; returns the CSV path.
    pub fn save<C: Serialize>(&self, dir: &Path, config: &C) -> Result<PathBuf, BenchError> {
        self.validate()?;
        std::fs::create_dir_all(dir)?;
        let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%S%.3fZ");
        let mut n = 0;
        let (csv_path, csv_file) = loop {
            let suffix = if n == 0 { String::new() } else { format!("-{n}") };
            let path = dir.join(format!("{}_{stamp}{suffix}.csv", self.experiment));
            match OpenOptions::new().write(true).create_new(true).open(&path) {
                Ok(f) => break (path, f),
                Err(e) if e.kind() == io::ErrorKind::AlreadyExists => n += 1,
                Err(e) => return Err(e.into()),
            }
        };
        self.write_csv(&csv_file)?;
        let sidecar = serde_json::json!({
            "experiment": self.experiment,
            "columns": self.columns,
            "config": config,
        });
        let mut f = File::create_new(csv_path.with_extension("json"))?;
        serde_json::to_writer_pretty(&mut f, &sidecar)?;
        f.write_all(b"\n")?;
        Ok(csv_path)
    }
}

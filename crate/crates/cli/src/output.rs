//! Deterministic CSV emission and the run manifest.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

/// One CSV cell.
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
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

fn format_num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else if v == 0.0 {
        // folds −0
        "0".into()
    } else {
        format!("{v:.12e}")
    }
}

/// In-memory table with a `name[unit]` header.
pub struct Table {
    header: Vec<String>,
    body: String,
}

impl Table {
    /// `columns` are `(name, unit)` pairs; use `"1"` for dimensionless.
    pub fn new(columns: &[(&str, &str)]) -> Self {
        let header = columns.iter().map(|(n, u)| format!("{n}[{u}]")).collect();
        Self { header, body: String::new() }
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        assert_eq!(cells.len(), self.header.len(), "row width must match the header");
        let line: Vec<String> = cells
            .into_iter()
            .map(|c| match c {
                Cell::Num(v) => format_num(v),
                Cell::Int(v) => v.to_string(),
                Cell::Text(s) => s,
            })
            .collect();
        let _ = writeln!(self.body, "{}", line.join(","));
    }

    pub fn render(&self) -> String {
        format!("{}\n{}", self.header.join(","), self.body)
    }
}

/// Collects output files and writes them with a manifest at the end.
pub struct Artifacts {
    dir: PathBuf,
    files: BTreeMap<String, String>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    artifact: &'a str,
    version: &'a str,
    command: &'a str,
    config_sha256: &'a str,
    files: BTreeMap<String, String>,
}

impl Artifacts {
    pub fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        Ok(Self { dir: dir.to_path_buf(), files: BTreeMap::new() })
    }

    pub fn write_table(&mut self, name: &str, table: &Table) -> Result<()> {
        self.write_text(name, &table.render())
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
        self.files.insert(name.to_string(), format!("{:x}", Sha256::digest(text.as_bytes())));
        Ok(())
    }

    /// Writes `manifest.toml` listing every file with its SHA-256.
    pub fn finish(self, command: &str, config_sha256: &str) -> Result<PathBuf> {
        let manifest = Manifest {
            artifact: "darkpol",
            version: env!("CARGO_PKG_VERSION"),
            command,
            config_sha256,
            files: self.files,
        };
        let path = self.dir.join("manifest.toml");
        fs::write(&path, toml::to_string(&manifest)?).with_context(|| format!("cannot write {}", path.display()))?;
        Ok(path)
    }
}

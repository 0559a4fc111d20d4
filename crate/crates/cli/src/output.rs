//! Tables written as CSV with a metadata header, optionally mirrored as JSON.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use climvar_core::fmt::g9;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const TOOL: &str = concat!("climvar ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Int(i64),
    Num(f64),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => g9(*x),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Int(i) => json!(i),
            Cell::Num(x) => g9(*x).parse::<f64>().ok().filter(|v| v.is_finite()).map_or(Value::Null, |v| json!(v)),
        }
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<i32> for Cell {
    fn from(i: i32) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<u8> for Cell {
    fn from(i: u8) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&'static str]) -> Self {
        Table { name: name.into(), columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Quotes a CSV field when it holds a delimiter, quote or newline.
fn field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Accumulates everything that determines the outputs: parameters and input
/// file contents. Paths, the output directory and thread count are left out.
#[derive(Debug, Default, Clone)]
pub struct Provenance {
    params: BTreeMap<String, String>,
    files: BTreeMap<String, String>,
}

impl Provenance {
    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    /// Hashes the contents of an input file, following a grid manifest to its payload.
    pub fn file(&mut self, key: &str, path: &Path) -> anyhow::Result<&mut Self> {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        let mut h = Sha256::new();
        h.update(&bytes);
        if path.extension().is_some_and(|e| e == "json") {
            if let Ok(Value::Object(m)) = serde_json::from_slice::<Value>(&bytes) {
                if let Some(Value::String(payload)) = m.get("payload") {
                    let p = path.parent().unwrap_or(Path::new("")).join(payload);
                    h.update(fs::read(&p).with_context(|| format!("reading {}", p.display()))?);
                }
            }
        }
        self.files.insert(key.to_string(), hex::encode(h.finalize()));
        Ok(self)
    }

    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for (k, v) in &self.params {
            h.update(format!("param {k}={v}\n"));
        }
        for (k, v) in &self.files {
            h.update(format!("file {k}={v}\n"));
        }
        hex::encode(h.finalize())
    }
}

pub struct Writer {
    dir: PathBuf,
    json: bool,
    command: &'static str,
    scenario: String,
    hash: String,
    written: Vec<PathBuf>,
}

impl Writer {
    pub fn new(dir: &Path, json: bool, command: &'static str, scenario: &str, provenance: &Provenance) -> anyhow::Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Writer {
            dir: dir.to_path_buf(),
            json,
            command,
            scenario: scenario.to_string(),
            hash: provenance.hash(),
            written: Vec::new(),
        })
    }

    pub fn hash(&self) -> &str {
        &self.hash
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn header_lines(&self) -> String {
        format!(
            "# tool={TOOL}\n# command={}\n# scenario={}\n# config_hash={}\n",
            self.command, self.scenario, self.hash
        )
    }

    pub fn write(&mut self, table: &Table) -> anyhow::Result<()> {
        let mut text = self.header_lines();
        text.push_str(&table.columns.join(","));
        text.push('\n');
        for row in &table.rows {
            let line: Vec<String> = row.iter().map(|c| field(&c.csv())).collect();
            text.push_str(&line.join(","));
            text.push('\n');
        }
        let path = self.dir.join(format!("{}.csv", table.name));
        write_file(&path, text.as_bytes())?;
        self.written.push(path);
        if self.json {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|r| Value::Object(table.columns.iter().zip(r).map(|(c, v)| (c.to_string(), v.json())).collect()))
                .collect();
            let doc = json!({
                "tool": TOOL,
                "command": self.command,
                "scenario": self.scenario,
                "config_hash": self.hash,
                "columns": table.columns,
                "rows": rows,
            });
            let path = self.dir.join(format!("{}.json", table.name));
            let mut text = serde_json::to_string_pretty(&doc)?;
            text.push('\n');
            write_file(&path, text.as_bytes())?;
            self.written.push(path);
        }
        Ok(())
    }

    pub fn record(&mut self, path: PathBuf) {
        self.written.push(path);
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let mut f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    f.write_all(bytes).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

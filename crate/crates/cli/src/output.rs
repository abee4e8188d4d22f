//! Run reports and CSV tables.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use num_complex::Complex64 as C64;
use serde::Serialize;

/// A CSV table written as `<name>.csv`.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn with_header(name: &str, header: Vec<String>) -> Self {
        Self { name: name.into(), header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }
}

/// Shortest round-trip form, in exponent notation outside `[1e-4, 1e6)`.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e6).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn cplx(z: C64) -> [String; 2] {
    [num(z.re), num(z.im)]
}

/// What a command produced.
pub trait Artifacts: Serialize {
    fn pass(&self) -> bool;
    fn tables(&self) -> Result<Vec<Table>>;
    /// Extra text files, by name.
    fn texts(&self) -> Vec<(String, String)> {
        Vec::new()
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    command: &'a str,
    version: &'a str,
    scenario: &'a serde_json::Value,
    pass: bool,
    results: &'a T,
}

/// Writes `report.json`, the tables and the text files into `out`.
pub fn write<T: Artifacts>(out: &Path, command: &str, scenario: &serde_json::Value, a: &T) -> Result<()> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let env = Envelope { command, version: env!("CARGO_PKG_VERSION"), scenario, pass: a.pass(), results: a };
    let mut body = serde_json::to_string_pretty(&env)?;
    body.push('\n');
    fs::write(out.join("report.json"), body)?;
    for t in a.tables()? {
        fs::write(out.join(format!("{}.csv", t.name)), t.to_csv()?)?;
    }
    for (name, text) in a.texts() {
        fs::write(out.join(name), text)?;
    }
    Ok(())
}

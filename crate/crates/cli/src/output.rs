//! Tabular output as CSV (with `#` metadata lines) or JSON.

use serde_json::{json, Map, Value};
use std::io::Write;
use std::path::Path;

use crate::Failure;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug)]
pub enum Cell {
    Num(f64),
    Int(usize),
    Str(String),
    Bool(bool),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Str(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Str(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map(Into::into).unwrap_or(Cell::Empty)
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) if *v != 0.0 && (v.abs() < 1e-4 || v.abs() >= 1e15) => format!("{v:e}"),
            Cell::Num(v) => format!("{v}"),
            Cell::Int(v) => format!("{v}"),
            Cell::Str(s) => s.clone(),
            Cell::Bool(b) => format!("{b}"),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => json!(v),
            Cell::Int(v) => json!(v),
            Cell::Str(s) => json!(s),
            Cell::Bool(b) => json!(b),
            Cell::Empty => Value::Null,
        }
    }
}

/// Rows plus free-form metadata (fits, coefficients, constants).
#[derive(Debug, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub meta: Map<String, Value>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table { columns: columns.to_vec(), ..Default::default() }
    }

    pub fn meta(&mut self, key: &str, v: Value) {
        self.meta.insert(key.to_string(), v);
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>, Failure> {
        match format {
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| {
                        let m: Map<String, Value> =
                            self.columns.iter().zip(r).map(|(c, v)| (c.to_string(), v.json())).collect();
                        Value::Object(m)
                    })
                    .collect();
                let mut doc = self.meta.clone();
                doc.insert("rows".into(), Value::Array(rows));
                let mut out = serde_json::to_vec_pretty(&Value::Object(doc)).map_err(Failure::io)?;
                out.push(b'\n');
                Ok(out)
            }
            Format::Csv => {
                let mut out = Vec::new();
                for (k, v) in &self.meta {
                    writeln!(out, "# {k}: {}", serde_json::to_string(v).map_err(Failure::io)?).map_err(Failure::io)?;
                }
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.columns).map_err(Failure::io)?;
                for r in &self.rows {
                    w.write_record(r.iter().map(Cell::csv)).map_err(Failure::io)?;
                }
                w.into_inner().map_err(|e| Failure::io(e.into_error()))
            }
        }
    }

    pub fn emit(&self, format: Format, out: Option<&Path>) -> Result<(), Failure> {
        let bytes = self.render(format)?;
        match out {
            Some(p) => std::fs::write(p, bytes).map_err(|e| Failure::usage(format!("cannot write {}: {e}", p.display()))),
            None => std::io::stdout().write_all(&bytes).map_err(Failure::io),
        }
    }
}

/// Least-squares slope of `log y` on `log x` over the top decade of `x`.
/// Points with non-positive `y` are skipped; `None` when fewer than two remain.
pub fn top_decade_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let xmax = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x >= xmax / 10.0 * (1.0 - 1e-12) && **y > 0.0 && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let num: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let den: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if den == 0.0 {
        None
    } else {
        Some(num / den)
    }
}

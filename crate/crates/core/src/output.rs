//! Tabular output as CSV (with `#` metadata lines) or versioned JSON.

use std::fmt::Write as _;

use num_rational::BigRational;
use serde_json::{json, Map, Value};

use crate::poly::format_rational;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Rational(BigRational),
    Text(String),
    Bool(bool),
    Json(Value),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Rational(r) => format_rational(r),
            Cell::Text(s) => csv_quote(s),
            Cell::Bool(b) => b.to_string(),
            Cell::Json(v) => csv_quote(&v.to_string()),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Float(v) => json!(v),
            Cell::Rational(r) => json!([r.numer().to_string(), r.denom().to_string()]),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
            Cell::Json(v) => v.clone(),
        }
    }
}

fn csv_quote(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub meta: Vec<(String, Value)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), ..Self::default() }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.meta.push((key.to_string(), value.into()));
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("JSON values serialize");
                s.push('\n');
                s
            }
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let v = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            let _ = writeln!(out, "# {k}={v}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let meta: Map<String, Value> = self.meta.iter().cloned().collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> =
                    self.columns.iter().cloned().zip(row.iter().map(Cell::json)).collect();
                Value::Object(obj)
            })
            .collect();
        json!({ "schema_version": SCHEMA_VERSION, "meta": meta, "rows": rows })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["x", "value"]);
        t.meta("N", 3);
        t.push(vec![Cell::Float(0.5), Cell::Rational(rat(-2, 21))]);
        assert_eq!(t.to_csv(), "# N=3\nx,value\n5.0000000000000000e-1,-2/21\n");
    }

    #[test]
    fn json_layout() {
        let mut t = Table::new(&["a"]);
        t.push(vec![Cell::Rational(rat(1, 8))]);
        let v = t.to_json();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["rows"][0]["a"], json!(["1", "8"]));
    }

    #[test]
    fn floats_round_trip() {
        let x = 0.1f64 + 0.2;
        let s = Cell::Float(x).csv();
        assert_eq!(s.parse::<f64>().unwrap(), x);
    }
}

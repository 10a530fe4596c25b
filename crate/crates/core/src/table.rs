//! Rectangular output tables with csv and json encodings.
//!
//! Real cells are written with 17 significant digits so that every `f64`
//! survives a round trip through either encoding.

use std::fmt::Write as _;
use std::str::FromStr;

use serde_json::Value;

use crate::error::{Result, SnbError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = SnbError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(SnbError::domain(format!("unknown format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(i) => Some(*i as f64),
            Cell::Real(r) => Some(*r),
            Cell::Text(_) => None,
        }
    }
}

/// Formats a real with 17 significant digits, `%.17g` style.
pub fn format_real(v: f64) -> String {
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "NaN".into()
        } else if v > 0.0 {
            "Infinity".into()
        } else {
            "-Infinity".into()
        };
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-4..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        let fixed = format!("{v:.decimals$}");
        trim_fraction(&fixed)
    } else {
        let mantissa = trim_fraction(mantissa);
        format!("{mantissa}e{exp}")
    }
}

fn trim_fraction(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Key/value annotations (e.g. generator identity); csv writes them as
    /// leading `#` comment lines.
    pub meta: Vec<(String, String)>,
}

impl OutputTable {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        OutputTable { columns: columns.into_iter().map(Into::into).collect(), ..Default::default() }
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[idx]).collect())
    }

    pub fn column_f64(&self, name: &str) -> Option<Vec<f64>> {
        self.column(name)?.into_iter().map(Cell::as_f64).collect()
    }

    pub fn encode(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k}: {v}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Int(i) => i.to_string(),
                    Cell::Real(r) => format_real(*r),
                    Cell::Text(t) => t.clone(),
                })
                .collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let quote = |s: &str| Value::String(s.to_string()).to_string();
        let mut out = String::from("{\n  \"columns\": [");
        out.push_str(&self.columns.iter().map(|c| quote(c)).collect::<Vec<_>>().join(", "));
        out.push_str("],\n  \"rows\": [");
        for (i, row) in self.rows.iter().enumerate() {
            out.push_str(if i == 0 { "\n    [" } else { ",\n    [" });
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Int(i) => i.to_string(),
                    Cell::Real(r) if r.is_finite() => format_real(*r),
                    Cell::Real(_) => "null".to_string(),
                    Cell::Text(t) => quote(t),
                })
                .collect();
            out.push_str(&cells.join(", "));
            out.push(']');
        }
        out.push_str(if self.rows.is_empty() { "],\n" } else { "\n  ],\n" });
        out.push_str("  \"meta\": {");
        let meta: Vec<String> = self.meta.iter().map(|(k, v)| format!("{}: {}", quote(k), quote(v))).collect();
        out.push_str(&meta.join(", "));
        out.push_str("}\n}\n");
        out
    }

    /// Parses the csv encoding back into a table; numeric-looking cells
    /// become `Int` or `Real`.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut table = OutputTable::default();
        let mut header_seen = false;
        for line in text.lines() {
            if let Some(rest) = line.strip_prefix("# ") {
                if let Some((k, v)) = rest.split_once(": ") {
                    table.meta.push((k.to_string(), v.to_string()));
                }
                continue;
            }
            if !header_seen {
                table.columns = line.split(',').map(str::to_string).collect();
                header_seen = true;
                continue;
            }
            let row: Vec<Cell> = line.split(',').map(parse_cell).collect();
            if row.len() != table.columns.len() {
                return Err(SnbError::domain(format!("ragged csv row: {line:?}")));
            }
            table.rows.push(row);
        }
        Ok(table)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let bad = |what: &str| SnbError::domain(format!("malformed table json: {what}"));
        let v: Value = serde_json::from_str(text).map_err(|e| bad(&e.to_string()))?;
        let columns = v["columns"]
            .as_array()
            .ok_or_else(|| bad("columns"))?
            .iter()
            .map(|c| c.as_str().map(str::to_string).ok_or_else(|| bad("column name")))
            .collect::<Result<Vec<_>>>()?;
        let mut rows = Vec::new();
        for row in v["rows"].as_array().ok_or_else(|| bad("rows"))? {
            let cells = row
                .as_array()
                .ok_or_else(|| bad("row"))?
                .iter()
                .map(|c| match c {
                    Value::Number(n) if n.is_i64() => Ok(Cell::Int(n.as_i64().unwrap())),
                    Value::Number(n) => Ok(Cell::Real(n.as_f64().unwrap())),
                    Value::Null => Ok(Cell::Real(f64::NAN)),
                    Value::String(s) => Ok(Cell::Text(s.clone())),
                    _ => Err(bad("cell")),
                })
                .collect::<Result<Vec<_>>>()?;
            if cells.len() != columns.len() {
                return Err(bad("ragged row"));
            }
            rows.push(cells);
        }
        let meta = v["meta"]
            .as_object()
            .map(|m| m.iter().map(|(k, v)| (k.clone(), v.as_str().unwrap_or_default().to_string())).collect())
            .unwrap_or_default();
        Ok(OutputTable { columns, rows, meta })
    }
}

fn parse_cell(s: &str) -> Cell {
    if let Ok(i) = s.parse::<i64>() {
        return Cell::Int(i);
    }
    match s {
        "NaN" => return Cell::Real(f64::NAN),
        "Infinity" => return Cell::Real(f64::INFINITY),
        "-Infinity" => return Cell::Real(f64::NEG_INFINITY),
        _ => {}
    }
    match s.parse::<f64>() {
        Ok(r) => Cell::Real(r),
        Err(_) => Cell::Text(s.to_string()),
    }
}

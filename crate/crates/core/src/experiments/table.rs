//! Result tables and their CSV/JSON persistence.
//!
//! Floats are written with 17 significant digits, which round-trips every
//! `f64` exactly. JSON output is an array with one object per row and keys in
//! column order; non-finite floats become `null`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Str(String),
    Int(i64),
    Float(f64),
}

impl Value {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Float(x) => Some(*x),
            Value::Int(i) => Some(*i as f64),
            Value::Str(_) => None,
        }
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Str(s.to_string())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Str(s)
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Float(x)
    }
}

impl From<usize> for Value {
    fn from(x: usize) -> Self {
        Value::Int(x as i64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Parse(format!("unknown format '{s}' (csv or json)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

/// Rows that know their column layout.
pub trait Record {
    fn header() -> Vec<&'static str>;
    fn values(&self) -> Vec<Value>;
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn from_records<R: Record>(records: &[R]) -> Self {
        let mut t = Table::new(&R::header());
        t.rows = records.iter().map(R::values).collect();
        t
    }

    pub fn push(&mut self, row: Vec<Value>) -> Result<()> {
        if row.len() != self.header.len() {
            return Err(Error::Shape(format!(
                "row of {} values for {} columns",
                row.len(),
                self.header.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(csv_field)).map_err(csv_err)?;
        }
        String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.into_error()))?)
            .map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let mut out = String::from("[");
        for (i, row) in self.rows.iter().enumerate() {
            out.push_str(if i == 0 { "\n  {" } else { ",\n  {" });
            for (j, (key, v)) in self.header.iter().zip(row).enumerate() {
                if j > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "{}: {}", json_string(key), json_value(v));
            }
            out.push('}');
        }
        out.push_str(if self.rows.is_empty() { "]\n" } else { "\n]\n" });
        out
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => Ok(self.to_json()),
        }
    }

    /// Parses CSV; fields that look like integers or floats are typed.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let header: Vec<String> = r.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            rows.push(rec.map_err(csv_err)?.iter().map(parse_field).collect());
        }
        Ok(Table { header, rows })
    }

    /// Parses the JSON written by [`Table::to_json`]. A header-only table
    /// has no rows to recover column names from, so `header` is required.
    pub fn from_json(text: &str, header: &[&str]) -> Result<Self> {
        let parsed: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let arr = parsed
            .as_array()
            .ok_or_else(|| Error::Parse("expected a JSON array".into()))?;
        let mut table = Table::new(header);
        for obj in arr {
            let obj = obj
                .as_object()
                .ok_or_else(|| Error::Parse("expected JSON objects".into()))?;
            let mut row = Vec::with_capacity(header.len());
            for key in header {
                let v = obj
                    .get(*key)
                    .ok_or_else(|| Error::Parse(format!("missing key '{key}'")))?;
                row.push(match v {
                    serde_json::Value::Null => Value::Float(f64::NAN),
                    serde_json::Value::String(s) => Value::Str(s.clone()),
                    serde_json::Value::Number(n) if n.is_i64() => Value::Int(n.as_i64().unwrap()),
                    serde_json::Value::Number(n) => Value::Float(n.as_f64().unwrap()),
                    other => return Err(Error::Parse(format!("unexpected JSON value {other}"))),
                });
            }
            table.rows.push(row);
        }
        Ok(table)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

/// 17 significant digits.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

fn csv_field(v: &Value) -> String {
    match v {
        Value::Str(s) => s.clone(),
        Value::Int(i) => i.to_string(),
        Value::Float(x) => format_float(*x),
    }
}

fn parse_field(s: &str) -> Value {
    if let Ok(i) = s.parse::<i64>() {
        return Value::Int(i);
    }
    match s.parse::<f64>() {
        Ok(x) => Value::Float(x),
        Err(_) => Value::Str(s.to_string()),
    }
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

fn json_value(v: &Value) -> String {
    match v {
        Value::Str(s) => json_string(s),
        Value::Int(i) => i.to_string(),
        Value::Float(x) if x.is_finite() => format_float(*x),
        Value::Float(_) => "null".into(),
    }
}

/// Writes `table` to `path`.
pub fn write_results(table: &Table, path: &Path, format: Format) -> Result<()> {
    fs::write(path, table.render(format)?)?;
    Ok(())
}

/// Reads a table written by [`write_results`]. JSON needs the column list.
pub fn read_results(path: &Path, format: Format, header: &[&str]) -> Result<Table> {
    let text = fs::read_to_string(path)?;
    match format {
        Format::Csv => Table::from_csv(&text),
        Format::Json => Table::from_json(&text, header),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(&["name", "n", "x"]);
        t.push(vec!["a".into(), 3usize.into(), 0.1f64.into()]).unwrap();
        t.push(vec!["b,c".into(), 0usize.into(), (1.0f64 / 3.0).into()]).unwrap();
        t.push(vec!["d".into(), 7usize.into(), 1e-300f64.into()]).unwrap();
        t
    }

    #[test]
    fn empty_table_is_header_only() {
        let t = Table::new(&["a", "b"]);
        assert_eq!(t.to_csv().unwrap(), "a,b\n");
        assert_eq!(t.to_json(), "[]\n");
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let t = sample();
        assert_eq!(Table::from_csv(&t.to_csv().unwrap()).unwrap(), t);
    }

    #[test]
    fn json_round_trip_is_exact() {
        let t = sample();
        let json = t.to_json();
        assert_eq!(json.lines().count(), 5);
        assert!(json.contains(r#"{"name": "a", "n": 3, "x": 1.0000000000000001e-1}"#));
        assert_eq!(Table::from_json(&json, &["name", "n", "x"]).unwrap(), t);
    }

    #[test]
    fn non_finite_values() {
        let mut t = Table::new(&["x"]);
        t.push(vec![f64::INFINITY.into()]).unwrap();
        assert!(t.to_json().contains("null"));
        let back = Table::from_csv(&t.to_csv().unwrap()).unwrap();
        assert_eq!(back.rows[0][0], Value::Float(f64::INFINITY));
    }

    #[test]
    fn row_width_checked() {
        let mut t = Table::new(&["a"]);
        assert!(t.push(vec![1usize.into(), 2usize.into()]).is_err());
    }
}

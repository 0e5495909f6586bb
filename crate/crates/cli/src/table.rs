//! Tabular output shared by all subcommands, its parser, and the
//! cell-by-cell comparison behind `--from-file`.

use std::fmt::Write as _;

use serde_json::{json, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
    Null,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
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

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Null, Into::into)
    }
}

/// 17 significant digits, enough to round-trip any binary64 value.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Null => String::new(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Float(v) if v.is_finite() => json!(v),
            Cell::Float(v) => json!(format_float(*v)),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
            Cell::Null => Value::Null,
        }
    }

    fn parse_csv(s: &str) -> Cell {
        if s.is_empty() {
            return Cell::Null;
        }
        if let Ok(v) = s.parse::<i64>() {
            return Cell::Int(v);
        }
        match s {
            "true" => return Cell::Bool(true),
            "false" => return Cell::Bool(false),
            "nan" => return Cell::Float(f64::NAN),
            "inf" => return Cell::Float(f64::INFINITY),
            "-inf" => return Cell::Float(f64::NEG_INFINITY),
            _ => {}
        }
        match s.parse::<f64>() {
            Ok(v) => Cell::Float(v),
            Err(_) => Cell::Text(s.to_string()),
        }
    }

    fn from_json(v: &Value) -> Cell {
        match v {
            Value::Null => Cell::Null,
            Value::Bool(b) => Cell::Bool(*b),
            Value::Number(n) => match n.as_i64() {
                Some(i) => Cell::Int(i),
                None => Cell::Float(n.as_f64().unwrap_or(f64::NAN)),
            },
            Value::String(s) => match Cell::parse_csv(s) {
                f @ Cell::Float(_) => f,
                _ => Cell::Text(s.clone()),
            },
            other => Cell::Text(other.to_string()),
        }
    }

    fn numeric(&self) -> Option<f64> {
        match self {
            Cell::Int(v) => Some(*v as f64),
            Cell::Float(v) => Some(*v),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub config: Value,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(config: Value, columns: &[&str]) -> Self {
        Self {
            config,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> Result<String, String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => Ok(self.to_json()),
        }
    }

    fn to_csv(&self) -> Result<String, String> {
        let mut out = String::new();
        writeln!(out, "# {}", self.config).expect("write to string");
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| e.to_string();
        w.write_record(&self.columns).map_err(err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_csv)).map_err(err)?;
        }
        let body = w.into_inner().map_err(|e| e.to_string())?;
        out.push_str(&String::from_utf8(body).map_err(|e| e.to_string())?);
        Ok(out)
    }

    fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(Cell::to_json).collect()))
            .collect();
        let doc = json!({ "config": self.config, "columns": self.columns, "rows": rows });
        let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
        s.push('\n');
        s
    }

    /// Reads either output format back.
    pub fn parse(text: &str) -> Result<Table, String> {
        if text.trim_start().starts_with('{') {
            Self::parse_json(text)
        } else {
            Self::parse_csv(text)
        }
    }

    fn parse_json(text: &str) -> Result<Table, String> {
        let doc: Value = serde_json::from_str(text).map_err(|e| format!("invalid JSON: {e}"))?;
        let columns = doc["columns"]
            .as_array()
            .ok_or("JSON table has no \"columns\" array")?
            .iter()
            .map(|c| c.as_str().map(str::to_string).ok_or("column names must be strings"))
            .collect::<Result<Vec<_>, _>>()?;
        let rows = doc["rows"]
            .as_array()
            .ok_or("JSON table has no \"rows\" array")?
            .iter()
            .map(|r| {
                r.as_array()
                    .map(|cells| cells.iter().map(Cell::from_json).collect())
                    .ok_or("each row must be an array")
            })
            .collect::<Result<Vec<Vec<Cell>>, _>>()?;
        Ok(Table {
            config: doc["config"].clone(),
            columns,
            rows,
        })
    }

    fn parse_csv(text: &str) -> Result<Table, String> {
        let (first, rest) = text.split_once('\n').unwrap_or((text, ""));
        let config_text = first.strip_prefix("# ").ok_or("CSV must start with a '# ' config line")?;
        let config = serde_json::from_str(config_text).map_err(|e| format!("bad config line: {e}"))?;
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(rest.as_bytes());
        let columns = r
            .headers()
            .map_err(|e| e.to_string())?
            .iter()
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(|e| e.to_string())?;
            rows.push(rec.iter().map(Cell::parse_csv).collect());
        }
        Ok(Table { config, columns, rows })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColumnDiff {
    pub column: String,
    pub compared: usize,
    pub max_abs_diff: f64,
    pub max_rel_diff: f64,
    pub mismatches: usize,
}

/// Cell-by-cell comparison. Numbers agree when
/// `|a - b| ≤ rtol · max(|a|, |b|)` (NaN matches NaN); everything else must
/// be equal.
pub fn compare(expected: &Table, actual: &Table, rtol: f64) -> Result<Vec<ColumnDiff>, String> {
    if expected.columns != actual.columns {
        return Err(format!(
            "column mismatch: file has {:?}, run produced {:?}",
            expected.columns, actual.columns
        ));
    }
    if expected.rows.len() != actual.rows.len() {
        return Err(format!(
            "row count mismatch: file has {}, run produced {}",
            expected.rows.len(),
            actual.rows.len()
        ));
    }
    let mut diffs: Vec<ColumnDiff> = expected
        .columns
        .iter()
        .map(|c| ColumnDiff {
            column: c.clone(),
            compared: 0,
            max_abs_diff: 0.0,
            max_rel_diff: 0.0,
            mismatches: 0,
        })
        .collect();
    for (re, ra) in expected.rows.iter().zip(&actual.rows) {
        if re.len() != ra.len() {
            return Err("ragged row".into());
        }
        for ((a, b), d) in re.iter().zip(ra).zip(diffs.iter_mut()) {
            d.compared += 1;
            let ok = match (a.numeric(), b.numeric()) {
                (Some(x), Some(y)) if x.is_nan() || y.is_nan() => x.is_nan() && y.is_nan(),
                (Some(x), Some(y)) if x == y => true,
                (Some(x), Some(y)) => {
                    let abs = (x - y).abs();
                    let rel = abs / x.abs().max(y.abs());
                    d.max_abs_diff = d.max_abs_diff.max(abs);
                    d.max_rel_diff = d.max_rel_diff.max(rel);
                    rel <= rtol
                }
                _ => a == b,
            };
            if !ok {
                d.mismatches += 1;
            }
        }
    }
    Ok(diffs)
}

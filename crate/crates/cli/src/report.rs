//! Tabular results rendered as CSV or JSON, with the run config embedded.
//!
//! CSV files start with `# config: <json>` and, when present,
//! `# summary: <json>`; floats are written with 17 significant digits and
//! missing values as empty cells. JSON files hold `{config, summary, results}`
//! with `results` one object per row; floats use the shortest representation
//! that reads back to the same value.

use serde_json::{json, Map, Value};

use crate::args::{Format, RunConfig};
use crate::error::CliError;

const CONFIG_PREFIX: &str = "# config: ";
const SUMMARY_PREFIX: &str = "# summary: ";

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
    Missing,
}

impl Cell {
    fn to_json(&self) -> Value {
        match self {
            // Non-finite values have no JSON form and become null.
            Cell::Num(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::Int(n) => json!(n),
            Cell::Bool(b) => json!(b),
            Cell::Text(s) => json!(s),
            Cell::Missing => Value::Null,
        }
    }

    fn to_csv(&self) -> String {
        match self {
            Cell::Num(x) if x.is_finite() => format!("{x:.16e}"),
            Cell::Num(_) | Cell::Missing => String::new(),
            Cell::Int(n) => n.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Missing, Cell::Num)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as u64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
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

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub config: RunConfig,
    pub summary: Option<Value>,
    pub table: Table,
}

impl Report {
    pub fn to_json(&self) -> Value {
        let results: Vec<Value> = self
            .table
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> =
                    self.table.columns.iter().cloned().zip(row.iter().map(Cell::to_json)).collect();
                Value::Object(obj)
            })
            .collect();
        let mut out = Map::new();
        out.insert("config".into(), serde_json::to_value(&self.config).expect("config serializes"));
        if let Some(s) = &self.summary {
            out.insert("summary".into(), s.clone());
        }
        out.insert("results".into(), Value::Array(results));
        Value::Object(out)
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).map_err(CliError::failure)?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => {
                let mut out = String::new();
                out.push_str(CONFIG_PREFIX);
                out.push_str(&serde_json::to_string(&self.config).map_err(CliError::failure)?);
                out.push('\n');
                if let Some(s) = &self.summary {
                    out.push_str(SUMMARY_PREFIX);
                    out.push_str(&serde_json::to_string(s).map_err(CliError::failure)?);
                    out.push('\n');
                }
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.table.columns).map_err(CliError::failure)?;
                for row in &self.table.rows {
                    w.write_record(row.iter().map(Cell::to_csv)).map_err(CliError::failure)?;
                }
                let bytes = w.into_inner().map_err(CliError::failure)?;
                out.push_str(&String::from_utf8(bytes).map_err(CliError::failure)?);
                Ok(out)
            }
        }
    }
}

/// Format of a previously written output, judged by its first character.
pub fn detect_format(text: &str) -> Result<Format, CliError> {
    match text.trim_start().chars().next() {
        Some('{') => Ok(Format::Json),
        Some('#') => Ok(Format::Csv),
        _ => Err(CliError::usage("not a naqc output file: expected JSON or a '# config:' header")),
    }
}

/// The config embedded in a previously written output.
pub fn read_config(text: &str) -> Result<RunConfig, CliError> {
    let value = match detect_format(text)? {
        Format::Json => {
            let v: Value = serde_json::from_str(text).map_err(|e| CliError::usage(format!("invalid JSON: {e}")))?;
            v.get("config").cloned().ok_or_else(|| CliError::usage("JSON output has no 'config' field"))?
        }
        Format::Csv => {
            let line = text.lines().next().unwrap_or_default();
            let body = line
                .strip_prefix(CONFIG_PREFIX)
                .ok_or_else(|| CliError::usage("CSV output does not start with '# config:'"))?;
            serde_json::from_str(body).map_err(|e| CliError::usage(format!("invalid config line: {e}")))?
        }
    };
    serde_json::from_value(value).map_err(|e| CliError::usage(format!("unrecognized config: {e}")))
}

/// Fields that legitimately differ between runs.
const VOLATILE: &[&str] = &["runtime_secs"];

fn strip_volatile(v: &mut Value) {
    match v {
        Value::Object(map) => {
            for key in VOLATILE {
                map.remove(*key);
            }
            map.values_mut().for_each(strip_volatile);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_volatile),
        _ => {}
    }
}

fn csv_rows(text: &str) -> Result<Vec<Vec<String>>, CliError> {
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let mut r = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(body.as_bytes());
    let mut rows: Vec<Vec<String>> = Vec::new();
    for rec in r.records() {
        rows.push(rec.map_err(|e| CliError::usage(format!("invalid CSV: {e}")))?.iter().map(String::from).collect());
    }
    if let Some(header) = rows.first().cloned() {
        for col in header.iter().enumerate().filter(|(_, h)| VOLATILE.contains(&h.as_str())).map(|(i, _)| i) {
            for row in rows.iter_mut().skip(1) {
                if let Some(cell) = row.get_mut(col) {
                    cell.clear();
                }
            }
        }
    }
    Ok(rows)
}

/// First difference between two outputs of the same format, ignoring
/// runtimes. `None` when they agree.
pub fn first_difference(old: &str, new: &str) -> Result<Option<String>, CliError> {
    match detect_format(old)? {
        Format::Json => {
            let parse = |t: &str| -> Result<Value, CliError> {
                let mut v: Value = serde_json::from_str(t).map_err(|e| CliError::usage(format!("invalid JSON: {e}")))?;
                strip_volatile(&mut v);
                Ok(v)
            };
            let (a, b) = (parse(old)?, parse(new)?);
            Ok(json_difference("", &a, &b))
        }
        Format::Csv => {
            let comments = |t: &str| t.lines().filter(|l| l.starts_with('#')).map(String::from).collect::<Vec<_>>();
            if comments(old) != comments(new) {
                return Ok(Some("header comments differ".into()));
            }
            let (a, b) = (csv_rows(old)?, csv_rows(new)?);
            if a.len() != b.len() {
                return Ok(Some(format!("row count {} vs {}", a.len(), b.len())));
            }
            Ok(a.iter().zip(&b).position(|(x, y)| x != y).map(|i| format!("line {} of the table differs", i + 1)))
        }
    }
}

fn json_difference(path: &str, a: &Value, b: &Value) -> Option<String> {
    match (a, b) {
        (Value::Object(x), Value::Object(y)) => {
            if x.len() != y.len() || x.keys().any(|k| !y.contains_key(k)) {
                return Some(format!("{path}: keys differ"));
            }
            x.iter().find_map(|(k, v)| json_difference(&format!("{path}/{k}"), v, &y[k]))
        }
        (Value::Array(x), Value::Array(y)) => {
            if x.len() != y.len() {
                return Some(format!("{path}: length {} vs {}", x.len(), y.len()));
            }
            x.iter().zip(y).enumerate().find_map(|(i, (u, v))| json_difference(&format!("{path}/{i}"), u, v))
        }
        _ if a == b => None,
        _ => Some(format!("{path}: {a} vs {b}")),
    }
}

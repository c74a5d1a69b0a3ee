//! Deterministic table rendering. Floats are written with 17 significant
//! digits (`{:.16e}`) in CSV and as round-trip-exact JSON numbers, so a
//! rerun with the same config reproduces the payload byte for byte.

use serde_json::json;

/// One table cell or metadata value.
#[derive(Clone, Debug)]
pub enum Value {
    /// Signed integer cell.
    Int(i64),
    /// Unsigned integer cell (counts, indices, seeds).
    UInt(u64),
    /// Double-precision cell.
    Float(f64),
    /// Text cell (labels, verdicts). Must not contain commas.
    Text(String),
}

impl Value {
    pub fn text(s: impl Into<String>) -> Value {
        Value::Text(s.into())
    }

    fn render_csv(&self) -> String {
        match self {
            Value::Int(i) => i.to_string(),
            Value::UInt(u) => u.to_string(),
            Value::Float(f) => fmt_float(*f),
            Value::Text(s) => s.clone(),
        }
    }

    fn render_json(&self) -> serde_json::Value {
        match self {
            Value::Int(i) => json!(i),
            Value::UInt(u) => json!(u),
            Value::Float(f) => json!(f),
            Value::Text(s) => json!(s),
        }
    }
}

impl From<f64> for Value {
    fn from(f: f64) -> Value {
        Value::Float(f)
    }
}

impl From<i64> for Value {
    fn from(i: i64) -> Value {
        Value::Int(i)
    }
}

impl From<u64> for Value {
    fn from(u: u64) -> Value {
        Value::UInt(u)
    }
}

impl From<usize> for Value {
    fn from(i: usize) -> Value {
        Value::UInt(i as u64)
    }
}

/// 17 significant digits, `.` decimal separator, round-trip exact.
pub fn fmt_float(f: f64) -> String {
    format!("{f:.16e}")
}

/// Output format selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// A self-describing result table: ordered metadata (input echo, seed,
/// tolerances, summary figures) plus named columns and rows.
#[derive(Clone, Debug, Default)]
pub struct Table {
    meta: Vec<(String, Value)>,
    columns: Vec<String>,
    rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Table {
        Table {
            meta: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Append a metadata entry. Keys must be unique; insertion order is
    /// preserved in CSV, JSON objects sort keys.
    pub fn meta(&mut self, key: &str, value: impl Into<Value>) {
        debug_assert!(
            self.meta.iter().all(|(k, _)| k != key),
            "duplicate meta key {key}"
        );
        self.meta.push((key.to_string(), value.into()));
    }

    pub fn row(&mut self, cells: Vec<Value>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.render_csv(),
            Format::Json => self.render_json(),
        }
    }

    fn render_csv(&self) -> String {
        let mut out = String::new();
        for (key, value) in &self.meta {
            out.push_str(&format!("# {key} = {}\n", value.render_csv()));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Value::render_csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn render_json(&self) -> String {
        let meta: serde_json::Map<String, serde_json::Value> = self
            .meta
            .iter()
            .map(|(k, v)| (k.clone(), v.render_json()))
            .collect();
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| json!(row.iter().map(Value::render_json).collect::<Vec<_>>()))
            .collect();
        let doc = json!({
            "meta": meta,
            "columns": self.columns,
            "rows": rows,
        });
        let mut text = serde_json::to_string_pretty(&doc).expect("tables hold only finite values");
        text.push('\n');
        text
    }
}

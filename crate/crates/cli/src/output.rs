//! Record emission as CSV (with `#` metadata lines) or JSON (`meta` + `rows`).
//!
//! Floats are written as `{:.16e}`, i.e. 17 significant digits, which
//! round-trips every `f64`.

use std::io::{self, Write};

use serde_json::{Map, Number, Value as Json};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
    /// Empty CSV field, JSON `null`.
    Missing,
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}

impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::Int(v as i64)
    }
}

impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(v: Option<T>) -> Self {
        v.map_or(Value::Missing, Into::into)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_owned())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

impl Value {
    fn text(&self) -> String {
        match self {
            Value::Int(i) => i.to_string(),
            Value::Float(f) => format_float(*f),
            Value::Bool(b) => b.to_string(),
            Value::Text(s) => s.clone(),
            Value::Missing => String::new(),
        }
    }

    fn json(&self) -> Json {
        match self {
            Value::Int(i) => Json::from(*i),
            Value::Float(f) if f.is_finite() => {
                Json::Number(format_float(*f).parse::<Number>().expect("formatted float is a JSON number"))
            }
            Value::Float(_) => Json::Null,
            Value::Bool(b) => Json::Bool(*b),
            Value::Text(s) => Json::String(s.clone()),
            Value::Missing => Json::Null,
        }
    }
}

/// A homogeneous table plus its metadata.
#[derive(Debug, Clone, Default)]
pub struct Records {
    pub meta: Vec<(String, Value)>,
    pub warnings: Vec<String>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Records {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            ..Self::default()
        }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<Value>) {
        self.meta.push((key.to_owned(), value.into()));
    }

    pub fn warn(&mut self, w: impl ToString) {
        self.warnings.push(w.to_string());
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

pub fn emit(records: &Records, format: Format, out: &mut dyn Write) -> io::Result<()> {
    match format {
        Format::Csv => emit_csv(records, out),
        Format::Json => emit_json(records, out),
    }
}

fn emit_csv(records: &Records, out: &mut dyn Write) -> io::Result<()> {
    for (k, v) in &records.meta {
        writeln!(out, "# {k}={}", v.text())?;
    }
    for w in &records.warnings {
        writeln!(out, "# warning: {w}")?;
    }
    let mut wtr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    wtr.write_record(&records.columns)?;
    for row in &records.rows {
        wtr.write_record(row.iter().map(Value::text))?;
    }
    wtr.flush()
}

fn emit_json(records: &Records, out: &mut dyn Write) -> io::Result<()> {
    let mut meta: Map<String, Json> = records.meta.iter().map(|(k, v)| (k.clone(), v.json())).collect();
    meta.insert(
        "warnings".into(),
        Json::Array(records.warnings.iter().cloned().map(Json::String).collect()),
    );
    let rows = records
        .rows
        .iter()
        .map(|row| {
            Json::Object(
                records
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| ((*c).to_owned(), v.json()))
                    .collect(),
            )
        })
        .collect();
    let mut doc = Map::new();
    doc.insert("meta".into(), Json::Object(meta));
    doc.insert("rows".into(), Json::Array(rows));
    serde_json::to_writer_pretty(&mut *out, &Json::Object(doc))?;
    writeln!(out)
}

//! Tables and documents, written as JSON or CSV to stdout or a file.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// One table cell: its JSON form and its CSV text.
#[derive(Debug, Clone)]
pub struct Cell {
    json: Value,
    text: String,
}

impl Cell {
    pub fn empty() -> Self {
        Cell { json: Value::Null, text: String::new() }
    }

    pub fn text(s: impl Into<String>) -> Self {
        let s = s.into();
        Cell { json: Value::String(s.clone()), text: s }
    }

    pub fn int(n: impl Into<i64>) -> Self {
        let n = n.into();
        Cell { json: Value::from(n), text: n.to_string() }
    }

    pub fn boolean(b: bool) -> Self {
        Cell { json: Value::Bool(b), text: b.to_string() }
    }

    /// Structured JSON, shown in CSV through its `Display` form.
    pub fn value<T: Serialize + std::fmt::Display>(v: &T) -> Self {
        Cell { json: serde_json::to_value(v).expect("serializable"), text: v.to_string() }
    }

    pub fn json(json: Value) -> Self {
        let text = match &json {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        Cell { json, text }
    }

    /// Replaces the CSV text, keeping the JSON form.
    pub fn with_text(mut self, text: impl Into<String>) -> Self {
        self.text = text.into();
        self
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    fn to_json(&self) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> =
                    self.columns.iter().zip(row).map(|(c, cell)| (c.to_string(), cell.json.clone())).collect();
                Value::Object(obj)
            })
            .collect();
        Value::Array(rows)
    }
}

/// What a command produces. Documents carry a richer JSON form and fall back
/// to their table for CSV.
pub enum Output {
    Table(Table),
    Document { json: Value, table: Table },
}

pub fn write(out: &Output, format: Format, path: Option<&Path>) -> io::Result<()> {
    let mut sink: Box<dyn Write> = match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let table = match out {
        Output::Table(t) | Output::Document { table: t, .. } => t,
    };
    match format {
        Format::Json => {
            let json = match out {
                Output::Table(t) => t.to_json(),
                Output::Document { json, .. } => json.clone(),
            };
            serde_json::to_writer_pretty(&mut sink, &json)?;
            writeln!(sink)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut sink);
            w.write_record(&table.columns)?;
            for row in &table.rows {
                w.write_record(row.iter().map(|c| c.text.as_str()))?;
            }
            w.flush()?;
        }
    }
    sink.flush()
}

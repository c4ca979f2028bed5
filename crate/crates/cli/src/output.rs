use std::io::Write;

use clap::ValueEnum;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Rows of exact strings with a fixed header.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Self {
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    let obj: Map<String, Value> = self
                        .headers
                        .iter()
                        .cloned()
                        .zip(r.iter().map(|c| Value::String(c.clone())))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

pub enum Output {
    Table(Table),
    /// Structured data; `table` is its flattened form for csv and text.
    Doc {
        json: Value,
        table: Table,
    },
}

pub fn render(out: &Output, format: Format, w: &mut impl Write) -> std::io::Result<()> {
    match (out, format) {
        (Output::Table(t), Format::Json) => writeln!(w, "{}", pretty(&t.to_json())),
        (Output::Doc { json, .. }, Format::Json) => writeln!(w, "{}", pretty(json)),
        (Output::Table(t) | Output::Doc { table: t, .. }, Format::Csv) => {
            let mut csv = csv::Writer::from_writer(w);
            csv.write_record(&t.headers)?;
            for r in &t.rows {
                csv.write_record(r)?;
            }
            csv.flush()
        }
        (Output::Table(t) | Output::Doc { table: t, .. }, Format::Text) => write_text(t, w),
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize")
}

fn write_text(t: &Table, w: &mut impl Write) -> std::io::Result<()> {
    let mut widths: Vec<usize> = t.headers.iter().map(|h| h.len()).collect();
    for r in &t.rows {
        for (i, c) in r.iter().enumerate() {
            widths[i] = widths[i].max(c.len());
        }
    }
    let line = |cells: &[String]| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, n)| format!("{c:<n$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    writeln!(w, "{}", line(&t.headers))?;
    for r in &t.rows {
        writeln!(w, "{}", line(r))?;
    }
    Ok(())
}

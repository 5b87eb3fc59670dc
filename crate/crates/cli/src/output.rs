//! CSV and JSON emission with a fixed numeric contract: floats carry 17
//! significant digits, infinities serialize as the literal `inf`, and JSON
//! mirrors the CSV fields (row objects with the column names as keys).

use crate::error::CliError;
use serde_json::{Map, Number, Value};
use std::io::Write;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// One output cell.
#[derive(Debug, Clone)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Float(x) => format_float(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(x) => float_value(*x),
            Cell::Int(n) => Value::Number((*n).into()),
            Cell::Bool(b) => Value::Bool(*b),
        }
    }
}

/// 17 significant digits; infinities as `inf`/`-inf`, NaN as `nan`.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        }
    } else {
        format!("{x:.16e}")
    }
}

fn float_value(x: f64) -> Value {
    if x.is_finite() {
        Number::from_f64(x)
            .map(Value::Number)
            .unwrap_or(Value::Null)
    } else if x.is_nan() {
        Value::String("nan".to_string())
    } else if x > 0.0 {
        Value::String("inf".to_string())
    } else {
        Value::String("-inf".to_string())
    }
}

/// A rectangular table with named columns.
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => {
                let mut out = String::new();
                out.push_str(&self.columns.join(","));
                out.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
                out
            }
            OutputFormat::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let mut object = Map::new();
                        for (name, cell) in self.columns.iter().zip(row) {
                            object.insert((*name).to_string(), cell.json());
                        }
                        Value::Object(object)
                    })
                    .collect();
                let mut text = serde_json::to_string_pretty(&Value::Array(rows)).unwrap();
                text.push('\n');
                text
            }
        }
    }
}

/// Writes to the requested path, or stdout when none is given.
pub fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content).map_err(|e| CliError {
            code: "E004",
            message: format!("cannot write {}: {e}", path.display()),
            exit: 1,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(content.as_bytes()).map_err(|e| CliError {
                code: "E004",
                message: format!("cannot write to stdout: {e}"),
                exit: 1,
            })
        }
    }
}

/// Serializes a JSON value with a trailing newline.
pub fn render_json(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).unwrap();
    text.push('\n');
    text
}

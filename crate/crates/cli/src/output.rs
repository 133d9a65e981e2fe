use std::fmt::Write as _;

use clap::ValueEnum;
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// A command result renderable in every output format.
pub struct Report {
    pub json: Value,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Preferred human-readable rendering; the table is used when absent.
    pub text: Option<String>,
}

impl Report {
    pub fn table(json: Value, headers: &[&str], rows: Vec<Vec<String>>) -> Self {
        Self {
            json,
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows,
            text: None,
        }
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => Ok(serde_json::to_string_pretty(&self.json).expect("json value") + "\n"),
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.headers).map_err(csv_err)?;
                for r in &self.rows {
                    w.write_record(r).map_err(csv_err)?;
                }
                let bytes = w.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
                Ok(String::from_utf8(bytes).expect("csv is utf-8"))
            }
            Format::Text => Ok(match &self.text {
                Some(t) => t.clone(),
                None => self.aligned(),
            }),
        }
    }

    fn aligned(&self) -> String {
        let mut width: Vec<usize> = self.headers.iter().map(String::len).collect();
        for r in &self.rows {
            for (w, cell) in width.iter_mut().zip(r) {
                *w = (*w).max(cell.len());
            }
        }
        let mut out = String::new();
        let line = |cells: &[String], out: &mut String| {
            let parts: Vec<String> = cells.iter().zip(&width).map(|(c, w)| format!("{c:>w$}")).collect();
            let _ = writeln!(out, "{}", parts.join("  "));
        };
        line(&self.headers, &mut out);
        for r in &self.rows {
            line(r, &mut out);
        }
        out
    }
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Output(e.to_string())
}

/// Fixed-precision float cell, stable across runs.
pub fn num(x: f64) -> String {
    format!("{x:.12}")
}

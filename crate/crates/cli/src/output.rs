//! Tabular output as CSV (17 significant digits, round-trips exactly) or as
//! JSON with a metadata snapshot.

use std::io::Write;

use serde::Serialize;
use serde_json::Value;

use crate::config::{Format, OutputSection};
use crate::CliError;

/// Named columns of floating-point rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub meta: Value,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(meta: Value, columns: &[&str]) -> Self {
        Table {
            meta,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Csv => {
                let mut out = self.columns.join(",");
                out.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
                Ok(out)
            }
            Format::Json => {
                let mut text = serde_json::to_string_pretty(self)
                    .map_err(|e| CliError::Usage(format!("cannot serialize output: {e}")))?;
                text.push('\n');
                Ok(text)
            }
        }
    }

    /// Writes to the configured file, or to standard output.
    pub fn emit(&self, out: &OutputSection) -> Result<(), CliError> {
        let text = self.render(out.format)?;
        match &out.path {
            Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            }),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(text.as_bytes())
                    .and_then(|_| stdout.flush())
                    .map_err(|source| CliError::Io {
                        path: "<stdout>".into(),
                        source,
                    })
            }
        }
    }
}

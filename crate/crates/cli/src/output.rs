//! Table emission: CSV with a reproducible comment header, JSON reports,
//! and companion gnuplot scripts.

use std::io::Write;
use std::path::{Path, PathBuf};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Round-trip exact float formatting (17 significant digits).
pub fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A fully assembled table: header metadata plus rows in a fixed order.
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub meta: Vec<(String, String)>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self { columns, rows: Vec::new(), meta: Vec::new() }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<String>) {
        self.meta.push((key.to_string(), value.into()));
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut out = String::new();
                out.push_str(&format!("# levy-reset {VERSION}\n"));
                for (k, v) in &self.meta {
                    out.push_str(&format!("# {k}: {v}\n"));
                }
                out.push_str(&self.columns.join(","));
                out.push('\n');
                for row in &self.rows {
                    out.push_str(&row.join(","));
                    out.push('\n');
                }
                out
            }
            Format::Json => {
                let rows: Vec<serde_json::Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let mut obj = serde_json::Map::new();
                        for (col, val) in self.columns.iter().zip(row) {
                            let parsed = val
                                .parse::<f64>()
                                .map(serde_json::Value::from)
                                .unwrap_or_else(|_| serde_json::Value::from(val.clone()));
                            obj.insert(col.to_string(), parsed);
                        }
                        serde_json::Value::Object(obj)
                    })
                    .collect();
                let meta: serde_json::Map<String, serde_json::Value> = self
                    .meta
                    .iter()
                    .map(|(k, v)| (k.clone(), serde_json::Value::from(v.clone())))
                    .collect();
                serde_json::to_string_pretty(&serde_json::json!({
                    "version": VERSION,
                    "meta": meta,
                    "rows": rows,
                }))
                .expect("table serialize")
            }
        }
    }
}

/// Write to the output path, or stdout when none was given.
pub fn emit(out: Option<&Path>, content: &str) -> std::io::Result<()> {
    match out {
        None => {
            print!("{content}");
            std::io::stdout().flush()
        }
        Some(path) => std::fs::write(path, content),
    }
}

/// Companion gnuplot script next to a CSV output.
pub fn emit_gnuplot(out: &Path, xcol: usize, ycol: usize, title: &str) -> std::io::Result<PathBuf> {
    let gp = out.with_extension("gp");
    let data = out.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
    let script = format!(
        "set datafile separator ','\nset key left\nset title '{title}'\nplot '{data}' using {xcol}:{ycol} with linespoints title '{title}'\n",
    );
    std::fs::write(&gp, script)?;
    Ok(gp)
}

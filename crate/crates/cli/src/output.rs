//! CSV and JSON-sidecar writing.
//!
//! CSV format: header row, `.` decimal separator, floats at 12 significant
//! digits, LF line endings. Identical config and seed produce byte-identical
//! files.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

/// One CSV cell.
#[derive(Debug, Clone)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_sig12(*v),
            Cell::Text(v) => v.clone(),
        }
    }
}

/// Formats a float with 12 significant digits and a `.` decimal separator.
pub fn format_sig12(value: f64) -> String {
    format!("{value:.11e}")
}

pub fn render_csv(header: &[&str], rows: &[Vec<Cell>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        let rendered: Vec<String> = row.iter().map(Cell::render).collect();
        let _ = writeln!(out, "{}", rendered.join(","));
    }
    out
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<Cell>]) -> std::io::Result<()> {
    let mut file = fs::File::create(path)?;
    file.write_all(render_csv(header, rows).as_bytes())
}

/// Writes the sidecar JSON (pretty-printed, trailing newline).
pub fn write_sidecar(path: &Path, sidecar: &serde_json::Value) -> std::io::Result<()> {
    let mut file = fs::File::create(path)?;
    let text = serde_json::to_string_pretty(sidecar).expect("sidecar serializes");
    file.write_all(text.as_bytes())?;
    file.write_all(b"\n")
}

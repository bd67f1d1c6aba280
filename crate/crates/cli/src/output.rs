use std::fs;
use std::io::Read;
use std::path::Path;

use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] s1chains::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Result of a command: a JSON document, its human rendering, and whether
/// every check it ran passed.
pub struct Report {
    pub json: Value,
    pub text: String,
    pub passed: bool,
}

impl Report {
    pub fn new(json: Value, text: String) -> Self {
        Report { json, text, passed: true }
    }

    pub fn checked(json: Value, text: String, passed: bool) -> Self {
        Report { json, text, passed }
    }
}

pub fn read_input(path: Option<&Path>) -> CliResult<String> {
    match path {
        Some(p) if p != Path::new("-") => {
            fs::read_to_string(p).map_err(|source| CliError::Io { path: p.display().to_string(), source })
        }
        _ => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|source| CliError::Io { path: "<stdin>".into(), source })?;
            Ok(s)
        }
    }
}

pub fn read_file(path: &Path) -> CliResult<String> {
    read_input(Some(path))
}

/// Left-aligned columns separated by two spaces.
pub fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> =
            cells.iter().zip(&widths).map(|(c, &w)| format!("{c}{}", " ".repeat(w - c.chars().count()))).collect();
        padded.join("  ").trim_end().to_string()
    };
    let mut out = vec![line(headers.to_vec())];
    for row in rows {
        out.push(line(row.iter().map(String::as_str).collect()));
    }
    out.join("\n")
}

pub fn csv(headers: &[String], rows: &[Vec<f64>]) -> String {
    let mut out = vec![headers.join(",")];
    for row in rows {
        out.push(row.iter().map(|v| format!("{v:.12e}")).collect::<Vec<_>>().join(","));
    }
    out.join("\n")
}

pub fn yes_no(b: bool) -> String {
    if b { "yes" } else { "no" }.to_string()
}

//! Matrix CSV: one row per line, comma separated, blank and `#` comment
//! lines skipped, and an optional leading `rows,cols` header.
//!
//! The header is recognised only when the first record holds exactly two
//! unsigned integers and the records after it form a `rows × cols` matrix;
//! otherwise the first record is data. Values are written with Rust's
//! shortest round-trip formatting, so reading back is bit-exact.

use std::fs;
use std::io::Write;
use std::path::Path;

use optfilter_core::Matrix;

use crate::error::CliError;

struct Record {
    line: u64,
    fields: Vec<String>,
}

fn parse_error(path: &Path, line: u64, column: usize, message: impl Into<String>) -> CliError {
    CliError::Parse {
        path: path.to_path_buf(),
        line,
        column,
        message: message.into(),
    }
}

fn as_dimension(field: &str) -> Option<usize> {
    if field.is_empty() || !field.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    field.parse().ok()
}

/// Parses matrix CSV text; `path` is only used in diagnostics.
pub fn parse_matrix(text: &str, path: &Path) -> Result<Matrix, CliError> {
    let records: Vec<Record> = text
        .lines()
        .enumerate()
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        })
        .map(|(i, l)| Record {
            line: i as u64 + 1,
            fields: l.split(',').map(|f| f.trim().to_owned()).collect(),
        })
        .collect();
    if records.is_empty() {
        return Err(parse_error(path, 1, 1, "no matrix rows"));
    }

    let mut data_start = 0;
    if let [first, rest @ ..] = records.as_slice() {
        if let [r, c] = first.fields.as_slice() {
            if let (Some(rows), Some(cols)) = (as_dimension(r), as_dimension(c)) {
                if rows == rest.len() && rest.iter().all(|rec| rec.fields.len() == cols) {
                    data_start = 1;
                }
            }
        }
    }
    let body = &records[data_start..];
    if body.is_empty() {
        return Err(parse_error(path, records[0].line, 1, "header without matrix rows"));
    }

    let cols = body[0].fields.len();
    let mut data = Vec::with_capacity(body.len() * cols);
    for rec in body {
        if rec.fields.len() != cols {
            return Err(parse_error(
                path,
                rec.line,
                rec.fields.len().min(cols) + 1,
                format!("expected {cols} fields, found {}", rec.fields.len()),
            ));
        }
        for (j, field) in rec.fields.iter().enumerate() {
            let value: f64 = field
                .parse()
                .map_err(|_| parse_error(path, rec.line, j + 1, format!("not a number: {field:?}")))?;
            if !value.is_finite() {
                return Err(parse_error(
                    path,
                    rec.line,
                    j + 1,
                    format!("non-finite value: {field:?}"),
                ));
            }
            data.push(value);
        }
    }
    Ok(Matrix::from_row_major(body.len(), cols, data)?)
}

pub fn read_matrix(path: &Path) -> Result<Matrix, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_matrix(&text, path)
}

pub fn format_matrix(m: &Matrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn write_matrix(path: &Path, m: &Matrix) -> Result<(), CliError> {
    write_text(path, &format_matrix(m))
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut file = fs::File::create(path).map_err(io)?;
    file.write_all(text.as_bytes()).map_err(io)
}

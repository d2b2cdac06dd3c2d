//! Minimal numeric CSV reading/writing shared by the file formats of this crate.
//!
//! Files are UTF-8 with LF line endings, one header row and numeric cells only.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Decimal text with 17 significant digits; enough to round-trip any `f64`.
pub fn fmt_num<T: Scalar>(v: T) -> String {
    format!("{:.16e}", v.as_f64())
}

pub(crate) fn write_row<T: Scalar>(out: &mut String, cells: impl IntoIterator<Item = T>) {
    let mut first = true;
    for c in cells {
        if !first {
            out.push(',');
        }
        first = false;
        let _ = write!(out, "{}", fmt_num(c));
    }
    out.push('\n');
}

/// A parsed table: header names and numeric rows with their 1-based line numbers.
#[derive(Debug)]
pub(crate) struct Table<T> {
    pub header: Vec<String>,
    pub rows: Vec<(usize, Vec<T>)>,
}

pub(crate) fn parse_table<T: Scalar>(text: &str) -> Result<Table<T>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')));
    let (_, header_line) =
        lines
            .by_ref()
            .find(|(_, l)| !l.trim().is_empty())
            .ok_or(Error::Parse {
                line: 1,
                message: "missing header row".into(),
            })?;
    let header: Vec<String> = header_line
        .split(',')
        .map(|s| s.trim().to_string())
        .collect();
    let mut rows = Vec::new();
    for (lineno, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != header.len() {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected {} columns, found {}", header.len(), cells.len()),
            });
        }
        let mut row = Vec::with_capacity(cells.len());
        for cell in cells {
            let v: f64 = cell.trim().parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("non-numeric cell '{}'", cell.trim()),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("non-finite cell '{}'", cell.trim()),
                });
            }
            row.push(T::from_f64(v).ok_or(Error::Parse {
                line: lineno,
                message: "value out of range".into(),
            })?);
        }
        rows.push((lineno, row));
    }
    Ok(Table { header, rows })
}

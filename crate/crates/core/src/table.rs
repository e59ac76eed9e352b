//! Small whitespace/comma separated numeric tables used by `file:` specs.

use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Reads a table, skipping blank lines and `#` comments. Every row must have
/// exactly `columns` fields.
pub(crate) fn read_rows<T: FromStr>(path: &Path, columns: usize) -> Result<Vec<Vec<T>>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    parse_rows(&text, columns).map_err(|e| match e {
        Error::Parse { token, reason } => Error::Parse {
            token,
            reason: format!("{reason} (in {})", path.display()),
        },
        other => other,
    })
}

pub(crate) fn parse_rows<T: FromStr>(text: &str, columns: usize) -> Result<Vec<Vec<T>>> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        if fields.len() != columns {
            return Err(Error::parse(
                line,
                format!(
                    "line {}: expected {columns} columns, found {}",
                    lineno + 1,
                    fields.len()
                ),
            ));
        }
        let row = fields
            .iter()
            .map(|f| {
                f.parse::<T>()
                    .map_err(|_| Error::parse(*f, format!("line {}: not a number", lineno + 1)))
            })
            .collect::<Result<Vec<T>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::parse(text.trim(), "table has no rows"));
    }
    Ok(rows)
}

/// Checks that the first column runs `1, 2, 3, ...`.
pub(crate) fn check_consecutive(index: impl Iterator<Item = u64>) -> Result<()> {
    for (expected, got) in (1u64..).zip(index) {
        if got != expected {
            return Err(Error::parse(
                got.to_string(),
                format!("row indices must run 1, 2, 3, ...; expected {expected}"),
            ));
        }
    }
    Ok(())
}

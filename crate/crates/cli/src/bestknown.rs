//! Best-known makespan tables: whitespace-separated `name value` lines with
//! `#` comments.

use std::collections::HashMap;

use thiserror::Error;

use glnsa_core::instance::Time;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TableError {
    #[error("line {line}: expected `name value`, found {found:?}")]
    Malformed { line: usize, found: String },
    #[error("line {line}: {value:?} is not a makespan")]
    BadValue { line: usize, value: String },
}

pub fn parse_best_known(text: &str) -> Result<HashMap<String, Time>, TableError> {
    let mut table = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut parts = content.split_ascii_whitespace();
        let (Some(name), Some(value)) = (parts.next(), parts.next()) else {
            return Err(TableError::Malformed { line, found: content.to_string() });
        };
        if parts.next().is_some() {
            return Err(TableError::Malformed { line, found: content.to_string() });
        }
        let value: Time = value
            .parse()
            .map_err(|_| TableError::BadValue { line, value: value.to_string() })?;
        table.insert(name.to_string(), value);
    }
    Ok(table)
}

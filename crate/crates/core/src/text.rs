//! Shared helpers for the line-oriented text formats.

use std::collections::HashMap;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Non-blank, non-comment lines paired with their 1-based line number.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Parses `keyword k1=v1 k2=v2 ...`, checking the keyword.
pub(crate) fn header<'a>(
    line_no: usize,
    line: &'a str,
    keyword: &str,
) -> Result<HashMap<&'a str, &'a str>> {
    let mut tokens = line.split_whitespace();
    match tokens.next() {
        Some(k) if k == keyword => {}
        other => {
            return Err(Error::parse(
                line_no,
                format!(
                    "expected `{keyword}` header, found {:?}",
                    other.unwrap_or("")
                ),
            ))
        }
    }
    let mut fields = HashMap::new();
    for token in tokens {
        let (key, value) = token
            .split_once('=')
            .ok_or_else(|| Error::parse(line_no, format!("expected key=value, found {token:?}")))?;
        if fields.insert(key, value).is_some() {
            return Err(Error::parse(
                line_no,
                format!("repeated header key {key:?}"),
            ));
        }
    }
    Ok(fields)
}

pub(crate) fn field<T: FromStr>(
    fields: &HashMap<&str, &str>,
    key: &str,
    line_no: usize,
) -> Result<T> {
    let raw = fields
        .get(key)
        .ok_or_else(|| Error::parse(line_no, format!("missing header key `{key}`")))?;
    raw.parse()
        .map_err(|_| Error::parse(line_no, format!("invalid value {raw:?} for `{key}`")))
}

pub(crate) fn number<T: FromStr>(token: &str, line_no: usize, what: &str) -> Result<T> {
    token
        .parse()
        .map_err(|_| Error::parse(line_no, format!("invalid {what} {token:?}")))
}

/// Parses a finite decimal real.
pub(crate) fn real(token: &str, line_no: usize) -> Result<f64> {
    let v: f64 = number(token, line_no, "number")?;
    if !v.is_finite() {
        return Err(Error::parse(line_no, format!("non-finite value {token:?}")));
    }
    Ok(v)
}

/// Formats a real with 17 significant digits, enough to round-trip every f64.
pub(crate) fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

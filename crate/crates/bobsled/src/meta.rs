//! `# key: value` comment blocks at the top of CSV files.

use std::collections::BTreeMap;
use std::fmt::Write;
use std::path::Path;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Header {
    /// Value and 1-based line number per key.
    pub entries: BTreeMap<String, (String, u64)>,
    /// Number of leading comment lines.
    pub lines: u64,
}

impl Header {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    pub fn number(&self, path: &Path, key: &str) -> Result<Option<f64>> {
        self.entries
            .get(key)
            .map(|(v, line)| {
                v.parse::<f64>().map_err(|_| {
                    Error::parse(path, *line, format!("`{key}` is not a number: `{v}`"))
                })
            })
            .transpose()
    }
}

/// Splits off leading `#` lines. Lines of the form `# key: value` become
/// entries; other comment lines are skipped.
pub fn split_header(text: &str) -> (Header, &str) {
    let mut header = Header::default();
    let mut rest = text;
    while rest.starts_with('#') {
        let (line, tail) = match rest.find('\n') {
            Some(i) => (&rest[..i], &rest[i + 1..]),
            None => (rest, ""),
        };
        header.lines += 1;
        if let Some((k, v)) = line[1..].split_once(':') {
            let value = v.trim().trim_end_matches('\r').to_string();
            header
                .entries
                .insert(k.trim().to_string(), (value, header.lines));
        }
        rest = tail;
    }
    (header, rest)
}

pub fn write_header<'a>(out: &mut String, entries: impl IntoIterator<Item = (&'a str, String)>) {
    for (k, v) in entries {
        let _ = writeln!(out, "# {k}: {v}");
    }
}

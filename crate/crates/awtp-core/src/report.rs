//! Line-delimited record and CSV emitters.
//!
//! A record renders as `kind key=value key=value ...` on one line.  A report
//! prefixes the first occurrence of each record kind with a `#schema` line
//! naming its keys, so consumers can parse without guessing.  Rendering is
//! deterministic: records appear in insertion order and keys in push order.

use std::fmt::Display;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Record {
    kind: String,
    fields: Vec<(String, String)>,
}

impl Record {
    pub fn new(kind: &str) -> Self {
        debug_assert!(is_token(kind));
        Record {
            kind: kind.to_string(),
            fields: Vec::new(),
        }
    }

    pub fn push(&mut self, key: &str, value: impl Display) {
        let value = value.to_string();
        debug_assert!(is_token(key));
        debug_assert!(
            !value.contains([' ', '\n', '=']),
            "record value {value:?} must not contain spaces, '=', or newlines"
        );
        self.fields.push((key.to_string(), value));
    }

    pub fn with(mut self, key: &str, value: impl Display) -> Self {
        self.push(key, value);
        self
    }

    pub fn kind(&self) -> &str {
        &self.kind
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.fields.iter().map(|(k, _)| k.as_str())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        let mut line = self.kind.clone();
        for (k, v) in &self.fields {
            line.push(' ');
            line.push_str(k);
            line.push('=');
            line.push_str(v);
        }
        line
    }
}

fn is_token(s: &str) -> bool {
    !s.is_empty() && !s.contains([' ', '\n', '='])
}

/// Render records with a `#schema` line before each kind's first occurrence.
pub fn render_report(records: &[Record]) -> String {
    let mut seen: Vec<&str> = Vec::new();
    let mut out = String::new();
    for rec in records {
        if !seen.contains(&rec.kind()) {
            seen.push(rec.kind());
            out.push_str("#schema ");
            out.push_str(rec.kind());
            for key in rec.keys() {
                out.push(' ');
                out.push_str(key);
            }
            out.push('\n');
        }
        out.push_str(&rec.render());
        out.push('\n');
    }
    out
}

/// Comma-separated rendering of a position set or similar sequence.
pub fn join_csv<T: Display>(items: impl IntoIterator<Item = T>) -> String {
    let mut out = String::new();
    for (i, item) in items.into_iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&item.to_string());
    }
    out
}

fn csv_cell(cell: &str) -> String {
    if cell.contains([',', '"', '\n']) {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}

/// CSV with a header row, RFC-style quoting only where needed.
pub fn render_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&header.iter().map(|c| csv_cell(c)).collect::<Vec<_>>().join(","));
    out.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        out.push_str(&row.iter().map(|c| csv_cell(c)).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

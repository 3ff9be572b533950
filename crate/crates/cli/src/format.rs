//! Output encodings: 17-significant-digit floats, key=value records, CSV.

use std::fmt::Write as _;
use std::str::FromStr;

/// Round-trip float formatting with 17 significant digits.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Record,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "record" => Ok(Format::Record),
            "csv" => Ok(Format::Csv),
            _ => Err(format!("unknown format `{s}` (expected record or csv)")),
        }
    }
}

impl std::fmt::Display for Format {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Format::Record => "record",
            Format::Csv => "csv",
        })
    }
}

/// An ordered list of fields, printed as `key=value key=value ...`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Record {
    fields: Vec<(String, String)>,
}

impl Record {
    pub fn new() -> Self {
        Record::default()
    }

    pub fn text(mut self, key: &str, value: impl ToString) -> Self {
        self.fields.push((key.to_string(), value.to_string()));
        self
    }

    pub fn num(self, key: &str, value: f64) -> Self {
        self.text(key, float(value))
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.fields.iter().map(|(k, _)| k.as_str())
    }

    pub fn to_line(&self) -> String {
        let parts: Vec<String> = self.fields.iter().map(|(k, v)| format!("{k}={v}")).collect();
        parts.join(" ")
    }

    fn csv_row(&self) -> String {
        let parts: Vec<String> = self.fields.iter().map(|(_, v)| csv_field(v)).collect();
        parts.join(",")
    }
}

fn csv_field(v: &str) -> String {
    if v.contains([',', '"', '\n']) {
        format!("\"{}\"", v.replace('"', "\"\""))
    } else {
        v.to_string()
    }
}

/// Renders records in the requested format; CSV takes its header from the first record.
pub fn render(records: &[Record], format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Record => {
            for r in records {
                let _ = writeln!(out, "{}", r.to_line());
            }
        }
        Format::Csv => {
            if let Some(first) = records.first() {
                let header: Vec<String> = first.keys().map(csv_field).collect();
                let _ = writeln!(out, "{}", header.join(","));
            }
            for r in records {
                let _ = writeln!(out, "{}", r.csv_row());
            }
        }
    }
    out
}

/// Two-column CSV table of `(x, y)` pairs.
pub fn table(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(float).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

//! Typed result tables with byte-stable CSV and JSON rendering.
//!
//! Every cell is typed so the two formats can render the same data
//! without guessing: floats always print with 17 significant digits,
//! which both formats parse back to the identical bit pattern.

use std::fmt::Write as _;

use serde::ser::{SerializeMap, SerializeSeq};
use serde::Serialize;
use weylkit_core::{Result, SpectralError};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Count(u64),
    Float(f64),
    Flag(bool),
}

impl Cell {
    fn kind(&self) -> &'static str {
        match self {
            Cell::Text(_) => "text",
            Cell::Count(_) => "count",
            Cell::Float(_) => "float",
            Cell::Flag(_) => "flag",
        }
    }

    fn to_csv_field(&self) -> String {
        match self {
            Cell::Text(s) => csv_escape(s),
            Cell::Count(n) => n.to_string(),
            Cell::Float(x) => format!("{x:.16e}"),
            Cell::Flag(b) => b.to_string(),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Cell::Text(s) => serializer.serialize_str(s),
            Cell::Count(n) => serializer.serialize_u64(*n),
            Cell::Float(x) => serializer.serialize_f64(*x),
            Cell::Flag(b) => serializer.serialize_bool(*b),
        }
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Provenance lines carried by every emitted table: tool version,
/// config hash, and whatever bounds the producing command computed.
#[derive(Debug, Clone, Default)]
pub struct Provenance {
    entries: Vec<(String, Cell)>,
}

impl Provenance {
    pub fn new(config_hash: &str) -> Self {
        let mut p = Self::default();
        p.push_text("tool", concat!("weylkit v", env!("CARGO_PKG_VERSION")));
        p.push_text("config_hash", config_hash);
        p
    }

    pub fn push_text(&mut self, key: &str, value: &str) {
        self.entries.push((key.to_string(), Cell::Text(value.to_string())));
    }

    pub fn push_float(&mut self, key: &str, value: f64) {
        self.entries.push((key.to_string(), Cell::Float(value)));
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    columns: Vec<String>,
    kinds: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            kinds: Vec::new(),
            rows: Vec::new(),
        }
    }

    /// Appends a row; the first row fixes the column types and later
    /// rows must match them exactly.
    pub fn push_row(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(SpectralError::InvalidInput(format!(
                "row has {} cells, table has {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        let kinds: Vec<&'static str> = row.iter().map(Cell::kind).collect();
        if self.rows.is_empty() {
            self.kinds = kinds;
        } else if kinds != self.kinds {
            return Err(SpectralError::InvalidInput(format!(
                "mixed row schema: expected {:?}, got {kinds:?}",
                self.kinds
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn render_csv(&self, provenance: &Provenance) -> String {
        let mut out = String::new();
        for (key, value) in &provenance.entries {
            let _ = writeln!(out, "# {key}={}", value.to_csv_field());
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(Cell::to_csv_field).collect();
            let _ = writeln!(out, "{}", fields.join(","));
        }
        out
    }

    pub fn render_json(&self, provenance: &Provenance) -> Result<String> {
        struct KeyedCells<'a>(&'a [(String, Cell)]);
        impl Serialize for KeyedCells<'_> {
            fn serialize<S: serde::Serializer>(
                &self,
                serializer: S,
            ) -> std::result::Result<S::Ok, S::Error> {
                let mut map = serializer.serialize_map(Some(self.0.len()))?;
                for (key, value) in self.0 {
                    map.serialize_entry(key, value)?;
                }
                map.end()
            }
        }
        struct RowView<'a>(&'a [String], &'a [Cell]);
        impl Serialize for RowView<'_> {
            fn serialize<S: serde::Serializer>(
                &self,
                serializer: S,
            ) -> std::result::Result<S::Ok, S::Error> {
                let mut map = serializer.serialize_map(Some(self.1.len()))?;
                for (key, value) in self.0.iter().zip(self.1) {
                    map.serialize_entry(key, value)?;
                }
                map.end()
            }
        }
        struct Rows<'a>(&'a Table);
        impl Serialize for Rows<'_> {
            fn serialize<S: serde::Serializer>(
                &self,
                serializer: S,
            ) -> std::result::Result<S::Ok, S::Error> {
                let mut seq = serializer.serialize_seq(Some(self.0.rows.len()))?;
                for row in &self.0.rows {
                    seq.serialize_element(&RowView(&self.0.columns, row))?;
                }
                seq.end()
            }
        }
        struct Doc<'a>(&'a Table, &'a Provenance);
        impl Serialize for Doc<'_> {
            fn serialize<S: serde::Serializer>(
                &self,
                serializer: S,
            ) -> std::result::Result<S::Ok, S::Error> {
                let mut map = serializer.serialize_map(Some(3))?;
                map.serialize_entry("provenance", &KeyedCells(&self.1.entries))?;
                map.serialize_entry("columns", &self.0.columns)?;
                map.serialize_entry("rows", &Rows(self.0))?;
                map.end()
            }
        }
        let mut body = weylkit_core::io::to_json_string_full(&Doc(self, provenance))?;
        body.push('\n');
        Ok(body)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_provenance() -> Provenance {
        Provenance::new("deadbeef0123")
    }

    #[test]
    fn csv_has_header_comment_column_row_and_data() {
        let mut t = Table::new(&["lambda", "count"]);
        t.push_row(vec![Cell::Float(2.0 * std::f64::consts::PI), Cell::Count(3)])
            .unwrap();
        let csv = t.render_csv(&sample_provenance());
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], concat!("# tool=weylkit v", env!("CARGO_PKG_VERSION")));
        assert_eq!(lines[1], "# config_hash=deadbeef0123");
        assert_eq!(lines[2], "lambda,count");
        assert_eq!(lines[3], "6.2831853071795862e0,3");
        assert_eq!(lines.len(), 4);
    }

    #[test]
    fn identical_input_renders_identical_bytes() {
        let build = || {
            let mut t = Table::new(&["x", "ok"]);
            t.push_row(vec![Cell::Float(0.1 + 0.2), Cell::Flag(true)]).unwrap();
            t
        };
        let p = sample_provenance();
        assert_eq!(build().render_csv(&p), build().render_csv(&p));
        assert_eq!(
            build().render_json(&p).unwrap(),
            build().render_json(&p).unwrap()
        );
    }

    #[test]
    fn mixed_schema_is_rejected() {
        let mut t = Table::new(&["a", "b"]);
        t.push_row(vec![Cell::Float(1.0), Cell::Count(1)]).unwrap();
        assert!(t.push_row(vec![Cell::Count(1), Cell::Count(1)]).is_err());
        assert!(t.push_row(vec![Cell::Float(1.0)]).is_err());
    }

    #[test]
    fn json_round_trips_floats_exactly() {
        let value = 0.1f64 + 0.2;
        let mut t = Table::new(&["x"]);
        t.push_row(vec![Cell::Float(value)]).unwrap();
        let json = t.render_json(&sample_provenance()).unwrap();
        let doc: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(doc["rows"][0]["x"].as_f64().unwrap(), value);
        assert_eq!(doc["provenance"]["config_hash"], "deadbeef0123");
    }

    #[test]
    fn text_cells_are_csv_escaped() {
        let mut t = Table::new(&["tag"]);
        t.push_row(vec![Cell::Text("box L=[1.0, 2.0]".into())]).unwrap();
        let csv = t.render_csv(&sample_provenance());
        assert!(csv.contains("\"box L=[1.0, 2.0]\""));
    }
}

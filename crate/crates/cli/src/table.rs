//! Result tables and their CSV / JSON encodings.
//!
//! CSV: `#`-prefixed metadata lines, one header row, then data rows. Floats
//! use `{:.16e}` (17 significant digits), so every value round-trips.
//! JSON: `{"metadata": {...}, "tables": [{"name", "columns", "rows"}]}` with
//! non-finite floats written as the strings `"inf"`, `"-inf"` and `"NaN"`.

use std::fmt;
use std::io::{BufRead, Write};

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};
use serde_json::{Map, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Cell::Int(i) => Some(i as f64),
            Cell::Float(x) => Some(x),
            Cell::Text(_) => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            _ => None,
        }
    }

    /// Bitwise equality for floats, so NaN cells compare equal to themselves.
    pub fn identical(&self, other: &Cell) -> bool {
        match (self, other) {
            (Cell::Float(a), Cell::Float(b)) => a.to_bits() == b.to_bits(),
            _ => self == other,
        }
    }

    fn to_csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format_float(*x),
            Cell::Text(s) => s.clone(),
        }
    }

    fn from_csv(s: &str) -> Cell {
        if let Ok(i) = s.parse::<i64>() {
            return Cell::Int(i);
        }
        if is_float_literal(s) {
            if let Ok(x) = s.parse::<f64>() {
                return Cell::Float(x);
            }
        }
        Cell::Text(s.to_string())
    }
}

fn is_float_literal(s: &str) -> bool {
    matches!(s, "inf" | "-inf" | "NaN")
        || (s.contains(['.', 'e']) && s.chars().all(|c| c.is_ascii_digit() || "+-.e".contains(c)))
}

fn format_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<u32> for Cell {
    fn from(i: u32) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<i64> for Cell {
    fn from(i: i64) -> Self {
        Cell::Int(i)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Int(b as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Int(i) => s.serialize_i64(*i),
            Cell::Float(x) if x.is_finite() => s.serialize_f64(*x),
            Cell::Float(x) => s.serialize_str(&format_float(*x)),
            Cell::Text(t) => s.serialize_str(t),
        }
    }
}

impl<'de> Deserialize<'de> for Cell {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct CellVisitor;
        impl Visitor<'_> for CellVisitor {
            type Value = Cell;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or a string")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Cell, E> {
                Ok(Cell::Int(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Cell, E> {
                i64::try_from(v).map(Cell::Int).map_err(E::custom)
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Cell, E> {
                Ok(Cell::Float(v))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Cell, E> {
                Ok(match v {
                    "inf" => Cell::Float(f64::INFINITY),
                    "-inf" => Cell::Float(f64::NEG_INFINITY),
                    "NaN" => Cell::Float(f64::NAN),
                    _ => Cell::Text(v.to_string()),
                })
            }
        }
        d.deserialize_any(CellVisitor)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width for table {}", self.name);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    pub fn floats(&self, name: &str) -> Option<Vec<f64>> {
        self.column(name)?.into_iter().map(Cell::as_f64).collect()
    }

    /// Same name, columns and bitwise-equal cells.
    pub fn identical(&self, other: &Table) -> bool {
        self.name == other.name
            && self.columns == other.columns
            && self.rows.len() == other.rows.len()
            && self
                .rows
                .iter()
                .zip(&other.rows)
                .all(|(a, b)| a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.identical(y)))
    }
}

/// Ordered `key: value` pairs written ahead of the data.
pub type Metadata = Vec<(String, String)>;

pub fn write_csv<W: Write>(mut w: W, meta: &Metadata, table: &Table) -> std::io::Result<()> {
    for (k, v) in meta {
        writeln!(w, "# {k}: {v}")?;
    }
    writeln!(w, "# table: {}", table.name)?;
    let mut out = csv::Writer::from_writer(w);
    out.write_record(&table.columns)?;
    for row in &table.rows {
        out.write_record(row.iter().map(Cell::to_csv))?;
    }
    out.flush()
}

/// Parses a CSV artifact back into its metadata and table.
pub fn read_csv<R: BufRead>(r: R) -> Result<(Metadata, Table), String> {
    let mut meta = Metadata::new();
    let mut name = String::new();
    let mut body = String::new();
    for line in r.lines() {
        let line = line.map_err(|e| e.to_string())?;
        match line.strip_prefix('#') {
            Some(c) if body.is_empty() => {
                let (k, v) = c.trim().split_once(": ").unwrap_or((c.trim(), ""));
                if k == "table" {
                    name = v.to_string();
                } else {
                    meta.push((k.to_string(), v.to_string()));
                }
            }
            _ => {
                body.push_str(&line);
                body.push('\n');
            }
        }
    }
    let mut rd = csv::Reader::from_reader(body.as_bytes());
    let columns: Vec<String> = rd.headers().map_err(|e| e.to_string())?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        rows.push(rec.iter().map(Cell::from_csv).collect());
    }
    Ok((meta, Table { name, columns, rows }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonArtifact {
    pub metadata: Map<String, Value>,
    pub tables: Vec<Table>,
}

pub fn write_json<W: Write>(w: W, meta: &Metadata, tables: &[Table]) -> std::io::Result<()> {
    let artifact = JsonArtifact {
        metadata: meta.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect(),
        tables: tables.to_vec(),
    };
    let mut w = w;
    serde_json::to_writer_pretty(&mut w, &artifact)?;
    writeln!(w)
}

pub fn read_json<R: std::io::Read>(r: R) -> Result<JsonArtifact, String> {
    serde_json::from_reader(r).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new("demo", &["x", "n", "label"]);
        t.push(vec![0.1.into(), 3usize.into(), "frozen".into()]);
        t.push(vec![f64::INFINITY.into(), 0usize.into(), "divergent".into()]);
        t.push(vec![(-1.0 / 3.0).into(), 7usize.into(), "a,b".into()]);
        t.push(vec![f64::NAN.into(), (-2i64).into(), "".into()]);
        t.push(vec![1e300.into(), 1usize.into(), "x".into()]);
        t
    }

    #[test]
    fn csv_round_trip() {
        let meta = vec![("version".to_string(), "0.1.0".to_string())];
        let mut buf = Vec::new();
        write_csv(&mut buf, &meta, &sample()).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# version: 0.1.0\n# table: demo\nx,n,label\n"));
        assert!(text.contains("1.0000000000000001e-1"));
        let (m, t) = read_csv(buf.as_slice()).unwrap();
        assert_eq!(m, meta);
        assert!(t.identical(&sample()), "{t:?}");
    }

    #[test]
    fn json_round_trip() {
        let meta = vec![("seed".to_string(), "7".to_string())];
        let mut buf = Vec::new();
        write_json(&mut buf, &meta, &[sample()]).unwrap();
        let a = read_json(buf.as_slice()).unwrap();
        assert_eq!(a.metadata["seed"], "7");
        assert!(a.tables[0].identical(&sample()));
    }

    #[test]
    fn float_text_has_seventeen_digits() {
        let s = format_float(std::f64::consts::PI);
        assert_eq!(s, "3.1415926535897931e0");
        assert_eq!(s.parse::<f64>().unwrap(), std::f64::consts::PI);
    }
}

//! Artifact rendering: CSV tables, JSON documents with a fixed float format,
//! atomic file writes. Identical inputs produce byte-identical artifacts.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::{Map, Value};

use crate::CliError;

/// One table cell. `Empty` renders as an empty CSV field / JSON null.
pub enum Cell {
    Int(i64),
    Float(f64),
    Str(&'static str),
    Bool(bool),
    Empty,
}

/// Column-ordered table shared by every tabular command.
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

/// 17 significant digits: parses back to the identical f64. Non-finite
/// values abort the run; they are never emitted.
pub fn fmt_float(v: f64) -> Result<String, CliError> {
    if !v.is_finite() {
        return Err(CliError::Run(format!("non-finite value {v} in output")));
    }
    Ok(format!("{v:.16e}"))
}

/// JSON number from a finite f64.
pub fn num(v: f64) -> Result<Value, CliError> {
    if !v.is_finite() {
        return Err(CliError::Run(format!("non-finite value {v} in output")));
    }
    Ok(Value::from(v))
}

impl Table {
    /// Header row plus one line per row, comma separated, LF endings.
    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            debug_assert_eq!(row.len(), self.columns.len());
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                match cell {
                    Cell::Int(n) => out.push_str(&n.to_string()),
                    Cell::Float(v) => out.push_str(&fmt_float(*v)?),
                    Cell::Str(s) => out.push_str(s),
                    Cell::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
                    Cell::Empty => {}
                }
            }
            out.push('\n');
        }
        Ok(out)
    }

    /// `{"columns": [...], "rows": [[...], ...]}` preserving column order.
    pub fn to_json(&self) -> Result<Value, CliError> {
        let columns: Vec<Value> = self.columns.iter().map(|c| Value::from(*c)).collect();
        let mut rows = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            let mut cells = Vec::with_capacity(row.len());
            for cell in row {
                cells.push(match cell {
                    Cell::Int(n) => Value::from(*n),
                    Cell::Float(v) => num(*v)?,
                    Cell::Str(s) => Value::from(*s),
                    Cell::Bool(b) => Value::from(*b),
                    Cell::Empty => Value::Null,
                });
            }
            rows.push(Value::from(cells));
        }
        let mut obj = Map::new();
        obj.insert("columns".into(), Value::from(columns));
        obj.insert("rows".into(), Value::from(rows));
        Ok(Value::Object(obj))
    }
}

/// Serializer that prints every f64 with 17 significant digits so JSON
/// artifacts round-trip exactly.
struct SciFormatter;

impl Formatter for SciFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// Single top-level object with `meta` and `data` sections, trailing LF.
/// Object keys serialize in sorted order, so output is deterministic.
pub fn json_document(meta: Value, data: Value) -> Result<Vec<u8>, CliError> {
    let mut doc = Map::new();
    doc.insert("meta".into(), meta);
    doc.insert("data".into(), data);
    let mut bytes = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut bytes, SciFormatter);
    Value::Object(doc)
        .serialize(&mut ser)
        .map_err(|e| CliError::Run(format!("serializing JSON: {e}")))?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Stdout, or an atomic write (temp file in the target directory, then
/// rename) so readers never observe a partial artifact.
pub fn write_artifact(output: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match output {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|()| out.flush())
                .map_err(|e| CliError::Run(format!("writing stdout: {e}")))
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)
                .map_err(|e| CliError::Run(format!("creating temp file in {}: {e}", dir.display())))?;
            tmp.write_all(bytes)
                .map_err(|e| CliError::Run(format!("writing {}: {e}", path.display())))?;
            tmp.persist(path)
                .map(|_| ())
                .map_err(|e| CliError::Run(format!("writing {}: {}", path.display(), e.error)))
        }
    }
}

//! CSV and JSON emission.
//!
//! CSV files start with one `#` comment line naming the schema and its version, followed by
//! an RFC 4180 header row. Floats are written as `{:.16e}` (17 significant digits) so
//! identical runs produce identical bytes.

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::config::ExperimentConfig;
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Float cell.
pub fn fmt_f64(x: f64) -> String {
    // adding +0.0 maps −0.0 to 0.0
    format!("{:.16e}", x + 0.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub schema: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(schema: &str, columns: Vec<String>) -> Self {
        Self { schema: schema.to_string(), columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Values of a numeric column.
    pub fn floats(&self, name: &str) -> Result<Vec<f64>> {
        let k = self.column(name).ok_or_else(|| Error::Config(format!("no column {name}")))?;
        self.rows
            .iter()
            .map(|r| r[k].parse::<f64>().map_err(|e| Error::Config(format!("column {name}: {e}"))))
            .collect()
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut out = format!("# qfimlab {} v{}\n", self.schema, SCHEMA_VERSION).into_bytes();
        {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(&mut out);
            w.write_record(&self.columns).map_err(csv_err)?;
            for row in &self.rows {
                w.write_record(row).map_err(csv_err)?;
            }
            w.flush()?;
        }
        String::from_utf8(out).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn to_json(&self) -> Value {
        json!({ "schema": self.schema, "columns": self.columns, "rows": self.rows })
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// `sha256:` digest of `blob {len}\0{canonical config json}`.
pub fn content_hash(cfg: &ExperimentConfig) -> String {
    let body = serde_json::to_string(cfg).expect("config serializes");
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", body.len()).as_bytes());
    h.update(body.as_bytes());
    let digest = h.finalize();
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

/// JSON document with a config echo and input hash around `results`.
pub fn json_envelope<T: Serialize>(cfg: &ExperimentConfig, results: &T) -> Result<Value> {
    Ok(json!({
        "schema_version": SCHEMA_VERSION,
        "experiment": cfg.experiment.name(),
        "input_hash": content_hash(cfg),
        "config": serde_json::to_value(cfg).map_err(|e| Error::Io(e.to_string()))?,
        "results": serde_json::to_value(results).map_err(|e| Error::Io(e.to_string()))?,
    }))
}

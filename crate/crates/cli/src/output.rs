//! CSV and JSON emission. A CSV document starts with one `# run_config:`
//! comment line holding the configuration as JSON, then a fixed header row;
//! a JSON document is a single object whose `run_config` field holds it.

use std::io::Write;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::{RunConfig, CSV_HEADER_PREFIX};
use crate::error::{CliError, Result};

/// Header of every estimate table.
pub const ESTIMATE_HEADER: [&str; 9] =
    ["event", "n_or_dims", "p", "trials", "p_hat", "ci_lo", "ci_hi", "seed", "runtime_ms"];

pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Table {
        Table { header: header.iter().map(|h| h.as_ref().to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn render(&self, cfg: &RunConfig) -> Result<String> {
        let mut out = format!("{CSV_HEADER_PREFIX}{}\n", serde_json::to_string(cfg)?);
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        out.push_str(&String::from_utf8(bytes).expect("csv of utf-8 fields"));
        Ok(out)
    }
}

/// One run's result in both shapes; which one is written depends on the
/// configured format.
pub struct Output {
    pub table: Table,
    pub json: Map<String, Value>,
}

impl Output {
    pub fn new(table: Table) -> Output {
        Output { table, json: Map::new() }
    }

    pub fn with<T: Serialize>(mut self, key: &str, value: &T) -> Result<Output> {
        self.json.insert(key.to_string(), serde_json::to_value(value)?);
        Ok(self)
    }

    pub fn render(&self, cfg: &RunConfig) -> Result<String> {
        match cfg.format {
            crate::args::Format::Csv => self.table.render(cfg),
            crate::args::Format::Json => {
                let mut doc = Map::new();
                doc.insert("run_config".to_string(), serde_json::to_value(cfg)?);
                doc.extend(self.json.clone());
                let mut s = serde_json::to_string_pretty(&json!(doc))?;
                s.push('\n');
                Ok(s)
            }
        }
    }

    pub fn write(&self, cfg: &RunConfig) -> Result<()> {
        let text = self.render(cfg)?;
        match &cfg.out {
            Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).map_err(|e| CliError::Io(e.to_string()))
            }
        }
    }
}

/// Shortest decimal that round-trips, so tables are exact and stable.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

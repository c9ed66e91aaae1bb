//! Rendering of results with their reproducibility metadata.

use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Value};
use zzb_core::{QuadratureSpec, RNG_NAME};

use crate::Common;

#[derive(Serialize)]
pub struct Meta {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    rng: &'static str,
    seed: u64,
    valley_fill: bool,
    config: Common,
    quadrature: QuadratureSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp: Option<u64>,
}

impl Meta {
    pub fn new(
        command: &'static str,
        c: &Common,
        q: &QuadratureSpec,
        vf: bool,
        deterministic: bool,
    ) -> Self {
        let timestamp = (!deterministic).then(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs())
        });
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            rng: RNG_NAME,
            seed: c.seed,
            valley_fill: vf,
            config: c.clone(),
            quadrature: q.clone(),
            timestamp,
        }
    }
}

pub fn json_document(meta: &Meta, result: Value) -> String {
    let doc = json!({ "meta": meta, "result": result });
    let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
    s.push('\n');
    s
}

/// A numeric table, optionally with a leading text column.
pub struct Table {
    columns: Vec<String>,
    labels: Vec<Option<String>>,
    rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            labels: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        self.labels.push(None);
        self.rows.push(row);
    }

    pub fn push_labeled(&mut self, label: &str, row: Vec<f64>) {
        self.labels.push(Some(label.to_string()));
        self.rows.push(row);
    }

    pub fn as_json(&self) -> Value {
        let rows = self
            .rows
            .iter()
            .zip(&self.labels)
            .map(|(r, l)| {
                let mut obj = serde_json::Map::new();
                let mut cols = self.columns.iter();
                if let Some(l) = l {
                    obj.insert(cols.next().unwrap().clone(), json!(l));
                }
                for (c, v) in cols.zip(r) {
                    obj.insert(c.clone(), json!(v));
                }
                Value::Object(obj)
            })
            .collect();
        Value::Array(rows)
    }

    /// CSV text; metadata, if given, goes first as `#` comment lines.
    pub fn to_csv(&self, meta: Option<&Meta>) -> String {
        let mut s = String::new();
        if let Some(m) = meta {
            let text = serde_json::to_string_pretty(m).expect("serializable");
            for line in text.lines() {
                s.push_str("# ");
                s.push_str(line);
                s.push('\n');
            }
        }
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for (r, l) in self.rows.iter().zip(&self.labels) {
            let mut cells: Vec<String> = Vec::with_capacity(r.len() + 1);
            if let Some(l) = l {
                cells.push(l.clone());
            }
            cells.extend(r.iter().map(|v| format!("{v:e}")));
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

pub fn emit(text: &str, out: Option<&Path>) -> Result<(), String> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| e.to_string()),
    }
}

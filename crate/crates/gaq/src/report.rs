//! Deterministic check reports: the JSON surface of the engine.
//!
//! A report is reproducible given (spec, pins, seed); wall-clock timings
//! are carried in a dedicated field that consumers strip before byte
//! comparison. Exact values print in canonical expression syntax, floats
//! appear only in numeric-oracle records.

use serde::Serialize;
use std::collections::BTreeMap;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Indeterminate,
}

/// One named check with optional witness data and structured details.
#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, serde_json::Value>,
    pub elapsed_ms: u64,
}

impl CheckRecord {
    pub fn new(name: &str, ok: bool) -> CheckRecord {
        CheckRecord {
            name: name.to_string(),
            status: if ok { Status::Pass } else { Status::Fail },
            witness: None,
            details: BTreeMap::new(),
            elapsed_ms: 0,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn with_witness(mut self, witness: Option<String>) -> CheckRecord {
        self.witness = witness;
        self
    }

    pub fn detail(mut self, key: &str, value: impl Into<serde_json::Value>) -> CheckRecord {
        self.details.insert(key.to_string(), value.into());
        self
    }

    pub fn timed(mut self, start: std::time::Instant) -> CheckRecord {
        self.elapsed_ms = start.elapsed().as_millis() as u64;
        self
    }
}

/// Full command report.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: String,
    pub engine_version: String,
    pub command: String,
    pub spec: String,
    pub pins: BTreeMap<String, String>,
    pub seed: u64,
    pub checks: Vec<CheckRecord>,
}

impl Report {
    pub fn new(command: &str, spec: &str, pins: &BTreeMap<String, String>, seed: u64) -> Report {
        Report {
            schema_version: SCHEMA_VERSION.to_string(),
            engine_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            spec: spec.to_string(),
            pins: pins.clone(),
            seed,
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, check: CheckRecord) {
        self.checks.push(check);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Human rendering: one line per check.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Indeterminate => "????",
            };
            out.push_str(&format!("[{tag}] {}\n", c.name));
            for (k, v) in &c.details {
                out.push_str(&format!("       {k}: {v}\n"));
            }
            if let Some(w) = &c.witness {
                out.push_str(&format!("       witness: {w}\n"));
            }
        }
        out
    }
}

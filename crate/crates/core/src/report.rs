//! Check records and verification reports.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
    NotApplicable,
}

impl Status {
    pub fn tag(&self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
            Status::NotApplicable => "N/A",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    /// Relation tag such as `rel4`.
    pub tag: String,
    pub status: Status,
    pub residual: Option<f64>,
    pub witness: Option<String>,
}

impl CheckRecord {
    pub fn pass(id: impl Into<String>, tag: impl Into<String>) -> Self {
        CheckRecord { id: id.into(), tag: tag.into(), status: Status::Pass, residual: None, witness: None }
    }

    pub fn fail(id: impl Into<String>, tag: impl Into<String>, witness: impl Into<String>) -> Self {
        CheckRecord {
            id: id.into(),
            tag: tag.into(),
            status: Status::Fail,
            residual: None,
            witness: Some(witness.into()),
        }
    }

    /// Pass iff `ok`; a failing record carries the witness.
    pub fn from_bool(id: impl Into<String>, tag: impl Into<String>, ok: bool, witness: impl Into<String>) -> Self {
        if ok {
            Self::pass(id, tag)
        } else {
            Self::fail(id, tag, witness)
        }
    }

    /// Pass iff `residual < tol`.
    pub fn numeric(
        id: impl Into<String>,
        tag: impl Into<String>,
        residual: f64,
        tol: f64,
        witness: Option<String>,
    ) -> Self {
        let ok = residual < tol;
        CheckRecord {
            id: id.into(),
            tag: tag.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            residual: Some(residual),
            witness: if ok { None } else { witness },
        }
    }

    pub fn with_status(id: impl Into<String>, tag: impl Into<String>, status: Status, note: &str) -> Self {
        CheckRecord { id: id.into(), tag: tag.into(), status, residual: None, witness: Some(note.to_string()) }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub tool_version: String,
    pub config: serde_json::Value,
    pub records: Vec<CheckRecord>,
    pub summary: Summary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

impl VerificationReport {
    pub fn new(config: serde_json::Value, records: Vec<CheckRecord>) -> Self {
        let mut summary = Summary { total: records.len(), ..Summary::default() };
        for r in &records {
            match r.status {
                Status::Pass => summary.passed += 1,
                Status::Fail => summary.failed += 1,
                Status::Skipped | Status::NotApplicable => summary.skipped += 1,
            }
        }
        VerificationReport { tool_version: env!("CARGO_PKG_VERSION").to_string(), config, records, summary }
    }

    pub fn has_failures(&self) -> bool {
        self.summary.failed > 0
    }

    pub fn emit(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self)?;
                s.push('\n');
                Ok(s)
            }
            Format::Text => Ok(self.to_text()),
        }
    }

    pub fn parse_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            let _ = write!(out, "{:<4}  {}  [{}]", r.status.tag(), r.id, r.tag);
            if let Some(x) = r.residual {
                let _ = write!(out, "  residual={x:.3e}");
            }
            if let Some(w) = &r.witness {
                let _ = write!(out, "  ({w})");
            }
            out.push('\n');
        }
        let s = &self.summary;
        let _ = writeln!(out, "{} checks: {} passed, {} failed, {} skipped", s.total, s.passed, s.failed, s.skipped);
        out
    }
}

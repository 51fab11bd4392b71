//! Check outcomes and the machine-readable verification report.

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    ErratumSuspected,
}

/// Outcome of one elementary check inside a suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub check: String,
    pub subject: String,
    pub status: Status,
    /// Rendered nonzero residual, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// Informational findings are reported but never affect the exit code.
    #[serde(default)]
    pub informational: bool,
}

impl Finding {
    pub fn pass(check: &str, subject: impl Into<String>) -> Self {
        Finding {
            check: check.to_string(),
            subject: subject.into(),
            status: Status::Pass,
            residual: None,
            note: None,
            informational: false,
        }
    }

    pub fn fail(check: &str, subject: impl Into<String>, residual: impl Into<String>) -> Self {
        Finding {
            status: Status::Fail,
            residual: Some(residual.into()),
            ..Finding::pass(check, subject)
        }
    }

    /// A printed identity that fails exactly; never produced outside the
    /// discrepancy protocol.
    pub fn erratum(check: &str, subject: impl Into<String>, residual: impl Into<String>) -> Self {
        Finding {
            status: Status::ErratumSuspected,
            ..Finding::fail(check, subject, residual)
        }
    }

    /// Pass when `residual` is `None`, otherwise fail carrying it.
    pub fn from_residual(check: &str, subject: impl Into<String>, residual: Option<String>) -> Self {
        match residual {
            None => Finding::pass(check, subject),
            Some(r) => Finding::fail(check, subject, r),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn informational(mut self) -> Self {
        self.informational = true;
        self
    }

    pub fn is_failure(&self, allow_errata: bool) -> bool {
        if self.informational {
            return false;
        }
        match self.status {
            Status::Pass => false,
            Status::Fail => true,
            Status::ErratumSuspected => !allow_errata,
        }
    }
}

/// One record of the report: a finding tagged with its suite and the
/// catalog entries involved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub suite: String,
    pub catalog_ids: Vec<String>,
    #[serde(flatten)]
    pub finding: Finding,
    pub millis: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub pass: usize,
    pub fail: usize,
    pub erratum_suspected: usize,
    pub informational: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub engine_version: String,
    pub config: serde_json::Value,
    pub records: Vec<Record>,
    pub summary: Summary,
}

impl Report {
    pub fn new(config: serde_json::Value, mut records: Vec<Record>) -> Self {
        records.sort_by(|a, b| {
            (&a.suite, &a.catalog_ids, &a.finding.check, &a.finding.subject).cmp(&(
                &b.suite,
                &b.catalog_ids,
                &b.finding.check,
                &b.finding.subject,
            ))
        });
        let mut summary = Summary {
            total: records.len(),
            ..Summary::default()
        };
        for r in &records {
            if r.finding.informational {
                summary.informational += 1;
            }
            match r.finding.status {
                Status::Pass => summary.pass += 1,
                Status::Fail => summary.fail += 1,
                Status::ErratumSuspected => summary.erratum_suspected += 1,
            }
        }
        Report {
            schema_version: SCHEMA_VERSION,
            engine_version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            records,
            summary,
        }
    }

    pub fn failures(&self, allow_errata: bool) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(move |r| r.finding.is_failure(allow_errata))
    }

    pub fn passed(&self, allow_errata: bool) -> bool {
        self.failures(allow_errata).next().is_none()
    }

    /// JSON with timing fields zeroed, for reproducibility comparisons.
    pub fn to_json_without_timing(&self) -> String {
        let mut copy = self.clone();
        for r in &mut copy.records {
            r.millis = 0;
        }
        serde_json::to_string_pretty(&copy).expect("report serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

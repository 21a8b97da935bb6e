//! Machine-readable verification reports.
//!
//! Reports serialize to JSON deterministically: field order is fixed, case
//! and failure ordering follow insertion order, and timing is excluded from
//! both serialization and equality so identical runs produce byte-identical
//! bytes regardless of wall-clock jitter. Timing still reaches the text
//! rendering for humans.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One failed check, with enough context to replay it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    /// The check that failed, including its inputs.
    pub case: String,
    pub expected: String,
    pub actual: String,
    /// Label of the witness object (column, basis label, point, ...).
    pub witness: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// Outcome of one suite.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    suite: String,
    cases: u64,
    failures: Vec<Failure>,
    status: Status,
    #[serde(skip)]
    elapsed_ms: u128,
}

impl PartialEq for Report {
    /// Timing is diagnostic, not part of report identity.
    fn eq(&self, other: &Report) -> bool {
        self.suite == other.suite
            && self.cases == other.cases
            && self.failures == other.failures
            && self.status == other.status
    }
}

impl Eq for Report {}

impl Report {
    pub fn new(suite: impl Into<String>) -> Report {
        Report {
            suite: suite.into(),
            cases: 0,
            failures: Vec::new(),
            status: Status::Pass,
            elapsed_ms: 0,
        }
    }

    /// Count `n` checks that passed without recording anything per-check.
    pub fn tally(&mut self, n: u64) {
        self.cases += n;
    }

    /// Record one failed check. The case itself must be counted separately
    /// (bulk runners tally whole sweeps and only record the mismatches).
    pub fn fail(
        &mut self,
        case: impl Into<String>,
        expected: impl Into<String>,
        actual: impl Into<String>,
        witness: impl Into<String>,
    ) {
        self.failures.push(Failure {
            case: case.into(),
            expected: expected.into(),
            actual: actual.into(),
            witness: witness.into(),
        });
        self.status = Status::Fail;
    }

    /// Count one check, recording a failure when `ok` is false.
    pub fn check(
        &mut self,
        ok: bool,
        case: impl Into<String>,
        expected: impl Into<String>,
        actual: impl Into<String>,
        witness: impl Into<String>,
    ) {
        self.tally(1);
        if !ok {
            self.fail(case, expected, actual, witness);
        }
    }

    pub fn suite(&self) -> &str {
        &self.suite
    }

    pub fn cases(&self) -> u64 {
        self.cases
    }

    pub fn failures(&self) -> &[Failure] {
        &self.failures
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn set_elapsed_ms(&mut self, ms: u128) {
        self.elapsed_ms = ms;
    }

    pub fn elapsed_ms(&self) -> u128 {
        self.elapsed_ms
    }

    /// Deterministic pretty JSON with a trailing newline.
    pub fn emit_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("reports are serializable");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Report> {
        let report: Report = serde_json::from_str(text)
            .map_err(|e| Error::schema(format!("malformed report: {e}")))?;
        let consistent = report.passed() == report.failures.is_empty();
        if !consistent {
            return Err(Error::schema(
                "field \"status\": disagrees with the failure list".to_string(),
            ));
        }
        Ok(report)
    }

    /// One human-readable block; lists up to `max_failures` failures.
    pub fn emit_text(&self, max_failures: usize) -> String {
        let mut out = format!(
            "suite {:<9} {}  ({} cases, {} ms)\n",
            self.suite,
            match self.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
            },
            self.cases,
            self.elapsed_ms
        );
        for failure in self.failures.iter().take(max_failures) {
            out.push_str(&format!(
                "  {}: expected {}, got {} [witness {}]\n",
                failure.case, failure.expected, failure.actual, failure.witness
            ));
        }
        if self.failures.len() > max_failures {
            out.push_str(&format!(
                "  ... and {} more failures\n",
                self.failures.len() - max_failures
            ));
        }
        out
    }
}

/// Pass/fail table over several suites, in run order.
pub fn text_table(reports: &[Report]) -> String {
    let mut out = String::new();
    for report in reports {
        out.push_str(&report.emit_text(5));
    }
    let all_pass = reports.iter().all(Report::passed);
    out.push_str(if all_pass {
        "overall: pass\n"
    } else {
        "overall: FAIL\n"
    });
    out
}

/// Combined JSON document for several suites, deterministic like
/// [`Report::emit_json`].
pub fn emit_json_array(reports: &[Report]) -> String {
    let values: Vec<serde_json::Value> = reports
        .iter()
        .map(|r| serde_json::to_value(r).expect("reports are serializable"))
        .collect();
    let mut text =
        serde_json::to_string_pretty(&values).expect("reports are serializable");
    text.push('\n');
    text
}

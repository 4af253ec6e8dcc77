//! Check records and the serialisable report emitted by the command-line tool.

use std::fmt::Write as _;

use serde::Serialize;

/// One named check with its verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub passed: bool,
    /// Present iff the check failed.
    pub witness: Option<String>,
    /// Extra key/value facts, in a stable order.
    pub details: Vec<(String, String)>,
    /// Wall-clock time in milliseconds; not part of the reproducible payload.
    pub timing_ms: Option<u64>,
}

impl CheckRecord {
    pub fn pass(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed: true,
            witness: None,
            details: Vec::new(),
            timing_ms: None,
        }
    }

    pub fn fail(name: impl Into<String>, witness: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed: false,
            witness: Some(witness.into()),
            details: Vec::new(),
            timing_ms: None,
        }
    }

    /// Pass when `witness` is `None`, fail with it otherwise.
    pub fn from_witness(name: impl Into<String>, witness: Option<String>) -> Self {
        match witness {
            None => Self::pass(name),
            Some(w) => Self::fail(name, w),
        }
    }

    pub fn with(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.details.push((key.into(), value.to_string()));
        self
    }

    pub fn detail(&self, key: &str) -> Option<&str> {
        self.details
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub checks: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub command: String,
    pub seed: Option<u64>,
    /// Header facts such as the property a suite exercises.
    pub header: Vec<(String, String)>,
    pub records: Vec<CheckRecord>,
    pub summary: Summary,
}

impl Report {
    pub fn new(command: impl Into<String>, seed: Option<u64>) -> Self {
        Self {
            command: command.into(),
            seed,
            header: Vec::new(),
            records: Vec::new(),
            summary: Summary::default(),
        }
    }

    pub fn header(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.header.push((key.into(), value.to_string()));
        self
    }

    pub fn push(&mut self, record: CheckRecord) -> &mut Self {
        self.summary.checks += 1;
        if record.passed {
            self.summary.passed += 1;
        } else {
            self.summary.failed += 1;
        }
        self.records.push(record);
        self
    }

    pub fn extend(&mut self, records: impl IntoIterator<Item = CheckRecord>) -> &mut Self {
        for r in records {
            self.push(r);
        }
        self
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    /// Key/value text, one record per block, fields in a fixed order.
    pub fn to_text(&self, with_timing: bool) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command);
        match self.seed {
            Some(s) => {
                let _ = writeln!(out, "seed: {s}");
            }
            None => {
                let _ = writeln!(out, "seed: none");
            }
        }
        for (k, v) in &self.header {
            let _ = writeln!(out, "{k}: {v}");
        }
        for r in &self.records {
            let _ = writeln!(out);
            let _ = writeln!(out, "check: {}", r.name);
            let _ = writeln!(out, "verdict: {}", if r.passed { "pass" } else { "fail" });
            if let Some(w) = &r.witness {
                let _ = writeln!(out, "witness: {w}");
            }
            for (k, v) in &r.details {
                let _ = writeln!(out, "{k}: {v}");
            }
            if with_timing {
                if let Some(t) = r.timing_ms {
                    let _ = writeln!(out, "timing_ms: {t}");
                }
            }
        }
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "summary: {} checks, {} passed, {} failed",
            self.summary.checks, self.summary.passed, self.summary.failed
        );
        out
    }

    pub fn to_json(&self, with_timing: bool) -> String {
        let mut value = serde_json::to_value(self).expect("report serialises");
        if !with_timing {
            if let Some(records) = value.get_mut("records").and_then(|r| r.as_array_mut()) {
                for r in records {
                    if let Some(obj) = r.as_object_mut() {
                        obj.remove("timing_ms");
                    }
                }
            }
        }
        serde_json::to_string_pretty(&value).expect("report serialises")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_counts_and_text_layout() {
        let mut r = Report::new("axioms --in t.tree", Some(1));
        r.push(CheckRecord::pass("B1").with("tuples", 27));
        r.push(CheckRecord::fail("B2", "(a, b, c)"));
        assert_eq!(r.summary, Summary { checks: 2, passed: 1, failed: 1 });
        assert!(!r.all_passed());
        let text = r.to_text(false);
        assert!(text.starts_with("command: axioms --in t.tree\nseed: 1\n"));
        assert!(text.contains("check: B2\nverdict: fail\nwitness: (a, b, c)\n"));
        let json: serde_json::Value = serde_json::from_str(&r.to_json(false)).unwrap();
        assert_eq!(json["summary"]["failed"], 1);
        assert!(json["records"][0].get("timing_ms").is_none());
    }
}

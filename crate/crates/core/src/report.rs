//! Check records and the text/JSON/CSV report renderings.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::{self, Display, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// One verification outcome. `pass` and `skipped` are never both true.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check: String,
    pub params: BTreeMap<String, String>,
    pub expected: String,
    pub observed: String,
    pub pass: bool,
    pub skipped: bool,
    pub skip_reason: Option<String>,
}

fn param_map(params: &[(&str, String)]) -> BTreeMap<String, String> {
    params
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

impl CheckRecord {
    /// Passes iff the two renderings are identical.
    pub fn compare(
        check: &str,
        params: &[(&str, String)],
        expected: impl Display,
        observed: impl Display,
    ) -> Self {
        let (expected, observed) = (expected.to_string(), observed.to_string());
        let pass = expected == observed;
        Self::outcome(check, params, expected, observed, pass)
    }

    pub fn outcome(
        check: &str,
        params: &[(&str, String)],
        expected: impl Display,
        observed: impl Display,
        pass: bool,
    ) -> Self {
        CheckRecord {
            check: check.to_string(),
            params: param_map(params),
            expected: expected.to_string(),
            observed: observed.to_string(),
            pass,
            skipped: false,
            skip_reason: None,
        }
    }

    pub fn skipped(check: &str, params: &[(&str, String)], reason: impl Display) -> Self {
        CheckRecord {
            check: check.to_string(),
            params: param_map(params),
            expected: String::new(),
            observed: String::new(),
            pass: false,
            skipped: true,
            skip_reason: Some(reason.to_string()),
        }
    }

    pub fn failed(&self) -> bool {
        !self.pass && !self.skipped
    }

    pub fn param(&self, key: &str) -> Option<&str> {
        self.params.get(key).map(String::as_str)
    }

    /// `key=value` pairs joined with `;`, keys ascending.
    pub fn params_joined(&self) -> String {
        let mut out = String::new();
        for (i, (k, v)) in self.params.iter().enumerate() {
            if i > 0 {
                out.push(';');
            }
            let _ = write!(out, "{k}={v}");
        }
        out
    }
}

/// Integer-valued parameters compare numerically, everything else
/// lexicographically.
fn cmp_values(a: &str, b: &str) -> Ordering {
    match (i128::from_str(a), i128::from_str(b)) {
        (Ok(x), Ok(y)) => x.cmp(&y),
        _ => a.cmp(b),
    }
}

fn cmp_records(a: &CheckRecord, b: &CheckRecord) -> Ordering {
    a.check.cmp(&b.check).then_with(|| {
        let mut ia = a.params.iter();
        let mut ib = b.params.iter();
        loop {
            match (ia.next(), ib.next()) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some((ka, va)), Some((kb, vb))) => {
                    let o = ka.cmp(kb).then_with(|| cmp_values(va, vb));
                    if o != Ordering::Equal {
                        return o;
                    }
                }
            }
        }
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub summary: Summary,
    pub records: Vec<CheckRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format `{other}`")),
        }
    }
}

impl Report {
    /// Sorts records by check name, then parameters.
    pub fn new(mut records: Vec<CheckRecord>) -> Self {
        records.sort_by(cmp_records);
        let mut summary = Summary {
            total: records.len(),
            ..Summary::default()
        };
        for r in &records {
            if r.skipped {
                summary.skipped += 1;
            } else if r.pass {
                summary.passed += 1;
            } else {
                summary.failed += 1;
            }
        }
        Report { summary, records }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| r.failed())
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.to_string(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Csv => self.to_csv(),
        }
    }

    fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["check", "params", "expected", "observed", "pass", "skipped"])
            .expect("in-memory write");
        for r in &self.records {
            w.write_record([
                r.check.as_str(),
                &r.params_joined(),
                &r.expected,
                &r.observed,
                if r.pass { "true" } else { "false" },
                if r.skipped { "true" } else { "false" },
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

impl Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.records {
            let status = if r.skipped {
                "SKIP"
            } else if r.pass {
                "PASS"
            } else {
                "FAIL"
            };
            write!(f, "{status} {} [{}]", r.check, r.params_joined())?;
            match &r.skip_reason {
                Some(reason) => writeln!(f, " reason={reason}")?,
                None => writeln!(f, " expected={} observed={}", r.expected, r.observed)?,
            }
        }
        let s = &self.summary;
        writeln!(
            f,
            "summary: total={} passed={} failed={} skipped={}",
            s.total, s.passed, s.failed, s.skipped
        )
    }
}

//! Check reports and their JSON and text renderings.

use aksz::qstructures::Status;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Version of the JSON report schema.
pub const REPORT_VERSION: &str = "1";

const CONVENTIONS: &str = include_str!("../../../docs/CONVENTIONS.md");

/// SHA-256 of the conventions document this build was made against.
pub fn conventions_hash() -> String {
    Sha256::digest(CONVENTIONS.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Detail {
    pub name: String,
    pub status: Status,
    pub residual: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub status: Status,
    /// Canonical rendering of the first failing residual, `0` when all vanish.
    pub residual: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub details: Vec<Detail>,
    pub ms: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub warnings: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub version: String,
    pub conventions: String,
    pub model: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    pub checks: Vec<CheckResult>,
    pub summary: Summary,
}

impl CheckReport {
    pub fn new(model: &str, warnings: Vec<String>, checks: Vec<CheckResult>) -> Self {
        let count = |s: Status| checks.iter().filter(|c| c.status == s).count();
        let summary = Summary {
            total: checks.len(),
            passed: count(Status::Pass),
            failed: count(Status::Fail),
            warnings: count(Status::Warning),
        };
        CheckReport {
            version: REPORT_VERSION.into(),
            conventions: conventions_hash(),
            model: model.into(),
            warnings,
            checks,
            summary,
        }
    }

    pub fn passed(&self) -> bool {
        self.summary.failed == 0
    }

    /// The report with timings zeroed: identical across runs for a fixed input.
    pub fn comparable(&self) -> CheckReport {
        let mut r = self.clone();
        for c in &mut r.checks {
            c.ms = 0;
        }
        r
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<CheckReport, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("model {}  (report v{}, conventions {})\n", self.model, self.version, &self.conventions[..12]);
        for w in &self.warnings {
            out += &format!("  warning: {w}\n");
        }
        for c in &self.checks {
            out += &format!("{:<7} {}  [{} ms]\n", c.status.to_string().to_uppercase(), c.name, c.ms);
            if let Some(v) = &c.value {
                out += &format!("        value = {v}\n");
            }
            if c.status != Status::Pass {
                out += &format!("        residual = {}\n", c.residual);
                for d in c.details.iter().filter(|d| d.status != Status::Pass) {
                    out += &format!("        {} {}: {}\n", d.status, d.name, d.residual);
                }
            }
        }
        let s = &self.summary;
        out += &format!("{} checks: {} passed, {} failed, {} warnings\n", s.total, s.passed, s.failed, s.warnings);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(name: &str, status: Status) -> CheckResult {
        CheckResult {
            name: name.into(),
            status,
            residual: "0".into(),
            value: None,
            details: vec![],
            ms: 7,
        }
    }

    #[test]
    fn summary_counts() {
        let r = CheckReport::new(
            "m",
            vec![],
            vec![check("a", Status::Pass), check("b", Status::Fail), check("c", Status::Warning)],
        );
        assert_eq!(
            r.summary,
            Summary {
                total: 3,
                passed: 1,
                failed: 1,
                warnings: 1
            }
        );
        assert!(!r.passed());
    }

    #[test]
    fn empty_report_passes() {
        let r = CheckReport::new("m", vec![], vec![]);
        assert!(r.passed());
        assert_eq!(r.summary.failed, 0);
    }

    #[test]
    fn json_round_trip() {
        let r = CheckReport::new("m", vec!["w".into()], vec![check("a", Status::Pass)]).comparable();
        assert_eq!(CheckReport::from_json(&r.to_json()).unwrap(), r);
        assert!(r.to_json().contains("\"ms\": 0"));
    }

    #[test]
    fn hash_is_hex() {
        let h = conventions_hash();
        assert_eq!(h.len(), 64);
        assert!(h.chars().all(|c| c.is_ascii_hexdigit()));
    }
}

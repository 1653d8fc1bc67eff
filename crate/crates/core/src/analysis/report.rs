use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// The test could not run (input too short, degenerate, ...).
    Skipped,
    /// Descriptive statistic without an acceptance rule.
    Info,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Skipped => "SKIP",
            Verdict::Info => "INFO",
        })
    }
}

/// One line of a [`TestReport`].
///
/// For hypothesis tests `p_value` is set and `threshold` is the significance
/// level (pass iff `p ≥ threshold`); for bound checks only `threshold` is set
/// (pass iff `|statistic| < threshold`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestEntry {
    pub name: String,
    pub statistic: Option<f64>,
    pub p_value: Option<f64>,
    pub threshold: Option<f64>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl TestEntry {
    pub fn p_test(name: impl Into<String>, statistic: f64, p_value: f64, alpha: f64) -> Self {
        let p_value = p_value.clamp(0.0, 1.0);
        Self {
            name: name.into(),
            statistic: Some(statistic),
            p_value: Some(p_value),
            threshold: Some(alpha),
            verdict: if p_value >= alpha {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
            note: None,
        }
    }

    pub fn bound(name: impl Into<String>, statistic: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            statistic: Some(statistic),
            p_value: None,
            threshold: Some(threshold),
            verdict: if statistic.abs() < threshold {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
            note: None,
        }
    }

    pub fn info(name: impl Into<String>, statistic: Option<f64>) -> Self {
        Self {
            name: name.into(),
            statistic,
            p_value: None,
            threshold: None,
            verdict: Verdict::Info,
            note: None,
        }
    }

    pub fn skipped(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            statistic: None,
            p_value: None,
            threshold: None,
            verdict: Verdict::Skipped,
            note: Some(reason.into()),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.9}"))
}

impl fmt::Display for TestEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<28} statistic={:<16} p_value={:<14} threshold={:<14} {}",
            self.name,
            opt(self.statistic),
            opt(self.p_value),
            opt(self.threshold),
            self.verdict
        )?;
        if let Some(n) = &self.note {
            write!(f, "  # {n}")?;
        }
        Ok(())
    }
}

/// Named results of a battery of tests over one bit sequence.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TestReport {
    pub sequence_bit_len: usize,
    pub entries: Vec<TestEntry>,
}

impl TestReport {
    pub fn new(sequence_bit_len: usize) -> Self {
        Self {
            sequence_bit_len,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, e: TestEntry) {
        self.entries.push(e);
    }

    pub fn extend(&mut self, other: TestReport) {
        self.entries.extend(other.entries);
    }

    pub fn get(&self, name: &str) -> Option<&TestEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// True when no entry failed; skipped and informational entries do not count.
    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(TestEntry::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &TestEntry> {
        self.entries.iter().filter(|e| e.verdict == Verdict::Fail)
    }

    /// One test per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("# bits = {}\n", self.sequence_bit_len);
        for e in &self.entries {
            s.push_str(&e.to_string());
            s.push('\n');
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts_follow_thresholds() {
        assert_eq!(TestEntry::p_test("x", 1.0, 0.2, 0.01).verdict, Verdict::Pass);
        assert_eq!(TestEntry::p_test("x", 1.0, 0.001, 0.01).verdict, Verdict::Fail);
        assert_eq!(TestEntry::bound("b", -0.2, 0.1).verdict, Verdict::Fail);
        assert_eq!(TestEntry::bound("b", 0.05, 0.1).verdict, Verdict::Pass);
        assert_eq!(TestEntry::p_test("x", 0.0, 1.0 + 1e-15, 0.01).p_value, Some(1.0));
    }

    #[test]
    fn report_text_and_summary() {
        let mut r = TestReport::new(10);
        r.push(TestEntry::bound("bias", 0.0, 0.47));
        r.push(TestEntry::skipped("runs", "needs 100 bits"));
        assert!(r.all_passed());
        r.push(TestEntry::p_test("frequency", 3.0, 0.0, 0.01));
        assert!(!r.all_passed());
        let text = r.to_text();
        assert_eq!(text.lines().count(), 4);
        assert!(text.lines().nth(3).unwrap().ends_with("FAIL"));
        assert!(text.contains("needs 100 bits"));
        let json = serde_json::to_string(&r).unwrap();
        let back: TestReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }
}

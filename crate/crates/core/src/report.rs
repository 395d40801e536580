use serde::{Deserialize, Serialize};

/// Violations kept per report; the per-check counts are always complete.
pub const MAX_LISTED_VIOLATIONS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }

    pub fn and(self, other: Verdict) -> Verdict {
        Verdict::from_pass(self.is_pass() && other.is_pass())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub sample: usize,
    pub condition: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub subject: String,
    pub verdict: Verdict,
    pub samples: usize,
    pub checks: Vec<Check>,
    pub violations: Vec<Violation>,
    pub violation_count: usize,
}

impl Report {
    pub fn new(subject: impl Into<String>) -> Self {
        Report {
            subject: subject.into(),
            verdict: Verdict::Pass,
            samples: 0,
            checks: Vec::new(),
            violations: Vec::new(),
            violation_count: 0,
        }
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn check(&mut self, name: impl Into<String>, measured: f64, bound: f64, pass: bool) {
        self.checks.push(Check {
            name: name.into(),
            measured,
            bound,
            pass,
        });
        if !pass {
            self.verdict = Verdict::Fail;
        }
    }

    /// A check of the form "`count` violations, none allowed".
    pub fn check_zero(&mut self, name: impl Into<String>, count: usize) {
        self.check(name, count as f64, 0.0, count == 0);
    }

    pub fn check_at_most(&mut self, name: impl Into<String>, measured: f64, bound: f64) {
        self.check(name, measured, bound, measured <= bound);
    }

    pub fn violation(&mut self, sample: usize, condition: impl Into<String>, detail: impl Into<String>) {
        self.violation_count += 1;
        if self.violations.len() < MAX_LISTED_VIOLATIONS {
            self.violations.push(Violation {
                sample,
                condition: condition.into(),
                detail: detail.into(),
            });
        }
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failing_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn passed(&self) -> bool {
        self.verdict.is_pass()
    }

    /// Pulls another report's checks in under a prefix.
    pub fn absorb(&mut self, prefix: &str, other: Report) {
        for c in other.checks {
            self.check(format!("{prefix}/{}", c.name), c.measured, c.bound, c.pass);
        }
        let unlisted = other.violation_count - other.violations.len();
        for v in other.violations {
            self.violation(v.sample, format!("{prefix}/{}", v.condition), v.detail);
        }
        self.violation_count += unlisted;
        self.samples += other.samples;
        self.verdict = self.verdict.and(other.verdict);
    }
}

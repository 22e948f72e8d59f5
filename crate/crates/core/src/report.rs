//! Pass/fail bookkeeping for identity checks.

use std::fmt;

/// What a check is expected to do.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expectation {
    /// Must hold; a failure is a bug or a counterexample.
    Holds,
    /// A printed formula known to be wrong; recorded, never counted as a failure.
    KnownDefect,
    /// Reported without an expected outcome.
    Informational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub expectation: Expectation,
}

impl CheckResult {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        CheckResult {
            name: name.into(),
            passed,
            detail: detail.into(),
            expectation: Expectation::Holds,
        }
    }

    pub fn known_defect(mut self) -> Self {
        self.expectation = Expectation::KnownDefect;
        self
    }

    pub fn informational(mut self) -> Self {
        self.expectation = Expectation::Informational;
        self
    }

    /// True unless an expected-to-hold check failed.
    pub fn acceptable(&self) -> bool {
        self.passed || self.expectation != Expectation::Holds
    }

    fn status(&self) -> &'static str {
        match (self.passed, self.expectation) {
            (true, _) => "pass",
            (false, Expectation::Holds) => "FAIL",
            (false, Expectation::KnownDefect) => "known-defect",
            (false, Expectation::Informational) => "info",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    pub title: String,
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report {
            title: title.into(),
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, check: CheckResult) {
        self.checks.push(check);
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.push(CheckResult::new(name, passed, detail));
    }

    pub fn extend(&mut self, other: Report) {
        for mut c in other.checks {
            if !other.title.is_empty() {
                c.name = format!("{}: {}", other.title, c.name);
            }
            self.checks.push(c);
        }
    }

    /// Every expected-to-hold check passed.
    pub fn ok(&self) -> bool {
        self.checks.iter().all(CheckResult::acceptable)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.acceptable())
    }

    /// Machine-readable form: one `name<TAB>status<TAB>detail` row per check.
    pub fn to_tsv(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            s.push_str(&format!("{}\t{}\t{}\n", c.name, c.status(), c.detail));
        }
        s
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.title.is_empty() {
            writeln!(f, "== {} ==", self.title)?;
        }
        for c in &self.checks {
            write!(f, "[{}] {}", c.status(), c.name)?;
            if !c.detail.is_empty() {
                write!(f, " ({})", c.detail)?;
            }
            writeln!(f)?;
        }
        let bad = self.failures().count();
        writeln!(f, "{} checks, {} unexpected failures", self.checks.len(), bad)
    }
}

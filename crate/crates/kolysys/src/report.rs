//! Structured pass/fail items shared by the axiom checkers, the
//! compatibility checks, and the verification suites.

use std::fmt;

/// One verified statement: which check, at which subset and site, and what
/// went wrong if it failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    /// Labels of the subset `n` the check quantifies over, when applicable.
    pub subset: Option<Vec<String>>,
    /// Offending (or relevant) site label.
    pub site: Option<String>,
    pub pass: bool,
    /// Counterexample payload: enough to replay the failure by hand.
    pub detail: Option<String>,
}

impl Check {
    pub fn pass(name: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            subset: None,
            site: None,
            pass: true,
            detail: None,
        }
    }

    pub fn fail(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            subset: None,
            site: None,
            pass: false,
            detail: Some(detail.into()),
        }
    }

    pub fn at_subset(mut self, labels: Vec<String>) -> Self {
        self.subset = Some(labels);
        self
    }

    pub fn at_site(mut self, label: impl Into<String>) -> Self {
        self.site = Some(label.into());
        self
    }
}

/// An ordered list of checks; passes only if every item does.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn record(
        &mut self,
        name: impl Into<String>,
        subset: Option<Vec<String>>,
        site: Option<String>,
        pass: bool,
        detail: impl FnOnce() -> String,
    ) {
        self.checks.push(Check {
            name: name.into(),
            subset,
            site,
            pass,
            detail: if pass { None } else { Some(detail()) },
        });
    }

    pub fn merge(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let status = if c.pass { "ok" } else { "FAIL" };
            write!(f, "{status} {}", c.name)?;
            if let Some(n) = &c.subset {
                write!(f, " n={{{}}}", n.join(","))?;
            }
            if let Some(q) = &c.site {
                write!(f, " q={q}")?;
            }
            if let Some(d) = &c.detail {
                write!(f, ": {d}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

//! Verification reports: one line per check.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Status {
    Pass,
    Fail,
    Warn,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Warn => "WARN",
        })
    }
}

/// Strength of the claim a check establishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    ModuleIso,
    QuasiIso,
    Exactness,
    Axiom,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::ModuleIso => "module-iso",
            Level::QuasiIso => "quasi-iso",
            Level::Exactness => "exactness",
            Level::Axiom => "axiom",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub status: Status,
    pub level: Level,
    pub name: String,
    pub witness: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}  {}  {} \u{2014} {}", self.status, self.level, self.name, self.witness)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new() -> Report {
        Report::default()
    }

    pub fn push(&mut self, status: Status, level: Level, name: impl Into<String>, witness: impl Into<String>) {
        self.checks.push(Check { status, level, name: name.into(), witness: witness.into() });
    }

    pub fn pass(&mut self, level: Level, name: impl Into<String>, witness: impl Into<String>) {
        self.push(Status::Pass, level, name, witness);
    }

    pub fn fail(&mut self, level: Level, name: impl Into<String>, witness: impl Into<String>) {
        self.push(Status::Fail, level, name, witness);
    }

    pub fn warn(&mut self, level: Level, name: impl Into<String>, witness: impl Into<String>) {
        self.push(Status::Warn, level, name, witness);
    }

    /// Records PASS or FAIL depending on `ok`.
    pub fn check(&mut self, ok: bool, level: Level, name: impl Into<String>, witness: impl Into<String>) -> bool {
        self.push(if ok { Status::Pass } else { Status::Fail }, level, name, witness);
        ok
    }

    /// Appends another report, prefixing its check names.
    pub fn extend_prefixed(&mut self, prefix: &str, other: Report) {
        for mut c in other.checks {
            c.name = format!("{prefix}{}", c.name);
            self.checks.push(c);
        }
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    /// Overall pass: no entry failed (warnings allowed).
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Warn)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn warnings_do_not_fail() {
        let mut r = Report::new();
        r.pass(Level::Axiom, "unit", "ok");
        r.warn(Level::Axiom, "generator", "not certified");
        assert!(r.passed());
        r.fail(Level::Exactness, "cone", "H^0 = 1");
        assert!(!r.passed());
        assert_eq!(r.checks[2].to_string(), "FAIL  exactness  cone \u{2014} H^0 = 1");
    }
}

use std::fmt;

/// One violated clause together with a human-readable witness.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Violation {
    pub clause: String,
    pub witness: String,
}

impl Violation {
    pub fn new(clause: impl Into<String>, witness: impl Into<String>) -> Self {
        Violation { clause: clause.into(), witness: witness.into() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.clause, self.witness)
    }
}

/// Outcome of validating a structure. Valid iff there are no violations.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, clause: impl Into<String>, witness: impl Into<String>) {
        self.violations.push(Violation::new(clause, witness));
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        if self.is_valid() {
            writeln!(f, "valid")
        } else {
            writeln!(f, "invalid")?;
            for v in &self.violations {
                writeln!(f, "  {v}")?;
            }
            Ok(())
        }
    }
}

/// Outcome of a morphism, folding or bisimulation check.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CheckReport {
    pub violations: Vec<Violation>,
}

impl CheckReport {
    pub fn verdict(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, clause: impl Into<String>, witness: impl Into<String>) {
        self.violations.push(Violation::new(clause, witness));
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.verdict() {
            writeln!(f, "yes")
        } else {
            writeln!(f, "no")?;
            for v in &self.violations {
                writeln!(f, "  {v}")?;
            }
            Ok(())
        }
    }
}

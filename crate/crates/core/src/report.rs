//! Three-valued verification outcomes and named collections of them.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::padic::{Comparison, PadicScalar};

/// Result of checking one identity. A failure names a witness; an
/// indeterminate outcome names the precision that was missing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail { witness: String },
    Indeterminate { shortfall: String },
}

impl Verdict {
    pub fn fail(witness: impl Into<String>) -> Self {
        Verdict::Fail {
            witness: witness.into(),
        }
    }

    pub fn indeterminate(shortfall: impl Into<String>) -> Self {
        Verdict::Indeterminate {
            shortfall: shortfall.into(),
        }
    }

    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, Verdict::Fail { .. })
    }

    pub fn is_indeterminate(&self) -> bool {
        matches!(self, Verdict::Indeterminate { .. })
    }

    /// Conjunction: any failure wins, then any indeterminate outcome.
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (f @ Verdict::Fail { .. }, _) | (_, f @ Verdict::Fail { .. }) => f,
            (i @ Verdict::Indeterminate { .. }, _) | (_, i @ Verdict::Indeterminate { .. }) => i,
            _ => Verdict::Pass,
        }
    }

    pub fn all(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
        verdicts.into_iter().fold(Verdict::Pass, Verdict::and)
    }

    /// Prefixes the witness or shortfall with some context.
    pub fn context(self, what: impl fmt::Display) -> Verdict {
        match self {
            Verdict::Pass => Verdict::Pass,
            Verdict::Fail { witness } => Verdict::fail(format!("{what}: {witness}")),
            Verdict::Indeterminate { shortfall } => Verdict::indeterminate(format!("{what}: {shortfall}")),
        }
    }

    /// Exit status convention of the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail { .. } => 1,
            Verdict::Indeterminate { .. } => 2,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => write!(f, "pass"),
            Verdict::Fail { witness } => write!(f, "fail ({witness})"),
            Verdict::Indeterminate { shortfall } => write!(f, "indeterminate ({shortfall})"),
        }
    }
}

/// Verdict for `a == b` at absolute precision `floor`.
pub fn scalar_equal(a: &PadicScalar, b: &PadicScalar, floor: i64) -> Verdict {
    match a.compare(b, floor) {
        Comparison::Equal => Verdict::Pass,
        Comparison::Unequal => Verdict::fail(format!("{a} != {b}")),
        Comparison::Indistinguishable => Verdict::indeterminate(format!(
            "difference of {a} and {b} is zero only to precision {:?}, need {floor}",
            a.sub(b).abs_prec()
        )),
    }
}

/// Verdict for `a == 0` at absolute precision `floor`.
pub fn scalar_zero(a: &PadicScalar, floor: i64) -> Verdict {
    match a.zero_status(floor) {
        Comparison::Equal => Verdict::Pass,
        Comparison::Unequal => Verdict::fail(format!("{a} is nonzero")),
        Comparison::Indistinguishable => {
            Verdict::indeterminate(format!("zero only to precision {:?}, need {floor}", a.abs_prec()))
        }
    }
}

/// Named verdicts, ordered by name so that assembly order does not matter.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckSet {
    pub checks: BTreeMap<String, Verdict>,
}

impl CheckSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, v: Verdict) {
        self.checks.insert(name.into(), v);
    }

    pub fn overall(&self) -> Verdict {
        Verdict::all(self.checks.values().cloned())
    }

    pub fn extend(&mut self, other: CheckSet) {
        self.checks.extend(other.checks);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjunction_prefers_failure() {
        let v = Verdict::Pass
            .and(Verdict::indeterminate("short"))
            .and(Verdict::fail("bad"));
        assert!(v.is_fail());
        assert!(Verdict::Pass.and(Verdict::indeterminate("x")).is_indeterminate());
        assert!(Verdict::all([]).is_pass());
    }

    #[test]
    fn verdict_json_shape() {
        let s = serde_json::to_string(&Verdict::fail("entry (0,1)")).unwrap();
        assert_eq!(s, r#"{"status":"fail","witness":"entry (0,1)"}"#);
        let back: Verdict = serde_json::from_str(&s).unwrap();
        assert_eq!(back, Verdict::fail("entry (0,1)"));
    }
}

//! Tallies of exhaustive checks.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

/// Witnesses kept per report; later failures are only counted.
pub const MAX_WITNESSES: usize = 5;

/// Result of one exhaustive check: how many cases were examined, how many
/// failed, and the first few counterexamples.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub checked: u64,
    pub failures: u64,
    pub witnesses: Vec<String>,
    /// Per-case counters, e.g. how often each case of a closed form occurred.
    pub tallies: BTreeMap<String, u64>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>) -> Self {
        CheckReport {
            name: name.into(),
            checked: 0,
            failures: 0,
            witnesses: Vec::new(),
            tallies: BTreeMap::new(),
        }
    }

    /// Records one case; the witness is only rendered on failure.
    pub fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.fail(witness());
        }
    }

    /// Records a failure that is not tied to a counted case.
    pub fn fail(&mut self, witness: String) {
        self.failures += 1;
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(witness);
        }
    }

    pub fn tally(&mut self, key: impl Into<String>) {
        *self.tallies.entry(key.into()).or_insert(0) += 1;
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn first_witness(&self) -> Option<&str> {
        self.witnesses.first().map(String::as_str)
    }

    /// Folds `other` into `self`, prefixing its witnesses with `label`.
    pub fn absorb(&mut self, label: &str, mut other: CheckReport) {
        other.witnesses = other.witnesses.into_iter().map(|w| format!("{label}: {w}")).collect();
        self.merge(other);
    }

    /// Folds `other` into `self` unchanged.
    pub fn merge(&mut self, other: CheckReport) {
        self.checked += other.checked;
        for w in other.witnesses {
            if self.witnesses.len() < MAX_WITNESSES {
                self.witnesses.push(w);
            }
        }
        self.failures += other.failures;
        for (k, v) in other.tallies {
            *self.tallies.entry(k).or_insert(0) += v;
        }
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "pass" } else { "FAIL" };
        write!(f, "{status} {} ({} cases", self.name, self.checked)?;
        if self.failures > 0 {
            write!(f, ", {} failures", self.failures)?;
        }
        write!(f, ")")?;
        if let Some(w) = self.first_witness() {
            write!(f, ": {w}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn witnesses_are_capped() {
        let mut r = CheckReport::new("demo");
        for i in 0..10 {
            r.record(i % 2 == 0, || format!("case {i}"));
        }
        assert_eq!(r.checked, 10);
        assert_eq!(r.failures, 5);
        assert_eq!(r.witnesses.len(), MAX_WITNESSES);
        assert_eq!(r.first_witness(), Some("case 1"));
        assert!(!r.passed());
    }

    #[test]
    fn absorb_prefixes_and_sums() {
        let mut a = CheckReport::new("a");
        a.tally("x");
        let mut b = CheckReport::new("b");
        b.record(false, || "bad".into());
        b.tally("x");
        a.absorb("x=3", b);
        assert_eq!(a.failures, 1);
        assert_eq!(a.witnesses, vec!["x=3: bad".to_string()]);
        assert_eq!(a.tallies["x"], 2);
    }
}

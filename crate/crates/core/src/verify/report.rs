use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

pub const REPORT_SCHEMA: &str = "finitopos.suite-report/1";
/// Witnesses kept per report; further failures are only counted.
pub const WITNESS_CAP: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Theorem {
    I,
    II,
    III,
    IV,
    V,
    VI,
    VII,
    #[serde(rename = "sheaves")]
    Sheaves,
    #[serde(rename = "lex")]
    Lex,
    #[serde(rename = "controls")]
    Controls,
}

impl Theorem {
    pub const ALL: [Theorem; 10] = [
        Theorem::I,
        Theorem::II,
        Theorem::III,
        Theorem::IV,
        Theorem::V,
        Theorem::VI,
        Theorem::VII,
        Theorem::Sheaves,
        Theorem::Lex,
        Theorem::Controls,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Theorem::I => "I",
            Theorem::II => "II",
            Theorem::III => "III",
            Theorem::IV => "IV",
            Theorem::V => "V",
            Theorem::VI => "VI",
            Theorem::VII => "VII",
            Theorem::Sheaves => "sheaves",
            Theorem::Lex => "lex",
            Theorem::Controls => "controls",
        }
    }

    pub fn title(&self) -> &'static str {
        match self {
            Theorem::I => "Yoneda I: Nat(h_X, F) is in bijection with F(X), naturally",
            Theorem::II => "Yoneda II: every presheaf is the colimit of representables over its elements",
            Theorem::III => "Yoneda III: p is recovered from its extension, and extensions from their restriction",
            Theorem::IV => "Yoneda IV: the extension is left adjoint to h_p",
            Theorem::V => "Yoneda V: flatness verdicts agree across criteria",
            Theorem::VI => "Yoneda VI: continuous flat functors correspond to geometric morphisms via epsilon",
            Theorem::VII => "Yoneda VII: exact functors on finitely complete bases are flat",
            Theorem::Sheaves => "sheaf condition, sheafification and its unit",
            Theorem::Lex => "sheafification preserves finite limits",
            Theorem::Controls => "negative controls are rejected",
        }
    }

    pub fn parse(s: &str) -> Option<Theorem> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.id().eq_ignore_ascii_case(s))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub check: String,
    pub subject: String,
    pub detail: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub schema: &'static str,
    pub theorem: Theorem,
    pub title: &'static str,
    pub seed: u64,
    pub budget: &'static str,
    pub inputs_digest: String,
    pub checks_run: usize,
    pub failures: usize,
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
    pub budget_notes: Vec<String>,
    pub notes: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Running counts for one suite, mergeable in a fixed order.
#[derive(Clone, Debug, Default)]
pub struct Tally {
    pub checks: usize,
    pub failures: usize,
    pub witnesses: Vec<Witness>,
    pub budget_notes: Vec<String>,
}

impl Tally {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records a boolean check; `detail` is built only on failure.
    pub fn check(&mut self, ok: bool, check: &str, subject: &str, detail: impl FnOnce() -> Value) {
        self.checks += 1;
        if !ok {
            self.fail(check, subject, detail());
        }
    }

    pub fn fail(&mut self, check: &str, subject: &str, detail: Value) {
        self.failures += 1;
        if self.witnesses.len() < WITNESS_CAP {
            self.witnesses.push(Witness {
                check: check.into(),
                subject: subject.into(),
                detail,
            });
        }
    }

    /// Folds the outcome of a fallible check. Budget exhaustion becomes a
    /// note; other errors are failures.
    pub fn record<T>(&mut self, check: &str, subject: &str, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e @ Error::Budget { .. }) => {
                self.budget_notes.push(format!("{check} on {subject}: {e}"));
                None
            }
            Err(e) => {
                self.checks += 1;
                self.fail(check, subject, Value::String(e.to_string()));
                None
            }
        }
    }

    pub fn merge(&mut self, other: Tally) {
        self.checks += other.checks;
        self.failures += other.failures;
        let room = WITNESS_CAP.saturating_sub(self.witnesses.len());
        self.witnesses
            .extend(other.witnesses.into_iter().take(room));
        self.budget_notes.extend(other.budget_notes);
    }

    pub fn merged(parts: impl IntoIterator<Item = Tally>) -> Tally {
        let mut t = Tally::new();
        for p in parts {
            t.merge(p);
        }
        t
    }

    pub fn into_report(
        self,
        theorem: Theorem,
        seed: u64,
        budget: &'static str,
        digest: &str,
        notes: Vec<String>,
    ) -> SuiteReport {
        let mut witnesses = self.witnesses;
        let mut failures = self.failures;
        if self.checks == 0 {
            failures += 1;
            witnesses.push(Witness {
                check: "coverage".into(),
                subject: theorem.id().into(),
                detail: Value::String("no checks were run".into()),
            });
        }
        let verdict = if failures == 0 {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        SuiteReport {
            schema: REPORT_SCHEMA,
            theorem,
            title: theorem.title(),
            seed,
            budget,
            inputs_digest: digest.to_string(),
            checks_run: self.checks,
            failures,
            verdict,
            witnesses,
            budget_notes: self.budget_notes,
            notes,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_follows_witnesses() {
        let mut t = Tally::new();
        t.check(true, "c", "s", || Value::Null);
        let r = t.clone().into_report(Theorem::I, 0, "small", "d", vec![]);
        assert!(r.passed() && r.witnesses.is_empty() && r.checks_run == 1);
        t.check(false, "c", "s", || Value::Null);
        let r = t.into_report(Theorem::I, 0, "small", "d", vec![]);
        assert!(!r.passed() && !r.witnesses.is_empty());
        let r = Tally::new().into_report(Theorem::II, 0, "small", "d", vec![]);
        assert!(!r.passed() && !r.witnesses.is_empty());
    }

    #[test]
    fn budget_errors_become_notes() {
        let mut t = Tally::new();
        let r: Result<()> = Err(Error::Budget {
            what: "x".into(),
            limit: 1,
        });
        assert!(t.record("c", "s", r).is_none());
        assert_eq!(t.failures, 0);
        assert_eq!(t.budget_notes.len(), 1);
    }

    #[test]
    fn theorem_ids_parse() {
        for t in Theorem::ALL {
            assert_eq!(Theorem::parse(t.id()), Some(t));
        }
        assert_eq!(Theorem::parse("vii"), Some(Theorem::VII));
        assert_eq!(Theorem::parse("VIII"), None);
    }
}

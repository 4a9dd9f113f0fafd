mod controls;
mod kan;
mod sheaves;
mod topos;
mod yoneda;

use super::corpus::Corpus;
use super::report::{SuiteReport, Tally, Theorem};
use crate::handle::Budget;

pub(crate) struct Ctx<'a> {
    corpus: &'a Corpus,
    budget: Budget,
}

pub fn run_theorem_suite(theorem: Theorem, corpus: &Corpus, budget: Budget) -> SuiteReport {
    let ctx = Ctx { corpus, budget };
    let (tally, notes): (Tally, Vec<String>) = match theorem {
        Theorem::I => yoneda::suite_i(&ctx),
        Theorem::II => yoneda::suite_ii(&ctx),
        Theorem::III => kan::suite_iii(&ctx),
        Theorem::IV => kan::suite_iv(&ctx),
        Theorem::V => kan::suite_v(&ctx),
        Theorem::VI => topos::suite_vi(&ctx),
        Theorem::VII => topos::suite_vii(&ctx),
        Theorem::Sheaves => sheaves::suite_sheaves(&ctx),
        Theorem::Lex => sheaves::suite_lex(&ctx),
        Theorem::Controls => controls::suite_controls(&ctx),
    };
    tally.into_report(
        theorem,
        corpus.seed,
        budget.profile,
        &corpus.digest(),
        notes,
    )
}

/// Runs suites in the given order.
pub fn run_suites(theorems: &[Theorem], corpus: &Corpus, budget: Budget) -> Vec<SuiteReport> {
    theorems
        .iter()
        .map(|t| run_theorem_suite(*t, corpus, budget))
        .collect()
}

/// Curated broken inputs, each of which must be rejected by its checker.
pub fn negative_controls(corpus: &Corpus, budget: Budget) -> SuiteReport {
    run_theorem_suite(Theorem::Controls, corpus, budget)
}

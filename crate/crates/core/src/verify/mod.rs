//! Seeded corpora and executable theorem suites with machine-readable reports.

mod corpus;
mod report;
mod suites;

pub use corpus::{
    constant, corpus_from_fixtures, corpus_generate, fixture_categories, fixture_sites, fixtures,
    indicator, object_names, opens2, rng_for, sample_presheaves, Bounds, Corpus, Fixtures,
    NamedFunctor, NamedPresheaf, MAX_OBJECTS, MAX_PRESHEAF_BOUND,
};
pub use report::{SuiteReport, Tally, Theorem, Verdict, Witness, REPORT_SCHEMA, WITNESS_CAP};
pub use suites::{negative_controls, run_suites, run_theorem_suite};

use serde_json::json;

use super::Ctx;
use crate::kan::{build_ell, is_flat_bounded, is_flat_setvalued};
use crate::presheaf::{Presheaf, PresheafMorphism};
use crate::site::{is_continuous, is_sheaf};
use crate::verify::corpus::opens2;
use crate::verify::report::Tally;

pub(super) fn suite_controls(ctx: &Ctx) -> (Tally, Vec<String>) {
    let corpus = ctx.corpus;
    let mut t = Tally::new();

    // a transformation whose square for `f` does not commute
    match corpus.presheaves.iter().find(|p| p.name == "arrow_pq") {
        None => t.fail("broken naturality", "arrow_pq", json!("fixture missing")),
        Some(p) => {
            let f = &p.presheaf;
            let r = PresheafMorphism::new(f, f, vec![vec![1, 0], vec![0]]);
            t.check(
                r.is_err(),
                "non-natural transformation rejected",
                "arrow_pq",
                || json!(null),
            );
        }
    }

    // two sections over the empty set on the discrete two-point space
    if let Some(site) = corpus.site("opens2") {
        let r = Presheaf::from_names(
            &opens2(),
            &[
                ("0", &["x", "y"]),
                ("a", &["*"]),
                ("b", &["*"]),
                ("ab", &["*"]),
            ],
            &[
                ("0<=a", &[("*", "x")]),
                ("0<=b", &[("*", "x")]),
                ("a<=ab", &[("*", "*")]),
                ("b<=ab", &[("*", "*")]),
                ("0<=ab", &[("*", "x")]),
            ],
        )
        .and_then(|f| is_sheaf(&f, site));
        if let Some(v) = t.record("non-sheaf", "opens2", r) {
            t.check(
                !v.holds && v.witness.is_some(),
                "presheaf with two sections over ∅ rejected",
                "opens2",
                || json!(v),
            );
        }
    } else {
        t.fail("non-sheaf", "opens2", json!("fixture site missing"));
    }

    for f in &corpus.controls {
        let p = &f.functor;
        let name = p.name();
        match corpus.site_of(f) {
            Ok(Some(site)) => {
                if let Some(c) = t.record("continuity", name, is_continuous(p, &site)) {
                    t.check(
                        !c.holds && c.witness.is_some(),
                        "non-continuous functor rejected",
                        name,
                        || json!(c),
                    );
                }
                t.check(
                    build_ell(p, Some(&site), &ctx.budget).is_err(),
                    "ℓ(p) refused for a non-continuous functor",
                    name,
                    || json!(null),
                );
            }
            Ok(None) => {
                if let Some(v) = t.record("bounded flatness", name, is_flat_bounded(p, &ctx.budget))
                {
                    t.check(
                        v.is_counterexample(),
                        "non-flat functor has an exactness counterexample",
                        name,
                        || json!(v),
                    );
                }
                if let Some(s) = t.record("elementary flatness", name, is_flat_setvalued(p)) {
                    t.check(
                        !s.holds && s.witness.is_some(),
                        "non-flat functor has non-cofiltered elements",
                        name,
                        || json!(s),
                    );
                }
                t.check(
                    build_ell(p, None, &ctx.budget).is_err(),
                    "ℓ(p) refused for a non-flat functor",
                    name,
                    || json!(null),
                );
            }
            Err(e) => t.fail("site", name, json!(e.to_string())),
        }
    }
    (
        t,
        vec![format!("{} curated controls", corpus.controls.len() + 2)],
    )
}

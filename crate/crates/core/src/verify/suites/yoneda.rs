use rayon::prelude::*;
use serde_json::json;

use super::Ctx;
use crate::fincat::FinCategory;
use crate::presheaf::{
    density_check, enumerate_morphisms, enumerate_presheaves, yoneda_backward, yoneda_embed,
    yoneda_forward, yoneda_morphism, Presheaf, PresheafMorphism,
};
use crate::verify::report::Tally;

const CHUNK: usize = 512;

fn yoneda_one(
    c: &FinCategory,
    reps: &[Presheaf],
    hf: &[Option<PresheafMorphism>],
    f: &Presheaf,
    cap: usize,
    t: &mut Tally,
) {
    let subject = || format!("{} {:?}", c.name(), f.sizes());
    for x in c.objects() {
        let Some(thetas) = t.record(
            "enumerate Nat(h_X, F)",
            &subject(),
            enumerate_morphisms(&reps[x.0], f, cap),
        ) else {
            continue;
        };
        t.check(
            thetas.len() == f.size(x),
            "|Nat(h_X, F)| = |F(X)|",
            &subject(),
            || json!({ "object": c.object_name(x), "nat": thetas.len(), "value": f.size(x) }),
        );
        for theta in &thetas {
            let back = yoneda_forward(theta, x).and_then(|a| yoneda_backward(x, f, a));
            let ok = matches!(&back, Ok(b) if b.components() == theta.components());
            t.check(
                ok,
                "backward ∘ forward = id",
                &subject(),
                || json!({ "object": c.object_name(x), "theta": theta.signature() }),
            );
        }
        for a in 0..f.size(x) {
            let Some(theta) = t.record("yoneda backward", &subject(), yoneda_backward(x, f, a))
            else {
                continue;
            };
            let fwd = yoneda_forward(&theta, x).ok();
            t.check(
                fwd == Some(a) && theta.naturality_failure().is_none(),
                "forward ∘ backward = id",
                &subject(),
                || json!({ "object": c.object_name(x), "element": f.label(x, a) }),
            );
            // naturality in X: θ_a ∘ h_g corresponds to F(g)(a)
            for g in c.arrows_into(x) {
                let Some(hg) = &hf[g.0] else { continue };
                let r = yoneda_forward(&theta.after_unchecked(hg), c.src(g)).ok();
                t.check(
                    r == Some(f.act(g, a)),
                    "naturality in X",
                    &subject(),
                    || json!({ "morphism": c.morphism_name(g), "element": f.label(x, a) }),
                );
            }
        }
    }
}

/// Yoneda I on every presheaf within the bound, plus naturality in `F` on
/// corpus pairs.
pub(super) fn suite_i(ctx: &Ctx) -> (Tally, Vec<String>) {
    let cap = ctx.budget.hom_cap;
    let bound = ctx.corpus.bounds.presheaf_bound;
    let mut notes = Vec::new();
    let parts: Vec<Tally> = ctx
        .corpus
        .categories
        .iter()
        .map(|c| {
            let mut t = Tally::new();
            let reps: Vec<Presheaf> = c.objects().map(|x| yoneda_embed(c, x).expect("representable")).collect();
            let hf: Vec<Option<PresheafMorphism>> = c.morphisms().map(|g| yoneda_morphism(c, g).ok()).collect();
            let Some(all) = t.record("enumerate presheaves", c.name(), enumerate_presheaves(c, bound, ctx.budget.object_cap))
            else {
                return t;
            };
            let chunks: Vec<Tally> = all
                .par_chunks(CHUNK)
                .map(|chunk| {
                    let mut t = Tally::new();
                    for f in chunk {
                        yoneda_one(c, &reps, &hf, f, cap, &mut t);
                    }
                    t
                })
                .collect();
            t.merge(Tally::merged(chunks));
            // naturality in F
            let samples = ctx.corpus.presheaves_on(c).unwrap_or_default();
            for f in &samples {
                for g in &samples {
                    let Some(ms) = t.record("enumerate Nat(F, G)", c.name(), enumerate_morphisms(f, g, cap)) else { continue };
                    for m in ms.iter().take(2) {
                        for x in c.objects() {
                            for a in 0..f.size(x) {
                                let r = yoneda_backward(x, f, a).and_then(|th| yoneda_forward(&m.after_unchecked(&th), x)).ok();
                                t.check(r == Some(m.apply(x, a)), "naturality in F", c.name(), || {
                                    json!({ "map": m.signature(), "object": c.object_name(x), "element": a })
                                });
                            }
                        }
                    }
                }
            }
            t
        })
        .collect();
    for c in &ctx.corpus.categories {
        notes.push(format!(
            "{}: all presheaves with values ≤ {bound}",
            c.name()
        ));
    }
    (Tally::merged(parts), notes)
}

/// The density comparison is a bijection for every presheaf within the bound.
pub(super) fn suite_ii(ctx: &Ctx) -> (Tally, Vec<String>) {
    let bound = ctx.corpus.bounds.presheaf_bound;
    let parts: Vec<Tally> = ctx
        .corpus
        .categories
        .iter()
        .map(|c| {
            let mut t = Tally::new();
            let Some(all) = t.record(
                "enumerate presheaves",
                c.name(),
                enumerate_presheaves(c, bound, ctx.budget.object_cap),
            ) else {
                return t;
            };
            let chunks: Vec<Tally> = all
                .par_chunks(CHUNK)
                .map(|chunk| {
                    let mut t = Tally::new();
                    for f in chunk {
                        let subject = format!("{} {:?}", c.name(), f.sizes());
                        if let Some(w) = t.record("density comparison", &subject, density_check(f))
                        {
                            t.check(w.holds(), "density comparison is iso", &subject, || {
                                let (x, why) = w.failure.clone().expect("failure");
                                json!({ "object": c.object_name(x), "reason": why })
                            });
                        }
                    }
                    t
                })
                .collect();
            t.merge(Tally::merged(chunks));
            t
        })
        .collect();
    (
        Tally::merged(parts),
        vec![format!(
            "all presheaves with values ≤ {bound} on every corpus category"
        )],
    )
}

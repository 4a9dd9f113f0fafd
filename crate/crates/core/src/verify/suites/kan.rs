use rayon::prelude::*;
use serde_json::json;

use super::Ctx;
use crate::error::Result;
use crate::handle::{Budget, HandleFunctor};
use crate::kan::{
    adjunction_phi, build_ell, check_functoriality, hom_composite, is_flat_bounded,
    is_flat_setvalued, phi_natural_in_presheaf, phi_natural_in_target, right_adjoint_hp,
    ExtensionResult, FlatVerdict, RightAdjoint, Variance,
};
use crate::presheaf::{
    enumerate_morphisms, find_iso, presheaf_colimit, yoneda_backward, yoneda_embed,
    yoneda_morphism, Presheaf, PresheafDiagram, PresheafMorphism,
};
use crate::verify::corpus::{rng_for, sample_presheaves, NamedFunctor};
use crate::verify::report::Tally;

/// Corpus presheaves on the domain of `p`, then seeded samples, `n` in all.
pub(super) fn inputs(ctx: &Ctx, p: &HandleFunctor, tag: &str, n: usize) -> Result<Vec<Presheaf>> {
    let c = p.dom();
    let mut out = ctx.corpus.presheaves_on(c)?;
    let mut rng = rng_for(ctx.corpus.seed, &format!("{tag}/{}", p.name()));
    let extra = n.saturating_sub(out.len());
    out.extend(sample_presheaves(
        c,
        ctx.corpus.bounds.sample_bound,
        extra,
        &mut rng,
        ctx.budget.object_cap,
    )?);
    out.truncate(n.max(c.num_objects() + 1));
    Ok(out)
}

/// `p̃ ∘ h` as a functor `C → Z`.
pub(super) fn restrict_along_yoneda(ext: &ExtensionResult, name: &str) -> Result<HandleFunctor> {
    let p = ext.functor();
    let c = p.dom();
    let reps: Vec<Presheaf> = c
        .objects()
        .map(|x| yoneda_embed(c, x))
        .collect::<Result<_>>()?;
    let objects: Vec<Presheaf> = reps
        .iter()
        .map(|h| Ok(ext.apply(h)?.apex.clone()))
        .collect::<Result<_>>()?;
    let morphisms = c
        .morphisms()
        .map(|f| ext.apply_map(&yoneda_morphism(c, f)?))
        .collect::<Result<_>>()?;
    HandleFunctor::new(name, c, p.cod(), objects, morphisms)
}

/// `colim(p̃ ∘ D) → p̃(colim D)` is an isomorphism.
fn cocontinuity(ext: &ExtensionResult, d: &PresheafDiagram) -> Result<bool> {
    let p = ext.functor();
    let colim = presheaf_colimit(d, Some(p.dom()))?;
    let objects: Vec<Presheaf> = d
        .objects()
        .iter()
        .map(|o| Ok(ext.apply(o)?.apex.clone()))
        .collect::<Result<_>>()?;
    let arrows: Vec<PresheafMorphism> = d
        .index()
        .morphisms()
        .map(|u| ext.apply_map(d.arrow(u)))
        .collect::<Result<_>>()?;
    let image = PresheafDiagram::new(d.index(), objects, arrows)?;
    let zcolim = p.cod().colimit(&image)?;
    let target = ext.apply(&colim.apex)?;
    let legs: Vec<PresheafMorphism> = colim
        .legs
        .iter()
        .map(|l| ext.apply_map(l))
        .collect::<Result<_>>()?;
    Ok(zcolim.mediate_to(p.cod(), &target.apex, &legs)?.is_iso())
}

fn suite_iii_one(ctx: &Ctx, f: &NamedFunctor) -> Tally {
    let mut t = Tally::new();
    let p = &f.functor;
    let name = p.name();
    let ext = ExtensionResult::new(p);
    if let Some(eta) = t.record("eta", name, ext.eta()) {
        t.check(
            eta.holds(),
            "η components are isomorphisms and natural",
            name,
            || json!(eta.failure),
        );
    }
    let Some(hs) = t.record("inputs", name, inputs(ctx, p, "III", ctx.budget.samples)) else {
        return t;
    };
    let cap = ctx.budget.hom_cap;
    // functoriality and cocontinuity on consecutive samples
    for w in hs.windows(3) {
        let (a, b, c) = (&w[0], &w[1], &w[2]);
        let (Some(ab), Some(bc)) = (
            t.record("hom", name, enumerate_morphisms(a, b, cap)),
            t.record("hom", name, enumerate_morphisms(b, c, cap)),
        ) else {
            continue;
        };
        if let (Some(m), Some(n)) = (ab.first(), bc.first()) {
            if let Some(ok) = t.record("functoriality", name, check_functoriality(&ext, m, n)) {
                t.check(
                    ok,
                    "extension preserves identities and composites",
                    name,
                    || json!({ "first": m.signature(), "second": n.signature() }),
                );
            }
        }
        if let Some(d) = t.record(
            "coproduct",
            name,
            PresheafDiagram::discrete(vec![a.clone(), b.clone()]),
        ) {
            if let Some(ok) = t.record("cocontinuity", name, cocontinuity(&ext, &d)) {
                t.check(
                    ok,
                    "extension preserves binary coproducts",
                    name,
                    || json!({ "sizes": [a.sizes(), b.sizes()] }),
                );
            }
        }
        if ab.len() >= 2 {
            if let Some(d) = t.record(
                "coequalizer",
                name,
                PresheafDiagram::parallel(&ab[0], &ab[ab.len() - 1]),
            ) {
                if let Some(ok) = t.record("cocontinuity", name, cocontinuity(&ext, &d)) {
                    t.check(
                        ok,
                        "extension preserves coequalizers",
                        name,
                        || json!({ "pair": [ab[0].signature(), ab[ab.len() - 1].signature()] }),
                    );
                }
            }
        }
    }
    // G = p̃: its restriction along h extends back to G
    if let Some(gh) = t.record(
        "restriction along yoneda",
        name,
        restrict_along_yoneda(&ext, &format!("{name}~h")),
    ) {
        let ext2 = ExtensionResult::new(&gh);
        for h in &hs {
            let (Some(a), Some(b)) = (
                t.record("extension", name, ext.apply(h)),
                t.record("extension", name, ext2.apply(h)),
            ) else {
                continue;
            };
            t.check(find_iso(&a.apex, &b.apex).is_some(), "restricting then extending recovers the extension", name, || {
                json!({ "input": h.sizes(), "extension": a.apex.sizes(), "re-extension": b.apex.sizes() })
            });
        }
    }
    t
}

pub(super) fn suite_iii(ctx: &Ctx) -> (Tally, Vec<String>) {
    let all: Vec<&NamedFunctor> = ctx
        .corpus
        .functors
        .iter()
        .chain(&ctx.corpus.controls)
        .collect();
    let parts: Vec<Tally> = all.par_iter().map(|f| suite_iii_one(ctx, f)).collect();
    let notes = vec![
        "cocontinuous G are presented as extensions of corpus functors".to_string(),
        format!(
            "{} functors, up to {} input presheaves each",
            all.len(),
            ctx.budget.samples
        ),
    ];
    (Tally::merged(parts), notes)
}

fn suite_iv_one(ctx: &Ctx, f: &NamedFunctor) -> Tally {
    let mut t = Tally::new();
    let p = &f.functor;
    let name = p.name();
    let c = p.dom();
    let z = p.cod();
    let ext = ExtensionResult::new(p);
    let Some(targets) = t.record("targets", name, z.objects().map(|o| o.to_vec())) else {
        return t;
    };
    let hps: Vec<Option<RightAdjoint>> = targets
        .iter()
        .map(|zo| t.record("right adjoint", name, right_adjoint_hp(p, zo)))
        .collect();
    for (zo, hp) in targets.iter().zip(&hps) {
        let Some(hp) = hp else { continue };
        if let Some(co) = t.record(
            "hom composite",
            name,
            hom_composite(p, zo, Variance::Contra),
        ) {
            t.check(
                co == hp.presheaf,
                "contravariant hom composite is h_p",
                name,
                || json!({ "target": zo.sizes() }),
            );
        }
    }
    let initial = z.initial().ok();
    if let Some(i) = &initial {
        if let Some(co) = t.record("hom composite", name, hom_composite(p, i, Variance::Co)) {
            t.check(
                co.sizes().iter().all(|&n| n == 1),
                "covariant hom composite out of the initial object is constant 1",
                name,
                || json!({ "sizes": co.sizes() }),
            );
        }
    }
    if z.is_finset() {
        if let Some(co) = t.record(
            "hom composite",
            name,
            hom_composite(p, &z.terminal(), Variance::Co),
        ) {
            let values: Vec<usize> = p.objects().iter().map(Presheaf::total_size).collect();
            t.check(
                co.sizes() == values,
                "global elements of p(X) recover p in finite sets",
                name,
                || json!({ "sizes": co.sizes(), "values": values }),
            );
        }
    }
    let n = (ctx.budget.samples / 4).max(c.num_objects() + 2);
    let Some(hs) = t.record("inputs", name, inputs(ctx, p, "IV", n)) else {
        return t;
    };
    for (hi, h) in hs.iter().enumerate() {
        let Some(e) = t.record("extension", name, ext.apply(h)) else {
            continue;
        };
        for (zi, hp) in hps.iter().enumerate() {
            let Some(hp) = hp else { continue };
            let subject = format!("{name} H={:?} Z={:?}", h.sizes(), hp.target.sizes());
            let Some(bij) = t.record("phi", &subject, adjunction_phi(p, &e, hp)) else {
                continue;
            };
            t.check(
                bij.mutually_inverse(),
                "φ and φ⁻¹ are mutually inverse",
                &subject,
                || json!({ "left": bij.left.len(), "right": bij.right.len() }),
            );
            if hi < c.num_objects() {
                // H = h_X: Nat(h_X, h_p Z) ≅ h_p(Z)(X) = hom(pX, Z)
                let x = crate::fincat::ObjId(hi);
                t.check(
                    bij.right.len() == hp.presheaf.size(x),
                    "representable case reduces to Yoneda I",
                    &subject,
                    || json!({ "nat": bij.right.len(), "hom": hp.presheaf.size(x) }),
                );
            }
            // naturality in Z
            let next = &hps[(zi + 1) % hps.len()];
            if let Some(next) = next {
                if let Some(gs) = t.record("hom", &subject, z.hom(&hp.target, &next.target)) {
                    for alpha in bij.left.iter().take(2) {
                        for g in gs.iter().take(2) {
                            if let Some(ok) = t.record(
                                "naturality",
                                &subject,
                                phi_natural_in_target(&e, g, hp, next, alpha),
                            ) {
                                t.check(
                                    ok,
                                    "φ is natural in Z",
                                    &subject,
                                    || json!({ "alpha": alpha.signature(), "g": g.signature() }),
                                );
                            }
                        }
                    }
                }
            }
            // naturality in H along elements h_X → H
            for x in c.objects() {
                let Some(a) = (0..h.size(x)).next() else {
                    continue;
                };
                let Some(m) = t.record("element map", &subject, yoneda_backward(x, h, a)) else {
                    continue;
                };
                for alpha in bij.left.iter().take(2) {
                    if let Some(ok) = t.record(
                        "naturality",
                        &subject,
                        phi_natural_in_presheaf(&ext, &m, hp, alpha),
                    ) {
                        t.check(
                            ok,
                            "φ is natural in H",
                            &subject,
                            || json!({ "alpha": alpha.signature(), "m": m.signature() }),
                        );
                    }
                }
            }
        }
    }
    t
}

/// The `C = 1` currying instance: `hom(S × A, Z) ≅ hom(S, [A, Z])`.
fn currying(ctx: &Ctx) -> Tally {
    let mut t = Tally::new();
    let Some(f) = ctx.corpus.functor("point_two") else {
        t.fail("currying", "point_two", json!("fixture missing"));
        return t;
    };
    let p = &f.functor;
    let ext = ExtensionResult::new(p);
    let s = Presheaf::set_of_size(2);
    let z = Presheaf::set_of_size(2);
    let r = ext.apply(&s).and_then(|e| {
        let hp = right_adjoint_hp(p, &z)?;
        adjunction_phi(p, &e, &hp)
    });
    if let Some(bij) = t.record("currying", "point_two", r) {
        t.check(
            bij.counts() == (16, 16) && bij.mutually_inverse(),
            "|S|=|A|=|Z|=2 gives 16 = 16",
            "point_two",
            || json!({ "left": bij.left.len(), "right": bij.right.len() }),
        );
    }
    t
}

pub(super) fn suite_iv(ctx: &Ctx) -> (Tally, Vec<String>) {
    let all: Vec<&NamedFunctor> = ctx.corpus.functors.iter().collect();
    let mut parts: Vec<Tally> = all.par_iter().map(|f| suite_iv_one(ctx, f)).collect();
    parts.push(currying(ctx));
    let notes = vec![format!(
        "targets: every enumerated object of each codomain handle; inputs: up to {} per functor",
        (ctx.budget.samples / 4).max(2)
    )];
    (Tally::merged(parts), notes)
}

fn suite_v_one(ctx: &Ctx, f: &NamedFunctor) -> Tally {
    let mut t = Tally::new();
    let p = &f.functor;
    let name = p.name();
    let budgets = if ctx.budget == Budget::SMALL {
        vec![Budget::SMALL]
    } else {
        vec![Budget::SMALL, ctx.budget]
    };
    let verdicts: Vec<Option<FlatVerdict>> = budgets
        .iter()
        .map(|b| t.record("bounded flatness", name, is_flat_bounded(p, b)))
        .collect();
    let any_counter = verdicts
        .iter()
        .flatten()
        .any(FlatVerdict::is_counterexample);
    if p.cod().is_finset() {
        if let Some(s) = t.record("elementary flatness", name, is_flat_setvalued(p)) {
            if s.holds {
                t.check(
                    !any_counter,
                    "cofiltered elements ⇒ no exactness counterexample",
                    name,
                    || json!(verdicts),
                );
            }
            if any_counter {
                t.check(
                    !s.holds,
                    "exactness counterexample ⇒ elements not cofiltered",
                    name,
                    || json!(s),
                );
            }
        }
    }
    let Some(Some(main)) = verdicts.last() else {
        return t;
    };
    match build_ell(p, None, &ctx.budget) {
        Ok(ell) => t.check(
            ell.exactness == *main && !main.is_counterexample(),
            "ℓ(p) exactness data matches",
            name,
            || json!({ "ell": ell.exactness, "oracle": main }),
        ),
        Err(e) => t.check(
            main.is_counterexample(),
            "ℓ(p) refused only on a counterexample",
            name,
            || json!(e.to_string()),
        ),
    }
    t
}

pub(super) fn suite_v(ctx: &Ctx) -> (Tally, Vec<String>) {
    let all: Vec<&NamedFunctor> = ctx
        .corpus
        .functors
        .iter()
        .chain(&ctx.corpus.controls)
        .collect();
    let parts: Vec<Tally> = all.par_iter().map(|f| suite_v_one(ctx, f)).collect();
    let notes = vec![
        "bounded exactness verdicts are claims up to the budget; counterexamples are definitive"
            .to_string(),
    ];
    (Tally::merged(parts), notes)
}

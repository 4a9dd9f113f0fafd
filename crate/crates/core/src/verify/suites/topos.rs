use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use super::kan::inputs;
use super::Ctx;
use crate::error::Result;
use crate::fincat::FinCategory;
use crate::handle::{ComputationalCategory, HandleFunctor};
use crate::kan::{
    build_ell, direct_image_failure, has_finite_limits, is_flat_bounded, is_flat_setvalued,
    left_exactness_failure, right_adjoint_hp, FlatVerdict, GeometricMorphismData, LimitKind,
};
use crate::presheaf::{
    find_iso, presheaf_colimit, presheaf_limit, Presheaf, PresheafDiagram, PresheafMorphism,
};
use crate::site::{epsilon_functor, is_continuous, Site};
use crate::verify::corpus::{rng_for, NamedFunctor};
use crate::verify::report::Tally;

/// `p̃ ∘ ε` as a functor `C → Z`.
fn precompose_epsilon(ell: &GeometricMorphismData, site: &Site) -> Result<HandleFunctor> {
    let p = ell.functor();
    let eps = epsilon_functor(site)?;
    let objects: Vec<Presheaf> = eps
        .objects
        .iter()
        .map(|r| Ok(ell.inverse_image(&r.sheaf)?.apex.clone()))
        .collect::<Result<_>>()?;
    let morphisms = eps
        .morphisms
        .iter()
        .map(|m| ell.inverse_image_map(m))
        .collect::<Result<_>>()?;
    HandleFunctor::new(
        &format!("{}~eps", p.name()),
        p.dom(),
        p.cod(),
        objects,
        morphisms,
    )
}

fn suite_vi_one(ctx: &Ctx, f: &NamedFunctor, site: &Site) -> Tally {
    let mut t = Tally::new();
    let p = &f.functor;
    let name = &format!("{} on {}", p.name(), site.name());
    let c = p.dom();
    if let Some(cont) = t.record("continuity", name, is_continuous(p, site)) {
        t.check(cont.holds, "fixture is continuous", name, || {
            json!(cont.witness)
        });
    }
    let Some(ell) = t.record("build ℓ(p)", name, build_ell(p, Some(site), &ctx.budget)) else {
        return t;
    };
    let Some(eps) = t.record("epsilon", name, epsilon_functor(site)) else {
        return t;
    };
    // ε*(ℓ(p)) ≅ p objectwise
    for x in c.objects() {
        if let Some(e) = t.record(
            "inverse image",
            name,
            ell.inverse_image(&eps.objects[x.0].sheaf),
        ) {
            t.check(find_iso(&e.apex, p.ob(x)).is_some(), "ε*(ℓ(p)) ≅ p", name, || {
                json!({ "object": c.object_name(x), "extension": e.apex.sizes(), "value": p.ob(x).sizes() })
            });
        }
    }
    // direct images are sheaves
    let Some(targets) = t.record("targets", name, p.cod().objects().map(|o| o.to_vec())) else {
        return t;
    };
    for zo in &targets {
        let r = ell.direct_image(zo);
        t.check(
            r.is_ok(),
            "h_p(Z) is a sheaf",
            name,
            || json!({ "target": zo.sizes(), "error": r.as_ref().err().map(|e| e.to_string()) }),
        );
    }
    // ℓ(ε*(u)) ≅ u for u = ℓ(p)
    let Some(q) = t.record("p̃ ∘ ε", name, precompose_epsilon(&ell, site)) else {
        return t;
    };
    let Some(ell_q) = t.record(
        "build ℓ(p̃ ∘ ε)",
        name,
        build_ell(&q, Some(site), &ctx.budget),
    ) else {
        return t;
    };
    let sheaves =
        ComputationalCategory::sheaf_category(site, ctx.corpus.bounds.sample_bound, ctx.budget)
            .and_then(|h| Ok(h.objects()?.to_vec()));
    let Some(sheaves) = t.record("sheaves", name, sheaves) else {
        return t;
    };
    for s in sheaves.iter().take(ctx.budget.samples) {
        let (Some(a), Some(b)) = (
            t.record("inverse image", name, ell.inverse_image(s)),
            t.record("inverse image", name, ell_q.inverse_image(s)),
        ) else {
            continue;
        };
        t.check(
            find_iso(&a.apex, &b.apex).is_some(),
            "ℓ(ε*(u)) ≅ u on inverse images",
            name,
            || json!({ "sheaf": s.sizes(), "u": a.apex.sizes(), "round trip": b.apex.sizes() }),
        );
    }
    for zo in &targets {
        let (Some(a), Some(b)) = (
            t.record("direct image", name, right_adjoint_hp(p, zo)),
            t.record("direct image", name, right_adjoint_hp(&q, zo)),
        ) else {
            continue;
        };
        t.check(
            find_iso(&a.presheaf, &b.presheaf).is_some(),
            "ℓ(ε*(u)) ≅ u on direct images",
            name,
            || json!({ "target": zo.sizes() }),
        );
    }
    // trivial topology: agrees with the presheaf-level adjunction
    if site.is_trivial() {
        if let Some(plain) = t.record(
            "build ℓ(p) without site",
            name,
            build_ell(p, None, &ctx.budget),
        ) {
            let hs = inputs(ctx, p, "VI", ctx.budget.samples / 4 + 1).unwrap_or_default();
            for h in &hs {
                for zo in targets.iter().take(4) {
                    let (Some(a), Some(b)) = (
                        t.record("phi", name, ell.phi(h, zo)),
                        t.record("phi", name, plain.phi(h, zo)),
                    ) else {
                        continue;
                    };
                    t.check(
                        a.counts() == b.counts() && a.forward == b.forward,
                        "trivial site coincides with Yoneda IV",
                        name,
                        || json!({ "input": h.sizes(), "target": zo.sizes() }),
                    );
                }
            }
        }
    }
    t
}

/// `h_p(Z)` is a sheaf for every enumerated `Z` iff `p` is continuous.
fn direct_image_criterion(f: &NamedFunctor, site: &Site) -> Tally {
    let mut t = Tally::new();
    let p = &f.functor;
    let name = &format!("{} on {}", p.name(), site.name());
    let (Some(cont), Some(targets)) = (
        t.record("continuity", name, is_continuous(p, site)),
        t.record("targets", name, p.cod().objects().map(|o| o.to_vec())),
    ) else {
        return t;
    };
    if let Some(fail) = t.record(
        "direct images",
        name,
        direct_image_failure(p, site, &targets),
    ) {
        t.check(
            cont.holds == fail.is_none(),
            "h_p(Z) sheaf for all Z ⟺ p continuous",
            name,
            || json!({ "continuous": cont.holds, "direct_image_failure": fail }),
        );
    }
    t
}

pub(super) fn suite_vi(ctx: &Ctx) -> (Tally, Vec<String>) {
    let corpus = ctx.corpus;
    let mut work: Vec<(&NamedFunctor, Site)> = Vec::new();
    let mut parts = Vec::new();
    for f in &corpus.functors {
        let mut t = Tally::new();
        if let Some(Some(s)) = t.record("site", f.name(), corpus.site_of(f)) {
            work.push((f, s));
        }
        parts.push(t);
    }
    parts.extend(
        work.par_iter()
            .map(|(f, s)| suite_vi_one(ctx, f, s))
            .collect::<Vec<_>>(),
    );
    // both directions of the direct-image criterion, over every functor and site on its domain
    let mut pairs: Vec<(&NamedFunctor, &Site)> = Vec::new();
    for f in corpus.functors.iter().chain(&corpus.controls) {
        for s in corpus.sites.iter().filter(|s| s.base() == f.functor.dom()) {
            pairs.push((f, s));
        }
    }
    parts.extend(
        pairs
            .par_iter()
            .map(|(f, s)| direct_image_criterion(f, s))
            .collect::<Vec<_>>(),
    );
    // the non-continuous control must yield a non-sheaf direct image
    let mut t = Tally::new();
    for f in corpus.controls.iter().filter(|f| f.site.is_some()) {
        let Some(Some(site)) = t.record("site", f.name(), corpus.site_of(f)) else {
            continue;
        };
        let p = &f.functor;
        if let (Some(cont), Some(targets)) = (
            t.record("continuity", f.name(), is_continuous(p, &site)),
            t.record("targets", f.name(), p.cod().objects().map(|o| o.to_vec())),
        ) {
            let fail = t
                .record(
                    "direct images",
                    f.name(),
                    direct_image_failure(p, &site, &targets),
                )
                .flatten();
            t.check(
                !cont.holds && fail.is_some(),
                "non-continuous control has a non-sheaf h_p(Z)",
                f.name(),
                || json!({ "continuous": cont.holds }),
            );
            t.check(
                build_ell(p, Some(&site), &ctx.budget).is_err(),
                "ℓ(p) refused for the non-continuous control",
                f.name(),
                || json!(null),
            );
        }
    }
    parts.push(t);
    let names: Vec<&str> = work.iter().map(|(f, _)| f.name()).collect();
    (
        Tally::merged(parts),
        vec![format!("continuous flat fixtures: {}", names.join(", "))],
    )
}

fn random_set_diagram(index: &FinCategory, rng: &mut ChaCha8Rng) -> Result<PresheafDiagram> {
    // a functor J → FinSet as a presheaf on J^op, then as a diagram of sets
    let op = index.opposite();
    loop {
        let sizes: Vec<usize> = index.objects().map(|_| rng.gen_range(1..=3)).collect();
        let table: Vec<Vec<usize>> = index
            .morphisms()
            .map(|u| {
                let (s, tg) = (index.src(u), index.tgt(u));
                if index.is_identity(u) {
                    (0..sizes[s.0]).collect()
                } else {
                    (0..sizes[s.0])
                        .map(|_| rng.gen_range(0..sizes[tg.0]))
                        .collect()
                }
            })
            .collect();
        let labels = sizes
            .iter()
            .map(|n| (0..*n).map(|i| i.to_string()).collect())
            .collect();
        if let Ok(p) = Presheaf::new(&op, labels, table) {
            return diagram_of_copresheaf(index, &p);
        }
    }
}

fn diagram_of_copresheaf(index: &FinCategory, p: &Presheaf) -> Result<PresheafDiagram> {
    let sets: Vec<Presheaf> = index
        .objects()
        .map(|j| Presheaf::set(p.labels(j)))
        .collect();
    let arrows = index
        .morphisms()
        .map(|u| {
            PresheafMorphism::new(
                &sets[index.src(u).0],
                &sets[index.tgt(u).0],
                vec![p.action(u).to_vec()],
            )
        })
        .collect::<Result<_>>()?;
    PresheafDiagram::new(index, sets, arrows)
}

/// Sampled check that colimits over a finite filtered index commute with
/// binary products of diagrams in finite sets.
fn filtered_spot_check(ctx: &Ctx) -> Tally {
    let mut t = Tally::new();
    let idem = FinCategory::monoid("idem", &["e", "k"], &[vec![0, 1], vec![1, 1]]).expect("monoid");
    for index in [FinCategory::chain(3), idem] {
        let mut rng = rng_for(ctx.corpus.seed, &format!("filtered/{}", index.name()));
        for _ in 0..ctx.budget.samples.min(20) {
            let r = (|| -> Result<bool> {
                let d1 = random_set_diagram(&index, &mut rng)?;
                let d2 = random_set_diagram(&index, &mut rng)?;
                let prods: Vec<_> = index
                    .objects()
                    .map(|j| {
                        presheaf_limit(
                            &PresheafDiagram::discrete(vec![
                                d1.object(j).clone(),
                                d2.object(j).clone(),
                            ])?,
                            None,
                        )
                    })
                    .collect::<Result<_>>()?;
                let arrows = index
                    .morphisms()
                    .map(|u| {
                        let (s, tg) = (index.src(u), index.tgt(u));
                        let legs = [
                            d1.arrow(u).after(&prods[s.0].legs[0])?,
                            d2.arrow(u).after(&prods[s.0].legs[1])?,
                        ];
                        prods[tg.0].mediate_from(&prods[s.0].apex, &legs)
                    })
                    .collect::<Result<_>>()?;
                let dp = PresheafDiagram::new(
                    &index,
                    prods.iter().map(|l| l.apex.clone()).collect(),
                    arrows,
                )?;
                let (c1, c2, cp) = (
                    presheaf_colimit(&d1, None)?,
                    presheaf_colimit(&d2, None)?,
                    presheaf_colimit(&dp, None)?,
                );
                let target = presheaf_limit(
                    &PresheafDiagram::discrete(vec![c1.apex.clone(), c2.apex.clone()])?,
                    None,
                )?;
                let legs: Vec<PresheafMorphism> = index
                    .objects()
                    .map(|j| {
                        let l = [
                            c1.legs[j.0].after(&prods[j.0].legs[0])?,
                            c2.legs[j.0].after(&prods[j.0].legs[1])?,
                        ];
                        target.mediate_from(&prods[j.0].apex, &l)
                    })
                    .collect::<Result<_>>()?;
                Ok(cp.mediate_to(&target.apex, &legs)?.is_iso())
            })();
            if let Some(ok) = t.record("filtered colimit", index.name(), r) {
                t.check(
                    ok,
                    "filtered colimits commute with binary products",
                    index.name(),
                    || json!(null),
                );
            }
        }
    }
    t
}

fn suite_vii_one(ctx: &Ctx, f: &NamedFunctor) -> Tally {
    let mut t = Tally::new();
    let p = &f.functor;
    let name = p.name();
    if p.cod().is_finset() {
        if let Some(s) = t.record("cofiltered elements", name, is_flat_setvalued(p)) {
            t.check(s.holds, "category of elements is cofiltered", name, || {
                json!(s.witness)
            });
        }
    }
    if let Some(v) = t.record("bounded flatness", name, is_flat_bounded(p, &ctx.budget)) {
        t.check(
            !v.is_counterexample(),
            "extension is exact up to the budget",
            name,
            || json!(v),
        );
    }
    t
}

pub(super) fn suite_vii(ctx: &Ctx) -> (Tally, Vec<String>) {
    let corpus = ctx.corpus;
    let mut t = Tally::new();
    let mut exact = Vec::new();
    for f in &corpus.functors {
        if !has_finite_limits(f.functor.dom()) {
            continue;
        }
        if let Some(w) = t.record(
            "left exactness",
            f.name(),
            left_exactness_failure(&f.functor),
        ) {
            if w.is_none() {
                exact.push(f);
            }
        }
    }
    let mut parts = vec![t];
    parts.extend(
        exact
            .par_iter()
            .map(|f| suite_vii_one(ctx, f))
            .collect::<Vec<_>>(),
    );
    let mut t = Tally::new();
    match corpus.functor("chain3_const2") {
        None => t.fail(
            "non-exact control",
            "chain3_const2",
            json!("fixture missing"),
        ),
        Some(f) => {
            if let Some(w) = t.record(
                "left exactness",
                f.name(),
                left_exactness_failure(&f.functor),
            ) {
                t.check(
                    matches!(&w, Some(e) if e.kind == LimitKind::Terminal),
                    "control does not preserve the terminal object",
                    f.name(),
                    || json!(w),
                );
            }
            if let Some(v) = t.record(
                "bounded flatness",
                f.name(),
                is_flat_bounded(&f.functor, &ctx.budget),
            ) {
                t.check(
                    matches!(v, FlatVerdict::Counterexample { .. }),
                    "control yields a limit-preservation counterexample",
                    f.name(),
                    || json!(v),
                );
            }
        }
    }
    parts.push(t);
    parts.push(filtered_spot_check(ctx));
    let names: Vec<&str> = exact.iter().map(|f| f.name()).collect();
    (
        Tally::merged(parts),
        vec![format!(
            "exact fixtures on finitely complete bases: {}",
            names.join(", ")
        )],
    )
}

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde_json::json;

use super::Ctx;
use crate::error::Result;
use crate::fincat::{FinCategory, ObjId};
use crate::presheaf::{
    enumerate_morphisms, enumerate_presheaves, presheaf_limit, Presheaf, PresheafDiagram,
    PresheafMorphism,
};
use crate::site::{is_sheaf, is_sheaf_coverform, sheafify, sheafify_map, Site};
use crate::verify::corpus::rng_for;
use crate::verify::report::Tally;

const CHUNK: usize = 512;

/// Sheaves on the discrete two-point space: `F(∅) = 1` and
/// `F(ab) → F(a) × F(b)` bijective.
fn pair_model(f: &Presheaf) -> bool {
    let c = f.base();
    let id = |n: &str| c.object_id(n).expect("opens2 object");
    let (e, a, b, ab) = (id("0"), id("a"), id("b"), id("ab"));
    if f.size(e) != 1 {
        return false;
    }
    let (ra, rb) = (c.hom(a, ab)[0], c.hom(b, ab)[0]);
    let mut pairs: Vec<(usize, usize)> = (0..f.size(ab))
        .map(|x| (f.act(ra, x), f.act(rb, x)))
        .collect();
    pairs.sort_unstable();
    pairs.dedup();
    pairs.len() == f.size(ab) && pairs.len() == f.size(a) * f.size(b)
}

/// On a space whose opens form a chain only `∅` has a nontrivial cover, so
/// sheaves are the presheaves with a single section over `∅`.
fn chain_model(f: &Presheaf) -> bool {
    f.size(ObjId(0)) == 1
}

fn model(site: &Site) -> Option<fn(&Presheaf) -> bool> {
    if site.is_trivial() {
        return Some(|_| true);
    }
    match site.name() {
        "opens2" => Some(pair_model),
        "sierpinski" | "opens3" => Some(chain_model),
        _ => None,
    }
}

fn sheaves_one(f: &Presheaf, site: &Site, oracle: Option<fn(&Presheaf) -> bool>, t: &mut Tally) {
    let subject = format!("{} {:?}", site.name(), f.sizes());
    let Some(v) = t.record("is_sheaf", &subject, is_sheaf(f, site)) else {
        return;
    };
    if let Some(m) = oracle {
        t.check(
            v.holds == m(f),
            "is_sheaf matches the restriction model",
            &subject,
            || json!({ "is_sheaf": v.holds }),
        );
    }
    if site.is_coverage() {
        if let Some(w) = t.record("cover form", &subject, is_sheaf_coverform(f, site)) {
            t.check(
                w.holds == v.holds,
                "sieve and cover formulations agree",
                &subject,
                || json!({ "sieves": v.holds, "covers": w.holds }),
            );
        }
    }
    let Some(a) = t.record("sheafify", &subject, sheafify(f, site)) else {
        return;
    };
    if let Some(s) = t.record("is_sheaf", &subject, is_sheaf(&a.sheaf, site)) {
        t.check(s.holds, "sheafification yields a sheaf", &subject, || {
            json!(s.witness)
        });
    }
    t.check(
        a.unit.is_iso() == v.holds,
        "unit is iso iff input is a sheaf",
        &subject,
        || json!({ "sheaf": v.holds, "unit_iso": a.unit.is_iso() }),
    );
    if let Some(aa) = t.record("sheafify twice", &subject, sheafify(&a.sheaf, site)) {
        t.check(
            aa.unit.is_iso(),
            "sheafification is idempotent up to iso",
            &subject,
            || json!({ "sizes": aa.sheaf.sizes() }),
        );
    }
}

pub(super) fn suite_sheaves(ctx: &Ctx) -> (Tally, Vec<String>) {
    let bound = ctx.corpus.bounds.presheaf_bound;
    let mut notes = Vec::new();
    let parts: Vec<Tally> = ctx
        .corpus
        .sites
        .iter()
        .map(|site| {
            let mut t = Tally::new();
            let oracle = model(site);
            let Some(all) = t.record(
                "enumerate",
                site.name(),
                enumerate_presheaves(site.base(), bound, ctx.budget.object_cap),
            ) else {
                return t;
            };
            let chunks: Vec<Tally> = all
                .par_chunks(CHUNK)
                .map(|chunk| {
                    let mut t = Tally::new();
                    for f in chunk {
                        sheaves_one(f, site, oracle, &mut t);
                    }
                    t
                })
                .collect();
            t.merge(Tally::merged(chunks));
            t
        })
        .collect();
    for s in &ctx.corpus.sites {
        let m = if model(s).is_some() {
            "with model oracle"
        } else {
            "without model oracle"
        };
        notes.push(format!(
            "{}: all presheaves with values ≤ {bound}, {m}",
            s.name()
        ));
    }
    (Tally::merged(parts), notes)
}

fn product_comparison(site: &Site, c: &FinCategory, f: &Presheaf, g: &Presheaf) -> Result<bool> {
    let lim = presheaf_limit(
        &PresheafDiagram::discrete(vec![f.clone(), g.clone()])?,
        Some(c),
    )?;
    let (af, ag, ap) = (
        sheafify(f, site)?,
        sheafify(g, site)?,
        sheafify(&lim.apex, site)?,
    );
    let legs = [
        sheafify_map(site, &lim.legs[0], &ap, &af)?,
        sheafify_map(site, &lim.legs[1], &ap, &ag)?,
    ];
    let target = presheaf_limit(
        &PresheafDiagram::discrete(vec![af.sheaf.clone(), ag.sheaf.clone()])?,
        Some(c),
    )?;
    Ok(target.mediate_from(&ap.sheaf, &legs)?.is_iso())
}

fn equalizer_comparison(
    site: &Site,
    c: &FinCategory,
    m: &PresheafMorphism,
    n: &PresheafMorphism,
) -> Result<bool> {
    let lim = presheaf_limit(&PresheafDiagram::parallel(m, n)?, Some(c))?;
    let (ad, ac, ae) = (
        sheafify(m.dom(), site)?,
        sheafify(m.cod(), site)?,
        sheafify(&lim.apex, site)?,
    );
    let (am, an) = (
        sheafify_map(site, m, &ad, &ac)?,
        sheafify_map(site, n, &ad, &ac)?,
    );
    let legs = [
        sheafify_map(site, &lim.legs[0], &ae, &ad)?,
        sheafify_map(site, &lim.legs[1], &ae, &ac)?,
    ];
    let target = presheaf_limit(&PresheafDiagram::parallel(&am, &an)?, Some(c))?;
    Ok(target.mediate_from(&ae.sheaf, &legs)?.is_iso())
}

fn lex_one(ctx: &Ctx, site: &Site) -> Tally {
    let mut t = Tally::new();
    let name = site.name();
    let c = site.base();
    let one = Presheaf::terminal(c);
    if let Some(a) = t.record("sheafify terminal", name, sheafify(&one, site)) {
        t.check(
            a.sheaf.sizes().iter().all(|&n| n == 1),
            "terminal comparison is iso",
            name,
            || json!(a.sheaf.sizes()),
        );
    }
    let Some(pool) = t.record(
        "enumerate",
        name,
        enumerate_presheaves(c, ctx.corpus.bounds.sample_bound, ctx.budget.object_cap),
    ) else {
        return t;
    };
    let mut rng = rng_for(ctx.corpus.seed, &format!("lex/{name}"));
    for _ in 0..ctx.budget.samples {
        let (f, g) = (
            pool.choose(&mut rng).expect("pool"),
            pool.choose(&mut rng).expect("pool"),
        );
        if let Some(ok) = t.record(
            "product comparison",
            name,
            product_comparison(site, c, f, g),
        ) {
            t.check(
                ok,
                "binary product comparison is iso",
                name,
                || json!({ "sizes": [f.sizes(), g.sizes()] }),
            );
        }
    }
    let mut done = 0;
    let mut tries = 0;
    while done < ctx.budget.samples && tries < 64 * ctx.budget.samples {
        tries += 1;
        let (f, g) = (
            pool.choose(&mut rng).expect("pool"),
            pool.choose(&mut rng).expect("pool"),
        );
        let Some(ms) = t.record("hom", name, enumerate_morphisms(f, g, ctx.budget.hom_cap)) else {
            continue;
        };
        if ms.len() < 2 {
            continue;
        }
        let (m, n) = (
            ms.choose(&mut rng).expect("hom"),
            ms.choose(&mut rng).expect("hom"),
        );
        done += 1;
        if let Some(ok) = t.record(
            "equalizer comparison",
            name,
            equalizer_comparison(site, c, m, n),
        ) {
            t.check(
                ok,
                "equalizer comparison is iso",
                name,
                || json!({ "pair": [m.signature(), n.signature()] }),
            );
        }
    }
    if done < ctx.budget.samples {
        t.budget_notes.push(format!(
            "{name}: only {done} equalizer instances found in {tries} draws"
        ));
    }
    t
}

pub(super) fn suite_lex(ctx: &Ctx) -> (Tally, Vec<String>) {
    let parts: Vec<Tally> = ctx
        .corpus
        .sites
        .par_iter()
        .map(|s| lex_one(ctx, s))
        .collect();
    (
        Tally::merged(parts),
        vec![format!(
            "{} seeded product and {} equalizer instances per site",
            ctx.budget.samples, ctx.budget.samples
        )],
    )
}

use std::sync::OnceLock;

use proptest::prelude::*;

use finitopos::fincat::{
    enumerate_nat_transfs, is_cofiltered, validate_category, FinCategory, FinFunctor, ObjId,
};
use finitopos::handle::{Budget, ComputationalCategory, HandleFunctor};
use finitopos::kan::{
    adjunction_phi, is_flat_bounded, is_flat_setvalued, right_adjoint_hp, tilde_extend,
};
use finitopos::presheaf::{
    density_check, enumerate_morphisms, enumerate_presheaves, find_iso, presheaf_colimit,
    presheaf_limit, yoneda_backward, yoneda_embed, yoneda_forward, Presheaf, PresheafDiagram,
};
use finitopos::site::{canonical_site, is_sheaf, is_sheaf_coverform, is_subcanonical, sheafify};
use finitopos::verify::{
    corpus_generate, fixture_categories, fixture_sites, Bounds, Tally, Theorem, Verdict,
};

/// Fixture categories with their presheaves of values at most 2.
fn pool() -> &'static Vec<(FinCategory, Vec<Presheaf>)> {
    static POOL: OnceLock<Vec<(FinCategory, Vec<Presheaf>)>> = OnceLock::new();
    POOL.get_or_init(|| {
        fixture_categories()
            .into_iter()
            .map(|c| {
                let ps = enumerate_presheaves(&c, 2, 1 << 17).unwrap();
                (c, ps)
            })
            .collect()
    })
}

fn sheaf_pool() -> &'static Vec<(finitopos::site::Site, Vec<Presheaf>)> {
    static POOL: OnceLock<Vec<(finitopos::site::Site, Vec<Presheaf>)>> = OnceLock::new();
    POOL.get_or_init(|| {
        fixture_sites()
            .into_iter()
            .map(|s| {
                let ps = enumerate_presheaves(s.base(), 2, 1 << 17).unwrap();
                (s, ps)
            })
            .collect()
    })
}

/// A poset on `n` objects from the upper-triangular bits of `bits`.
fn poset(n: usize, bits: u32) -> FinCategory {
    let names: Vec<String> = (0..n).map(|i| format!("q{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut leq = Vec::new();
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            if bits >> k & 1 == 1 {
                leq.push((refs[i], refs[j]));
            }
            k += 1;
        }
    }
    FinCategory::poset("q", &refs, &leq)
}

fn components(c: &FinCategory) -> usize {
    let mut parent: Vec<usize> = (0..c.num_objects()).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for f in c.morphisms() {
        let (a, b) = (find(&mut parent, c.src(f).0), find(&mut parent, c.tgt(f).0));
        parent[a] = b;
    }
    (0..c.num_objects())
        .filter(|&x| find(&mut parent, x) == x)
        .count()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn opposite_is_an_involution(n in 1usize..=4, bits in 0u32..64) {
        let c = poset(n, bits);
        prop_assert!(validate_category(&c.to_data()).passed());
        prop_assert_eq!(c.opposite().opposite().to_data(), c.to_data());
    }

    #[test]
    fn fixture_opposites_are_involutions(i in 0usize..10) {
        let c = &pool()[i].0;
        prop_assert!(validate_category(&c.to_data()).passed());
        prop_assert_eq!(c.opposite().opposite().to_data(), c.to_data());
    }

    /// Between constant functors, a transformation is one arrow `z → w` per
    /// connected component of the domain.
    #[test]
    fn nat_transfs_between_constants_match_count(i in 0usize..10, j in 0usize..10, z in 0usize..4, w in 0usize..4) {
        let (c, d) = (&pool()[i].0, &pool()[j].0);
        let (z, w) = (ObjId(z % d.num_objects()), ObjId(w % d.num_objects()));
        let f = FinFunctor::constant(c, d, z);
        let g = FinFunctor::constant(c, d, w);
        let n = enumerate_nat_transfs(&f, &g).unwrap().len();
        prop_assert_eq!(n, d.hom(z, w).len().pow(components(c) as u32));
    }

    /// Poset case: cofiltered iff nonempty and every pair has a common lower bound.
    #[test]
    fn cofiltered_posets_match_definition(n in 1usize..=4, bits in 0u32..64) {
        let c = poset(n, bits);
        let naive = c.objects().all(|x| c.objects().all(|y| c.objects().any(|z| !c.hom(z, x).is_empty() && !c.hom(z, y).is_empty())));
        prop_assert_eq!(is_cofiltered(&c).holds, naive);
    }

    #[test]
    fn yoneda_round_trips(i in 0usize..10, k in any::<prop::sample::Index>(), x in 0usize..4) {
        let (c, ps) = &pool()[i];
        let f = &ps[k.index(ps.len())];
        let x = ObjId(x % c.num_objects());
        let hx = yoneda_embed(c, x).unwrap();
        let nat = enumerate_morphisms(&hx, f, 1 << 16).unwrap();
        prop_assert_eq!(nat.len(), f.labels(x).len());
        for xi in 0..f.labels(x).len() {
            let theta = yoneda_backward(x, f, xi).unwrap();
            prop_assert_eq!(yoneda_forward(&theta, x).unwrap(), xi);
        }
        for theta in &nat {
            let back = yoneda_backward(x, f, yoneda_forward(theta, x).unwrap()).unwrap();
            prop_assert_eq!(back.components(), theta.components());
        }
    }

    #[test]
    fn density_comparison_is_iso(i in 0usize..10, k in any::<prop::sample::Index>()) {
        let ps = &pool()[i].1;
        prop_assert!(density_check(&ps[k.index(ps.len())]).unwrap().holds());
    }

    /// Coproducts and products of presheaves are pointwise sums and products.
    #[test]
    fn binary_colimits_and_limits_are_pointwise(i in 0usize..10, a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>()) {
        let (c, ps) = &pool()[i];
        let (f, g) = (&ps[a.index(ps.len())], &ps[b.index(ps.len())]);
        let d = PresheafDiagram::discrete(vec![f.clone(), g.clone()]).unwrap();
        let sum = presheaf_colimit(&d, Some(c)).unwrap();
        let prod = presheaf_limit(&d, Some(c)).unwrap();
        for x in c.objects() {
            prop_assert_eq!(sum.apex.labels(x).len(), f.labels(x).len() + g.labels(x).len());
            prop_assert_eq!(prod.apex.labels(x).len(), f.labels(x).len() * g.labels(x).len());
        }
    }

    #[test]
    fn sheafification_laws(s in 0usize..4, k in any::<prop::sample::Index>()) {
        let (site, ps) = &sheaf_pool()[s];
        let f = &ps[k.index(ps.len())];
        let input = is_sheaf(f, site).unwrap().holds;
        if site.is_coverage() {
            prop_assert_eq!(is_sheaf_coverform(f, site).unwrap().holds, input);
        }
        let a = sheafify(f, site).unwrap();
        prop_assert!(is_sheaf(&a.sheaf, site).unwrap().holds);
        prop_assert_eq!(a.unit.is_iso(), input);
        let aa = sheafify(&a.sheaf, site).unwrap();
        prop_assert!(find_iso(&aa.sheaf, &a.sheaf).is_some());
    }

    #[test]
    fn canonical_topology_is_subcanonical(n in 1usize..=3, bits in 0u32..8) {
        let c = poset(n, bits);
        let site = canonical_site(&c, 2).unwrap();
        prop_assert!(is_subcanonical(&site).unwrap().holds);
    }

    #[test]
    fn tally_verdict_tracks_failures(checks in prop::collection::vec(any::<bool>(), 0..40)) {
        let mut t = Tally::new();
        for (i, ok) in checks.iter().enumerate() {
            t.check(*ok, "check", &i.to_string(), || serde_json::Value::Null);
        }
        let fails = checks.iter().filter(|ok| !**ok).count();
        let r = t.into_report(Theorem::Controls, 0, "default", "", Vec::new());
        // an empty run is a coverage failure
        prop_assert_eq!(r.failures, fails + usize::from(checks.is_empty()));
        let pass = fails == 0 && !checks.is_empty();
        prop_assert_eq!(r.verdict == Verdict::Pass, pass);
    }
}

/// Set-valued functors on fixture categories, from presheaves on the opposite.
fn setvalued(i: usize, k: usize) -> Option<HandleFunctor> {
    let (c, _) = &pool()[i];
    let op = c.opposite();
    let ps = enumerate_presheaves(&op, 2, 1 << 17).unwrap();
    let finset = ComputationalCategory::finset(3, Budget::SMALL).unwrap();
    HandleFunctor::from_copresheaf("p", c, &finset, &ps[k % ps.len()]).ok()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn adjunction_bijections_are_inverse(i in 0usize..10, k in 0usize..10_000, h in any::<prop::sample::Index>(), z in 0usize..3) {
        let Some(p) = setvalued(i, k) else { return Ok(()) };
        let ps = &pool()[i].1;
        let hh = &ps[h.index(ps.len())];
        let target = Presheaf::set_of_size(z);
        let ext = tilde_extend(&p, hh).unwrap();
        let hp = right_adjoint_hp(&p, &target).unwrap();
        let b = adjunction_phi(&p, &ext, &hp).unwrap();
        prop_assert!(b.mutually_inverse());
    }

    /// Cofiltered elements imply a bounded verified verdict; a counterexample
    /// implies elements that are not cofiltered.
    #[test]
    fn flatness_criteria_agree_one_way(i in 0usize..10, k in 0usize..10_000) {
        let Some(p) = setvalued(i, k) else { return Ok(()) };
        let elementary = is_flat_setvalued(&p).unwrap().holds;
        let bounded = is_flat_bounded(&p, &Budget::SMALL).unwrap();
        if elementary {
            prop_assert!(!bounded.is_counterexample());
        }
        if bounded.is_counterexample() {
            prop_assert!(!elementary);
        }
    }

    #[test]
    fn corpus_generation_is_deterministic(seed in any::<u64>()) {
        let b = Bounds { random_presheaves: 2, ..Bounds::default() };
        prop_assert_eq!(corpus_generate(seed, b).unwrap().digest(), corpus_generate(seed, b).unwrap().digest());
    }
}

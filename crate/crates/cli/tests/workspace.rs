use std::path::PathBuf;

use finitopos::handle::Budget;
use finitopos::verify::{corpus_generate, fixtures, Bounds};
use finitopos_cli::{parse_workspace, Workspace};

fn fixture_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/corpus.ws")
}

#[test]
fn fixture_file_is_the_builtin_corpus() {
    let ws = parse_workspace(&fixture_path(), Budget::DEFAULT).unwrap();
    assert_eq!(ws, Workspace::builtin(Budget::DEFAULT).unwrap());

    let fx = fixtures(&Bounds::default()).unwrap();
    let m = &ws.model;
    assert_eq!(m.categories, fx.categories);
    assert_eq!(m.sites, fx.sites);
    let names = |v: &[finitopos::verify::NamedFunctor]| {
        v.iter().map(|f| f.name().to_string()).collect::<Vec<_>>()
    };
    assert_eq!(names(&m.functors), names(&fx.functors));
    assert_eq!(names(&m.controls), names(&fx.controls));
    let corpus_presheaves = m.fixtures().presheaves;
    assert_eq!(corpus_presheaves.len(), fx.presheaves.len());
    for (a, b) in corpus_presheaves.iter().zip(&fx.presheaves) {
        assert_eq!((&a.name, &a.presheaf), (&b.name, &b.presheaf));
    }
    for (a, b) in m
        .functors
        .iter()
        .chain(&m.controls)
        .zip(fx.functors.iter().chain(&fx.controls))
    {
        assert_eq!(a.functor.objects(), b.functor.objects(), "{}", a.name());
        assert_eq!(a.functor.morphisms(), b.functor.morphisms(), "{}", a.name());
        assert_eq!(a.site, b.site);
    }
}

#[test]
fn fixture_corpus_digest_matches_generation() {
    let ws = parse_workspace(&fixture_path(), Budget::DEFAULT).unwrap();
    for seed in [0, 7] {
        let from_file = ws.model.corpus(seed).unwrap();
        let generated = corpus_generate(seed, Bounds::default()).unwrap();
        assert_eq!(from_file.digest(), generated.digest(), "seed {seed}");
    }
}

#[test]
fn fixture_file_round_trips() {
    let text = std::fs::read_to_string(fixture_path()).unwrap();
    let ws = Workspace::parse(&text, Budget::DEFAULT).unwrap();
    let printed = ws.print();
    let again = Workspace::parse(&printed, Budget::DEFAULT).unwrap();
    assert_eq!(ws, again);
    assert_eq!(printed, again.print());
}

#[test]
fn edited_workspace_reports_located_errors() {
    let text = std::fs::read_to_string(fixture_path()).unwrap();
    let broken = text.replace("presheaf arrow_pq on 2", "presheaf arrow_pq on 3");
    let line = broken
        .lines()
        .position(|l| l == "presheaf arrow_pq on 3")
        .unwrap()
        + 1;
    let errors = Workspace::parse(&broken, Budget::DEFAULT).unwrap_err();
    assert_eq!(errors.len(), 1, "{errors:?}");
    assert_eq!(errors[0].line, line);
    assert_eq!(errors[0].entity, "arrow_pq");
    assert!(errors[0].reason.contains("unknown category `3`"));
}

mod round_trip {
    use finitopos::fincat::FinCategory;
    use finitopos::handle::{Budget, ComputationalCategory, HandleFunctor};
    use finitopos::presheaf::enumerate_presheaves;
    use finitopos::site::Site;
    use finitopos::verify::{Bounds, Fixtures, NamedFunctor, NamedPresheaf};
    use finitopos_cli::Workspace;
    use proptest::prelude::*;

    fn poset(n: usize, bits: u32) -> FinCategory {
        let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
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
        FinCategory::poset("c", &refs, &leq)
    }

    proptest! {
        #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

        #[test]
        fn random_workspaces_round_trip(n in 1usize..=4, bits in 0u32..64, k in any::<prop::sample::Index>(), j in any::<prop::sample::Index>()) {
            let c = poset(n, bits);
            let ps = enumerate_presheaves(&c, 2, 1 << 17).unwrap();
            let p = ps[k.index(ps.len())].clone();
            let finset = ComputationalCategory::finset(2, Budget::SMALL).unwrap();
            let ops = enumerate_presheaves(&c.opposite(), 2, 1 << 17).unwrap();
            let q = HandleFunctor::from_copresheaf("q", &c, &finset, &ops[j.index(ops.len())]).unwrap();
            let psh = ComputationalCategory::presheaf_category(&c, 2, Budget::SMALL).unwrap();
            let point = FinCategory::terminal();
            let at = HandleFunctor::new("at", &point, &psh, vec![p.clone()], vec![finitopos::presheaf::PresheafMorphism::identity(&p)]).unwrap();
            let fixtures = Fixtures {
                categories: vec![point, c.clone()],
                presheaves: vec![NamedPresheaf { name: "p".into(), presheaf: p }],
                sites: vec![Site::trivial(&c).unwrap()],
                functors: vec![NamedFunctor { functor: q, site: Some("trivial(c)".into()) }],
                controls: vec![NamedFunctor { functor: at, site: None }],
            };
            let ws = Workspace::from_fixtures(Bounds::default(), &fixtures, Budget::SMALL).unwrap();
            let again = Workspace::parse(&ws.print(), Budget::SMALL).unwrap();
            prop_assert_eq!(&ws, &again);
            prop_assert_eq!(&again.model.categories, &fixtures.categories);
            prop_assert_eq!(again.model.functor("q").unwrap().functor.objects(), fixtures.functors[0].functor.objects());
        }
    }
}

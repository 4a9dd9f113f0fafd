use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fincat::{FinCategory, ObjId};
use crate::handle::{Budget, ComputationalCategory, HandleFunctor};
use crate::presheaf::{enumerate_presheaves, yoneda_embed, Presheaf, PresheafMorphism};
use crate::site::Site;

/// Size limits for generated corpora.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Bounds {
    /// value bound of the exhaustive presheaf enumerations
    pub presheaf_bound: usize,
    /// value bound of sampled presheaves
    pub sample_bound: usize,
    /// value bound of the codomain handles
    pub handle_bound: usize,
    /// seeded random posets added to the fixture categories
    pub random_categories: usize,
    /// seeded random presheaves per category
    pub random_presheaves: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Self {
            presheaf_bound: 3,
            sample_bound: 2,
            handle_bound: 3,
            random_categories: 2,
            random_presheaves: 4,
        }
    }
}

pub const MAX_OBJECTS: usize = 4;
pub const MAX_PRESHEAF_BOUND: usize = 3;
pub const MAX_RANDOM: usize = 16;

impl Bounds {
    pub fn check(&self) -> Result<()> {
        let bad = |what: &str, v: usize, max: usize| {
            Err(Error::contract(format!(
                "corpus bound `{what}` is {v}, the limit is {max}"
            )))
        };
        if self.presheaf_bound == 0 || self.presheaf_bound > MAX_PRESHEAF_BOUND {
            return bad("presheaf_bound", self.presheaf_bound, MAX_PRESHEAF_BOUND);
        }
        if self.sample_bound == 0 || self.sample_bound > self.presheaf_bound {
            return bad("sample_bound", self.sample_bound, self.presheaf_bound);
        }
        if self.handle_bound == 0 || self.handle_bound > MAX_PRESHEAF_BOUND {
            return bad("handle_bound", self.handle_bound, MAX_PRESHEAF_BOUND);
        }
        if self.random_categories > MAX_RANDOM {
            return bad("random_categories", self.random_categories, MAX_RANDOM);
        }
        if self.random_presheaves > MAX_RANDOM {
            return bad("random_presheaves", self.random_presheaves, MAX_RANDOM);
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct NamedPresheaf {
    pub name: String,
    pub presheaf: Presheaf,
}

/// A functor with the site on its domain it is meant to be continuous for.
#[derive(Clone, Debug)]
pub struct NamedFunctor {
    pub functor: HandleFunctor,
    pub site: Option<String>,
}

impl NamedFunctor {
    pub fn name(&self) -> &str {
        self.functor.name()
    }
}

/// Inputs shared by the theorem suites.
#[derive(Clone, Debug)]
pub struct Corpus {
    pub seed: u64,
    pub bounds: Bounds,
    pub categories: Vec<FinCategory>,
    pub presheaves: Vec<NamedPresheaf>,
    pub sites: Vec<Site>,
    pub functors: Vec<NamedFunctor>,
    /// deliberately broken or non-flat inputs for the negative controls
    pub controls: Vec<NamedFunctor>,
}

/// Derives an independent generator for `tag` from the corpus seed.
pub fn rng_for(seed: u64, tag: &str) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(tag.as_bytes());
    let d = h.finalize();
    let mut bytes = [0u8; 32];
    bytes.copy_from_slice(&d);
    ChaCha8Rng::from_seed(bytes)
}

/// `n` presheaves drawn without replacement from the enumeration at `bound`,
/// in enumeration order.
pub fn sample_presheaves(
    c: &FinCategory,
    bound: usize,
    n: usize,
    rng: &mut ChaCha8Rng,
    cap: usize,
) -> Result<Vec<Presheaf>> {
    let all = enumerate_presheaves(c, bound, cap)?;
    if all.len() <= n {
        return Ok(all);
    }
    let mut idx = sample(rng, all.len(), n).into_vec();
    idx.sort_unstable();
    Ok(idx.into_iter().map(|i| all[i].clone()).collect())
}

// ---- fixture categories ----------------------------------------------------

pub fn opens2() -> FinCategory {
    FinCategory::poset(
        "opens2",
        &["0", "a", "b", "ab"],
        &[("0", "a"), ("0", "b"), ("a", "ab"), ("b", "ab")],
    )
}

pub fn cospan() -> FinCategory {
    FinCategory::poset("cospan", &["a", "b", "c"], &[("a", "c"), ("b", "c")])
}

pub fn z2() -> FinCategory {
    FinCategory::monoid("z2", &["e", "s"], &[vec![0, 1], vec![1, 0]]).expect("group table")
}

pub fn idempotent() -> FinCategory {
    FinCategory::monoid("idem", &["e", "k"], &[vec![0, 1], vec![1, 1]]).expect("monoid table")
}

/// Named categories with at most four objects.
pub fn fixture_categories() -> Vec<FinCategory> {
    vec![
        FinCategory::terminal(),
        FinCategory::walking_arrow(),
        FinCategory::chain(3),
        FinCategory::chain(4),
        FinCategory::discrete("d2", &["a", "b"]),
        FinCategory::parallel_pair(),
        opens2(),
        cospan(),
        z2(),
        idempotent(),
    ]
}

/// Open-cover sites of the two-point discrete space, the Sierpiński space and
/// the three-point space with opens `∅ ⊂ {0} ⊂ {0,1} ⊂ X`, plus trivial sites.
pub fn fixture_sites() -> Vec<Site> {
    let sites = [
        Site::from_names(
            "opens2",
            &opens2(),
            &[("0", &[]), ("ab", &["a<=ab", "b<=ab"])],
        ),
        Site::from_names("sierpinski", &FinCategory::chain(3), &[("0", &[])]),
        Site::from_names("opens3", &FinCategory::chain(4), &[("0", &[])]),
        Site::trivial(&FinCategory::walking_arrow()),
    ];
    sites
        .into_iter()
        .map(|s| s.expect("fixture site"))
        .collect()
}

fn fixture_presheaves() -> Vec<NamedPresheaf> {
    let named = |name: &str, p: Result<Presheaf>| NamedPresheaf {
        name: name.into(),
        presheaf: p.expect("fixture presheaf"),
    };
    vec![
        named(
            "arrow_pq",
            Presheaf::from_names(
                &FinCategory::walking_arrow(),
                &[("0", &["p", "q"]), ("1", &["r"])],
                &[("f", &[("r", "q")])],
            ),
        ),
        named(
            "opens2_pairs",
            Presheaf::from_names(
                &opens2(),
                &[
                    ("0", &["*"]),
                    ("a", &["x", "y"]),
                    ("b", &["u"]),
                    ("ab", &["xu", "yu"]),
                ],
                &[
                    ("0<=a", &[("x", "*"), ("y", "*")]),
                    ("0<=b", &[("u", "*")]),
                    ("a<=ab", &[("xu", "x"), ("yu", "y")]),
                    ("b<=ab", &[("xu", "u"), ("yu", "u")]),
                    ("0<=ab", &[("xu", "*"), ("yu", "*")]),
                ],
            ),
        ),
        named(
            "z2_regular",
            Presheaf::from_names(
                &z2(),
                &[("*", &["e", "s"])],
                &[("s", &[("e", "s"), ("s", "e")])],
            ),
        ),
        named(
            "idem_retract",
            Presheaf::from_names(
                &idempotent(),
                &[("*", &["x", "y"])],
                &[("k", &[("x", "x"), ("y", "x")])],
            ),
        ),
    ]
}

// ---- fixture functors ------------------------------------------------------

/// The set-valued functor that is a point on `members` (an up-set) and empty
/// elsewhere.
pub fn indicator(
    name: &str,
    c: &FinCategory,
    z: &ComputationalCategory,
    members: &[&str],
) -> Result<HandleFunctor> {
    let star: &[&str] = &["*"];
    let none: &[&str] = &[];
    let names: Vec<String> = c.objects().map(|x| c.object_name(x).to_string()).collect();
    let values: Vec<(&str, &[&str])> = names
        .iter()
        .map(|n| {
            (
                n.as_str(),
                if members.contains(&n.as_str()) {
                    star
                } else {
                    none
                },
            )
        })
        .collect();
    let mors: Vec<String> = c
        .non_identity_morphisms()
        .filter(|&f| members.contains(&c.object_name(c.src(f))))
        .map(|f| c.morphism_name(f).to_string())
        .collect();
    let pair: &[(&str, &str)] = &[("*", "*")];
    let maps: Vec<(&str, &[(&str, &str)])> = mors.iter().map(|m| (m.as_str(), pair)).collect();
    HandleFunctor::set_valued(name, c, z, &values, &maps)
}

/// The constant functor on a set of `n` elements.
pub fn constant(
    name: &str,
    c: &FinCategory,
    z: &ComputationalCategory,
    n: usize,
) -> Result<HandleFunctor> {
    let elems: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
    let refs: Vec<&str> = elems.iter().map(String::as_str).collect();
    let names: Vec<String> = c.objects().map(|x| c.object_name(x).to_string()).collect();
    let values: Vec<(&str, &[&str])> = names
        .iter()
        .map(|x| (x.as_str(), refs.as_slice()))
        .collect();
    let ids: Vec<(&str, &str)> = refs.iter().map(|e| (*e, *e)).collect();
    let mors: Vec<String> = c
        .non_identity_morphisms()
        .map(|f| c.morphism_name(f).to_string())
        .collect();
    let maps: Vec<(&str, &[(&str, &str)])> =
        mors.iter().map(|m| (m.as_str(), ids.as_slice())).collect();
    HandleFunctor::set_valued(name, c, z, &values, &maps)
}

fn up(c: &FinCategory, x: &str) -> Vec<String> {
    let x = c.object_id(x).expect("object");
    c.objects()
        .filter(|&y| !c.hom(x, y).is_empty())
        .map(|y| c.object_name(y).to_string())
        .collect()
}

fn representable(
    name: &str,
    c: &FinCategory,
    z: &ComputationalCategory,
    x: &str,
) -> Result<HandleFunctor> {
    let members = up(c, x);
    let refs: Vec<&str> = members.iter().map(String::as_str).collect();
    indicator(name, c, z, &refs)
}

fn fixture_functors(
    bounds: &Bounds,
    sites: &[Site],
) -> Result<(Vec<NamedFunctor>, Vec<NamedFunctor>)> {
    let finset = ComputationalCategory::finset(bounds.handle_bound, Budget::DEFAULT)?;
    let arrow = FinCategory::walking_arrow();
    let psh_arrow =
        ComputationalCategory::presheaf_category(&arrow, bounds.handle_bound, Budget::DEFAULT)?;
    let one = FinCategory::terminal();
    let chain3 = FinCategory::chain(3);
    let chain4 = FinCategory::chain(4);
    let o2 = opens2();
    let plain = |f: HandleFunctor| NamedFunctor {
        functor: f,
        site: None,
    };
    let on = |f: HandleFunctor, s: &str| NamedFunctor {
        functor: f,
        site: Some(s.to_string()),
    };

    let mut fs = vec![
        plain(HandleFunctor::set_valued(
            "point_one",
            &one,
            &finset,
            &[("*", &["u"])],
            &[],
        )?),
        plain(HandleFunctor::set_valued(
            "point_two",
            &one,
            &finset,
            &[("*", &["u", "v"])],
            &[],
        )?),
        on(
            representable("arrow_from_0", &arrow, &finset, "0")?,
            "trivial(2)",
        ),
        plain(representable("arrow_from_1", &arrow, &finset, "1")?),
        plain(HandleFunctor::set_valued(
            "arrow_collapse",
            &arrow,
            &finset,
            &[("0", &["x", "y"]), ("1", &["u"])],
            &[("f", &[("x", "u"), ("y", "u")])],
        )?),
        plain(representable("chain3_from_0", &chain3, &finset, "0")?),
        on(
            representable("chain3_from_1", &chain3, &finset, "1")?,
            "sierpinski",
        ),
        on(
            representable("chain3_from_2", &chain3, &finset, "2")?,
            "sierpinski",
        ),
        on(
            representable("chain4_from_1", &chain4, &finset, "1")?,
            "opens3",
        ),
        on(
            representable("chain4_from_2", &chain4, &finset, "2")?,
            "opens3",
        ),
        on(
            representable("chain4_from_3", &chain4, &finset, "3")?,
            "opens3",
        ),
        on(
            indicator("opens2_point_a", &o2, &finset, &["a", "ab"])?,
            "opens2",
        ),
        on(
            indicator("opens2_point_b", &o2, &finset, &["b", "ab"])?,
            "opens2",
        ),
        plain(representable("opens2_from_0", &o2, &finset, "0")?),
        plain(representable("opens2_from_ab", &o2, &finset, "ab")?),
        plain(HandleFunctor::set_valued(
            "z2_regular",
            &z2(),
            &finset,
            &[("*", &["e", "s"])],
            &[("s", &[("e", "s"), ("s", "e")])],
        )?),
        plain(HandleFunctor::set_valued(
            "z2_trivial",
            &z2(),
            &finset,
            &[("*", &["u"])],
            &[("s", &[("u", "u")])],
        )?),
        on(
            HandleFunctor::yoneda(&psh_arrow)?.with_name("yoneda_arrow"),
            "trivial(2)",
        ),
    ];
    let pq = Presheaf::from_names(
        &arrow,
        &[("0", &["p", "q"]), ("1", &["r"])],
        &[("f", &[("r", "q")])],
    )?;
    fs.push(plain(HandleFunctor::new(
        "point_to_arrow",
        &one,
        &psh_arrow,
        vec![pq.clone()],
        vec![PresheafMorphism::identity(&pq)],
    )?));
    let t = Presheaf::terminal(&arrow);
    let ids = vec![PresheafMorphism::identity(&t); 3];
    fs.push(plain(HandleFunctor::new(
        "arrow_to_terminal",
        &arrow,
        &psh_arrow,
        vec![t.clone(), t],
        ids,
    )?));
    for s in sites {
        let bound = bounds.handle_bound.min(2);
        let z = ComputationalCategory::sheaf_category(s, bound, Budget::DEFAULT)?;
        let eps = HandleFunctor::epsilon(&z)?.with_name(&format!("eps_{}", s.name()));
        fs.push(on(eps, s.name()));
    }

    let controls = vec![
        plain(constant("chain3_const2", &chain3, &finset, 2)?),
        plain(constant(
            "d2_const1",
            &FinCategory::discrete("d2", &["a", "b"]),
            &finset,
            1,
        )?),
        plain(HandleFunctor::set_valued(
            "arrow_empty",
            &arrow,
            &finset,
            &[("0", &[]), ("1", &[])],
            &[],
        )?),
        on(constant("opens2_const1", &o2, &finset, 1)?, "opens2"),
    ];
    Ok((fs, controls))
}

fn random_poset(rng: &mut ChaCha8Rng, k: usize) -> FinCategory {
    let n = rng.gen_range(3..=MAX_OBJECTS);
    let names: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut leq = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(0.4) {
                leq.push((refs[i], refs[j]));
            }
        }
    }
    FinCategory::poset(&format!("poset_r{k}"), &refs, &leq)
}

/// Named members of a corpus before seeded additions.
#[derive(Clone, Debug)]
pub struct Fixtures {
    pub categories: Vec<FinCategory>,
    pub presheaves: Vec<NamedPresheaf>,
    pub sites: Vec<Site>,
    pub functors: Vec<NamedFunctor>,
    pub controls: Vec<NamedFunctor>,
}

pub fn fixtures(bounds: &Bounds) -> Result<Fixtures> {
    bounds.check()?;
    let sites = fixture_sites();
    let (functors, controls) = fixture_functors(bounds, &sites)?;
    Ok(Fixtures {
        categories: fixture_categories(),
        presheaves: fixture_presheaves(),
        sites,
        functors,
        controls,
    })
}

/// Adds seeded random posets and, on every category, seeded random presheaves.
pub fn corpus_from_fixtures(seed: u64, bounds: Bounds, fixtures: Fixtures) -> Result<Corpus> {
    bounds.check()?;
    let Fixtures {
        mut categories,
        mut presheaves,
        sites,
        functors,
        controls,
    } = fixtures;
    let mut rng = rng_for(seed, "categories");
    for k in 0..bounds.random_categories {
        categories.push(random_poset(&mut rng, k));
    }
    for c in &categories {
        let mut rng = rng_for(seed, &format!("presheaves/{}", c.name()));
        let ps = sample_presheaves(
            c,
            bounds.sample_bound,
            bounds.random_presheaves,
            &mut rng,
            Budget::DEFAULT.object_cap,
        )?;
        for (i, p) in ps.into_iter().enumerate() {
            presheaves.push(NamedPresheaf {
                name: format!("{}_r{i}", c.name()),
                presheaf: p,
            });
        }
    }
    Ok(Corpus {
        seed,
        bounds,
        categories,
        presheaves,
        sites,
        functors,
        controls,
    })
}

/// Fixtures plus seeded random posets and presheaves. Deterministic per
/// `(seed, bounds)`.
pub fn corpus_generate(seed: u64, bounds: Bounds) -> Result<Corpus> {
    corpus_from_fixtures(seed, bounds, fixtures(&bounds)?)
}

impl Corpus {
    pub fn site(&self, name: &str) -> Option<&Site> {
        self.sites.iter().find(|s| s.name() == name)
    }

    pub fn functor(&self, name: &str) -> Option<&NamedFunctor> {
        self.functors
            .iter()
            .chain(&self.controls)
            .find(|f| f.name() == name)
    }

    pub fn category(&self, name: &str) -> Option<&FinCategory> {
        self.categories.iter().find(|c| c.name() == name)
    }

    /// Site a functor is declared continuous for. `trivial(C)` names the
    /// trivial site on the functor's domain.
    pub fn site_of(&self, f: &NamedFunctor) -> Result<Option<Site>> {
        match f.site.as_deref() {
            None => Ok(None),
            Some(s) if s.starts_with("trivial(") => Ok(Some(
                self.site(s)
                    .cloned()
                    .map_or_else(|| Site::trivial(f.functor.dom()), Ok)?,
            )),
            Some(s) => self
                .site(s)
                .cloned()
                .map(Some)
                .ok_or_else(|| Error::Unknown {
                    kind: "site",
                    name: s.to_string(),
                }),
        }
    }

    /// Sha-256 over a canonical rendering of every member.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!("seed {} bounds {:?}\n", self.seed, self.bounds));
        for c in &self.categories {
            h.update(format!("category {:?}\n", c.to_data()));
        }
        for p in &self.presheaves {
            h.update(format!(
                "presheaf {} {} {:?} {:?}\n",
                p.name,
                p.presheaf.base().name(),
                p.presheaf.all_labels(),
                p.presheaf.actions()
            ));
        }
        for s in &self.sites {
            let covers: Vec<String> = s.covers().iter().map(|c| format!("{c:?}")).collect();
            h.update(format!(
                "site {} {} {:?}\n",
                s.name(),
                s.base().name(),
                covers
            ));
        }
        for f in self.functors.iter().chain(&self.controls) {
            let p = &f.functor;
            let objs: Vec<(Vec<usize>, &[Vec<usize>])> = p
                .objects()
                .iter()
                .map(|o| (o.sizes(), o.actions()))
                .collect();
            let mors: Vec<String> = p.morphisms().iter().map(|m| m.signature()).collect();
            h.update(format!(
                "functor {} {} {} {:?} {:?} {:?}\n",
                p.name(),
                p.dom().name(),
                p.cod().name(),
                f.site,
                objs,
                mors
            ));
        }
        hex::encode(h.finalize())
    }

    /// Representables of `c` followed by the corpus presheaves on `c`.
    pub fn presheaves_on(&self, c: &FinCategory) -> Result<Vec<Presheaf>> {
        let mut out: Vec<Presheaf> = c
            .objects()
            .map(|x| yoneda_embed(c, x))
            .collect::<Result<_>>()?;
        out.push(Presheaf::initial(c));
        out.extend(
            self.presheaves
                .iter()
                .filter(|p| p.presheaf.base() == c)
                .map(|p| p.presheaf.clone()),
        );
        Ok(out)
    }
}

/// Objects of `c` by name, for witnesses.
pub fn object_names(c: &FinCategory) -> Vec<String> {
    c.objects()
        .map(|x: ObjId| c.object_name(x).to_string())
        .collect()
}

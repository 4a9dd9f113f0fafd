//! Strict epimorphic families, checked element-wise against test objects.

use std::collections::HashMap;
use std::hash::Hash;

use serde::Serialize;

use super::sieve::check_base;
use super::topology::{generate_topology, Cover, Site};
use crate::error::{Error, Result};
use crate::fincat::{shapes, universal_cone_search, FinCategory, MorId, ObjId};
use crate::presheaf::yoneda_embed;
use crate::site::{is_sheaf, is_sheaf_coverform};

/// A category whose hom-sets can be enumerated.
pub trait HomSets {
    type Obj: Clone;
    type Mor: Clone + Eq + Hash;

    /// Objects `T` against which factorizations are tested.
    fn test_objects(&self) -> Result<Vec<Self::Obj>>;
    /// Objects `W` whose maps detect equality of parallel morphisms.
    fn generators(&self) -> Result<Vec<Self::Obj>>;
    fn hom(&self, a: &Self::Obj, b: &Self::Obj) -> Result<Vec<Self::Mor>>;
    /// `g ∘ f`
    fn compose(&self, g: &Self::Mor, f: &Self::Mor) -> Self::Mor;
    fn source(&self, f: &Self::Mor) -> Self::Obj;
    fn describe_obj(&self, a: &Self::Obj) -> String;
    fn describe_mor(&self, f: &Self::Mor) -> String;
}

impl HomSets for FinCategory {
    type Obj = ObjId;
    type Mor = MorId;

    fn test_objects(&self) -> Result<Vec<ObjId>> {
        Ok(self.objects().collect())
    }

    fn generators(&self) -> Result<Vec<ObjId>> {
        Ok(self.objects().collect())
    }

    fn hom(&self, a: &ObjId, b: &ObjId) -> Result<Vec<MorId>> {
        Ok(FinCategory::hom(self, *a, *b).to_vec())
    }

    fn compose(&self, g: &MorId, f: &MorId) -> MorId {
        self.comp(*g, *f)
    }

    fn source(&self, f: &MorId) -> ObjId {
        self.src(*f)
    }

    fn describe_obj(&self, a: &ObjId) -> String {
        self.object_name(*a).to_string()
    }

    fn describe_mor(&self, f: &MorId) -> String {
        self.morphism_name(*f).to_string()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StrictEpiFailure {
    /// A compatible family `x_i: U_i → T` that factors through no `X → T`.
    NotFactorable {
        test_object: String,
        family: Vec<String>,
    },
    /// Two different maps `X → T` with the same restrictions.
    NotUnique {
        test_object: String,
        maps: (String, String),
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StrictEpi {
    pub holds: bool,
    pub witness: Option<StrictEpiFailure>,
}

/// Compatible families are maps `x_i: U_i → T` with `x_i y = x_j z` whenever
/// `f_i y = f_j z` for `y, z` out of a generator. The family `f_i: U_i → X` is
/// strict epimorphic when restriction along it is a bijection from `[X, T]`
/// onto compatible families, for every test object `T`.
pub fn is_strict_epi_family<Z: HomSets>(
    z: &Z,
    target: &Z::Obj,
    family: &[Z::Mor],
) -> Result<StrictEpi> {
    let sources: Vec<Z::Obj> = family.iter().map(|f| z.source(f)).collect();
    let k = family.len();
    // (i, y, j, w) with f_i y = f_j w, attached to max(i, j)
    let mut spans: Vec<Vec<(usize, Z::Mor, usize, Z::Mor)>> = vec![Vec::new(); k];
    for w in z.generators()? {
        let outs: Vec<Vec<Z::Mor>> = sources
            .iter()
            .map(|u| z.hom(&w, u))
            .collect::<Result<_>>()?;
        for i in 0..k {
            for j in 0..=i {
                for y in &outs[i] {
                    let fy = z.compose(&family[i], y);
                    for v in &outs[j] {
                        if (i != j || y != v) && fz_eq(z, &family[j], v, &fy) {
                            spans[i].push((i, y.clone(), j, v.clone()));
                        }
                    }
                }
            }
        }
    }
    for t in z.test_objects()? {
        let homs: Vec<Vec<Z::Mor>> = sources
            .iter()
            .map(|u| z.hom(u, &t))
            .collect::<Result<_>>()?;
        let from_x = z.hom(target, &t)?;
        let mut restrictions: HashMap<Vec<Z::Mor>, usize> = HashMap::new();
        for (n, x) in from_x.iter().enumerate() {
            let r: Vec<Z::Mor> = family.iter().map(|f| z.compose(x, f)).collect();
            if let Some(prev) = restrictions.insert(r, n) {
                return Ok(StrictEpi {
                    holds: false,
                    witness: Some(StrictEpiFailure::NotUnique {
                        test_object: z.describe_obj(&t),
                        maps: (z.describe_mor(&from_x[prev]), z.describe_mor(x)),
                    }),
                });
            }
        }
        let mut choice: Vec<usize> = vec![0; k];
        let mut missing: Option<Vec<Z::Mor>> = None;
        compat_rec(z, 0, &homs, &spans, &mut choice, &mut |fam| {
            if restrictions.contains_key(fam) {
                true
            } else {
                missing = Some(fam.to_vec());
                false
            }
        });
        if let Some(fam) = missing {
            return Ok(StrictEpi {
                holds: false,
                witness: Some(StrictEpiFailure::NotFactorable {
                    test_object: z.describe_obj(&t),
                    family: fam.iter().map(|m| z.describe_mor(m)).collect(),
                }),
            });
        }
    }
    Ok(StrictEpi {
        holds: true,
        witness: None,
    })
}

fn fz_eq<Z: HomSets>(z: &Z, f: &Z::Mor, v: &Z::Mor, fy: &Z::Mor) -> bool {
    &z.compose(f, v) == fy
}

/// Visits compatible families until `visit` returns false.
fn compat_rec<Z: HomSets>(
    z: &Z,
    i: usize,
    homs: &[Vec<Z::Mor>],
    spans: &[Vec<(usize, Z::Mor, usize, Z::Mor)>],
    choice: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[Z::Mor]) -> bool,
) -> bool {
    if i == choice.len() {
        let fam: Vec<Z::Mor> = choice
            .iter()
            .enumerate()
            .map(|(j, c)| homs[j][*c].clone())
            .collect();
        return visit(&fam);
    }
    for c in 0..homs[i].len() {
        choice[i] = c;
        let ok = spans[i].iter().all(|(a, y, b, w)| {
            z.compose(&homs[*a][choice[*a]], y) == z.compose(&homs[*b][choice[*b]], w)
        });
        if ok && !compat_rec(z, i + 1, homs, spans, choice, visit) {
            return false;
        }
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UniversalStrictEpi {
    pub holds: bool,
    /// base change along `along` that is not strict epimorphic
    pub failure: Option<(String, StrictEpiFailure)>,
    /// `(along, member)` for which no pullback exists in the category
    pub pullback_gaps: Vec<(String, String)>,
}

/// Strict epimorphic after every base change that exists; missing pullbacks
/// are listed separately and do not count as failures.
pub fn is_universal_strict_epi(
    c: &FinCategory,
    target: ObjId,
    family: &[MorId],
) -> Result<UniversalStrictEpi> {
    let mut gaps = Vec::new();
    for g in c.arrows_into(target) {
        let mut pulled = Vec::with_capacity(family.len());
        let mut complete = true;
        for &f in family {
            match universal_cone_search(&shapes::cospan_of(c, f, g)) {
                Some(cone) => pulled.push(cone.legs[1]),
                None => {
                    complete = false;
                    gaps.push((
                        c.morphism_name(g).to_string(),
                        c.morphism_name(f).to_string(),
                    ));
                }
            }
        }
        if !complete {
            continue;
        }
        let v = is_strict_epi_family(c, &c.src(g), &pulled)?;
        if let Some(w) = v.witness {
            return Ok(UniversalStrictEpi {
                holds: false,
                failure: Some((c.morphism_name(g).to_string(), w)),
                pullback_gaps: gaps,
            });
        }
    }
    Ok(UniversalStrictEpi {
        holds: true,
        failure: None,
        pullback_gaps: gaps,
    })
}

/// Families examined per object by [`canonical_pretopology`] past which it stops.
pub const FAMILY_SCAN_CAP: usize = 1 << 16;

/// All universal strict epimorphic families of at most `max_size` members
/// (as sets of arrows), skipping families with pullback gaps.
pub fn canonical_pretopology(c: &FinCategory, max_size: usize) -> Result<Vec<Cover>> {
    check_base(c)?;
    let mut out = Vec::new();
    for x in c.objects() {
        let arrows = c.arrows_into(x);
        let mut scanned = 0usize;
        let mut subset: Vec<usize> = Vec::new();
        let mut result: Result<()> = Ok(());
        subsets(arrows.len(), max_size, 0, &mut subset, &mut |s| {
            scanned += 1;
            if scanned > FAMILY_SCAN_CAP {
                result = Err(Error::budget(
                    format!("scanning families into `{}`", c.object_name(x)),
                    FAMILY_SCAN_CAP,
                ));
                return false;
            }
            let fam: Vec<MorId> = s.iter().map(|i| arrows[*i]).collect();
            match is_universal_strict_epi(c, x, &fam) {
                Ok(v) => {
                    if v.holds && v.pullback_gaps.is_empty() {
                        out.push(Cover {
                            target: x,
                            arrows: fam,
                        });
                    }
                    true
                }
                Err(e) => {
                    result = Err(e);
                    false
                }
            }
        });
        result?;
    }
    Ok(out)
}

fn subsets(
    n: usize,
    max: usize,
    start: usize,
    cur: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]) -> bool,
) -> bool {
    if !visit(cur) {
        return false;
    }
    if cur.len() == max {
        return true;
    }
    for i in start..n {
        cur.push(i);
        let go_on = subsets(n, max, i + 1, cur, visit);
        cur.pop();
        if !go_on {
            return false;
        }
    }
    true
}

/// The site of [`canonical_pretopology`].
pub fn canonical_site(c: &FinCategory, max_size: usize) -> Result<Site> {
    generate_topology(
        &format!("canonical({})", c.name()),
        c,
        canonical_pretopology(c, max_size)?,
    )
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Subcanonicity {
    pub holds: bool,
    /// every declared cover is strict epimorphic in the base
    pub covers_strict_epi: bool,
    /// every representable passes the sheaf condition
    pub representables_are_sheaves: bool,
    pub witness: Option<String>,
}

/// Both criteria are computed; they agree on sites whose covers form a coverage.
pub fn is_subcanonical(site: &Site) -> Result<Subcanonicity> {
    let c = site.base();
    let mut witness = None;
    let mut covers_strict_epi = true;
    for cover in site.covers() {
        let v = is_strict_epi_family(c, &cover.target, &cover.arrows)?;
        if let Some(w) = v.witness {
            covers_strict_epi = false;
            let names: Vec<&str> = cover.arrows.iter().map(|m| c.morphism_name(*m)).collect();
            witness = Some(format!(
                "cover {{{}}} of `{}`: {w:?}",
                names.join(", "),
                c.object_name(cover.target)
            ));
            break;
        }
    }
    let mut representables_are_sheaves = true;
    for x in c.objects() {
        let h = yoneda_embed(c, x)?;
        let sieve_form = is_sheaf(&h, site)?;
        let cover_form = is_sheaf_coverform(&h, site)?;
        if !sieve_form.holds || !cover_form.holds {
            representables_are_sheaves = false;
            if witness.is_none() {
                witness = Some(format!(
                    "h_{} is not a sheaf: {:?}",
                    c.object_name(x),
                    sieve_form.witness.or(cover_form.witness)
                ));
            }
            break;
        }
    }
    Ok(Subcanonicity {
        holds: covers_strict_epi && representables_are_sheaves,
        covers_strict_epi,
        representables_are_sheaves,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opens2() -> Site {
        let c = FinCategory::poset(
            "opens2",
            &["0", "a", "b", "ab"],
            &[("0", "a"), ("0", "b"), ("a", "ab"), ("b", "ab")],
        );
        Site::from_names("opens2", &c, &[("0", &[]), ("ab", &["a<=ab", "b<=ab"])]).unwrap()
    }

    #[test]
    fn identity_family_is_strict_epi() {
        let c = FinCategory::parallel_pair();
        for x in c.objects() {
            assert!(
                is_strict_epi_family(&c, &x, &[c.identity(x)])
                    .unwrap()
                    .holds
            );
            assert!(
                is_universal_strict_epi(&c, x, &[c.identity(x)])
                    .unwrap()
                    .holds
            );
        }
    }

    #[test]
    fn open_cover_is_strict_epi_in_the_base() {
        let s = opens2();
        let c = s.base();
        let top = c.object_id("ab").unwrap();
        let fam = [
            c.morphism_id("a<=ab").unwrap(),
            c.morphism_id("b<=ab").unwrap(),
        ];
        assert!(is_strict_epi_family(c, &top, &fam).unwrap().holds);
        let u = is_universal_strict_epi(c, top, &fam).unwrap();
        assert!(u.holds && u.pullback_gaps.is_empty());
        assert!(!is_strict_epi_family(c, &top, &fam[..1]).unwrap().holds);
    }

    #[test]
    fn subcanonical_sites() {
        assert!(
            is_subcanonical(&Site::trivial(&FinCategory::chain(3)).unwrap())
                .unwrap()
                .holds
        );
        let s = opens2();
        let v = is_subcanonical(&s).unwrap();
        assert!(v.holds && v.covers_strict_epi && v.representables_are_sheaves);
        // the empty family covering the top of a chain: h_top is then no sheaf
        let c = FinCategory::chain(2);
        let bad = Site::from_names("bad", &c, &[("1", &[])]).unwrap();
        let v = is_subcanonical(&bad).unwrap();
        assert!(!v.holds && !v.covers_strict_epi && !v.representables_are_sheaves);
    }

    #[test]
    fn canonical_pretopology_of_discrete_pair_has_only_identities() {
        let c = FinCategory::discrete("d2", &["a", "b"]);
        let covers = canonical_pretopology(&c, 2).unwrap();
        assert!(covers
            .iter()
            .all(|cv| cv.arrows.len() == 1 && c.is_identity(cv.arrows[0])));
        assert_eq!(covers.len(), 2);
        let site = canonical_site(&c, 2).unwrap();
        assert!(is_subcanonical(&site).unwrap().holds);
    }

    #[test]
    fn canonical_pretopology_of_the_point() {
        let one = FinCategory::terminal();
        let covers = canonical_pretopology(&one, 1).unwrap();
        // the identity family, and the empty family since `*` is initial
        assert_eq!(covers.len(), 2);
        assert!(covers.iter().any(|cv| cv.arrows == vec![MorId(0)]));
    }
}

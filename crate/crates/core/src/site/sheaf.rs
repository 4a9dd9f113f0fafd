use serde::Serialize;

use super::topology::{Cover, SieveData, Site};
use crate::error::{Error, Result};
use crate::fincat::MorId;
use crate::presheaf::Presheaf;

/// Matching families on one sieve past which enumeration stops.
pub const FAMILY_CAP: usize = 1 << 18;

/// Why a presheaf fails the sheaf condition on some covering sieve or cover.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SheafFailure {
    /// Two elements with the same restrictions.
    NotSeparated {
        object: String,
        cover: Vec<String>,
        elements: (String, String),
    },
    /// A matching family with no amalgamation.
    NoAmalgamation {
        object: String,
        cover: Vec<String>,
        family: Vec<(String, String)>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SheafVerdict {
    pub holds: bool,
    pub witness: Option<SheafFailure>,
}

impl SheafVerdict {
    fn from(witness: Option<SheafFailure>) -> Self {
        Self {
            holds: witness.is_none(),
            witness,
        }
    }
}

/// All matching families `(s_f)_{f ∈ S}` of `F` on one covering sieve,
/// `s_f ∈ F(src f)`, in lexicographic order.
pub(crate) fn matching_families(f: &Presheaf, d: &SieveData) -> Result<Vec<Vec<usize>>> {
    let base = f.base();
    let n = d.arrows.len();
    let mut by_last: Vec<Vec<(usize, MorId, usize)>> = vec![Vec::new(); n];
    for &(p, g, q) in &d.constraints {
        by_last[p.max(q)].push((p, g, q));
    }
    let domain: Vec<usize> = d.arrows.iter().map(|a| f.size(base.src(*a))).collect();
    let mut out = Vec::new();
    let mut vals = vec![0usize; n];
    let mut over = false;
    fn go(
        k: usize,
        vals: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        cx: (&Presheaf, &[usize], &[Vec<(usize, MorId, usize)>]),
        over: &mut bool,
    ) {
        if *over {
            return;
        }
        if k == vals.len() {
            if out.len() == FAMILY_CAP {
                *over = true;
            } else {
                out.push(vals.clone());
            }
            return;
        }
        let (f, domain, by_last) = cx;
        for v in 0..domain[k] {
            vals[k] = v;
            if by_last[k]
                .iter()
                .all(|&(p, g, q)| vals[q] == f.act(g, vals[p]))
            {
                go(k + 1, vals, out, cx, over);
            }
        }
    }
    go(0, &mut vals, &mut out, (f, &domain, &by_last), &mut over);
    if over {
        return Err(Error::budget("enumerating matching families", FAMILY_CAP));
    }
    Ok(out)
}

/// `x ↦ (F(f)(x))_{f ∈ S}`.
pub(crate) fn restrict(f: &Presheaf, d: &SieveData, x: usize) -> Vec<usize> {
    d.arrows.iter().map(|a| f.act(*a, x)).collect()
}

fn check_base(f: &Presheaf, site: &Site) -> Result<()> {
    if f.base() != site.base() {
        return Err(Error::BaseMismatch(
            f.base().name().into(),
            site.base().name().into(),
        ));
    }
    Ok(())
}

/// Every matching family on every covering sieve has exactly one amalgamation.
pub fn is_sheaf(f: &Presheaf, site: &Site) -> Result<SheafVerdict> {
    check_base(f, site)?;
    let c = site.base();
    for x in c.objects() {
        for d in site.sieve_data(x).iter().skip(1) {
            let restrictions: Vec<Vec<usize>> = (0..f.size(x)).map(|a| restrict(f, d, a)).collect();
            let describe_cover = || d.sieve.describe(c);
            for a in 0..restrictions.len() {
                if let Some(b) = (0..a).find(|b| restrictions[*b] == restrictions[a]) {
                    return Ok(SheafVerdict::from(Some(SheafFailure::NotSeparated {
                        object: c.object_name(x).into(),
                        cover: describe_cover(),
                        elements: (f.label(x, b).into(), f.label(x, a).into()),
                    })));
                }
            }
            let families = matching_families(f, d)?;
            if families.len() != restrictions.len() {
                let missing = families
                    .iter()
                    .find(|fam| !restrictions.contains(fam))
                    .expect("more families than elements");
                return Ok(SheafVerdict::from(Some(SheafFailure::NoAmalgamation {
                    object: c.object_name(x).into(),
                    cover: describe_cover(),
                    family: describe_family(f, &d.arrows, missing),
                })));
            }
        }
    }
    Ok(SheafVerdict::from(None))
}

fn describe_family(f: &Presheaf, arrows: &[MorId], vals: &[usize]) -> Vec<(String, String)> {
    let c = f.base();
    arrows
        .iter()
        .zip(vals)
        .map(|(a, v)| {
            (
                c.morphism_name(*a).to_string(),
                f.label(c.src(*a), *v).to_string(),
            )
        })
        .collect()
}

/// Compatible families on one declared cover: `(s_i ∈ F(U_i))` with
/// `F(g)(s_i) = F(h)(s_j)` whenever `f_i ∘ g = f_j ∘ h`.
pub fn compatible_families(f: &Presheaf, cover: &Cover) -> Result<Vec<Vec<usize>>> {
    let c = f.base();
    let k = cover.arrows.len();
    // (i, g, j, h) with f_i g = f_j h, attached to max(i, j)
    let mut checks: Vec<Vec<(usize, MorId, usize, MorId)>> = vec![Vec::new(); k];
    for i in 0..k {
        for j in 0..=i {
            let (fi, fj) = (cover.arrows[i], cover.arrows[j]);
            for w in c.objects() {
                for &g in c.hom(w, c.src(fi)) {
                    for &h in c.hom(w, c.src(fj)) {
                        if c.comp(fi, g) == c.comp(fj, h) {
                            checks[i].push((i, g, j, h));
                        }
                    }
                }
            }
        }
    }
    let domain: Vec<usize> = cover.arrows.iter().map(|a| f.size(c.src(*a))).collect();
    let mut out = Vec::new();
    let mut vals = vec![0usize; k];
    fn go(
        i: usize,
        vals: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        cx: (&Presheaf, &[usize], &[Vec<(usize, MorId, usize, MorId)>]),
    ) -> bool {
        if i == vals.len() {
            if out.len() == FAMILY_CAP {
                return false;
            }
            out.push(vals.clone());
            return true;
        }
        let (f, domain, checks) = cx;
        for v in 0..domain[i] {
            vals[i] = v;
            if checks[i]
                .iter()
                .all(|&(a, g, b, h)| f.act(g, vals[a]) == f.act(h, vals[b]))
                && !go(i + 1, vals, out, cx)
            {
                return false;
            }
        }
        true
    }
    if !go(0, &mut vals, &mut out, (f, &domain, &checks)) {
        return Err(Error::budget("enumerating compatible families", FAMILY_CAP));
    }
    Ok(out)
}

/// The sheaf condition on the declared covers, each element-wise: every
/// compatible family has exactly one amalgamation. Agrees with [`is_sheaf`]
/// when the declared covers form a coverage (see [`Site::is_coverage`]).
pub fn is_sheaf_coverform(f: &Presheaf, site: &Site) -> Result<SheafVerdict> {
    check_base(f, site)?;
    let c = site.base();
    for cover in site.covers() {
        let x = cover.target;
        let restrictions: Vec<Vec<usize>> = (0..f.size(x))
            .map(|a| cover.arrows.iter().map(|m| f.act(*m, a)).collect())
            .collect();
        let names = || {
            cover
                .arrows
                .iter()
                .map(|m| c.morphism_name(*m).to_string())
                .collect()
        };
        for a in 0..restrictions.len() {
            if let Some(b) = (0..a).find(|b| restrictions[*b] == restrictions[a]) {
                return Ok(SheafVerdict::from(Some(SheafFailure::NotSeparated {
                    object: c.object_name(x).into(),
                    cover: names(),
                    elements: (f.label(x, b).into(), f.label(x, a).into()),
                })));
            }
        }
        let families = compatible_families(f, cover)?;
        if let Some(missing) = families.iter().find(|fam| !restrictions.contains(fam)) {
            return Ok(SheafVerdict::from(Some(SheafFailure::NoAmalgamation {
                object: c.object_name(x).into(),
                cover: names(),
                family: describe_family(f, &cover.arrows, missing),
            })));
        }
    }
    Ok(SheafVerdict::from(None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::{FinCategory, ObjId};
    use crate::presheaf::{enumerate_presheaves, yoneda_embed};

    fn opens2() -> Site {
        let c = FinCategory::poset(
            "opens2",
            &["0", "a", "b", "ab"],
            &[("0", "a"), ("0", "b"), ("a", "ab"), ("b", "ab")],
        );
        Site::from_names("opens2", &c, &[("0", &[]), ("ab", &["a<=ab", "b<=ab"])]).unwrap()
    }

    /// Pair model: a sheaf on the discrete two-point space is determined by
    /// `F(a)`, `F(b)`, with `F(∅) = 1` and `F(ab) = F(a) × F(b)`.
    fn pair_model(f: &Presheaf) -> bool {
        let c = f.base();
        let (e, a, b, ab) = (ObjId(0), ObjId(1), ObjId(2), ObjId(3));
        if f.size(e) != 1 {
            return false;
        }
        let ra = c.hom(a, ab)[0];
        let rb = c.hom(b, ab)[0];
        let mut pairs: Vec<(usize, usize)> = (0..f.size(ab))
            .map(|x| (f.act(ra, x), f.act(rb, x)))
            .collect();
        pairs.sort();
        pairs.dedup();
        pairs.len() == f.size(ab) && pairs.len() == f.size(a) * f.size(b)
    }

    #[test]
    fn trivial_topology_accepts_everything() {
        let c = FinCategory::parallel_pair();
        let s = Site::trivial(&c).unwrap();
        for f in enumerate_presheaves(&c, 2, 1000).unwrap() {
            assert!(is_sheaf(&f, &s).unwrap().holds);
            assert!(is_sheaf_coverform(&f, &s).unwrap().holds);
        }
    }

    #[test]
    fn discrete_space_matches_pair_model() {
        let s = opens2();
        let mut sheaves = 0;
        for f in enumerate_presheaves(s.base(), 2, 100_000).unwrap() {
            let v = is_sheaf(&f, &s).unwrap();
            assert_eq!(v.holds, pair_model(&f), "{f}");
            assert_eq!(v.holds, is_sheaf_coverform(&f, &s).unwrap().holds);
            assert_eq!(v.holds, v.witness.is_none());
            sheaves += usize::from(v.holds);
        }
        assert!(sheaves > 0);
    }

    #[test]
    fn representables_on_open_cover_site() {
        let s = opens2();
        for x in s.base().objects() {
            assert!(
                is_sheaf(&yoneda_embed(s.base(), x).unwrap(), &s)
                    .unwrap()
                    .holds
            );
        }
    }

    #[test]
    fn two_points_over_the_empty_set() {
        let s = opens2();
        let c = s.base();
        let f = Presheaf::from_sizes(c, &[2, 2, 2, 2], |_, y| y).unwrap();
        let v = is_sheaf(&f, &s).unwrap();
        assert!(
            matches!(v.witness, Some(SheafFailure::NotSeparated { ref object, .. }) if object == "0")
        );
    }
}

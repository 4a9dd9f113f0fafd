use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::sieve::{
    all_sieves, bits_iter, check_base, generated_sieve, maximal_sieve, pullback_sieve, Sieve,
};
use crate::error::{Error, Result};
use crate::fincat::{FinCategory, MorId, ObjId};

/// A covering family: arrows with a common target.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Cover {
    pub target: ObjId,
    pub arrows: Vec<MorId>,
}

/// Precomputed data for one covering sieve.
#[derive(Debug)]
pub(crate) struct SieveData {
    pub sieve: Sieve,
    pub arrows: Vec<MorId>,
    /// position of each base morphism in `arrows`, or `usize::MAX`
    pub pos: Vec<usize>,
    /// `(p, g, q)`: the family satisfies `s[q] = F(g)(s[p])` where
    /// `arrows[q] = arrows[p] ∘ g`
    pub constraints: Vec<(usize, MorId, usize)>,
    /// for each `f` into the target (by position in `into(target)`):
    /// index of `f*S` in the topology of `src f` and, for each arrow `h` of
    /// `f*S`, the position of `f ∘ h` in `arrows`
    pub pullbacks: Vec<(usize, Vec<usize>)>,
}

#[derive(Debug)]
struct Inner {
    name: String,
    base: FinCategory,
    covers: Vec<Cover>,
    /// per object: covering sieves, the maximal sieve first
    topology: Vec<Vec<SieveData>>,
    into: Vec<Vec<MorId>>,
}

/// A finite category with declared covering families and the Grothendieck
/// topology they generate.
#[derive(Clone)]
pub struct Site(Arc<Inner>);

impl PartialEq for Site {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.name == other.0.name
                && self.0.base == other.0.base
                && self.0.covers == other.0.covers)
    }
}

impl Eq for Site {}

impl fmt::Debug for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Site({} on {})", self.0.name, self.0.base.name())
    }
}

/// Saturated topology as sieve names, for export.
#[derive(Clone, Debug, Serialize)]
pub struct TopologyExport {
    pub site: String,
    pub base: String,
    pub covering_sieves: Vec<(String, Vec<Vec<String>>)>,
}

/// The smallest Grothendieck topology containing the maximal sieves and the
/// sieves generated by `covers`: closed under pullback and transitivity.
pub fn generate_topology(name: &str, base: &FinCategory, covers: Vec<Cover>) -> Result<Site> {
    check_base(base)?;
    for cover in &covers {
        if cover.target.0 >= base.num_objects() {
            return Err(Error::Unknown {
                kind: "object",
                name: format!("#{}", cover.target.0),
            });
        }
        if let Some(bad) = cover
            .arrows
            .iter()
            .find(|f| f.0 >= base.num_morphisms() || base.tgt(**f) != cover.target)
        {
            return Err(Error::contract(format!(
                "cover member `{}` does not target `{}`",
                if bad.0 < base.num_morphisms() {
                    base.morphism_name(*bad)
                } else {
                    "?"
                },
                base.object_name(cover.target)
            )));
        }
    }
    let n = base.num_objects();
    let sieves: Vec<Vec<Sieve>> = base
        .objects()
        .map(|x| all_sieves(base, x))
        .collect::<Result<_>>()?;
    let mut j: Vec<BTreeSet<u64>> = base
        .objects()
        .map(|x| BTreeSet::from([maximal_sieve(base, x).bits]))
        .collect();
    for cover in &covers {
        j[cover.target.0].insert(generated_sieve(base, cover.target, &cover.arrows).bits);
    }
    let into: Vec<Vec<MorId>> = base.objects().map(|x| base.arrows_into(x)).collect();
    loop {
        let mut changed = false;
        // pullback stability
        for x in 0..n {
            let current: Vec<u64> = j[x].iter().copied().collect();
            for bits in current {
                let s = Sieve {
                    target: ObjId(x),
                    bits,
                };
                for &f in &into[x] {
                    let p = pullback_sieve(base, &s, f);
                    changed |= j[p.target.0].insert(p.bits);
                }
            }
        }
        // transitivity: R covers if some covering S has f*R covering for all f ∈ S
        for x in 0..n {
            for r in &sieves[x] {
                if j[x].contains(&r.bits) {
                    continue;
                }
                let covers_locally = j[x].iter().any(|&s| {
                    bits_iter(s).all(|f| {
                        let p = pullback_sieve(base, r, MorId(f));
                        j[p.target.0].contains(&p.bits)
                    })
                });
                if covers_locally {
                    j[x].insert(r.bits);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let ordered: Vec<Vec<u64>> = base
        .objects()
        .map(|x| {
            let max = maximal_sieve(base, x).bits;
            std::iter::once(max)
                .chain(j[x.0].iter().copied().filter(|b| *b != max))
                .collect()
        })
        .collect();
    let topology = base
        .objects()
        .map(|x| {
            ordered[x.0]
                .iter()
                .map(|&bits| sieve_data(base, &ordered, &into, Sieve { target: x, bits }))
                .collect()
        })
        .collect();
    Ok(Site(Arc::new(Inner {
        name: name.to_string(),
        base: base.clone(),
        covers,
        topology,
        into,
    })))
}

fn sieve_data(
    base: &FinCategory,
    ordered: &[Vec<u64>],
    into: &[Vec<MorId>],
    sieve: Sieve,
) -> SieveData {
    let arrows = sieve.arrows();
    let mut pos = vec![usize::MAX; base.num_morphisms()];
    for (i, f) in arrows.iter().enumerate() {
        pos[f.0] = i;
    }
    let mut constraints = Vec::new();
    for (p, &f) in arrows.iter().enumerate() {
        for &g in &into[base.src(f).0] {
            if base.is_identity(g) {
                continue;
            }
            constraints.push((p, g, pos[base.comp(f, g).0]));
        }
    }
    let pullbacks = into[sieve.target.0]
        .iter()
        .map(|&f| {
            let pb = pullback_sieve(base, &sieve, f);
            let idx = ordered[pb.target.0]
                .iter()
                .position(|b| *b == pb.bits)
                .expect("topology is pullback-stable");
            let positions = pb
                .arrows()
                .iter()
                .map(|h| pos[base.comp(f, *h).0])
                .collect();
            (idx, positions)
        })
        .collect();
    SieveData {
        sieve,
        arrows,
        pos,
        constraints,
        pullbacks,
    }
}

impl Site {
    /// Builds a site from cover names: `(object, [arrow, …])`.
    pub fn from_names(name: &str, base: &FinCategory, covers: &[(&str, &[&str])]) -> Result<Self> {
        let covers = covers
            .iter()
            .map(|(x, arrows)| {
                Ok(Cover {
                    target: base.object_id(x)?,
                    arrows: arrows
                        .iter()
                        .map(|a| base.morphism_id(a))
                        .collect::<Result<_>>()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        generate_topology(name, base, covers)
    }

    /// Only identity covers: every presheaf is a sheaf.
    pub fn trivial(base: &FinCategory) -> Result<Self> {
        let covers = base
            .objects()
            .map(|x| Cover {
                target: x,
                arrows: vec![base.identity(x)],
            })
            .collect();
        generate_topology(&format!("trivial({})", base.name()), base, covers)
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn base(&self) -> &FinCategory {
        &self.0.base
    }

    pub fn covers(&self) -> &[Cover] {
        &self.0.covers
    }

    pub fn covers_of(&self, x: ObjId) -> impl Iterator<Item = &Cover> {
        self.0.covers.iter().filter(move |c| c.target == x)
    }

    /// Covering sieves on `x`, the maximal sieve first.
    pub fn covering_sieves(&self, x: ObjId) -> Vec<Sieve> {
        self.0.topology[x.0].iter().map(|d| d.sieve).collect()
    }

    pub fn is_covering(&self, s: &Sieve) -> bool {
        self.0.topology[s.target.0]
            .iter()
            .any(|d| d.sieve.bits == s.bits)
    }

    /// True if only maximal sieves cover.
    pub fn is_trivial(&self) -> bool {
        self.0.topology.iter().all(|t| t.len() == 1)
    }

    pub(crate) fn sieve_data(&self, x: ObjId) -> &[SieveData] {
        &self.0.topology[x.0]
    }

    pub(crate) fn into_list(&self, x: ObjId) -> &[MorId] {
        &self.0.into[x.0]
    }

    /// Re-saturates from the covering sieves themselves; the result is equal
    /// to this topology.
    pub fn resaturate(&self) -> Result<Site> {
        let covers = self
            .0
            .topology
            .iter()
            .flatten()
            .map(|d| Cover {
                target: d.sieve.target,
                arrows: d.arrows.clone(),
            })
            .collect();
        generate_topology(&self.0.name, &self.0.base, covers)
    }

    /// The coverage condition: for every declared cover `R` of `X` and
    /// `f: Y → X` some declared cover of `Y` lands inside `f*⟨R⟩`. When it
    /// holds, the cover-form and sieve-form sheaf conditions coincide.
    pub fn is_coverage(&self) -> bool {
        let c = &self.0.base;
        self.0.covers.iter().all(|r| {
            let s = generated_sieve(c, r.target, &r.arrows);
            self.0.into[r.target.0].iter().all(|&f| {
                let pb = pullback_sieve(c, &s, f);
                let y = c.src(f);
                pb.bits == maximal_sieve(c, y).bits
                    || self
                        .covers_of(y)
                        .any(|r2| generated_sieve(c, y, &r2.arrows).is_subset(&pb))
            })
        })
    }

    pub fn export(&self) -> TopologyExport {
        let c = &self.0.base;
        TopologyExport {
            site: self.0.name.clone(),
            base: c.name().to_string(),
            covering_sieves: c
                .objects()
                .map(|x| {
                    (
                        c.object_name(x).to_string(),
                        self.0.topology[x.0]
                            .iter()
                            .map(|d| d.sieve.describe(c))
                            .collect(),
                    )
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn opens2() -> Site {
        let c = FinCategory::poset(
            "opens2",
            &["0", "a", "b", "ab"],
            &[("0", "a"), ("0", "b"), ("a", "ab"), ("b", "ab")],
        );
        Site::from_names("opens2", &c, &[("0", &[]), ("ab", &["a<=ab", "b<=ab"])]).unwrap()
    }

    #[test]
    fn identity_covers_give_the_trivial_topology() {
        let s = Site::trivial(&FinCategory::chain(3)).unwrap();
        assert!(s.is_trivial());
        let z2 = FinCategory::monoid("z2", &["e", "s"], &[vec![0, 1], vec![1, 0]]).unwrap();
        assert!(Site::trivial(&z2).unwrap().is_trivial());
    }

    #[test]
    fn two_point_cover_of_the_top() {
        let s = opens2();
        let c = s.base();
        let top = c.object_id("ab").unwrap();
        let gen = generated_sieve(
            c,
            top,
            &[
                c.morphism_id("a<=ab").unwrap(),
                c.morphism_id("b<=ab").unwrap(),
            ],
        );
        assert!(s.is_covering(&gen));
        // saturation oracle: covering sieves on ab are the maximal one and ⟨a, b⟩
        assert_eq!(s.covering_sieves(top).len(), 2);
        // the empty sieve covers ∅ only
        assert_eq!(s.covering_sieves(ObjId(0)).len(), 2);
        assert_eq!(s.covering_sieves(c.object_id("a").unwrap()).len(), 1);
        assert!(s.is_coverage());
    }

    #[test]
    fn saturation_is_a_fixpoint() {
        let s = opens2();
        let again = s.resaturate().unwrap();
        for x in s.base().objects() {
            let mut a = s.covering_sieves(x);
            let mut b = again.covering_sieves(x);
            a.sort();
            b.sort();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn rejects_mistargeted_covers() {
        let c = FinCategory::chain(2);
        assert!(Site::from_names("bad", &c, &[("1", &["id_0"])]).is_err());
    }
}

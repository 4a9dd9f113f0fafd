use super::category::{FinCategory, MorId, ObjId};
use super::functor::FinFunctor;

/// A cone over a diagram `D: J → C`: `legs[j]: apex → D(j)`.
/// As a cocone (see [`universal_cocone_search`]) the legs point the other way.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cone {
    pub apex: ObjId,
    pub legs: Vec<MorId>,
}

/// Every cone over `diagram` with the given apex, in lexicographic leg order.
pub fn cones_at(diagram: &FinFunctor, apex: ObjId) -> Vec<Cone> {
    let j = diagram.dom();
    let c = diagram.cod();
    let n = j.num_objects();
    let mut checks: Vec<Vec<MorId>> = vec![Vec::new(); n];
    for u in j.non_identity_morphisms() {
        checks[j.src(u).0.max(j.tgt(u).0)].push(u);
    }
    let mut out = Vec::new();
    let mut legs = vec![MorId(0); n];
    fn go(
        k: usize,
        legs: &mut Vec<MorId>,
        out: &mut Vec<Cone>,
        cx: (
            &FinFunctor,
            &FinCategory,
            &FinCategory,
            ObjId,
            &[Vec<MorId>],
        ),
    ) {
        let (d, j, c, apex, checks) = cx;
        if k == legs.len() {
            out.push(Cone {
                apex,
                legs: legs.clone(),
            });
            return;
        }
        for &leg in c.hom(apex, d.ob(ObjId(k))) {
            legs[k] = leg;
            if checks[k]
                .iter()
                .all(|&u| c.comp(d.mor(u), legs[j.src(u).0]) == legs[j.tgt(u).0])
            {
                go(k + 1, legs, out, cx);
            }
        }
    }
    go(0, &mut legs, &mut out, (diagram, j, c, apex, &checks));
    out
}

/// Morphisms `m: other.apex → limit.apex` with `limit.legs[j] ∘ m = other.legs[j]`.
pub fn factorizations(diagram: &FinFunctor, limit: &Cone, other: &Cone) -> Vec<MorId> {
    let c = diagram.cod();
    c.hom(other.apex, limit.apex)
        .iter()
        .copied()
        .filter(|&m| {
            limit
                .legs
                .iter()
                .zip(&other.legs)
                .all(|(&l, &o)| c.comp(l, m) == o)
        })
        .collect()
}

/// Brute-force limit search. Returns the first universal cone, scanning apexes
/// in id order, so the smallest limiting apex is chosen.
pub fn universal_cone_search(diagram: &FinFunctor) -> Option<Cone> {
    let c = diagram.cod();
    let all: Vec<Vec<Cone>> = c.objects().map(|a| cones_at(diagram, a)).collect();
    all.iter()
        .flatten()
        .find(|candidate| {
            all.iter()
                .flatten()
                .all(|other| factorizations(diagram, candidate, other).len() == 1)
        })
        .cloned()
}

/// Colimit search: a cone in the opposite category. Legs are `D(j) → apex`.
pub fn universal_cocone_search(diagram: &FinFunctor) -> Option<Cone> {
    universal_cone_search(&diagram.opposite())
}

/// Diagram shapes used for finite limits.
pub mod shapes {
    use super::*;

    pub fn empty() -> FinCategory {
        FinCategory::discrete("empty", &[])
    }

    pub fn pair() -> FinCategory {
        FinCategory::discrete("pair", &["a", "b"])
    }

    /// `a → c ← b`
    pub fn cospan() -> FinCategory {
        FinCategory::poset("cospan", &["a", "b", "c"], &[("a", "c"), ("b", "c")])
    }

    pub fn diagram(
        shape: &FinCategory,
        target: &FinCategory,
        objects: &[ObjId],
        arrows: &[MorId],
    ) -> FinFunctor {
        let mut mor_map: Vec<MorId> = shape
            .objects()
            .map(|x| target.identity(objects[x.0]))
            .collect();
        mor_map.resize(shape.num_morphisms(), MorId(0));
        for (u, a) in shape.non_identity_morphisms().zip(arrows) {
            mor_map[u.0] = *a;
        }
        // Identities of posets come first in `FinCategory::poset`.
        debug_assert!(shape.objects().all(|x| shape.identity(x).0 == x.0));
        FinFunctor::new(shape.clone(), target.clone(), objects.to_vec(), mor_map)
    }

    /// Pullback diagram of `f: a → c` and `g: b → c`.
    pub fn cospan_of(target: &FinCategory, f: MorId, g: MorId) -> FinFunctor {
        let objects = [target.src(f), target.src(g), target.tgt(f)];
        diagram(&cospan(), target, &objects, &[f, g])
    }
}

//! Pointwise limits and colimits of finite diagrams of presheaves.

use std::collections::HashMap;

use super::core::{Presheaf, PresheafMorphism};
use super::search::enumerate_morphisms;
use crate::error::{Error, Result};
use crate::fincat::{FinCategory, MorId, ObjId};
use crate::unionfind::UnionFind;

/// Values at one object of a pointwise limit may not exceed this many tuples.
pub const LIMIT_ELEMENT_CAP: usize = 1 << 16;

/// A covariant diagram `D: J → PSh(C)`: one presheaf per index object and one
/// morphism `D(u): D(j) → D(k)` per index morphism `u: j → k`.
#[derive(Clone, Debug)]
pub struct PresheafDiagram {
    index: FinCategory,
    objects: Vec<Presheaf>,
    arrows: Vec<PresheafMorphism>,
}

impl PresheafDiagram {
    pub fn new(
        index: &FinCategory,
        objects: Vec<Presheaf>,
        arrows: Vec<PresheafMorphism>,
    ) -> Result<Self> {
        if objects.len() != index.num_objects() || arrows.len() != index.num_morphisms() {
            return Err(Error::contract(
                "diagram tables do not match the index category",
            ));
        }
        if let Some(first) = objects.first() {
            if let Some(bad) = objects.iter().find(|p| p.base() != first.base()) {
                return Err(Error::BaseMismatch(
                    first.base().name().into(),
                    bad.base().name().into(),
                ));
            }
        }
        for u in index.morphisms() {
            let a = &arrows[u.0];
            if a.dom() != &objects[index.src(u).0] || a.cod() != &objects[index.tgt(u).0] {
                return Err(Error::contract(format!(
                    "diagram arrow `{}` has the wrong ends",
                    index.morphism_name(u)
                )));
            }
        }
        Ok(Self::new_unchecked(index.clone(), objects, arrows))
    }

    pub(crate) fn new_unchecked(
        index: FinCategory,
        objects: Vec<Presheaf>,
        arrows: Vec<PresheafMorphism>,
    ) -> Self {
        Self {
            index,
            objects,
            arrows,
        }
    }

    /// Discrete diagram.
    pub fn discrete(objects: Vec<Presheaf>) -> Result<Self> {
        let names: Vec<String> = (0..objects.len()).map(|i| i.to_string()).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let index = FinCategory::discrete("discrete", &refs);
        let arrows = objects.iter().map(PresheafMorphism::identity).collect();
        Self::new(&index, objects, arrows)
    }

    /// Two parallel morphisms `f, g: A ⇉ B`.
    pub fn parallel(f: &PresheafMorphism, g: &PresheafMorphism) -> Result<Self> {
        if f.dom() != g.dom() || f.cod() != g.cod() {
            return Err(Error::contract("parallel pair with different ends"));
        }
        let index = FinCategory::parallel_pair();
        let (a, b) = (f.dom().clone(), f.cod().clone());
        let arrows = vec![
            PresheafMorphism::identity(&a),
            PresheafMorphism::identity(&b),
            f.clone(),
            g.clone(),
        ];
        Self::new(&index, vec![a, b], arrows)
    }

    pub fn index(&self) -> &FinCategory {
        &self.index
    }

    pub fn object(&self, j: ObjId) -> &Presheaf {
        &self.objects[j.0]
    }

    pub fn objects(&self) -> &[Presheaf] {
        &self.objects
    }

    pub fn arrow(&self, u: MorId) -> &PresheafMorphism {
        &self.arrows[u.0]
    }

    /// The base category, if the diagram is nonempty.
    pub fn base(&self) -> Option<&FinCategory> {
        self.objects.first().map(Presheaf::base)
    }

    fn base_or<'a>(&'a self, fallback: Option<&'a FinCategory>) -> Result<&'a FinCategory> {
        self.base()
            .or(fallback)
            .ok_or_else(|| Error::contract("empty diagram needs an explicit base category"))
    }

    /// Checks `legs[k] ∘ D(u) = legs[j]` for every `u: j → k`.
    pub fn is_cocone(&self, legs: &[PresheafMorphism]) -> bool {
        self.index.non_identity_morphisms().all(|u| {
            let (j, k) = (self.index.src(u), self.index.tgt(u));
            legs[k.0].after_unchecked(&self.arrows[u.0]).components() == legs[j.0].components()
        })
    }

    /// Checks `D(u) ∘ legs[j] = legs[k]` for every `u: j → k`.
    pub fn is_cone(&self, legs: &[PresheafMorphism]) -> bool {
        self.index.non_identity_morphisms().all(|u| {
            let (j, k) = (self.index.src(u), self.index.tgt(u));
            self.arrows[u.0].after_unchecked(&legs[j.0]).components() == legs[k.0].components()
        })
    }

    /// Every cocone with vertex `q`, enumerating each leg's hom-set.
    pub fn cocones_to(&self, q: &Presheaf, cap: usize) -> Result<Vec<Vec<PresheafMorphism>>> {
        let homs = self
            .objects
            .iter()
            .map(|d| enumerate_morphisms(d, q, cap))
            .collect::<Result<Vec<_>>>()?;
        self.assemble_legs(&homs, cap, true)
    }

    /// Every cone with vertex `q`.
    pub fn cones_from(&self, q: &Presheaf, cap: usize) -> Result<Vec<Vec<PresheafMorphism>>> {
        let homs = self
            .objects
            .iter()
            .map(|d| enumerate_morphisms(q, d, cap))
            .collect::<Result<Vec<_>>>()?;
        self.assemble_legs(&homs, cap, false)
    }

    fn assemble_legs(
        &self,
        homs: &[Vec<PresheafMorphism>],
        cap: usize,
        co: bool,
    ) -> Result<Vec<Vec<PresheafMorphism>>> {
        let n = self.index.num_objects();
        let mut checks: Vec<Vec<MorId>> = vec![Vec::new(); n];
        for u in self.index.non_identity_morphisms() {
            checks[self.index.src(u).0.max(self.index.tgt(u).0)].push(u);
        }
        let mut out = Vec::new();
        let mut choice = vec![0usize; n];
        let mut over = false;
        self.legs_rec(0, homs, &checks, co, &mut choice, &mut out, cap, &mut over);
        if over {
            return Err(Error::budget("enumerating (co)cones", cap));
        }
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn legs_rec(
        &self,
        k: usize,
        homs: &[Vec<PresheafMorphism>],
        checks: &[Vec<MorId>],
        co: bool,
        choice: &mut Vec<usize>,
        out: &mut Vec<Vec<PresheafMorphism>>,
        cap: usize,
        over: &mut bool,
    ) {
        if *over {
            return;
        }
        if k == choice.len() {
            if out.len() == cap {
                *over = true;
                return;
            }
            out.push(
                choice
                    .iter()
                    .enumerate()
                    .map(|(j, c)| homs[j][*c].clone())
                    .collect(),
            );
            return;
        }
        for c in 0..homs[k].len() {
            choice[k] = c;
            let ok = checks[k].iter().all(|&u| {
                let (j, l) = (self.index.src(u).0, self.index.tgt(u).0);
                let (lj, ll) = (&homs[j][choice[j]], &homs[l][choice[l]]);
                if co {
                    ll.after_unchecked(&self.arrows[u.0]).components() == lj.components()
                } else {
                    self.arrows[u.0].after_unchecked(lj).components() == ll.components()
                }
            });
            if ok {
                self.legs_rec(k + 1, homs, checks, co, choice, out, cap, over);
            }
        }
    }
}

/// A colimit of a presheaf diagram with its universal cocone.
#[derive(Clone, Debug)]
pub struct PresheafColimit {
    pub apex: Presheaf,
    pub legs: Vec<PresheafMorphism>,
    /// `reps[X][c] = (j, a)`: smallest member of class `c` at `X`.
    reps: Vec<Vec<(usize, usize)>>,
}

impl PresheafColimit {
    /// The unique map `apex → Q` through which the cocone `legs` factors.
    pub fn mediate(&self, legs: &[PresheafMorphism]) -> Result<PresheafMorphism> {
        let q = legs.first().map(|l| l.cod().clone()).ok_or_else(|| {
            Error::contract("mediating out of an empty colimit needs a target; use mediate_to")
        })?;
        self.mediate_to(&q, legs)
    }

    pub fn mediate_to(&self, q: &Presheaf, legs: &[PresheafMorphism]) -> Result<PresheafMorphism> {
        if legs.len() != self.legs.len() || legs.iter().any(|l| l.cod() != q) {
            return Err(Error::contract(
                "competing cocone does not match the diagram",
            ));
        }
        let base = self.apex.base();
        let mut components = Vec::with_capacity(base.num_objects());
        for x in base.objects() {
            let comp: Vec<usize> = self.reps[x.0]
                .iter()
                .map(|&(j, a)| legs[j].apply(x, a))
                .collect();
            // every member must agree with its representative
            for (j, leg) in self.legs.iter().enumerate() {
                for a in 0..leg.dom().size(x) {
                    if legs[j].apply(x, a) != comp[leg.apply(x, a)] {
                        return Err(Error::contract("competing legs do not form a cocone"));
                    }
                }
            }
            components.push(comp);
        }
        Ok(PresheafMorphism::new_unchecked(
            self.apex.clone(),
            q.clone(),
            components,
        ))
    }
}

/// A limit of a presheaf diagram with its universal cone.
#[derive(Clone, Debug)]
pub struct PresheafLimit {
    pub apex: Presheaf,
    pub legs: Vec<PresheafMorphism>,
    tuples: Vec<HashMap<Vec<usize>, usize>>,
}

impl PresheafLimit {
    /// The unique map `Q → apex` through which the cone `legs` factors.
    pub fn mediate_from(
        &self,
        q: &Presheaf,
        legs: &[PresheafMorphism],
    ) -> Result<PresheafMorphism> {
        if legs.len() != self.legs.len() || legs.iter().any(|l| l.dom() != q) {
            return Err(Error::contract("competing cone does not match the diagram"));
        }
        let base = self.apex.base();
        let mut components = Vec::with_capacity(base.num_objects());
        for x in base.objects() {
            let comp = (0..q.size(x))
                .map(|a| {
                    let t: Vec<usize> = legs.iter().map(|l| l.apply(x, a)).collect();
                    self.tuples[x.0]
                        .get(&t)
                        .copied()
                        .ok_or_else(|| Error::contract("competing legs do not form a cone"))
                })
                .collect::<Result<Vec<_>>>()?;
            components.push(comp);
        }
        Ok(PresheafMorphism::new_unchecked(
            q.clone(),
            self.apex.clone(),
            components,
        ))
    }
}

fn dedupe_labels(labels: &mut [String]) {
    let mut seen = std::collections::HashSet::new();
    for l in labels.iter_mut() {
        while !seen.insert(l.clone()) {
            l.push('\'');
        }
    }
}

/// Pointwise colimit: disjoint union of the values quotiented by the diagram
/// arrows. Classes are named `j/a` after their smallest member. An empty
/// diagram needs `base`.
pub fn presheaf_colimit(
    diagram: &PresheafDiagram,
    base: Option<&FinCategory>,
) -> Result<PresheafColimit> {
    let c = diagram.base_or(base)?.clone();
    let index = &diagram.index;
    let n_j = index.num_objects();
    let mut labels = Vec::with_capacity(c.num_objects());
    let mut reps = Vec::with_capacity(c.num_objects());
    // class_of[X][j][a]
    let mut class_of: Vec<Vec<Vec<usize>>> = Vec::with_capacity(c.num_objects());
    for x in c.objects() {
        let offsets: Vec<usize> = std::iter::once(0)
            .chain(diagram.objects.iter().scan(0, |acc, d| {
                *acc += d.size(x);
                Some(*acc)
            }))
            .collect();
        let mut uf = UnionFind::new(offsets[n_j]);
        for u in index.non_identity_morphisms() {
            let (j, k) = (index.src(u).0, index.tgt(u).0);
            for a in 0..diagram.objects[j].size(x) {
                uf.union(offsets[j] + a, offsets[k] + diagram.arrows[u.0].apply(x, a));
            }
        }
        let (classes, n_classes) = uf.classes();
        let mut rep = vec![(usize::MAX, 0); n_classes];
        let mut cls = Vec::with_capacity(n_j);
        for j in 0..n_j {
            let mut row = Vec::with_capacity(diagram.objects[j].size(x));
            for a in 0..diagram.objects[j].size(x) {
                let cl = classes[offsets[j] + a];
                if rep[cl].0 == usize::MAX {
                    rep[cl] = (j, a);
                }
                row.push(cl);
            }
            cls.push(row);
        }
        let mut l: Vec<String> = rep
            .iter()
            .map(|&(j, a)| {
                format!(
                    "{}/{}",
                    index.object_name(ObjId(j)),
                    diagram.objects[j].label(x, a)
                )
            })
            .collect();
        dedupe_labels(&mut l);
        labels.push(l);
        reps.push(rep);
        class_of.push(cls);
    }
    let actions = c
        .morphisms()
        .map(|f| {
            let (s, t) = (c.src(f), c.tgt(f));
            reps[t.0]
                .iter()
                .map(|&(j, a)| class_of[s.0][j][diagram.objects[j].act(f, a)])
                .collect()
        })
        .collect();
    let apex = Presheaf::new_unchecked(c.clone(), labels, actions);
    let legs = (0..n_j)
        .map(|j| {
            let components = c.objects().map(|x| class_of[x.0][j].clone()).collect();
            PresheafMorphism::new_unchecked(diagram.objects[j].clone(), apex.clone(), components)
        })
        .collect();
    Ok(PresheafColimit { apex, legs, reps })
}

/// Pointwise limit: compatible tuples, in lexicographic order. Tuples are
/// labelled `(a,b,…)`; the empty tuple is `*`. An empty diagram needs `base`.
pub fn presheaf_limit(
    diagram: &PresheafDiagram,
    base: Option<&FinCategory>,
) -> Result<PresheafLimit> {
    let c = diagram.base_or(base)?.clone();
    let index = &diagram.index;
    let n_j = index.num_objects();
    let mut checks: Vec<Vec<MorId>> = vec![Vec::new(); n_j];
    for u in index.non_identity_morphisms() {
        checks[index.src(u).0.max(index.tgt(u).0)].push(u);
    }
    let mut all_tuples: Vec<Vec<Vec<usize>>> = Vec::with_capacity(c.num_objects());
    for x in c.objects() {
        let mut out = Vec::new();
        let mut t = vec![0usize; n_j];
        let mut over = false;
        tuples_rec(diagram, x, &checks, 0, &mut t, &mut out, &mut over);
        if over {
            return Err(Error::budget(
                format!("computing a limit at `{}`", c.object_name(x)),
                LIMIT_ELEMENT_CAP,
            ));
        }
        all_tuples.push(out);
    }
    let tuples: Vec<HashMap<Vec<usize>, usize>> = all_tuples
        .iter()
        .map(|ts| ts.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect())
        .collect();
    let labels = c
        .objects()
        .map(|x| {
            let mut l: Vec<String> = all_tuples[x.0]
                .iter()
                .map(|t| {
                    if t.is_empty() {
                        "*".to_string()
                    } else {
                        let parts: Vec<&str> = t
                            .iter()
                            .enumerate()
                            .map(|(j, a)| diagram.objects[j].label(x, *a))
                            .collect();
                        format!("({})", parts.join(","))
                    }
                })
                .collect();
            dedupe_labels(&mut l);
            l
        })
        .collect();
    let actions = c
        .morphisms()
        .map(|f| {
            let (s, t) = (c.src(f), c.tgt(f));
            all_tuples[t.0]
                .iter()
                .map(|tup| {
                    let img: Vec<usize> = tup
                        .iter()
                        .enumerate()
                        .map(|(j, a)| diagram.objects[j].act(f, *a))
                        .collect();
                    tuples[s.0][&img]
                })
                .collect()
        })
        .collect();
    let apex = Presheaf::new_unchecked(c.clone(), labels, actions);
    let legs = (0..n_j)
        .map(|j| {
            let components = c
                .objects()
                .map(|x| all_tuples[x.0].iter().map(|t| t[j]).collect())
                .collect();
            PresheafMorphism::new_unchecked(apex.clone(), diagram.objects[j].clone(), components)
        })
        .collect();
    Ok(PresheafLimit { apex, legs, tuples })
}

fn tuples_rec(
    d: &PresheafDiagram,
    x: ObjId,
    checks: &[Vec<MorId>],
    k: usize,
    t: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
    over: &mut bool,
) {
    if *over {
        return;
    }
    if k == t.len() {
        if out.len() == LIMIT_ELEMENT_CAP {
            *over = true;
        } else {
            out.push(t.clone());
        }
        return;
    }
    for a in 0..d.objects[k].size(x) {
        t[k] = a;
        let ok = checks[k].iter().all(|&u| {
            let (j, l) = (d.index.src(u).0, d.index.tgt(u).0);
            d.arrows[u.0].apply(x, t[j]) == t[l]
        });
        if ok {
            tuples_rec(d, x, checks, k + 1, t, out, over);
        }
    }
}

/// Checks the universal property against every cocone into each competitor:
/// each factors through exactly one map. Returns a description of the first
/// failure.
pub fn verify_colimit(
    diagram: &PresheafDiagram,
    colim: &PresheafColimit,
    competitors: &[Presheaf],
    cap: usize,
) -> Result<Option<String>> {
    if !diagram.is_cocone(&colim.legs) {
        return Ok(Some("colimit legs are not a cocone".into()));
    }
    for q in competitors {
        let cocones = diagram.cocones_to(q, cap)?;
        let maps = enumerate_morphisms(&colim.apex, q, cap)?;
        if maps.len() != cocones.len() {
            return Ok(Some(format!(
                "{} maps out of the apex but {} cocones",
                maps.len(),
                cocones.len()
            )));
        }
        for legs in &cocones {
            let m = colim.mediate_to(q, legs)?;
            let ok = colim
                .legs
                .iter()
                .zip(legs)
                .all(|(l, c)| m.after_unchecked(l).components() == c.components());
            if !ok || m.naturality_failure().is_some() {
                return Ok(Some("mediating map does not factor a cocone".into()));
            }
        }
    }
    Ok(None)
}

/// Dual of [`verify_colimit`].
pub fn verify_limit(
    diagram: &PresheafDiagram,
    lim: &PresheafLimit,
    competitors: &[Presheaf],
    cap: usize,
) -> Result<Option<String>> {
    if !diagram.is_cone(&lim.legs) {
        return Ok(Some("limit legs are not a cone".into()));
    }
    for q in competitors {
        let cones = diagram.cones_from(q, cap)?;
        let maps = enumerate_morphisms(q, &lim.apex, cap)?;
        if maps.len() != cones.len() {
            return Ok(Some(format!(
                "{} maps into the apex but {} cones",
                maps.len(),
                cones.len()
            )));
        }
        for legs in &cones {
            let m = lim.mediate_from(q, legs)?;
            let ok = lim
                .legs
                .iter()
                .zip(legs)
                .all(|(l, c)| l.after_unchecked(&m).components() == c.components());
            if !ok || m.naturality_failure().is_some() {
                return Ok(Some("mediating map does not factor a cone".into()));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presheaf::{enumerate_presheaves, yoneda_embed};

    #[test]
    fn coproduct_of_points() {
        let one = FinCategory::terminal();
        let h = yoneda_embed(&one, ObjId(0)).unwrap();
        let d = PresheafDiagram::discrete(vec![h.clone(), h]).unwrap();
        let colim = presheaf_colimit(&d, None).unwrap();
        assert_eq!(colim.apex.sizes(), vec![2]);
        let competitors = enumerate_presheaves(&one, 3, 10).unwrap();
        assert_eq!(
            verify_colimit(&d, &colim, &competitors, 1000).unwrap(),
            None
        );
    }

    #[test]
    fn coequalizer_of_two_points() {
        let pt = Presheaf::set(&["*"]);
        let two = Presheaf::set(&["a", "b"]);
        let f = PresheafMorphism::new(&pt, &two, vec![vec![0]]).unwrap();
        let g = PresheafMorphism::new(&pt, &two, vec![vec![1]]).unwrap();
        let d = PresheafDiagram::parallel(&f, &g).unwrap();
        let colim = presheaf_colimit(&d, None).unwrap();
        assert_eq!(colim.apex.sizes(), vec![1]);
        // oracle: the quotient of {a, b} by a ~ b
        assert_eq!(colim.apex.labels(ObjId(0)), &["0/*".to_string()]);
        let competitors = enumerate_presheaves(pt.base(), 3, 10).unwrap();
        assert_eq!(
            verify_colimit(&d, &colim, &competitors, 1000).unwrap(),
            None
        );
    }

    #[test]
    fn empty_limit_is_terminal() {
        let c = FinCategory::chain(3);
        let d = PresheafDiagram::discrete(Vec::new()).unwrap();
        assert!(presheaf_limit(&d, None).is_err());
        let lim = presheaf_limit(&d, Some(&c)).unwrap();
        assert_eq!(lim.apex, Presheaf::terminal(&c));
        let colim = presheaf_colimit(&d, Some(&c)).unwrap();
        assert_eq!(colim.apex.sizes(), vec![0, 0, 0]);
    }

    #[test]
    fn product_of_representables_on_a_poset() {
        let c = FinCategory::poset(
            "diamond",
            &["0", "a", "b", "1"],
            &[("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")],
        );
        let ha = yoneda_embed(&c, ObjId(1)).unwrap();
        let hb = yoneda_embed(&c, ObjId(2)).unwrap();
        let d = PresheafDiagram::discrete(vec![ha.clone(), hb.clone()]).unwrap();
        let lim = presheaf_limit(&d, None).unwrap();
        // tuple oracle: pairs in hom(−,a) × hom(−,b), i.e. the meet `0`.
        for x in c.objects() {
            assert_eq!(lim.apex.size(x), ha.size(x) * hb.size(x));
        }
        assert_eq!(lim.apex.sizes(), vec![1, 0, 0, 0]);
        assert!(crate::presheaf::is_isomorphic(
            &lim.apex,
            &yoneda_embed(&c, ObjId(0)).unwrap()
        ));
        let competitors = enumerate_presheaves(&c, 1, 100).unwrap();
        assert_eq!(verify_limit(&d, &lim, &competitors, 1000).unwrap(), None);
    }

    #[test]
    fn equalizer_of_identity_pair() {
        let c = FinCategory::walking_arrow();
        let h = yoneda_embed(&c, ObjId(1)).unwrap();
        let id = PresheafMorphism::identity(&h);
        let d = PresheafDiagram::parallel(&id, &id).unwrap();
        let lim = presheaf_limit(&d, None).unwrap();
        assert!(lim.legs[0].is_iso());
        let competitors = enumerate_presheaves(&c, 2, 100).unwrap();
        assert_eq!(verify_limit(&d, &lim, &competitors, 1000).unwrap(), None);
    }

    #[test]
    fn non_cocone_is_rejected() {
        let pt = Presheaf::set(&["*"]);
        let two = Presheaf::set(&["a", "b"]);
        let f = PresheafMorphism::new(&pt, &two, vec![vec![0]]).unwrap();
        let g = PresheafMorphism::new(&pt, &two, vec![vec![1]]).unwrap();
        let d = PresheafDiagram::parallel(&f, &g).unwrap();
        let colim = presheaf_colimit(&d, None).unwrap();
        let legs = vec![f.clone(), PresheafMorphism::identity(&two)];
        assert!(colim.mediate(&legs).is_err());
    }
}

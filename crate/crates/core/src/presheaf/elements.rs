use super::core::{Presheaf, PresheafMorphism};
use super::limits::PresheafDiagram;
use super::yoneda::{yoneda_backward_from, yoneda_embed, yoneda_morphism_between};
use crate::fincat::{FinCategory, FinFunctor, MorId, Morphism, ObjId};

/// The category of elements of a presheaf `F`: objects are pairs `(x, X)`
/// with `x ∈ F(X)`, and arrows `(x, X) → (y, Y)` are the `f: X → Y` with
/// `F(f)(y) = x`. Objects are named `x@X` and arrows `f[y]`.
#[derive(Clone, Debug)]
pub struct ElementsCategory {
    presheaf: Presheaf,
    gamma: FinCategory,
    projection: FinFunctor,
    /// gamma object → (X, x)
    elements: Vec<(ObjId, usize)>,
    /// gamma morphism → (f, y)
    arrows: Vec<(MorId, usize)>,
    offsets: Vec<usize>,
}

pub fn category_of_elements(f: &Presheaf) -> ElementsCategory {
    let c = f.base();
    let mut offsets = Vec::with_capacity(c.num_objects());
    let mut elements = Vec::new();
    let mut names = Vec::new();
    for x in c.objects() {
        offsets.push(elements.len());
        for a in 0..f.size(x) {
            elements.push((x, a));
            names.push(format!("{}@{}", f.label(x, a), c.object_name(x)));
        }
    }
    let obj = |x: ObjId, a: usize| ObjId(offsets[x.0] + a);
    // identities first, in object order
    let mut arrows: Vec<(MorId, usize)> =
        elements.iter().map(|&(x, a)| (c.identity(x), a)).collect();
    for m in c.non_identity_morphisms() {
        for y in 0..f.size(c.tgt(m)) {
            arrows.push((m, y));
        }
    }
    let mut index = vec![Vec::new(); c.num_morphisms()];
    for (i, &(m, y)) in arrows.iter().enumerate() {
        let row = &mut index[m.0];
        if row.len() <= y {
            row.resize(y + 1, usize::MAX);
        }
        row[y] = i;
    }
    let morphisms: Vec<Morphism> = arrows
        .iter()
        .map(|&(m, y)| {
            let (s, t) = (c.src(m), c.tgt(m));
            Morphism {
                name: format!("{}[{}]", c.morphism_name(m), f.label(t, y)),
                src: obj(s, f.act(m, y)),
                tgt: obj(t, y),
            }
        })
        .collect();
    let identities: Vec<MorId> = (0..elements.len()).map(MorId).collect();
    let name = format!("elements({})", c.name());
    let gamma = FinCategory::assemble(name, names, morphisms, identities, |g, h| {
        // (g, z) ∘ (h, y) with y = F(g)(z) is (g∘h, z)
        let (gm, z) = arrows[g.0];
        let (hm, _) = arrows[h.0];
        MorId(index[c.comp(gm, hm).0][z])
    });
    let projection = FinFunctor::new(
        gamma.clone(),
        c.clone(),
        elements.iter().map(|e| e.0).collect(),
        arrows.iter().map(|a| a.0).collect(),
    );
    ElementsCategory {
        presheaf: f.clone(),
        gamma,
        projection,
        elements,
        arrows,
        offsets,
    }
}

impl ElementsCategory {
    pub fn presheaf(&self) -> &Presheaf {
        &self.presheaf
    }

    pub fn gamma(&self) -> &FinCategory {
        &self.gamma
    }

    /// `(x, X) ↦ X`.
    pub fn projection(&self) -> &FinFunctor {
        &self.projection
    }

    /// The object `(x, X)`.
    pub fn object_of(&self, x: ObjId, element: usize) -> ObjId {
        ObjId(self.offsets[x.0] + element)
    }

    /// `(X, x)` for an object of the category of elements.
    pub fn element(&self, e: ObjId) -> (ObjId, usize) {
        self.elements[e.0]
    }

    /// `(f, y)` for an arrow `f: (F(f)(y), X) → (y, Y)`.
    pub fn arrow(&self, m: MorId) -> (MorId, usize) {
        self.arrows[m.0]
    }

    /// `(x, X) ↦ h_X` as a diagram of representables.
    pub fn diamond(&self) -> PresheafDiagram {
        let c = self.presheaf.base();
        let reps: Vec<Presheaf> = c
            .objects()
            .map(|x| yoneda_embed(c, x).expect("object exists"))
            .collect();
        let objects = self
            .elements
            .iter()
            .map(|(x, _)| reps[x.0].clone())
            .collect();
        let arrows = self
            .arrows
            .iter()
            .map(|&(m, _)| yoneda_morphism_between(c, m, &reps[c.src(m).0], &reps[c.tgt(m).0]))
            .collect();
        PresheafDiagram::new_unchecked(self.gamma.clone(), objects, arrows)
    }

    /// The cocone `λ_(x,X): h_X → F` given by `x` under Yoneda, with the
    /// representables taken from `diagram`.
    pub fn lambda(&self, diagram: &PresheafDiagram) -> Vec<PresheafMorphism> {
        self.elements
            .iter()
            .enumerate()
            .map(|(i, &(x, a))| {
                yoneda_backward_from(diagram.object(ObjId(i)), x, &self.presheaf, a)
                    .expect("element exists")
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::{is_fully_faithful, validate_category, validate_functor};

    /// The slice `C/X`: objects are arrows into `X`, morphisms commuting triangles.
    fn slice(c: &FinCategory, x: ObjId) -> (FinCategory, Vec<MorId>, Vec<(MorId, MorId)>) {
        let objs: Vec<MorId> = c.arrows_into(x);
        let mut mors: Vec<(usize, usize, MorId)> = Vec::new();
        for (i, &a) in objs.iter().enumerate() {
            for (j, &b) in objs.iter().enumerate() {
                for &g in c.hom(c.src(a), c.src(b)) {
                    if c.comp(b, g) == a {
                        mors.push((i, j, g));
                    }
                }
            }
        }
        let mors_ref = &mors;
        let data = crate::fincat::CategoryData {
            name: "slice".into(),
            objects: objs
                .iter()
                .map(|m| c.morphism_name(*m).to_string())
                .collect(),
            morphisms: mors
                .iter()
                .enumerate()
                .map(|(k, (i, j, _))| {
                    (
                        format!("m{k}"),
                        c.morphism_name(objs[*i]).into(),
                        c.morphism_name(objs[*j]).into(),
                    )
                })
                .collect(),
            identities: mors
                .iter()
                .enumerate()
                .filter(|(_, (i, j, g))| i == j && c.is_identity(*g))
                .map(|(k, (i, _, _))| (c.morphism_name(objs[*i]).into(), format!("m{k}")))
                .collect(),
            compose: mors_ref
                .iter()
                .enumerate()
                .flat_map(|(k1, (i1, j1, g1))| {
                    mors_ref
                        .iter()
                        .enumerate()
                        .filter_map(move |(k2, (i2, j2, g2))| {
                            (j2 == i1).then(|| {
                                let h = c.comp(*g1, *g2);
                                let k3 = mors_ref
                                    .iter()
                                    .position(|(a, b, m)| a == i2 && b == j1 && *m == h)
                                    .unwrap();
                                (format!("m{k1}"), format!("m{k2}"), format!("m{k3}"))
                            })
                        })
                })
                .collect(),
        };
        let cat = FinCategory::from_data_with(&data, None).unwrap();
        let tri = mors.iter().map(|(i, _, g)| (objs[*i], *g)).collect();
        (cat, objs, tri)
    }

    #[test]
    fn terminal_presheaf_recovers_the_base() {
        let c = FinCategory::chain(3);
        let el = category_of_elements(&Presheaf::terminal(&c));
        assert_eq!(el.gamma().num_objects(), 3);
        assert_eq!(el.gamma().num_morphisms(), c.num_morphisms());
        assert!(is_fully_faithful(el.projection()).holds);
    }

    #[test]
    fn two_point_set_gives_discrete_category() {
        let el = category_of_elements(&Presheaf::set(&["a", "b"]));
        let g = el.gamma();
        assert_eq!(g.num_objects(), 2);
        assert_eq!(g.num_morphisms(), 2);
        assert_eq!(g.object_name(ObjId(1)), "b@*");
    }

    #[test]
    fn representable_gives_the_slice() {
        let c = FinCategory::poset(
            "diamond",
            &["0", "a", "b", "1"],
            &[("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")],
        );
        let z2 = FinCategory::monoid("z2", &["e", "s"], &[vec![0, 1], vec![1, 0]]).unwrap();
        for (c, x) in [
            (c, ObjId(3)),
            (z2, ObjId(0)),
            (FinCategory::parallel_pair(), ObjId(1)),
        ] {
            let h = yoneda_embed(&c, x).unwrap();
            let el = category_of_elements(&h);
            let (sl, objs, _) = slice(&c, x);
            assert_eq!(el.gamma().num_objects(), sl.num_objects());
            // comparison: element (a, A) of h_X is the arrow a: A → X
            let obj_map: Vec<ObjId> = el
                .gamma()
                .objects()
                .map(|e| {
                    let (a_obj, a) = el.element(e);
                    let m = c.hom(a_obj, x)[a];
                    ObjId(objs.iter().position(|o| *o == m).unwrap())
                })
                .collect();
            let mut seen = obj_map.clone();
            seen.sort();
            seen.dedup();
            assert_eq!(seen.len(), sl.num_objects());
            // hom-sets have the same sizes, so with a bijection on objects the categories match
            for e1 in el.gamma().objects() {
                for e2 in el.gamma().objects() {
                    assert_eq!(
                        el.gamma().hom(e1, e2).len(),
                        sl.hom(obj_map[e1.0], obj_map[e2.0]).len()
                    );
                }
            }
        }
    }

    #[test]
    fn projection_and_lambda_are_lawful() {
        let c = FinCategory::walking_arrow();
        let f = Presheaf::from_names(
            &c,
            &[("0", &["p", "q"]), ("1", &["r", "s"])],
            &[("f", &[("r", "q"), ("s", "q")])],
        )
        .unwrap();
        let el = category_of_elements(&f);
        assert!(validate_category(&el.gamma().to_data()).passed());
        assert!(validate_functor(el.projection()).passed());
        assert_eq!(el.gamma().num_objects(), f.total_size());
        let d = el.diamond();
        let lambda = el.lambda(&d);
        assert!(d.is_cocone(&lambda));
    }
}

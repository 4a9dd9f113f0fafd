use serde::Serialize;

use super::category::{FinCategory, MorId, ObjId, ValidationReport, Violation};
use crate::error::{Error, Result};

/// A functor between finite categories, stored as object and morphism maps.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FinFunctor {
    dom: FinCategory,
    cod: FinCategory,
    obj_map: Vec<ObjId>,
    mor_map: Vec<MorId>,
}

impl FinFunctor {
    /// Stores the maps without checking the functor laws; see [`validate_functor`].
    pub fn new(
        dom: FinCategory,
        cod: FinCategory,
        obj_map: Vec<ObjId>,
        mor_map: Vec<MorId>,
    ) -> Self {
        Self {
            dom,
            cod,
            obj_map,
            mor_map,
        }
    }

    /// Builds and validates a functor from name pairs.
    pub fn from_names(
        dom: &FinCategory,
        cod: &FinCategory,
        objects: &[(&str, &str)],
        morphisms: &[(&str, &str)],
    ) -> Result<Self> {
        let mut obj_map = vec![None; dom.num_objects()];
        for (a, b) in objects {
            obj_map[dom.object_id(a)?.0] = Some(cod.object_id(b)?);
        }
        let mut mor_map = vec![None; dom.num_morphisms()];
        for x in dom.objects() {
            if let Some(fx) = obj_map[x.0] {
                mor_map[dom.identity(x).0] = Some(cod.identity(fx));
            }
        }
        for (a, b) in morphisms {
            mor_map[dom.morphism_id(a)?.0] = Some(cod.morphism_id(b)?);
        }
        let unmapped = |what: &str, name: &str| {
            let mut r = ValidationReport::default();
            r.push(Violation::Structural {
                detail: format!("{what} `{name}` is unmapped"),
            });
            Error::InvalidFunctor(r)
        };
        let obj_map = obj_map
            .into_iter()
            .enumerate()
            .map(|(i, o)| o.ok_or_else(|| unmapped("object", dom.object_name(ObjId(i)))))
            .collect::<Result<Vec<_>>>()?;
        let mor_map = mor_map
            .into_iter()
            .enumerate()
            .map(|(i, m)| m.ok_or_else(|| unmapped("morphism", dom.morphism_name(MorId(i)))))
            .collect::<Result<Vec<_>>>()?;
        let functor = Self::new(dom.clone(), cod.clone(), obj_map, mor_map);
        let report = validate_functor(&functor);
        if report.passed() {
            Ok(functor)
        } else {
            Err(Error::InvalidFunctor(report))
        }
    }

    pub fn identity(c: &FinCategory) -> Self {
        Self::new(
            c.clone(),
            c.clone(),
            c.objects().collect(),
            c.morphisms().collect(),
        )
    }

    /// Sends every object to `z` and every morphism to `id_z`.
    pub fn constant(dom: &FinCategory, cod: &FinCategory, z: ObjId) -> Self {
        Self::new(
            dom.clone(),
            cod.clone(),
            vec![z; dom.num_objects()],
            vec![cod.identity(z); dom.num_morphisms()],
        )
    }

    pub fn dom(&self) -> &FinCategory {
        &self.dom
    }

    pub fn cod(&self) -> &FinCategory {
        &self.cod
    }

    pub fn ob(&self, x: ObjId) -> ObjId {
        self.obj_map[x.0]
    }

    pub fn mor(&self, f: MorId) -> MorId {
        self.mor_map[f.0]
    }

    pub fn opposite(&self) -> Self {
        Self::new(
            self.dom.opposite(),
            self.cod.opposite(),
            self.obj_map.clone(),
            self.mor_map.clone(),
        )
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &FinFunctor) -> Result<Self> {
        if self.cod != other.dom {
            return Err(Error::BaseMismatch(
                self.cod.name().into(),
                other.dom.name().into(),
            ));
        }
        Ok(Self::new(
            self.dom.clone(),
            other.cod.clone(),
            self.obj_map.iter().map(|x| other.ob(*x)).collect(),
            self.mor_map.iter().map(|f| other.mor(*f)).collect(),
        ))
    }
}

pub fn validate_functor(functor: &FinFunctor) -> ValidationReport {
    let mut report = ValidationReport::default();
    let (dom, cod) = (&functor.dom, &functor.cod);
    if functor.obj_map.len() != dom.num_objects() || functor.mor_map.len() != dom.num_morphisms() {
        report.push(Violation::Structural {
            detail: "object or morphism map has the wrong length".into(),
        });
        return report;
    }
    if let Some(x) = functor.obj_map.iter().find(|x| x.0 >= cod.num_objects()) {
        report.push(Violation::Structural {
            detail: format!("object id {} out of range", x.0),
        });
    }
    if let Some(m) = functor.mor_map.iter().find(|m| m.0 >= cod.num_morphisms()) {
        report.push(Violation::Structural {
            detail: format!("morphism id {} out of range", m.0),
        });
    }
    if !report.passed() {
        return report;
    }
    for f in dom.morphisms() {
        let ff = functor.mor(f);
        if cod.src(ff) != functor.ob(dom.src(f)) || cod.tgt(ff) != functor.ob(dom.tgt(f)) {
            report.push(Violation::Endpoints {
                morphism: dom.morphism_name(f).into(),
            });
        }
    }
    if !report.passed() {
        return report;
    }
    for x in dom.objects() {
        if functor.mor(dom.identity(x)) != cod.identity(functor.ob(x)) {
            report.push(Violation::PreservesIdentity {
                object: dom.object_name(x).into(),
            });
        }
    }
    for g in dom.morphisms() {
        for f in dom.morphisms() {
            if let Some(gf) = dom.compose(g, f) {
                if functor.mor(gf) != cod.comp(functor.mor(g), functor.mor(f)) {
                    report.push(Violation::PreservesComposition {
                        g: dom.morphism_name(g).into(),
                        f: dom.morphism_name(f).into(),
                    });
                }
            }
        }
    }
    report
}

/// A natural transformation between parallel [`FinFunctor`]s.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NatTransf {
    pub dom: FinFunctor,
    pub cod: FinFunctor,
    /// `components[x]: dom(x) → cod(x)`
    pub components: Vec<MorId>,
}

impl NatTransf {
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let c = self.dom.dom();
        let z = self.dom.cod();
        for x in c.objects() {
            let a = self.components[x.0];
            if z.src(a) != self.dom.ob(x) || z.tgt(a) != self.cod.ob(x) {
                report.push(Violation::Endpoints {
                    morphism: format!("component at {}", c.object_name(x)),
                });
            }
        }
        if !report.passed() {
            return report;
        }
        for f in c.morphisms() {
            let (s, t) = (c.src(f), c.tgt(f));
            if z.comp(self.cod.mor(f), self.components[s.0])
                != z.comp(self.components[t.0], self.dom.mor(f))
            {
                report.push(Violation::Naturality {
                    morphism: c.morphism_name(f).into(),
                });
            }
        }
        report
    }
}

fn check_parallel(f: &FinFunctor, g: &FinFunctor) -> Result<()> {
    if f.dom != g.dom || f.cod != g.cod {
        return Err(Error::contract("functors are not parallel"));
    }
    Ok(())
}

/// All natural transformations `f ⇒ g`, in lexicographic order of components.
pub fn enumerate_nat_transfs(f: &FinFunctor, g: &FinFunctor) -> Result<Vec<NatTransf>> {
    check_parallel(f, g)?;
    let c = f.dom();
    let z = f.cod();
    let n = c.num_objects();
    let candidates: Vec<&[MorId]> = c.objects().map(|x| z.hom(f.ob(x), g.ob(x))).collect();
    // Morphisms of C whose endpoints are both assigned once object `k` is.
    let mut checks: Vec<Vec<MorId>> = vec![Vec::new(); n];
    for m in c.morphisms() {
        let k = c.src(m).0.max(c.tgt(m).0);
        checks[k].push(m);
    }
    let mut out = Vec::new();
    let mut chosen = vec![MorId(0); n];
    fn go(
        k: usize,
        chosen: &mut Vec<MorId>,
        out: &mut Vec<NatTransf>,
        cx: (&FinFunctor, &FinFunctor, &[&[MorId]], &[Vec<MorId>]),
    ) {
        let (f, g, candidates, checks) = cx;
        let c = f.dom();
        let z = f.cod();
        if k == chosen.len() {
            out.push(NatTransf {
                dom: f.clone(),
                cod: g.clone(),
                components: chosen.clone(),
            });
            return;
        }
        for &a in candidates[k] {
            chosen[k] = a;
            let natural = checks[k].iter().all(|&m| {
                let (s, t) = (c.src(m), c.tgt(m));
                z.comp(g.mor(m), chosen[s.0]) == z.comp(chosen[t.0], f.mor(m))
            });
            if natural {
                go(k + 1, chosen, out, cx);
            }
        }
    }
    go(0, &mut chosen, &mut out, (f, g, &candidates, &checks));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HomMapFailure {
    NotInjective {
        x: String,
        y: String,
        f1: String,
        f2: String,
    },
    NotSurjective {
        x: String,
        y: String,
        missed: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FullyFaithful {
    pub holds: bool,
    pub witness: Option<HomMapFailure>,
}

/// Checks that every hom-map `[X, Y] → [FX, FY]` is a bijection.
pub fn is_fully_faithful(functor: &FinFunctor) -> FullyFaithful {
    let c = functor.dom();
    let z = functor.cod();
    for x in c.objects() {
        for y in c.objects() {
            let hom = c.hom(x, y);
            let mut images: Vec<(MorId, MorId)> =
                hom.iter().map(|&f| (functor.mor(f), f)).collect();
            images.sort();
            if let Some(w) = images.windows(2).find(|w| w[0].0 == w[1].0) {
                return FullyFaithful {
                    holds: false,
                    witness: Some(HomMapFailure::NotInjective {
                        x: c.object_name(x).into(),
                        y: c.object_name(y).into(),
                        f1: c.morphism_name(w[0].1).into(),
                        f2: c.morphism_name(w[1].1).into(),
                    }),
                };
            }
            let target = z.hom(functor.ob(x), functor.ob(y));
            if let Some(missed) = target
                .iter()
                .find(|g| images.binary_search_by(|p| p.0.cmp(g)).is_err())
            {
                return FullyFaithful {
                    holds: false,
                    witness: Some(HomMapFailure::NotSurjective {
                        x: c.object_name(x).into(),
                        y: c.object_name(y).into(),
                        missed: z.morphism_name(*missed).into(),
                    }),
                };
            }
        }
    }
    FullyFaithful {
        holds: true,
        witness: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_constant_functors_validate() {
        let c = FinCategory::chain(3);
        assert!(validate_functor(&FinFunctor::identity(&c)).passed());
        let two = FinCategory::walking_arrow();
        assert!(validate_functor(&FinFunctor::constant(&c, &two, ObjId(1))).passed());
    }

    #[test]
    fn wrong_morphism_image_is_caught() {
        let two = FinCategory::walking_arrow();
        let f = two.morphism_id("f").unwrap();
        let mut mor_map: Vec<MorId> = two.morphisms().collect();
        mor_map[f.0] = two.identity(ObjId(0));
        let bad = FinFunctor::new(two.clone(), two.clone(), two.objects().collect(), mor_map);
        let report = validate_functor(&bad);
        assert_eq!(
            report.first(),
            Some(&Violation::Endpoints {
                morphism: "f".into()
            })
        );
    }

    #[test]
    fn unmapped_morphism_is_structural() {
        let two = FinCategory::walking_arrow();
        let err = FinFunctor::from_names(&two, &two, &[("0", "0"), ("1", "1")], &[]).unwrap_err();
        assert!(
            matches!(err, Error::InvalidFunctor(r) if matches!(r.first(), Some(Violation::Structural { .. })))
        );
    }

    #[test]
    fn identity_on_terminal_has_one_transformation() {
        let one = FinCategory::terminal();
        let id = FinFunctor::identity(&one);
        assert_eq!(enumerate_nat_transfs(&id, &id).unwrap().len(), 1);
    }

    #[test]
    fn transformations_between_constants_match_homs() {
        let target = FinCategory::parallel_pair();
        let src = FinCategory::chain(3);
        for x in target.objects() {
            for y in target.objects() {
                let cx = FinFunctor::constant(&src, &target, x);
                let cy = FinFunctor::constant(&src, &target, y);
                let nats = enumerate_nat_transfs(&cx, &cy).unwrap();
                // Naturality forces all components equal; oracle is the hom-set itself.
                let mut comps: Vec<MorId> = nats.iter().map(|n| n.components[0]).collect();
                comps.sort();
                assert_eq!(comps, target.hom(x, y).to_vec());
                assert!(nats.iter().all(|n| n.validate().passed()));
            }
        }
    }

    #[test]
    fn fully_faithful_checks() {
        let c = FinCategory::parallel_pair();
        assert!(is_fully_faithful(&FinFunctor::identity(&c)).holds);
        let one = FinCategory::terminal();
        let to_one = FinFunctor::constant(&c, &one, ObjId(0));
        let ff = is_fully_faithful(&to_one);
        assert!(!ff.holds);
        assert!(matches!(
            ff.witness,
            Some(HomMapFailure::NotInjective { .. })
        ));
        // The arrow category collapses onto 1: [1, 0] is empty but [*, *] is not.
        let two = FinCategory::walking_arrow();
        let ff = is_fully_faithful(&FinFunctor::constant(&two, &one, ObjId(0)));
        assert!(matches!(
            ff.witness,
            Some(HomMapFailure::NotSurjective { .. })
        ));
    }
}

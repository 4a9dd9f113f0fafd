use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fincat::ObjId;
use crate::handle::{HandleColimit, HandleFunctor};
use crate::presheaf::{
    category_of_elements, yoneda_embed, yoneda_morphism, ElementsCategory, Presheaf,
    PresheafDiagram, PresheafMorphism,
};

/// `p̃(H)`: the colimit of `p ∘ π` over the category of elements of `H`,
/// with one leg `p(X) → p̃(H)` per element `(x, X)`.
#[derive(Clone, Debug)]
pub struct ExtendedObject {
    pub presheaf: Presheaf,
    pub apex: Presheaf,
    pub legs: Vec<PresheafMorphism>,
    pub elements: ElementsCategory,
    colimit: HandleColimit,
}

impl ExtendedObject {
    /// The leg at `(x, X)`.
    pub fn leg(&self, x: ObjId, element: usize) -> &PresheafMorphism {
        &self.legs[self.elements.object_of(x, element).0]
    }

    /// The unique map out of `p̃(H)` with the given legs.
    pub fn mediate_to(
        &self,
        p: &HandleFunctor,
        q: &Presheaf,
        legs: &[PresheafMorphism],
    ) -> Result<PresheafMorphism> {
        self.colimit.mediate_to(p.cod(), q, legs)
    }
}

pub fn tilde_extend(p: &HandleFunctor, h: &Presheaf) -> Result<ExtendedObject> {
    if h.base() != p.dom() {
        return Err(Error::BaseMismatch(
            h.base().name().into(),
            p.dom().name().into(),
        ));
    }
    let elements = category_of_elements(h);
    let gamma = elements.gamma();
    let objects = gamma
        .objects()
        .map(|e| p.ob(elements.element(e).0).clone())
        .collect();
    let arrows = gamma
        .morphisms()
        .map(|m| p.mor(elements.arrow(m).0).clone())
        .collect();
    let diagram = PresheafDiagram::new_unchecked(gamma.clone(), objects, arrows);
    let colimit = p.cod().colimit(&diagram)?;
    Ok(ExtendedObject {
        presheaf: h.clone(),
        apex: colimit.apex.clone(),
        legs: colimit.legs.clone(),
        elements,
        colimit,
    })
}

/// `p̃(m): p̃(H) → p̃(H')`, mediating the legs `(x, X) ↦ leg'(m_X(x), X)`.
pub fn tilde_extend_map(
    p: &HandleFunctor,
    m: &PresheafMorphism,
    dom: &ExtendedObject,
    cod: &ExtendedObject,
) -> Result<PresheafMorphism> {
    if m.dom() != &dom.presheaf || m.cod() != &cod.presheaf {
        return Err(Error::contract(
            "extended map does not match the extended objects",
        ));
    }
    let legs: Vec<PresheafMorphism> = dom
        .elements
        .gamma()
        .objects()
        .map(|e| {
            let (x, a) = dom.elements.element(e);
            cod.leg(x, m.apply(x, a)).clone()
        })
        .collect();
    dom.mediate_to(p, &cod.apex, &legs)
}

/// The isomorphism `η: p ≅ p̃ ∘ h`, one component `p(X) → p̃(h_X)` per object.
#[derive(Clone, Debug)]
pub struct EtaIso {
    pub components: Vec<PresheafMorphism>,
    /// first component that is not an isomorphism, or first failed square
    pub failure: Option<String>,
}

impl EtaIso {
    pub fn holds(&self) -> bool {
        self.failure.is_none()
    }
}

/// Built from the leg at `(id_X, X)`; checked to be iso and natural.
pub fn eta_iso(ext: &ExtensionResult) -> Result<EtaIso> {
    let p = &ext.p;
    let c = p.dom();
    let mut components = Vec::with_capacity(c.num_objects());
    let mut failure = None;
    let reps: Vec<Presheaf> = c
        .objects()
        .map(|x| yoneda_embed(c, x))
        .collect::<Result<_>>()?;
    for x in c.objects() {
        let e = ext.apply(&reps[x.0])?;
        let id = c
            .hom(x, x)
            .iter()
            .position(|m| *m == c.identity(x))
            .expect("identity in hom");
        let leg = e.leg(x, id).clone();
        if failure.is_none() && !leg.is_iso() {
            failure = Some(format!(
                "component at `{}` is not an isomorphism",
                c.object_name(x)
            ));
        }
        components.push(leg);
    }
    for f in c.non_identity_morphisms() {
        if failure.is_some() {
            break;
        }
        let (x, y) = (c.src(f), c.tgt(f));
        let hf = yoneda_morphism(c, f)?;
        let tf = ext.apply_map(&hf)?;
        let left = tf.after_unchecked(&components[x.0]);
        let right = components[y.0].after_unchecked(p.mor(f));
        if left.components() != right.components() {
            failure = Some(format!(
                "naturality square of `{}` does not commute",
                c.morphism_name(f)
            ));
        }
    }
    Ok(EtaIso {
        components,
        failure,
    })
}

/// `p̃` as a procedure with per-presheaf memoization.
#[derive(Debug)]
pub struct ExtensionResult {
    p: HandleFunctor,
    memo: Mutex<HashMap<Presheaf, Arc<ExtendedObject>>>,
}

impl ExtensionResult {
    pub fn new(p: &HandleFunctor) -> Self {
        Self {
            p: p.clone(),
            memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn functor(&self) -> &HandleFunctor {
        &self.p
    }

    pub fn apply(&self, h: &Presheaf) -> Result<Arc<ExtendedObject>> {
        if let Some(e) = self.memo.lock().expect("memo lock").get(h) {
            return Ok(e.clone());
        }
        let e = Arc::new(tilde_extend(&self.p, h)?);
        self.memo
            .lock()
            .expect("memo lock")
            .insert(h.clone(), e.clone());
        Ok(e)
    }

    pub fn apply_map(&self, m: &PresheafMorphism) -> Result<PresheafMorphism> {
        let dom = self.apply(m.dom())?;
        let cod = self.apply(m.cod())?;
        tilde_extend_map(&self.p, m, &dom, &cod)
    }

    pub fn eta(&self) -> Result<EtaIso> {
        eta_iso(self)
    }

    pub fn memo_size(&self) -> usize {
        self.memo.lock().expect("memo lock").len()
    }
}

/// Functoriality of `p̃` on one composable pair: `p̃(g ∘ f) = p̃(g) ∘ p̃(f)`
/// and `p̃(id) = id`.
pub fn check_functoriality(
    ext: &ExtensionResult,
    f: &PresheafMorphism,
    g: &PresheafMorphism,
) -> Result<bool> {
    let tf = ext.apply_map(f)?;
    let tg = ext.apply_map(g)?;
    let tgf = ext.apply_map(&g.after(f)?)?;
    let id = ext.apply_map(&PresheafMorphism::identity(f.dom()))?;
    Ok(tgf.components() == tg.after_unchecked(&tf).components()
        && id.components() == PresheafMorphism::identity(id.dom()).components())
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtensionSummary {
    pub presheaf_sizes: Vec<usize>,
    pub apex_sizes: Vec<usize>,
    pub apex_labels: Vec<Vec<String>>,
    pub legs: Vec<(String, String)>,
}

impl ExtendedObject {
    /// Names of the apex elements and, per element `(x, X)`, the leg's signature.
    pub fn summary(&self) -> ExtensionSummary {
        let gamma = self.elements.gamma();
        ExtensionSummary {
            presheaf_sizes: self.presheaf.sizes(),
            apex_sizes: self.apex.sizes(),
            apex_labels: self.apex.all_labels().to_vec(),
            legs: gamma
                .objects()
                .map(|e| (gamma.object_name(e).to_string(), self.legs[e.0].signature()))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::FinCategory;
    use crate::handle::{Budget, ComputationalCategory};
    use crate::presheaf::{enumerate_morphisms, enumerate_presheaves, find_iso};

    fn finset() -> ComputationalCategory {
        ComputationalCategory::finset(3, Budget::DEFAULT).unwrap()
    }

    #[test]
    fn on_the_point_extension_is_a_product() {
        let one = FinCategory::terminal();
        let z = finset();
        let p = HandleFunctor::set_valued("p", &one, &z, &[("*", &["u", "v"])], &[]).unwrap();
        let ext = ExtensionResult::new(&p);
        for n in 0..=3 {
            let s = Presheaf::set_of_size(n);
            // coproduct of |S| copies of A
            assert_eq!(ext.apply(&s).unwrap().apex.total_size(), 2 * n);
        }
        assert!(ext.eta().unwrap().holds());
    }

    #[test]
    fn initial_goes_to_initial() {
        let c = FinCategory::chain(3);
        let z = finset();
        let p = HandleFunctor::set_valued(
            "p",
            &c,
            &z,
            &[("0", &["a"]), ("1", &["a", "b"]), ("2", &["a", "b"])],
            &[
                ("0<=1", &[("a", "a")]),
                ("1<=2", &[("a", "a"), ("b", "b")]),
                ("0<=2", &[("a", "a")]),
            ],
        )
        .unwrap();
        let e = tilde_extend(&p, &Presheaf::initial(&c)).unwrap();
        assert_eq!(e.apex.total_size(), 0);
    }

    #[test]
    fn eta_on_walking_arrow_and_representables() {
        let c = FinCategory::walking_arrow();
        let z = finset();
        let p = HandleFunctor::set_valued(
            "p",
            &c,
            &z,
            &[("0", &["x", "y"]), ("1", &["u"])],
            &[("f", &[("x", "u"), ("y", "u")])],
        )
        .unwrap();
        let ext = ExtensionResult::new(&p);
        let eta = ext.eta().unwrap();
        assert!(eta.holds(), "{:?}", eta.failure);
        for x in c.objects() {
            let h = yoneda_embed(&c, x).unwrap();
            assert!(find_iso(&ext.apply(&h).unwrap().apex, p.ob(x)).is_some());
        }
    }

    #[test]
    fn extension_is_functorial() {
        let c = FinCategory::walking_arrow();
        let z = finset();
        let p = HandleFunctor::set_valued(
            "p",
            &c,
            &z,
            &[("0", &["x", "y"]), ("1", &["u"])],
            &[("f", &[("x", "u"), ("y", "u")])],
        )
        .unwrap();
        let ext = ExtensionResult::new(&p);
        let hs = enumerate_presheaves(&c, 2, 100).unwrap();
        let mut pairs = 0;
        for a in hs.iter().step_by(3) {
            for b in hs.iter().step_by(4) {
                for f in enumerate_morphisms(a, b, 100).unwrap().iter().take(2) {
                    for g in enumerate_morphisms(b, b, 100).unwrap().iter().take(2) {
                        assert!(check_functoriality(&ext, f, g).unwrap());
                        pairs += 1;
                    }
                }
            }
        }
        assert!(pairs > 0);
    }

    #[test]
    fn yoneda_extends_to_the_identity() {
        let c = FinCategory::walking_arrow();
        let z = ComputationalCategory::presheaf_category(&c, 3, Budget::DEFAULT).unwrap();
        let y = HandleFunctor::yoneda(&z).unwrap();
        let ext = ExtensionResult::new(&y);
        for h in enumerate_presheaves(&c, 2, 100).unwrap() {
            assert!(find_iso(&ext.apply(&h).unwrap().apex, &h).is_some());
        }
    }
}

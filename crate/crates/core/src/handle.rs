//! Bounded handles on presheaf and sheaf categories, and functors into them.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fincat::{FinCategory, MorId, ObjId};
use crate::presheaf::{
    dedupe_isomorphic, enumerate_morphisms, enumerate_presheaves, find_iso, presheaf_colimit,
    presheaf_limit, yoneda_embed, yoneda_morphism, Presheaf, PresheafColimit, PresheafDiagram,
    PresheafLimit, PresheafMorphism,
};
use crate::site::{
    epsilon_functor, is_sheaf, sheafify, sheafify_map, HomSets, SheafificationResult, Site,
};

/// Resource limits for enumeration-based checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Budget {
    pub profile: &'static str,
    /// natural transformations per hom-set
    pub hom_cap: usize,
    /// presheaves enumerated per category
    pub object_cap: usize,
    /// value bound of presheaves used as exactness test inputs
    pub flat_bound: usize,
    /// product and equalizer instances per exactness check
    pub flat_pairs: usize,
    /// sampled instances per randomized check
    pub samples: usize,
}

impl Budget {
    pub const SMALL: Budget = Budget {
        profile: "small",
        hom_cap: 1 << 12,
        object_cap: 1 << 14,
        flat_bound: 1,
        flat_pairs: 16,
        samples: 10,
    };
    pub const DEFAULT: Budget = Budget {
        profile: "default",
        hom_cap: 1 << 16,
        object_cap: 1 << 17,
        flat_bound: 2,
        flat_pairs: 64,
        samples: 50,
    };
    pub const LARGE: Budget = Budget {
        profile: "large",
        hom_cap: 1 << 20,
        object_cap: 1 << 20,
        flat_bound: 2,
        flat_pairs: 256,
        samples: 200,
    };

    pub fn named(profile: &str) -> Option<Budget> {
        match profile {
            "small" => Some(Self::SMALL),
            "default" => Some(Self::DEFAULT),
            "large" => Some(Self::LARGE),
            _ => None,
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Self::DEFAULT
    }
}

struct Inner {
    name: String,
    base: FinCategory,
    site: Option<Site>,
    bound: usize,
    budget: Budget,
    objects: OnceLock<Vec<Presheaf>>,
    sheafified: Mutex<HashMap<Presheaf, Arc<SheafificationResult>>>,
}

/// A presheaf category `PSh(C)`, or its full subcategory of sheaves on a
/// site, enumerated only up to a bound on the value sets. Finite sets are
/// presheaves on the terminal category.
#[derive(Clone)]
pub struct ComputationalCategory(Arc<Inner>);

impl fmt::Debug for ComputationalCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ComputationalCategory({}, bound {})",
            self.0.name, self.0.bound
        )
    }
}

impl PartialEq for ComputationalCategory {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.base == other.0.base
                && self.0.site == other.0.site
                && self.0.bound == other.0.bound)
    }
}

impl Eq for ComputationalCategory {}

/// A colimit computed in a handle: pointwise, then sheafified for sheaf handles.
#[derive(Clone, Debug)]
pub struct HandleColimit {
    pub apex: Presheaf,
    pub legs: Vec<PresheafMorphism>,
    pointwise: PresheafColimit,
    sheafified: Option<Arc<SheafificationResult>>,
}

impl ComputationalCategory {
    fn build(
        name: String,
        base: FinCategory,
        site: Option<Site>,
        bound: usize,
        budget: Budget,
    ) -> Result<Self> {
        if bound == 0 {
            return Err(Error::contract(
                "a category handle needs a value bound of at least 1",
            ));
        }
        Ok(Self(Arc::new(Inner {
            name,
            base,
            site,
            bound,
            budget,
            objects: OnceLock::new(),
            sheafified: Mutex::new(HashMap::new()),
        })))
    }

    pub fn presheaf_category(c: &FinCategory, bound: usize, budget: Budget) -> Result<Self> {
        Self::build(format!("PSh({})", c.name()), c.clone(), None, bound, budget)
    }

    pub fn finset(bound: usize, budget: Budget) -> Result<Self> {
        Self::build(
            "FinSet".into(),
            FinCategory::terminal(),
            None,
            bound,
            budget,
        )
    }

    pub fn sheaf_category(site: &Site, bound: usize, budget: Budget) -> Result<Self> {
        Self::build(
            format!("Sh({})", site.name()),
            site.base().clone(),
            Some(site.clone()),
            bound,
            budget,
        )
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn base(&self) -> &FinCategory {
        &self.0.base
    }

    pub fn site(&self) -> Option<&Site> {
        self.0.site.as_ref()
    }

    pub fn bound(&self) -> usize {
        self.0.bound
    }

    pub fn budget(&self) -> Budget {
        self.0.budget
    }

    pub fn is_finset(&self) -> bool {
        self.0.site.is_none() && self.0.base.num_objects() == 1 && self.0.base.num_morphisms() == 1
    }

    /// Whether `p` is an object of this category (for sheaf handles: a sheaf).
    pub fn contains(&self, p: &Presheaf) -> Result<bool> {
        if p.base() != &self.0.base {
            return Ok(false);
        }
        match &self.0.site {
            Some(site) => Ok(is_sheaf(p, site)?.holds),
            None => Ok(true),
        }
    }

    fn check_member(&self, p: &Presheaf) -> Result<()> {
        if p.base() != &self.0.base {
            return Err(Error::BaseMismatch(
                p.base().name().into(),
                self.0.base.name().into(),
            ));
        }
        Ok(())
    }

    /// Objects with value sets within the bound, one per isomorphism class.
    pub fn objects(&self) -> Result<&[Presheaf]> {
        if let Some(objs) = self.0.objects.get() {
            return Ok(objs);
        }
        let all = enumerate_presheaves(&self.0.base, self.0.bound, self.0.budget.object_cap)?;
        let mut members = Vec::with_capacity(all.len());
        for p in all {
            if self.contains(&p)? {
                members.push(p);
            }
        }
        let objs = dedupe_isomorphic(members);
        Ok(self.0.objects.get_or_init(|| objs))
    }

    pub fn hom(&self, a: &Presheaf, b: &Presheaf) -> Result<Vec<PresheafMorphism>> {
        self.check_member(a)?;
        self.check_member(b)?;
        enumerate_morphisms(a, b, self.0.budget.hom_cap)
    }

    pub fn find_iso(&self, a: &Presheaf, b: &Presheaf) -> Option<PresheafMorphism> {
        find_iso(a, b)
    }

    pub fn terminal(&self) -> Presheaf {
        Presheaf::terminal(&self.0.base)
    }

    pub fn initial(&self) -> Result<Presheaf> {
        let empty = Presheaf::initial(&self.0.base);
        match &self.0.site {
            Some(_) => Ok(self.sheafify(&empty)?.sheaf.clone()),
            None => Ok(empty),
        }
    }

    /// Sheafification on the handle's site (memoized); identity-like for
    /// presheaf handles is not provided, callers check [`Self::site`].
    pub fn sheafify(&self, p: &Presheaf) -> Result<Arc<SheafificationResult>> {
        let site = self
            .0
            .site
            .as_ref()
            .ok_or_else(|| Error::contract("sheafifying in a presheaf handle"))?;
        if let Some(r) = self.0.sheafified.lock().expect("memo lock").get(p) {
            return Ok(r.clone());
        }
        let r = Arc::new(sheafify(p, site)?);
        self.0
            .sheafified
            .lock()
            .expect("memo lock")
            .insert(p.clone(), r.clone());
        Ok(r)
    }

    /// The unique object a presheaf map is sent to by sheafification, or the
    /// map itself in a presheaf handle.
    pub fn sheafify_map(&self, m: &PresheafMorphism) -> Result<PresheafMorphism> {
        let Some(site) = &self.0.site else {
            return Ok(m.clone());
        };
        let a = self.sheafify(m.dom())?;
        let b = self.sheafify(m.cod())?;
        sheafify_map(site, m, &a, &b)
    }

    pub fn colimit(&self, diagram: &PresheafDiagram) -> Result<HandleColimit> {
        let pointwise = presheaf_colimit(diagram, Some(&self.0.base))?;
        match &self.0.site {
            None => Ok(HandleColimit {
                apex: pointwise.apex.clone(),
                legs: pointwise.legs.clone(),
                pointwise,
                sheafified: None,
            }),
            Some(_) => {
                let a = self.sheafify(&pointwise.apex)?;
                let legs = pointwise
                    .legs
                    .iter()
                    .map(|l| a.unit.after_unchecked(l))
                    .collect();
                Ok(HandleColimit {
                    apex: a.sheaf.clone(),
                    legs,
                    pointwise,
                    sheafified: Some(a),
                })
            }
        }
    }

    /// Pointwise limit; limits of sheaves are sheaves.
    pub fn limit(&self, diagram: &PresheafDiagram) -> Result<PresheafLimit> {
        presheaf_limit(diagram, Some(&self.0.base))
    }

    /// Objects detecting equality of maps: representables, sheafified in a
    /// sheaf handle.
    pub fn generators(&self) -> Result<Vec<Presheaf>> {
        let c = &self.0.base;
        c.objects()
            .map(|x| {
                let h = yoneda_embed(c, x)?;
                match &self.0.site {
                    Some(_) => Ok(self.sheafify(&h)?.sheaf.clone()),
                    None => Ok(h),
                }
            })
            .collect()
    }
}

impl HandleColimit {
    /// The unique map `apex → q` factoring the cocone `legs`.
    pub fn mediate_to(
        &self,
        handle: &ComputationalCategory,
        q: &Presheaf,
        legs: &[PresheafMorphism],
    ) -> Result<PresheafMorphism> {
        let m = self.pointwise.mediate_to(q, legs)?;
        match &self.sheafified {
            None => Ok(m),
            Some(a) => {
                let aq = handle.sheafify(q)?;
                let back = aq
                    .unit
                    .inverse()
                    .ok_or_else(|| Error::contract("mediating into a non-sheaf"))?;
                let site = handle.site().expect("sheaf handle");
                let am = sheafify_map(site, &m, a, &aq)?;
                Ok(back.after_unchecked(&am))
            }
        }
    }

    pub fn pointwise(&self) -> &PresheafColimit {
        &self.pointwise
    }
}

impl HomSets for ComputationalCategory {
    type Obj = Presheaf;
    type Mor = PresheafMorphism;

    fn test_objects(&self) -> Result<Vec<Presheaf>> {
        Ok(self.objects()?.to_vec())
    }

    fn generators(&self) -> Result<Vec<Presheaf>> {
        ComputationalCategory::generators(self)
    }

    fn hom(&self, a: &Presheaf, b: &Presheaf) -> Result<Vec<PresheafMorphism>> {
        ComputationalCategory::hom(self, a, b)
    }

    fn compose(&self, g: &PresheafMorphism, f: &PresheafMorphism) -> PresheafMorphism {
        g.after_unchecked(f)
    }

    fn source(&self, f: &PresheafMorphism) -> Presheaf {
        f.dom().clone()
    }

    fn describe_obj(&self, a: &Presheaf) -> String {
        format!("{:?}", a.sizes())
    }

    fn describe_mor(&self, f: &PresheafMorphism) -> String {
        f.signature()
    }
}

/// A functor `p: C → Z` from a finite category into a handle.
#[derive(Clone, Debug)]
pub struct HandleFunctor {
    name: String,
    dom: FinCategory,
    cod: ComputationalCategory,
    objects: Vec<Presheaf>,
    morphisms: Vec<PresheafMorphism>,
}

impl HandleFunctor {
    /// Checks ends, membership in the codomain and the functor laws.
    pub fn new(
        name: &str,
        dom: &FinCategory,
        cod: &ComputationalCategory,
        objects: Vec<Presheaf>,
        morphisms: Vec<PresheafMorphism>,
    ) -> Result<Self> {
        if objects.len() != dom.num_objects() || morphisms.len() != dom.num_morphisms() {
            return Err(Error::contract(format!(
                "functor `{name}`: tables do not match `{}`",
                dom.name()
            )));
        }
        for p in &objects {
            if !cod.contains(p)? {
                return Err(Error::contract(format!(
                    "functor `{name}`: a value is not an object of {}",
                    cod.name()
                )));
            }
        }
        for f in dom.morphisms() {
            let m = &morphisms[f.0];
            if m.dom() != &objects[dom.src(f).0] || m.cod() != &objects[dom.tgt(f).0] {
                return Err(Error::contract(format!(
                    "functor `{name}`: `{}` has the wrong ends",
                    dom.morphism_name(f)
                )));
            }
            if let Some(w) = m.naturality_failure() {
                return Err(Error::contract(format!(
                    "functor `{name}`: image of `{}` is not natural at `{}`",
                    dom.morphism_name(f),
                    cod.base().morphism_name(w.morphism)
                )));
            }
        }
        for x in dom.objects() {
            if morphisms[dom.identity(x).0].components()
                != PresheafMorphism::identity(&objects[x.0]).components()
            {
                return Err(Error::contract(format!(
                    "functor `{name}`: identity of `{}` is not preserved",
                    dom.object_name(x)
                )));
            }
        }
        for g in dom.morphisms() {
            for f in dom.morphisms() {
                if let Some(gf) = dom.compose(g, f) {
                    if morphisms[g.0].after_unchecked(&morphisms[f.0]).components()
                        != morphisms[gf.0].components()
                    {
                        return Err(Error::contract(format!(
                            "functor `{name}`: composite `{}`∘`{}` is not preserved",
                            dom.morphism_name(g),
                            dom.morphism_name(f)
                        )));
                    }
                }
            }
        }
        Ok(Self {
            name: name.to_string(),
            dom: dom.clone(),
            cod: cod.clone(),
            objects,
            morphisms,
        })
    }

    /// A covariant set-valued functor given as a presheaf on `C^op`.
    pub fn from_copresheaf(
        name: &str,
        dom: &FinCategory,
        cod: &ComputationalCategory,
        p: &Presheaf,
    ) -> Result<Self> {
        if !cod.is_finset() {
            return Err(Error::contract(
                "copresheaves are functors into finite sets",
            ));
        }
        if p.base() != &dom.opposite() {
            return Err(Error::BaseMismatch(
                p.base().name().into(),
                format!("{}^op", dom.name()),
            ));
        }
        let objects: Vec<Presheaf> = dom.objects().map(|x| Presheaf::set(p.labels(x))).collect();
        let objects: Vec<Presheaf> = objects
            .into_iter()
            .map(|s| s.rebase(cod.base()).expect("terminal base"))
            .collect();
        let morphisms = dom
            .morphisms()
            .map(|f| {
                let (s, t) = (dom.src(f), dom.tgt(f));
                PresheafMorphism::new(&objects[s.0], &objects[t.0], vec![p.action(f).to_vec()])
            })
            .collect::<Result<_>>()?;
        Self::new(name, dom, cod, objects, morphisms)
    }

    /// Builds a set-valued functor from element names per object and
    /// `(morphism, [(x, y)])` maps `x ↦ y`.
    pub fn set_valued(
        name: &str,
        dom: &FinCategory,
        cod: &ComputationalCategory,
        values: &[(&str, &[&str])],
        maps: &[(&str, &[(&str, &str)])],
    ) -> Result<Self> {
        // as a presheaf on C^op, the action of f: X → Y sends p(X) to p(Y)
        let op = dom.opposite();
        let p = Presheaf::from_names(&op, values, maps)?;
        Self::from_copresheaf(name, dom, cod, &p)
    }

    /// The functor as a presheaf on `C^op` (set-valued functors only).
    pub fn to_copresheaf(&self) -> Result<Presheaf> {
        if !self.cod.is_finset() {
            return Err(Error::contract("only set-valued functors are copresheaves"));
        }
        let op = self.dom.opposite();
        let labels = self
            .objects
            .iter()
            .map(|s| s.labels(ObjId(0)).to_vec())
            .collect();
        let actions = self
            .morphisms
            .iter()
            .map(|m| m.component(ObjId(0)).to_vec())
            .collect();
        Presheaf::new(&op, labels, actions)
    }

    /// `X ↦ h_X` into `PSh(C)` for a presheaf handle over `C`.
    pub fn yoneda(cod: &ComputationalCategory) -> Result<Self> {
        let c = cod.base().clone();
        let objects: Vec<Presheaf> = c
            .objects()
            .map(|x| yoneda_embed(&c, x))
            .collect::<Result<_>>()?;
        let morphisms = c
            .morphisms()
            .map(|f| {
                Ok(yoneda_morphism(&c, f)?.reattach(&objects[c.src(f).0], &objects[c.tgt(f).0]))
            })
            .collect::<Result<_>>()?;
        Self::new("yoneda", &c, cod, objects, morphisms)
    }

    /// `ε = a ∘ h` into the sheaf handle of a site.
    pub fn epsilon(cod: &ComputationalCategory) -> Result<Self> {
        let site = cod
            .site()
            .ok_or_else(|| Error::contract("epsilon needs a sheaf handle"))?;
        let eps = epsilon_functor(site)?;
        let objects = eps.objects.iter().map(|r| r.sheaf.clone()).collect();
        Self::new("epsilon", site.base(), cod, objects, eps.morphisms)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    pub fn dom(&self) -> &FinCategory {
        &self.dom
    }

    pub fn cod(&self) -> &ComputationalCategory {
        &self.cod
    }

    pub fn ob(&self, x: ObjId) -> &Presheaf {
        &self.objects[x.0]
    }

    pub fn mor(&self, f: MorId) -> &PresheafMorphism {
        &self.morphisms[f.0]
    }

    pub fn objects(&self) -> &[Presheaf] {
        &self.objects
    }

    pub fn morphisms(&self) -> &[PresheafMorphism] {
        &self.morphisms
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presheaf::{count_morphisms, verify_colimit};

    #[test]
    fn finset_objects_up_to_bound() {
        let z = ComputationalCategory::finset(2, Budget::DEFAULT).unwrap();
        let sizes: Vec<usize> = z
            .objects()
            .unwrap()
            .iter()
            .map(|p| p.total_size())
            .collect();
        assert_eq!(sizes, vec![0, 1, 2]);
        assert!(ComputationalCategory::finset(0, Budget::DEFAULT).is_err());
    }

    #[test]
    fn presheaf_handle_homs_and_colimits() {
        let c = FinCategory::walking_arrow();
        let z = ComputationalCategory::presheaf_category(&c, 2, Budget::DEFAULT).unwrap();
        let objs = z.objects().unwrap();
        for a in objs {
            for b in objs {
                assert_eq!(z.hom(a, b).unwrap().len(), count_morphisms(a, b).unwrap());
            }
        }
        let d = PresheafDiagram::discrete(vec![objs[1].clone(), objs[2].clone()]).unwrap();
        let colim = z.colimit(&d).unwrap();
        assert_eq!(
            verify_colimit(&d, colim.pointwise(), objs, 10_000).unwrap(),
            None
        );
    }

    #[test]
    fn sheaf_handle_on_two_point_space() {
        let c = FinCategory::poset(
            "opens2",
            &["0", "a", "b", "ab"],
            &[("0", "a"), ("0", "b"), ("a", "ab"), ("b", "ab")],
        );
        let site =
            Site::from_names("opens2", &c, &[("0", &[]), ("ab", &["a<=ab", "b<=ab"])]).unwrap();
        let z = ComputationalCategory::sheaf_category(&site, 2, Budget::DEFAULT).unwrap();
        // pair model: sheaves are pairs (F(a), F(b)) with F(ab) = F(a) × F(b) within the bound
        let pairs = (0..=2)
            .flat_map(|a| (0..=2).map(move |b| a * b))
            .filter(|ab| *ab <= 2)
            .count();
        assert_eq!(z.objects().unwrap().len(), pairs);
        assert_eq!(z.initial().unwrap().sizes(), vec![1, 0, 0, 0]);
        // coproduct of ε(a) and ε(b) is ε(ab)'s pair model (1, 1)
        let gens = z.generators().unwrap();
        let d = PresheafDiagram::discrete(vec![gens[1].clone(), gens[2].clone()]).unwrap();
        let colim = z.colimit(&d).unwrap();
        assert_eq!(colim.apex.sizes(), vec![1, 1, 1, 1]);
        let q = gens[3].clone();
        let legs = vec![
            z.hom(&gens[1], &q).unwrap()[0].clone(),
            z.hom(&gens[2], &q).unwrap()[0].clone(),
        ];
        let m = colim.mediate_to(&z, &q, &legs).unwrap();
        assert!(m.is_iso());
    }

    #[test]
    fn functor_laws_are_checked() {
        let c = FinCategory::walking_arrow();
        let z = ComputationalCategory::finset(3, Budget::DEFAULT).unwrap();
        let p = HandleFunctor::set_valued(
            "p",
            &c,
            &z,
            &[("0", &["x", "y"]), ("1", &["u"])],
            &[("f", &[("x", "u"), ("y", "u")])],
        )
        .unwrap();
        assert_eq!(p.ob(ObjId(0)).total_size(), 2);
        assert_eq!(p.to_copresheaf().unwrap().sizes(), vec![2, 1]);
        let y = HandleFunctor::yoneda(
            &ComputationalCategory::presheaf_category(&c, 2, Budget::DEFAULT).unwrap(),
        )
        .unwrap();
        assert_eq!(y.ob(ObjId(1)).sizes(), vec![1, 1]);
    }
}

use std::sync::Arc;

use serde::Serialize;

use super::adjoint::{
    adjunction_phi, right_adjoint_hp, right_adjoint_map, AdjunctionBijection, RightAdjoint,
};
use super::extension::{ExtendedObject, ExtensionResult};
use super::flat::{is_flat_bounded_with, FlatVerdict};
use crate::error::{Error, Result};
use crate::handle::{Budget, HandleFunctor};
use crate::presheaf::{Presheaf, PresheafMorphism};
use crate::site::{is_continuous, is_sheaf, sheafify, Continuity, SheafFailure, Site};

/// `(p̃, h_p, φ)` for a continuous flat `p`, restricted to sheaves when a
/// site on the domain is given.
#[derive(Debug)]
pub struct GeometricMorphismData {
    site: Option<Site>,
    inverse: ExtensionResult,
    pub exactness: FlatVerdict,
    pub continuity: Option<Continuity>,
}

/// Refuses with the witness if `p` is not continuous for `site` or a
/// flatness counterexample is found within `budget`.
pub fn build_ell(
    p: &HandleFunctor,
    site: Option<&Site>,
    budget: &Budget,
) -> Result<GeometricMorphismData> {
    let continuity = match site {
        Some(s) => {
            if s.base() != p.dom() {
                return Err(Error::BaseMismatch(
                    s.base().name().into(),
                    p.dom().name().into(),
                ));
            }
            let c = is_continuous(p, s)?;
            if let Some(w) = &c.witness {
                return Err(Error::Refused(format!(
                    "`{}` is not continuous: cover {:?} of `{}` is not sent to a strict epimorphic family",
                    p.name(),
                    w.cover,
                    w.object
                )));
            }
            Some(c)
        }
        None => None,
    };
    let inverse = ExtensionResult::new(p);
    let exactness = is_flat_bounded_with(&inverse, budget)?;
    if let FlatVerdict::Counterexample { detail, .. } = &exactness {
        return Err(Error::Refused(format!(
            "`{}` is not flat: {detail}",
            p.name()
        )));
    }
    Ok(GeometricMorphismData {
        site: site.cloned(),
        inverse,
        exactness,
        continuity,
    })
}

/// A direct-image value that is not a sheaf.
#[derive(Clone, Debug, Serialize)]
pub struct DirectImageFailure {
    pub target_sizes: Vec<usize>,
    pub failure: Option<SheafFailure>,
}

impl GeometricMorphismData {
    pub fn functor(&self) -> &HandleFunctor {
        self.inverse.functor()
    }

    pub fn site(&self) -> Option<&Site> {
        self.site.as_ref()
    }

    pub fn extension(&self) -> &ExtensionResult {
        &self.inverse
    }

    fn check_input(&self, h: &Presheaf) -> Result<()> {
        if let Some(s) = &self.site {
            if !is_sheaf(h, s)?.holds {
                return Err(Error::contract("inverse image applied to a non-sheaf"));
            }
        }
        Ok(())
    }

    /// `p̃` on a sheaf (or on any presheaf without a site).
    pub fn inverse_image(&self, h: &Presheaf) -> Result<Arc<ExtendedObject>> {
        self.check_input(h)?;
        self.inverse.apply(h)
    }

    pub fn inverse_image_map(&self, m: &PresheafMorphism) -> Result<PresheafMorphism> {
        self.check_input(m.dom())?;
        self.check_input(m.cod())?;
        self.inverse.apply_map(m)
    }

    /// Whether `p̃(η): p̃(H) → p̃(aH)` is an isomorphism, i.e. `p̃` factors
    /// through sheafification at `H`.
    pub fn factors_through_sheafification(&self, h: &Presheaf) -> Result<bool> {
        let Some(s) = &self.site else { return Ok(true) };
        let a = sheafify(h, s)?;
        Ok(self.inverse.apply_map(&a.unit)?.is_iso())
    }

    /// `h_p(Z)`, which must be a sheaf when a site is present.
    pub fn direct_image(&self, z: &Presheaf) -> Result<RightAdjoint> {
        let hp = right_adjoint_hp(self.functor(), z)?;
        if let Some(s) = &self.site {
            let v = is_sheaf(&hp.presheaf, s)?;
            if !v.holds {
                return Err(Error::contract(format!(
                    "direct image of {:?} is not a sheaf: {:?}",
                    z.sizes(),
                    v.witness
                )));
            }
        }
        Ok(hp)
    }

    pub fn direct_image_map(&self, g: &PresheafMorphism) -> Result<PresheafMorphism> {
        let dom = self.direct_image(g.dom())?;
        let cod = self.direct_image(g.cod())?;
        right_adjoint_map(g, &dom, &cod)
    }

    /// `φ` between `hom_Z(p̃H, Z)` and `Nat(H, h_p(Z))`.
    pub fn phi(&self, h: &Presheaf, z: &Presheaf) -> Result<AdjunctionBijection> {
        let e = self.inverse_image(h)?;
        let hp = self.direct_image(z)?;
        adjunction_phi(self.functor(), &e, &hp)
    }
}

/// Whether every `h_p(Z)` over the given targets is a sheaf on `site`;
/// returns the first that is not.
pub fn direct_image_failure(
    p: &HandleFunctor,
    site: &Site,
    targets: &[Presheaf],
) -> Result<Option<DirectImageFailure>> {
    for z in targets {
        let hp = right_adjoint_hp(p, z)?;
        let v = is_sheaf(&hp.presheaf, site)?;
        if !v.holds {
            return Ok(Some(DirectImageFailure {
                target_sizes: z.sizes(),
                failure: v.witness,
            }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::FinCategory;
    use crate::handle::ComputationalCategory;
    use crate::presheaf::enumerate_presheaves;

    fn opens2() -> Site {
        let c = FinCategory::poset(
            "opens2",
            &["0", "a", "b", "ab"],
            &[("0", "a"), ("0", "b"), ("a", "ab"), ("b", "ab")],
        );
        Site::from_names("opens2", &c, &[("ab", &["a<=ab", "b<=ab"]), ("0", &[])]).unwrap()
    }

    #[test]
    fn trivial_site_matches_presheaf_data() {
        let c = FinCategory::walking_arrow();
        let z = ComputationalCategory::finset(2, Budget::SMALL).unwrap();
        let p = HandleFunctor::set_valued(
            "p",
            &c,
            &z,
            &[("0", &["x"]), ("1", &["u"])],
            &[("f", &[("x", "u")])],
        )
        .unwrap();
        let trivial = Site::trivial(&c).unwrap();
        let with = build_ell(&p, Some(&trivial), &Budget::SMALL).unwrap();
        let without = build_ell(&p, None, &Budget::SMALL).unwrap();
        for h in enumerate_presheaves(&c, 2, 100).unwrap() {
            for t in z.objects().unwrap() {
                let a = with.phi(&h, t).unwrap();
                let b = without.phi(&h, t).unwrap();
                assert!(a.mutually_inverse());
                assert_eq!(a.counts(), b.counts());
            }
        }
    }

    #[test]
    fn epsilon_round_trips() {
        let site = opens2();
        let z = ComputationalCategory::sheaf_category(&site, 2, Budget::SMALL).unwrap();
        let eps = HandleFunctor::epsilon(&z).unwrap();
        let ell = build_ell(&eps, Some(&site), &Budget::SMALL).unwrap();
        let sheaves = z.objects().unwrap();
        for h in sheaves.iter().take(4) {
            assert!(ell.factors_through_sheafification(h).unwrap());
            for t in sheaves.iter().take(4) {
                assert!(ell.phi(h, t).unwrap().mutually_inverse());
            }
        }
    }

    #[test]
    fn non_continuous_is_refused() {
        let site = opens2();
        let c = site.base().clone();
        let z = ComputationalCategory::finset(2, Budget::SMALL).unwrap();
        // terminal functor sends the empty cover of 0 to the empty family on a point
        let p = HandleFunctor::set_valued(
            "pt",
            &c,
            &z,
            &[("0", &["*"]), ("a", &["*"]), ("b", &["*"]), ("ab", &["*"])],
            &[
                ("0<=a", &[("*", "*")]),
                ("0<=b", &[("*", "*")]),
                ("a<=ab", &[("*", "*")]),
                ("b<=ab", &[("*", "*")]),
                ("0<=ab", &[("*", "*")]),
            ],
        )
        .unwrap();
        let err = build_ell(&p, Some(&site), &Budget::SMALL).unwrap_err();
        assert!(matches!(err, Error::Refused(_)), "{err}");
        let targets = z.objects().unwrap();
        assert!(direct_image_failure(&p, &site, targets).unwrap().is_some());
    }
}

use std::collections::HashMap;

use serde::Serialize;

use super::extension::{ExtendedObject, ExtensionResult};
use crate::error::{Error, Result};
use crate::fincat::ObjId;
use crate::handle::HandleFunctor;
use crate::presheaf::{enumerate_morphisms, Presheaf, PresheafMorphism};

/// `h_p(Z) = Hom_Z(p(−), Z)` with the hom-sets it was built from.
#[derive(Clone, Debug)]
pub struct RightAdjoint {
    pub presheaf: Presheaf,
    pub target: Presheaf,
    homs: Vec<Vec<PresheafMorphism>>,
    index: Vec<HashMap<Vec<Vec<usize>>, usize>>,
}

impl RightAdjoint {
    /// The map `p(X) → Z` named by element `i` of `h_p(Z)(X)`.
    pub fn map(&self, x: ObjId, i: usize) -> &PresheafMorphism {
        &self.homs[x.0][i]
    }

    pub fn maps(&self, x: ObjId) -> &[PresheafMorphism] {
        &self.homs[x.0]
    }

    /// Element of `h_p(Z)(X)` naming a map `p(X) → Z`.
    pub fn element_of(&self, x: ObjId, m: &PresheafMorphism) -> Option<usize> {
        self.index[x.0].get(m.components()).copied()
    }
}

fn index_of(homs: &[PresheafMorphism]) -> HashMap<Vec<Vec<usize>>, usize> {
    homs.iter()
        .enumerate()
        .map(|(i, m)| (m.components().to_vec(), i))
        .collect()
}

/// Values are `hom_Z(p(X), Z)`; `f: X → Y` acts by precomposition with `p(f)`.
pub fn right_adjoint_hp(p: &HandleFunctor, z: &Presheaf) -> Result<RightAdjoint> {
    let c = p.dom();
    let z_handle = p.cod();
    if !z_handle.contains(z)? {
        return Err(Error::contract(format!(
            "target is not an object of {}",
            z_handle.name()
        )));
    }
    let homs: Vec<Vec<PresheafMorphism>> = c
        .objects()
        .map(|x| z_handle.hom(p.ob(x), z))
        .collect::<Result<_>>()?;
    let index: Vec<_> = homs.iter().map(|h| index_of(h)).collect();
    let labels = homs
        .iter()
        .map(|h| h.iter().map(|m| m.signature()).collect())
        .collect();
    let actions = c
        .morphisms()
        .map(|f| {
            let (x, y) = (c.src(f), c.tgt(f));
            homs[y.0]
                .iter()
                .map(|a| index[x.0][a.after_unchecked(p.mor(f)).components()])
                .collect()
        })
        .collect();
    let presheaf = Presheaf::new(c, labels, actions)?;
    Ok(RightAdjoint {
        presheaf,
        target: z.clone(),
        homs,
        index,
    })
}

/// `h_p(g): h_p(Z) → h_p(Z')`, postcomposition with `g`.
pub fn right_adjoint_map(
    g: &PresheafMorphism,
    dom: &RightAdjoint,
    cod: &RightAdjoint,
) -> Result<PresheafMorphism> {
    if g.dom() != &dom.target || g.cod() != &cod.target {
        return Err(Error::contract(
            "map does not match the right adjoint values",
        ));
    }
    let c = dom.presheaf.base();
    let components = c
        .objects()
        .map(|x| {
            dom.homs[x.0]
                .iter()
                .map(|a| cod.index[x.0][g.after_unchecked(a).components()])
                .collect()
        })
        .collect();
    PresheafMorphism::new(&dom.presheaf, &cod.presheaf, components)
}

/// Which hom functor to compose `p` with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variance {
    /// `Hom_Z(p(−), Z)`, a presheaf on `C`
    Contra,
    /// `Hom_Z(Z, p(−))`, a covariant functor on `C` given as a presheaf on `C^op`
    Co,
}

pub fn hom_composite(p: &HandleFunctor, z: &Presheaf, variance: Variance) -> Result<Presheaf> {
    match variance {
        Variance::Contra => Ok(right_adjoint_hp(p, z)?.presheaf),
        Variance::Co => {
            let c = p.dom();
            let z_handle = p.cod();
            let homs: Vec<Vec<PresheafMorphism>> = c
                .objects()
                .map(|x| z_handle.hom(z, p.ob(x)))
                .collect::<Result<_>>()?;
            let index: Vec<_> = homs.iter().map(|h| index_of(h)).collect();
            let labels = homs
                .iter()
                .map(|h| h.iter().map(|m| m.signature()).collect())
                .collect();
            let actions = c
                .morphisms()
                .map(|f| {
                    let (x, y) = (c.src(f), c.tgt(f));
                    homs[x.0]
                        .iter()
                        .map(|b| index[y.0][p.mor(f).after_unchecked(b).components()])
                        .collect()
                })
                .collect();
            Presheaf::new(&c.opposite(), labels, actions)
        }
    }
}

/// `φ(α)`: the transformation `H → h_p(Z)` with `φ(α)_X(x) = α ∘ leg(x, X)`.
pub fn phi_forward(
    ext: &ExtendedObject,
    hp: &RightAdjoint,
    alpha: &PresheafMorphism,
) -> Result<PresheafMorphism> {
    if alpha.dom() != &ext.apex || alpha.cod() != &hp.target {
        return Err(Error::contract(
            "α must go from the extension to the adjoint's target",
        ));
    }
    let h = &ext.presheaf;
    let components = h
        .base()
        .objects()
        .map(|x| {
            (0..h.size(x))
                .map(|a| {
                    hp.element_of(x, &alpha.after_unchecked(ext.leg(x, a)))
                        .ok_or_else(|| {
                            Error::contract("composite leg is missing from the hom enumeration")
                        })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    PresheafMorphism::new(h, &hp.presheaf, components)
}

/// `φ⁻¹(β)`: the mediating map out of `p̃H` for the cocone `(x, X) ↦ β_X(x)`.
pub fn phi_backward(
    p: &HandleFunctor,
    ext: &ExtendedObject,
    hp: &RightAdjoint,
    beta: &PresheafMorphism,
) -> Result<PresheafMorphism> {
    if beta.dom() != &ext.presheaf || beta.cod() != &hp.presheaf {
        return Err(Error::contract("β must go from H to the right adjoint"));
    }
    let gamma = ext.elements.gamma();
    let legs: Vec<PresheafMorphism> = gamma
        .objects()
        .map(|e| {
            let (x, a) = ext.elements.element(e);
            hp.map(x, beta.apply(x, a)).clone()
        })
        .collect();
    ext.mediate_to(p, &hp.target, &legs)
}

/// Both sides of `hom_Z(p̃H, Z) ≅ Nat(H, h_p(Z))`, enumerated, with the
/// index of each element's image under `φ` and `φ⁻¹`.
#[derive(Clone, Debug)]
pub struct AdjunctionBijection {
    pub left: Vec<PresheafMorphism>,
    pub right: Vec<PresheafMorphism>,
    pub forward: Vec<usize>,
    pub backward: Vec<usize>,
}

impl AdjunctionBijection {
    pub fn counts(&self) -> (usize, usize) {
        (self.left.len(), self.right.len())
    }

    pub fn mutually_inverse(&self) -> bool {
        self.left.len() == self.right.len()
            && self
                .forward
                .iter()
                .enumerate()
                .all(|(i, &j)| self.backward[j] == i)
            && self
                .backward
                .iter()
                .enumerate()
                .all(|(j, &i)| self.forward[i] == j)
    }
}

pub fn adjunction_phi(
    p: &HandleFunctor,
    ext: &ExtendedObject,
    hp: &RightAdjoint,
) -> Result<AdjunctionBijection> {
    let cap = p.cod().budget().hom_cap;
    let left = p.cod().hom(&ext.apex, &hp.target)?;
    let right = enumerate_morphisms(&ext.presheaf, &hp.presheaf, cap)?;
    let left_index = index_of(&left);
    let right_index = index_of(&right);
    let missing = || Error::contract("φ leaves the enumerated hom-set");
    let forward = left
        .iter()
        .map(|a| {
            right_index
                .get(phi_forward(ext, hp, a)?.components())
                .copied()
                .ok_or_else(missing)
        })
        .collect::<Result<_>>()?;
    let backward = right
        .iter()
        .map(|b| {
            left_index
                .get(phi_backward(p, ext, hp, b)?.components())
                .copied()
                .ok_or_else(missing)
        })
        .collect::<Result<_>>()?;
    Ok(AdjunctionBijection {
        left,
        right,
        forward,
        backward,
    })
}

/// Naturality in `H`: for `m: H' → H`, `φ(α ∘ p̃m) = φ(α) ∘ m`.
pub fn phi_natural_in_presheaf(
    ext: &ExtensionResult,
    m: &PresheafMorphism,
    hp: &RightAdjoint,
    alpha: &PresheafMorphism,
) -> Result<bool> {
    let dom = ext.apply(m.dom())?;
    let cod = ext.apply(m.cod())?;
    let tm = ext.apply_map(m)?;
    let left = phi_forward(&dom, hp, &alpha.after_unchecked(&tm))?;
    let right = phi_forward(&cod, hp, alpha)?.after_unchecked(m);
    Ok(left.components() == right.components())
}

/// Naturality in `Z`: for `g: Z → Z'`, `φ(g ∘ α) = h_p(g) ∘ φ(α)`.
pub fn phi_natural_in_target(
    ext: &ExtendedObject,
    g: &PresheafMorphism,
    hp_dom: &RightAdjoint,
    hp_cod: &RightAdjoint,
    alpha: &PresheafMorphism,
) -> Result<bool> {
    let left = phi_forward(ext, hp_cod, &g.after_unchecked(alpha))?;
    let hg = right_adjoint_map(g, hp_dom, hp_cod)?;
    let right = hg.after_unchecked(&phi_forward(ext, hp_dom, alpha)?);
    Ok(left.components() == right.components())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::FinCategory;
    use crate::handle::{Budget, ComputationalCategory};
    use crate::presheaf::{enumerate_presheaves, find_iso, yoneda_embed};

    fn point_functor(z: &ComputationalCategory) -> HandleFunctor {
        HandleFunctor::set_valued("p", &FinCategory::terminal(), z, &[("*", &["a", "b"])], &[])
            .unwrap()
    }

    #[test]
    fn right_adjoint_counts_on_the_point() {
        let z = ComputationalCategory::finset(3, Budget::DEFAULT).unwrap();
        let p = point_functor(&z);
        let hp = right_adjoint_hp(&p, &Presheaf::set_of_size(2).rebase(z.base()).unwrap()).unwrap();
        assert_eq!(hp.presheaf.size(ObjId(0)), 4);
        let t = right_adjoint_hp(&p, &z.terminal()).unwrap();
        assert_eq!(t.presheaf.sizes(), vec![1]);
        let co = hom_composite(&p, &Presheaf::set_of_size(2), Variance::Co).unwrap();
        assert_eq!(co.sizes(), vec![4]);
        let contra = hom_composite(&p, &Presheaf::set_of_size(2), Variance::Contra).unwrap();
        assert_eq!(contra, hp.presheaf);
    }

    #[test]
    fn currying_on_the_point() {
        let z = ComputationalCategory::finset(3, Budget::DEFAULT).unwrap();
        let p = point_functor(&z);
        let ext = ExtensionResult::new(&p);
        let s = ext.apply(&Presheaf::set_of_size(2)).unwrap();
        let hp = right_adjoint_hp(&p, &Presheaf::set_of_size(2)).unwrap();
        let bij = adjunction_phi(&p, &s, &hp).unwrap();
        assert_eq!(bij.counts(), (16, 16));
        assert!(bij.mutually_inverse());
        let empty = ext.apply(&Presheaf::set_of_size(0)).unwrap();
        let bij = adjunction_phi(&p, &empty, &hp).unwrap();
        assert_eq!(bij.counts(), (1, 1));
    }

    #[test]
    fn yoneda_right_adjoint_recovers_values() {
        let c = FinCategory::walking_arrow();
        let z = ComputationalCategory::presheaf_category(&c, 2, Budget::DEFAULT).unwrap();
        let y = HandleFunctor::yoneda(&z).unwrap();
        for g in enumerate_presheaves(&c, 2, 100).unwrap() {
            let hp = right_adjoint_hp(&y, &g).unwrap();
            assert!(
                find_iso(&hp.presheaf.with_default_labels(), &g.with_default_labels()).is_some()
            );
        }
    }

    #[test]
    fn phi_on_walking_arrow_is_bijective_and_natural() {
        let c = FinCategory::walking_arrow();
        let z = ComputationalCategory::finset(2, Budget::DEFAULT).unwrap();
        let p = HandleFunctor::set_valued(
            "p",
            &c,
            &z,
            &[("0", &["x", "y"]), ("1", &["u"])],
            &[("f", &[("x", "u"), ("y", "u")])],
        )
        .unwrap();
        let ext = ExtensionResult::new(&p);
        let targets: Vec<Presheaf> = z.objects().unwrap().to_vec();
        let hps: Vec<RightAdjoint> = targets
            .iter()
            .map(|t| right_adjoint_hp(&p, t).unwrap())
            .collect();
        let hs = enumerate_presheaves(&c, 2, 100).unwrap();
        for h in &hs {
            let e = ext.apply(h).unwrap();
            for hp in &hps {
                let bij = adjunction_phi(&p, &e, hp).unwrap();
                assert!(bij.mutually_inverse());
                for alpha in bij.left.iter().take(3) {
                    for g in z.hom(&hp.target, &hps[2].target).unwrap().iter().take(2) {
                        assert!(phi_natural_in_target(&e, g, hp, &hps[2], alpha).unwrap());
                    }
                    let x = ObjId(1);
                    let hx = yoneda_embed(&c, x).unwrap();
                    for m in enumerate_morphisms(&hx, h, 100).unwrap().iter().take(2) {
                        assert!(phi_natural_in_presheaf(&ext, m, hp, alpha).unwrap());
                    }
                }
            }
        }
    }
}

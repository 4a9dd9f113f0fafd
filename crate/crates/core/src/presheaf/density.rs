use super::core::{Presheaf, PresheafMorphism};
use super::elements::category_of_elements;
use super::limits::presheaf_colimit;
use crate::error::Result;
use crate::fincat::ObjId;

/// A comparison map together with where it fails to be a bijection, if anywhere.
#[derive(Clone, Debug)]
pub struct IsoWitness {
    pub map: PresheafMorphism,
    pub failure: Option<(ObjId, String)>,
}

impl IsoWitness {
    pub fn new(map: PresheafMorphism) -> Self {
        let failure = map.iso_failure();
        Self { map, failure }
    }

    pub fn holds(&self) -> bool {
        self.failure.is_none()
    }
}

/// The comparison `colim_(x,X) h_X → F` induced by the cocone `λ`.
pub fn density_check(f: &Presheaf) -> Result<IsoWitness> {
    let el = category_of_elements(f);
    let d = el.diamond();
    let lambda = el.lambda(&d);
    let colim = presheaf_colimit(&d, Some(f.base()))?;
    let map = colim.mediate_to(f, &lambda)?;
    Ok(IsoWitness::new(map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::FinCategory;
    use crate::presheaf::{enumerate_presheaves, yoneda_embed};

    #[test]
    fn representables_and_terminal() {
        let c = FinCategory::poset(
            "diamond",
            &["0", "a", "b", "1"],
            &[("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")],
        );
        for x in c.objects() {
            assert!(density_check(&yoneda_embed(&c, x).unwrap())
                .unwrap()
                .holds());
        }
        assert!(density_check(&Presheaf::terminal(&c)).unwrap().holds());
        assert!(density_check(&Presheaf::initial(&c)).unwrap().holds());
    }

    #[test]
    fn every_small_presheaf_on_the_parallel_pair() {
        let c = FinCategory::parallel_pair();
        for f in enumerate_presheaves(&c, 2, 1000).unwrap() {
            let w = density_check(&f).unwrap();
            assert!(w.holds(), "{f}: {:?}", w.failure);
        }
    }
}

use serde::Serialize;

use super::strict::{is_strict_epi_family, StrictEpiFailure};
use super::topology::Site;
use crate::error::{Error, Result};
use crate::handle::HandleFunctor;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContinuityFailure {
    pub object: String,
    pub cover: Vec<String>,
    pub failure: StrictEpiFailure,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Continuity {
    pub holds: bool,
    pub covers_checked: usize,
    pub witness: Option<ContinuityFailure>,
}

/// Whether `p` sends every declared cover to a strict epimorphic family of
/// its codomain.
pub fn is_continuous(p: &HandleFunctor, site: &Site) -> Result<Continuity> {
    let c = site.base();
    if p.dom() != c {
        return Err(Error::BaseMismatch(p.dom().name().into(), c.name().into()));
    }
    let z = p.cod();
    for (n, cover) in site.covers().iter().enumerate() {
        let image: Vec<_> = cover.arrows.iter().map(|f| p.mor(*f).clone()).collect();
        let v = is_strict_epi_family(z, p.ob(cover.target), &image)?;
        if let Some(failure) = v.witness {
            return Ok(Continuity {
                holds: false,
                covers_checked: n + 1,
                witness: Some(ContinuityFailure {
                    object: c.object_name(cover.target).into(),
                    cover: cover
                        .arrows
                        .iter()
                        .map(|f| c.morphism_name(*f).to_string())
                        .collect(),
                    failure,
                }),
            });
        }
    }
    Ok(Continuity {
        holds: true,
        covers_checked: site.covers().len(),
        witness: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::FinCategory;
    use crate::handle::{Budget, ComputationalCategory};

    fn opens2() -> Site {
        let c = FinCategory::poset(
            "opens2",
            &["0", "a", "b", "ab"],
            &[("0", "a"), ("0", "b"), ("a", "ab"), ("b", "ab")],
        );
        Site::from_names("opens2", &c, &[("0", &[]), ("ab", &["a<=ab", "b<=ab"])]).unwrap()
    }

    #[test]
    fn trivial_site_makes_everything_continuous() {
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
        assert!(
            is_continuous(&p, &Site::trivial(&c).unwrap())
                .unwrap()
                .holds
        );
    }

    #[test]
    fn epsilon_is_continuous() {
        let s = opens2();
        let z = ComputationalCategory::sheaf_category(&s, 2, Budget::DEFAULT).unwrap();
        let eps = HandleFunctor::epsilon(&z).unwrap();
        assert!(is_continuous(&eps, &s).unwrap().holds);
    }

    #[test]
    fn collapsing_a_cover_is_not_continuous() {
        let s = opens2();
        let c = s.base();
        let z = ComputationalCategory::finset(2, Budget::DEFAULT).unwrap();
        // contravariance is not needed: p is covariant, sending ∅ to ∅ and the top to a point
        let p = HandleFunctor::set_valued(
            "p",
            c,
            &z,
            &[("0", &[]), ("a", &[]), ("b", &[]), ("ab", &["*"])],
            &[],
        )
        .unwrap();
        let v = is_continuous(&p, &s).unwrap();
        assert!(!v.holds);
        assert_eq!(v.witness.unwrap().object, "ab");
    }
}

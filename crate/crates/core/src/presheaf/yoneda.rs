use super::core::{Presheaf, PresheafMorphism};
use crate::error::{Error, Result};
use crate::fincat::{FinCategory, MorId, ObjId};

fn check_object(c: &FinCategory, x: ObjId) -> Result<()> {
    if x.0 >= c.num_objects() {
        return Err(Error::Unknown {
            kind: "object",
            name: format!("#{}", x.0),
        });
    }
    Ok(())
}

/// The representable presheaf `h_X = [−, X]`; elements are labelled by
/// morphism names and act by precomposition.
pub fn yoneda_embed(c: &FinCategory, x: ObjId) -> Result<Presheaf> {
    check_object(c, x)?;
    let labels = c
        .objects()
        .map(|y| {
            c.hom(y, x)
                .iter()
                .map(|m| c.morphism_name(*m).to_string())
                .collect()
        })
        .collect();
    let actions = c
        .morphisms()
        .map(|f| {
            let (s, t) = (c.src(f), c.tgt(f));
            let target = c.hom(s, x);
            c.hom(t, x)
                .iter()
                .map(|g| {
                    let gf = c.comp(*g, f);
                    target
                        .iter()
                        .position(|m| *m == gf)
                        .expect("composite lies in the hom-set")
                })
                .collect()
        })
        .collect();
    Ok(Presheaf::new_unchecked(c.clone(), labels, actions))
}

/// `h_f: h_X → h_Y`, postcomposition with `f: X → Y`.
pub fn yoneda_morphism(c: &FinCategory, f: MorId) -> Result<PresheafMorphism> {
    let (x, y) = (c.src(f), c.tgt(f));
    let hx = yoneda_embed(c, x)?;
    let hy = yoneda_embed(c, y)?;
    Ok(yoneda_morphism_between(c, f, &hx, &hy))
}

pub(crate) fn yoneda_morphism_between(
    c: &FinCategory,
    f: MorId,
    hx: &Presheaf,
    hy: &Presheaf,
) -> PresheafMorphism {
    let (x, y) = (c.src(f), c.tgt(f));
    let components = c
        .objects()
        .map(|w| {
            let target = c.hom(w, y);
            c.hom(w, x)
                .iter()
                .map(|g| target.iter().position(|m| *m == c.comp(f, *g)).unwrap())
                .collect()
        })
        .collect();
    PresheafMorphism::new_unchecked(hx.clone(), hy.clone(), components)
}

/// `θ ↦ θ_X(id_X)` for `θ: h_X → F`.
pub fn yoneda_forward(theta: &PresheafMorphism, x: ObjId) -> Result<usize> {
    let c = theta.dom().base();
    let hx = yoneda_embed(c, x)?;
    if theta.dom() != &hx {
        return Err(Error::contract(format!(
            "domain of the transformation is not h_{}",
            c.object_name(x)
        )));
    }
    let id_pos = c
        .hom(x, x)
        .iter()
        .position(|m| *m == c.identity(x))
        .unwrap();
    Ok(theta.apply(x, id_pos))
}

/// `ξ ↦ θ` with `θ_Y(f) = F(f)(ξ)`.
pub fn yoneda_backward(x: ObjId, f: &Presheaf, xi: usize) -> Result<PresheafMorphism> {
    let c = f.base();
    let hx = yoneda_embed(c, x)?;
    yoneda_backward_from(&hx, x, f, xi)
}

pub(crate) fn yoneda_backward_from(
    hx: &Presheaf,
    x: ObjId,
    f: &Presheaf,
    xi: usize,
) -> Result<PresheafMorphism> {
    let c = f.base();
    if xi >= f.size(x) {
        return Err(Error::contract(format!(
            "element #{xi} is not in F({})",
            c.object_name(x)
        )));
    }
    let components = c
        .objects()
        .map(|y| c.hom(y, x).iter().map(|g| f.act(*g, xi)).collect())
        .collect();
    let theta = PresheafMorphism::new_unchecked(hx.clone(), f.clone(), components);
    debug_assert!(theta.naturality_failure().is_none());
    Ok(theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presheaf::enumerate_morphisms;

    #[test]
    fn representable_on_terminal_is_a_singleton() {
        let one = FinCategory::terminal();
        let h = yoneda_embed(&one, ObjId(0)).unwrap();
        assert_eq!(h.sizes(), vec![1]);
        assert!(yoneda_embed(&one, ObjId(3)).is_err());
    }

    #[test]
    fn representable_on_walking_arrow() {
        let c = FinCategory::walking_arrow();
        let h1 = yoneda_embed(&c, ObjId(1)).unwrap();
        assert_eq!(h1.labels(ObjId(0)), &["f".to_string()]);
        assert_eq!(h1.labels(ObjId(1)), &["id_1".to_string()]);
    }

    #[test]
    fn representable_on_chain() {
        let c = FinCategory::chain(3);
        let h = yoneda_embed(&c, ObjId(1)).unwrap();
        assert_eq!(h.sizes(), vec![1, 1, 0]);
    }

    #[test]
    fn identity_goes_to_identity_element() {
        let c = FinCategory::chain(3);
        let x = ObjId(2);
        let h = yoneda_embed(&c, x).unwrap();
        let id = PresheafMorphism::identity(&h);
        let xi = yoneda_forward(&id, x).unwrap();
        assert_eq!(h.label(x, xi), "id_2");
        assert_eq!(yoneda_backward(x, &h, xi).unwrap(), id);
    }

    #[test]
    fn two_point_set_gives_two_transformations() {
        let f = Presheaf::set(&["a", "b"]);
        let hx = yoneda_embed(f.base(), ObjId(0)).unwrap();
        let nats = enumerate_morphisms(&hx, &f, 10).unwrap();
        let mut images: Vec<&str> = nats
            .iter()
            .map(|t| f.label(ObjId(0), yoneda_forward(t, ObjId(0)).unwrap()))
            .collect();
        images.sort();
        assert_eq!(images, vec!["a", "b"]);
    }

    #[test]
    fn round_trip_on_walking_arrow() {
        let c = FinCategory::walking_arrow();
        let h1 = yoneda_embed(&c, ObjId(1)).unwrap();
        let f_elem = h1.element(ObjId(0), "f").unwrap();
        let theta = yoneda_backward(ObjId(0), &h1, f_elem).unwrap();
        assert_eq!(yoneda_forward(&theta, ObjId(0)).unwrap(), f_elem);
    }

    #[test]
    fn forward_rejects_non_representable_domain() {
        let f = Presheaf::set(&["a", "b"]);
        let id = PresheafMorphism::identity(&f);
        assert!(matches!(
            yoneda_forward(&id, ObjId(0)),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn postcomposition_is_natural() {
        let c = FinCategory::chain(3);
        for f in c.morphisms() {
            let hf = yoneda_morphism(&c, f).unwrap();
            assert!(hf.naturality_failure().is_none());
        }
    }
}

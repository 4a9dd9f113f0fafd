use serde::Serialize;

use super::category::FinCategory;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CofilteredFailure {
    Empty,
    NoCommonSource { x: String, y: String },
    NotEqualized { u: String, v: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cofilteredness {
    pub holds: bool,
    pub witness: Option<CofilteredFailure>,
}

/// Nonempty, every pair of objects has a common source, and every parallel
/// pair is equalized by some incoming morphism.
pub fn is_cofiltered(c: &FinCategory) -> Cofilteredness {
    let fail = |w| Cofilteredness {
        holds: false,
        witness: Some(w),
    };
    if c.num_objects() == 0 {
        return fail(CofilteredFailure::Empty);
    }
    for x in c.objects() {
        for y in c.objects().filter(|y| *y >= x) {
            if !c
                .objects()
                .any(|w| !c.hom(w, x).is_empty() && !c.hom(w, y).is_empty())
            {
                return fail(CofilteredFailure::NoCommonSource {
                    x: c.object_name(x).into(),
                    y: c.object_name(y).into(),
                });
            }
            let hom = c.hom(x, y);
            for (i, &u) in hom.iter().enumerate() {
                for &v in &hom[i + 1..] {
                    let equalized = c
                        .arrows_into(x)
                        .into_iter()
                        .any(|w| c.comp(u, w) == c.comp(v, w));
                    if !equalized {
                        return fail(CofilteredFailure::NotEqualized {
                            u: c.morphism_name(u).into(),
                            v: c.morphism_name(v).into(),
                        });
                    }
                }
            }
            if x != y {
                let hom = c.hom(y, x);
                for (i, &u) in hom.iter().enumerate() {
                    for &v in &hom[i + 1..] {
                        if !c
                            .arrows_into(y)
                            .into_iter()
                            .any(|w| c.comp(u, w) == c.comp(v, w))
                        {
                            return fail(CofilteredFailure::NotEqualized {
                                u: c.morphism_name(u).into(),
                                v: c.morphism_name(v).into(),
                            });
                        }
                    }
                }
            }
        }
    }
    Cofilteredness {
        holds: true,
        witness: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn terminal_is_cofiltered() {
        assert!(is_cofiltered(&FinCategory::terminal()).holds);
    }

    #[test]
    fn discrete_pair_is_not() {
        let c = FinCategory::discrete("d2", &["a", "b"]);
        assert_eq!(
            is_cofiltered(&c).witness,
            Some(CofilteredFailure::NoCommonSource {
                x: "a".into(),
                y: "b".into()
            })
        );
    }

    #[test]
    fn empty_category_is_not() {
        let c = FinCategory::discrete("empty", &[]);
        assert_eq!(is_cofiltered(&c).witness, Some(CofilteredFailure::Empty));
    }

    #[test]
    fn opposite_of_semilattice_with_top_is_cofiltered() {
        // Finite limits in C give finite colimits in the opposite.
        let c = FinCategory::poset(
            "diamond",
            &["0", "a", "b", "1"],
            &[("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")],
        );
        assert!(is_cofiltered(&c.opposite()).holds);
        assert!(is_cofiltered(&c).holds);
        let vee = FinCategory::poset("vee", &["a", "b", "t"], &[("a", "t"), ("b", "t")]);
        assert!(is_cofiltered(&vee.opposite()).holds);
        assert!(!is_cofiltered(&vee).holds);
    }

    #[test]
    fn parallel_pair_is_not_equalized() {
        let c = FinCategory::parallel_pair();
        assert_eq!(
            is_cofiltered(&c).witness,
            Some(CofilteredFailure::NotEqualized {
                u: "f".into(),
                v: "g".into()
            })
        );
    }

    #[test]
    fn nontrivial_group_is_not_cofiltered() {
        let z2 = FinCategory::monoid("z2", &["e", "s"], &[vec![0, 1], vec![1, 0]]).unwrap();
        assert!(!is_cofiltered(&z2).holds);
        let idem = FinCategory::monoid("idem", &["1", "e"], &[vec![0, 1], vec![1, 1]]).unwrap();
        assert!(is_cofiltered(&idem).holds);
    }
}

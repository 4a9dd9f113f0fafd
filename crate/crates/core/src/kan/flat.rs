use serde::Serialize;

use super::extension::ExtensionResult;
use crate::error::{Error, Result};
use crate::fincat::{
    is_cofiltered, shapes, universal_cone_search, Cofilteredness, Cone, FinCategory, FinFunctor,
    MorId, ObjId,
};
use crate::handle::{Budget, HandleFunctor};
use crate::presheaf::{
    category_of_elements, dedupe_isomorphic, enumerate_morphisms, enumerate_presheaves,
    presheaf_limit, yoneda_embed, Presheaf, PresheafDiagram, PresheafMorphism,
};

/// Cofilteredness of the category of elements of a copresheaf, given as a
/// presheaf on `C^op`.
pub fn is_flat_copresheaf(p: &Presheaf) -> Cofilteredness {
    // arrows of the elements of a covariant functor run opposite to those of Γ over C^op
    is_cofiltered(&category_of_elements(p).gamma().opposite())
}

/// Elementary flatness for set-valued functors.
pub fn is_flat_setvalued(p: &HandleFunctor) -> Result<Cofilteredness> {
    Ok(is_flat_copresheaf(&p.to_copresheaf()?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitKind {
    Terminal,
    Product,
    Equalizer,
}

/// A limit in `C` not carried to a limit of `Z`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactnessFailure {
    pub kind: LimitKind,
    pub detail: String,
}

fn shape_diagram(
    c: &FinCategory,
    kind: LimitKind,
    objects: &[ObjId],
    arrows: &[MorId],
) -> FinFunctor {
    let shape = match kind {
        LimitKind::Terminal => shapes::empty(),
        LimitKind::Product => shapes::pair(),
        LimitKind::Equalizer => FinCategory::parallel_pair(),
    };
    shapes::diagram(&shape, c, objects, arrows)
}

/// Whether `p` carries the limits that exist in `C` (terminal object, binary
/// products, equalizers) to limits of `Z`. Returns the first failure.
pub fn left_exactness_failure(p: &HandleFunctor) -> Result<Option<ExactnessFailure>> {
    let c = p.dom();
    let z = p.cod();
    let check = |d: FinFunctor,
                 cone: Cone,
                 name: String,
                 kind: LimitKind|
     -> Result<Option<ExactnessFailure>> {
        let objects: Vec<Presheaf> = d.dom().objects().map(|j| p.ob(d.ob(j)).clone()).collect();
        let arrows: Vec<PresheafMorphism> = d
            .dom()
            .morphisms()
            .map(|u| p.mor(d.mor(u)).clone())
            .collect();
        let pd = PresheafDiagram::new_unchecked(d.dom().clone(), objects, arrows);
        let lim = z.limit(&pd)?;
        let legs: Vec<PresheafMorphism> = cone.legs.iter().map(|&l| p.mor(l).clone()).collect();
        let cmp = lim.mediate_from(p.ob(cone.apex), &legs)?;
        Ok(match cmp.iso_failure() {
            None => None,
            Some((x, why)) => Some(ExactnessFailure {
                kind,
                detail: format!("{name}: comparison at `{}`: {why}", z.base().object_name(x)),
            }),
        })
    };
    let d = shape_diagram(c, LimitKind::Terminal, &[], &[]);
    if let Some(cone) = universal_cone_search(&d) {
        if let Some(f) = check(d, cone, "terminal object".into(), LimitKind::Terminal)? {
            return Ok(Some(f));
        }
    }
    for a in c.objects() {
        for b in c.objects().filter(|b| *b >= a) {
            let d = shape_diagram(c, LimitKind::Product, &[a, b], &[]);
            if let Some(cone) = universal_cone_search(&d) {
                let name = format!(
                    "product of `{}` and `{}`",
                    c.object_name(a),
                    c.object_name(b)
                );
                if let Some(f) = check(d, cone, name, LimitKind::Product)? {
                    return Ok(Some(f));
                }
            }
            let hom = c.hom(a, b);
            for (i, &f) in hom.iter().enumerate() {
                for &g in &hom[i + 1..] {
                    let d = shape_diagram(c, LimitKind::Equalizer, &[a, b], &[f, g]);
                    if let Some(cone) = universal_cone_search(&d) {
                        let name = format!(
                            "equalizer of `{}` and `{}`",
                            c.morphism_name(f),
                            c.morphism_name(g)
                        );
                        if let Some(w) = check(d, cone, name, LimitKind::Equalizer)? {
                            return Ok(Some(w));
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Whether `c` has a terminal object, binary products and equalizers.
pub fn has_finite_limits(c: &FinCategory) -> bool {
    if universal_cone_search(&shape_diagram(c, LimitKind::Terminal, &[], &[])).is_none() {
        return false;
    }
    c.objects().all(|a| {
        c.objects().filter(|b| *b >= a).all(|b| {
            let hom = c.hom(a, b);
            universal_cone_search(&shape_diagram(c, LimitKind::Product, &[a, b], &[])).is_some()
                && hom.iter().enumerate().all(|(i, &f)| {
                    hom[i + 1..].iter().all(|&g| {
                        universal_cone_search(&shape_diagram(
                            c,
                            LimitKind::Equalizer,
                            &[a, b],
                            &[f, g],
                        ))
                        .is_some()
                    })
                })
        })
    })
}

pub fn is_left_exact(p: &HandleFunctor) -> Result<bool> {
    Ok(left_exactness_failure(p)?.is_none())
}

/// Outcome of the bounded exactness test of `p̃`. Only counterexamples are
/// definitive.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum FlatVerdict {
    VerifiedUpToBudget {
        budget: &'static str,
        terminal: usize,
        products: usize,
        equalizers: usize,
    },
    Counterexample {
        kind: LimitKind,
        detail: String,
    },
}

impl FlatVerdict {
    pub fn is_counterexample(&self) -> bool {
        matches!(self, FlatVerdict::Counterexample { .. })
    }

    pub fn checks(&self) -> usize {
        match self {
            FlatVerdict::VerifiedUpToBudget {
                terminal,
                products,
                equalizers,
                ..
            } => terminal + products + equalizers,
            FlatVerdict::Counterexample { .. } => 1,
        }
    }
}

/// Test inputs: all representables, then the bounded enumeration, up to iso.
pub fn flat_test_presheaves(c: &FinCategory, budget: &Budget) -> Result<Vec<Presheaf>> {
    let mut out: Vec<Presheaf> = c
        .objects()
        .map(|x| yoneda_embed(c, x))
        .collect::<Result<_>>()?;
    out.extend(enumerate_presheaves(
        c,
        budget.flat_bound,
        budget.object_cap,
    )?);
    Ok(dedupe_isomorphic(out))
}

fn sizes(p: &Presheaf) -> String {
    format!("{:?}", p.sizes())
}

/// Checks that `p̃` preserves the terminal object, binary products and
/// equalizers on inputs drawn from [`flat_test_presheaves`], at most
/// `budget.flat_pairs` instances of each of the last two.
pub fn is_flat_bounded(p: &HandleFunctor, budget: &Budget) -> Result<FlatVerdict> {
    let ext = ExtensionResult::new(p);
    is_flat_bounded_with(&ext, budget)
}

pub fn is_flat_bounded_with(ext: &ExtensionResult, budget: &Budget) -> Result<FlatVerdict> {
    let p = ext.functor();
    let c = p.dom();
    let z = p.cod();
    let fail = |kind, detail| Ok(FlatVerdict::Counterexample { kind, detail });

    let one = Presheaf::terminal(c);
    let t = ext.apply(&one)?;
    if let Some((x, why)) = PresheafMorphism::to_terminal(&t.apex, &z.terminal()).iso_failure() {
        return fail(
            LimitKind::Terminal,
            format!(
                "extension of the terminal presheaf has sizes {} ({why} at `{}`)",
                sizes(&t.apex),
                z.base().object_name(x)
            ),
        );
    }

    let tests = flat_test_presheaves(c, budget)?;
    let mut products = 0;
    'prod: for (i, a) in tests.iter().enumerate() {
        for b in &tests[i..] {
            if products >= budget.flat_pairs {
                break 'prod;
            }
            let lim = presheaf_limit(
                &PresheafDiagram::discrete(vec![a.clone(), b.clone()])?,
                Some(c),
            )?;
            let e = ext.apply(&lim.apex)?;
            let legs: Vec<PresheafMorphism> = lim
                .legs
                .iter()
                .map(|l| ext.apply_map(l))
                .collect::<Result<_>>()?;
            let ea = ext.apply(a)?;
            let eb = ext.apply(b)?;
            let zlim = z.limit(&PresheafDiagram::discrete(vec![
                ea.apex.clone(),
                eb.apex.clone(),
            ])?)?;
            let cmp = zlim.mediate_from(&e.apex, &legs)?;
            products += 1;
            if let Some((x, why)) = cmp.iso_failure() {
                return fail(
                    LimitKind::Product,
                    format!(
                        "product of {} and {}: comparison at `{}`: {why}",
                        sizes(a),
                        sizes(b),
                        z.base().object_name(x)
                    ),
                );
            }
        }
    }

    let mut equalizers = 0;
    'eq: for a in &tests {
        for b in &tests {
            let homs = enumerate_morphisms(a, b, budget.hom_cap)?;
            for (i, f) in homs.iter().enumerate() {
                for g in &homs[i + 1..] {
                    if equalizers >= budget.flat_pairs {
                        break 'eq;
                    }
                    let lim = presheaf_limit(&PresheafDiagram::parallel(f, g)?, Some(c))?;
                    let e = ext.apply(&lim.apex)?;
                    let tf = ext.apply_map(f)?;
                    let tg = ext.apply_map(g)?;
                    let legs: Vec<PresheafMorphism> = lim
                        .legs
                        .iter()
                        .map(|l| ext.apply_map(l))
                        .collect::<Result<_>>()?;
                    let zlim = z.limit(&PresheafDiagram::parallel(&tf, &tg)?)?;
                    let cmp = zlim.mediate_from(&e.apex, &legs)?;
                    equalizers += 1;
                    if let Some((x, why)) = cmp.iso_failure() {
                        return fail(
                            LimitKind::Equalizer,
                            format!(
                                "equalizer of {} and {}: comparison at `{}`: {why}",
                                f.signature(),
                                g.signature(),
                                z.base().object_name(x)
                            ),
                        );
                    }
                }
            }
        }
    }
    if products == 0 && equalizers == 0 && tests.is_empty() {
        return Err(Error::contract("no exactness test inputs"));
    }
    Ok(FlatVerdict::VerifiedUpToBudget {
        budget: budget.profile,
        terminal: 1,
        products,
        equalizers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::handle::ComputationalCategory;

    fn finset() -> ComputationalCategory {
        ComputationalCategory::finset(3, Budget::DEFAULT).unwrap()
    }

    #[test]
    fn representables_are_flat() {
        let c = FinCategory::chain(3);
        let z = finset();
        // [0, −] on the chain: one element everywhere
        let p = HandleFunctor::set_valued(
            "rep",
            &c,
            &z,
            &[("0", &["id"]), ("1", &["u"]), ("2", &["v"])],
            &[
                ("0<=1", &[("id", "u")]),
                ("1<=2", &[("u", "v")]),
                ("0<=2", &[("id", "v")]),
            ],
        )
        .unwrap();
        assert!(is_flat_setvalued(&p).unwrap().holds);
        assert!(!is_flat_bounded(&p, &Budget::SMALL)
            .unwrap()
            .is_counterexample());
        // [1, −]: empty at 0
        let q = HandleFunctor::set_valued(
            "rep1",
            &c,
            &z,
            &[("0", &[]), ("1", &["id"]), ("2", &["u"])],
            &[("1<=2", &[("id", "u")])],
        )
        .unwrap();
        assert!(is_flat_setvalued(&q).unwrap().holds);
        assert!(!is_flat_bounded(&q, &Budget::SMALL)
            .unwrap()
            .is_counterexample());
    }

    #[test]
    fn empty_functor_is_not_flat() {
        let c = FinCategory::walking_arrow();
        let z = finset();
        let p = HandleFunctor::set_valued("empty", &c, &z, &[("0", &[]), ("1", &[])], &[]).unwrap();
        assert!(!is_flat_setvalued(&p).unwrap().holds);
        let v = is_flat_bounded(&p, &Budget::SMALL).unwrap();
        assert!(matches!(
            v,
            FlatVerdict::Counterexample {
                kind: LimitKind::Terminal,
                ..
            }
        ));
    }

    #[test]
    fn discrete_base_counterexample_at_terminal() {
        let c = FinCategory::discrete("d2", &["a", "b"]);
        let z = finset();
        let p =
            HandleFunctor::set_valued("one", &c, &z, &[("a", &["*"]), ("b", &["*"])], &[]).unwrap();
        assert!(!is_flat_setvalued(&p).unwrap().holds);
        assert!(matches!(
            is_flat_bounded(&p, &Budget::SMALL).unwrap(),
            FlatVerdict::Counterexample {
                kind: LimitKind::Terminal,
                ..
            }
        ));
        assert!(
            !is_left_exact(&p).unwrap()
                || universal_cone_search(&shape_diagram(&c, LimitKind::Terminal, &[], &[]))
                    .is_none()
        );
    }

    #[test]
    fn point_functors() {
        let one = FinCategory::terminal();
        let z = finset();
        let single = HandleFunctor::set_valued("a", &one, &z, &[("*", &["u"])], &[]).unwrap();
        assert!(is_flat_setvalued(&single).unwrap().holds);
        assert!(!is_flat_bounded(&single, &Budget::DEFAULT)
            .unwrap()
            .is_counterexample());
        let pair = HandleFunctor::set_valued("ab", &one, &z, &[("*", &["u", "v"])], &[]).unwrap();
        assert!(!is_flat_setvalued(&pair).unwrap().holds);
        assert!(is_flat_bounded(&pair, &Budget::DEFAULT)
            .unwrap()
            .is_counterexample());
        assert!(!is_left_exact(&pair).unwrap());
    }

    #[test]
    fn finitely_complete_bases() {
        assert!(has_finite_limits(&FinCategory::chain(3)));
        assert!(has_finite_limits(&FinCategory::terminal()));
        assert!(!has_finite_limits(&FinCategory::discrete(
            "d2",
            &["a", "b"]
        )));
        assert!(!has_finite_limits(&FinCategory::parallel_pair()));
    }

    #[test]
    fn yoneda_is_flat() {
        let c = FinCategory::walking_arrow();
        let z = ComputationalCategory::presheaf_category(&c, 3, Budget::DEFAULT).unwrap();
        let y = HandleFunctor::yoneda(&z).unwrap();
        let v = is_flat_bounded(&y, &Budget::SMALL).unwrap();
        assert!(!v.is_counterexample(), "{v:?}");
        assert!(v.checks() > 1);
    }

    #[test]
    fn exact_functor_on_semilattice() {
        // meets of {⊥ ≤ a, b ≤ ⊤}; the principal filter of a is exact
        let c = FinCategory::poset(
            "m",
            &["0", "a", "b", "1"],
            &[("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")],
        );
        let z = finset();
        let up_a = HandleFunctor::set_valued(
            "up_a",
            &c,
            &z,
            &[("0", &[]), ("a", &["*"]), ("b", &[]), ("1", &["*"])],
            &[("a<=1", &[("*", "*")])],
        )
        .unwrap();
        assert!(is_left_exact(&up_a).unwrap());
        assert!(is_flat_setvalued(&up_a).unwrap().holds);
        assert!(!is_flat_bounded(&up_a, &Budget::SMALL)
            .unwrap()
            .is_counterexample());
    }
}

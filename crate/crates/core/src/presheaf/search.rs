//! Backtracking search for natural transformations between presheaves.
//!
//! One variable per element `(X, a)` of the domain, ranging over the codomain
//! value `G(X)`. Each naturality square contributes the constraint
//! `θ_X(F(f)(y)) = G(f)(θ_Y(y))`, checked as soon as both ends are assigned.

use std::collections::{BTreeMap, HashMap};

use super::core::{Presheaf, PresheafMorphism};
use crate::error::{Error, Result};
use crate::fincat::ObjId;

struct Problem<'a> {
    dom: &'a Presheaf,
    cod: &'a Presheaf,
    /// object of each variable
    var_obj: Vec<usize>,
    offsets: Vec<usize>,
    /// constraints checked when the variable with the larger index is set:
    /// `(u, v, f)` meaning `val[u] == G(f)(val[v])`
    checks: Vec<Vec<(usize, usize, usize)>>,
}

impl<'a> Problem<'a> {
    fn new(dom: &'a Presheaf, cod: &'a Presheaf) -> Result<Self> {
        if dom.base() != cod.base() {
            return Err(Error::BaseMismatch(
                dom.base().name().into(),
                cod.base().name().into(),
            ));
        }
        let base = dom.base();
        let mut offsets = Vec::with_capacity(base.num_objects() + 1);
        let mut var_obj = Vec::new();
        offsets.push(0);
        for x in base.objects() {
            var_obj.extend(std::iter::repeat(x.0).take(dom.size(x)));
            offsets.push(var_obj.len());
        }
        let mut checks = vec![Vec::new(); var_obj.len()];
        for f in base.non_identity_morphisms() {
            let (s, t) = (base.src(f), base.tgt(f));
            for y in 0..dom.size(t) {
                let u = offsets[s.0] + dom.act(f, y);
                let v = offsets[t.0] + y;
                checks[u.max(v)].push((u, v, f.0));
            }
        }
        Ok(Self {
            dom,
            cod,
            var_obj,
            offsets,
            checks,
        })
    }

    fn into_morphism(&self, vals: &[usize]) -> PresheafMorphism {
        let components = self
            .offsets
            .windows(2)
            .map(|w| vals[w[0]..w[1]].to_vec())
            .collect();
        PresheafMorphism::new_unchecked(self.dom.clone(), self.cod.clone(), components)
    }

    /// Calls `visit` on every solution until it returns `false`.
    fn solve(&self, injective: bool, visit: &mut dyn FnMut(&[usize]) -> bool) {
        let n = self.var_obj.len();
        let mut vals = vec![0usize; n];
        let mut used: Vec<Vec<bool>> = if injective {
            self.dom
                .base()
                .objects()
                .map(|x| vec![false; self.cod.size(x)])
                .collect()
        } else {
            Vec::new()
        };
        self.go(0, &mut vals, &mut used, injective, visit);
    }

    fn go(
        &self,
        k: usize,
        vals: &mut Vec<usize>,
        used: &mut Vec<Vec<bool>>,
        injective: bool,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if k == vals.len() {
            return visit(vals);
        }
        let x = self.var_obj[k];
        for v in 0..self.cod.size(ObjId(x)) {
            if injective && used[x][v] {
                continue;
            }
            vals[k] = v;
            let ok = self.checks[k]
                .iter()
                .all(|&(a, b, f)| vals[a] == self.cod.act(crate::fincat::MorId(f), vals[b]));
            if !ok {
                continue;
            }
            if injective {
                used[x][v] = true;
            }
            let go_on = self.go(k + 1, vals, used, injective, visit);
            if injective {
                used[x][v] = false;
            }
            if !go_on {
                return false;
            }
        }
        true
    }
}

/// All natural transformations `dom → cod`, in lexicographic order of their
/// components. Fails with a budget error past `cap` results.
pub fn enumerate_morphisms(
    dom: &Presheaf,
    cod: &Presheaf,
    cap: usize,
) -> Result<Vec<PresheafMorphism>> {
    let problem = Problem::new(dom, cod)?;
    let mut out = Vec::new();
    let mut over = false;
    problem.solve(false, &mut |vals| {
        if out.len() == cap {
            over = true;
            return false;
        }
        out.push(problem.into_morphism(vals));
        true
    });
    if over {
        return Err(Error::budget("enumerating presheaf morphisms", cap));
    }
    Ok(out)
}

pub fn count_morphisms(dom: &Presheaf, cod: &Presheaf) -> Result<usize> {
    let problem = Problem::new(dom, cod)?;
    let mut n = 0usize;
    problem.solve(false, &mut |_| {
        n += 1;
        true
    });
    Ok(n)
}

/// Some isomorphism `a ≅ b`, if one exists.
pub fn find_iso(a: &Presheaf, b: &Presheaf) -> Option<PresheafMorphism> {
    if a.base() != b.base() || a.sizes() != b.sizes() {
        return None;
    }
    let problem = Problem::new(a, b).ok()?;
    let mut found = None;
    problem.solve(true, &mut |vals| {
        found = Some(problem.into_morphism(vals));
        false
    });
    found
}

pub fn is_isomorphic(a: &Presheaf, b: &Presheaf) -> bool {
    find_iso(a, b).is_some()
}

/// Keeps the first representative of every isomorphism class, preserving order.
pub fn dedupe_isomorphic(presheaves: Vec<Presheaf>) -> Vec<Presheaf> {
    let mut buckets: HashMap<Vec<u64>, Vec<usize>> = HashMap::new();
    let mut kept: Vec<Presheaf> = Vec::new();
    for p in presheaves {
        let key = invariant(&p);
        let bucket = buckets.entry(key).or_default();
        if bucket.iter().any(|&i| is_isomorphic(&kept[i], &p)) {
            continue;
        }
        bucket.push(kept.len());
        kept.push(p);
    }
    kept
}

/// Isomorphism invariant: sizes, image sizes of actions and fixed points of
/// endomorphism actions.
fn invariant(p: &Presheaf) -> Vec<u64> {
    let base = p.base();
    let mut key: Vec<u64> = p.sizes().into_iter().map(|s| s as u64).collect();
    for f in base.non_identity_morphisms() {
        let act = p.action(f);
        let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
        for v in act {
            *counts.entry(*v).or_default() += 1;
        }
        let mut fibre_sizes: Vec<u64> = counts.values().copied().collect();
        fibre_sizes.sort_unstable();
        key.push(u64::MAX);
        key.extend(fibre_sizes);
        if base.src(f) == base.tgt(f) {
            key.push(act.iter().enumerate().filter(|(i, v)| i == *v).count() as u64);
        }
    }
    key
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::FinCategory;

    /// Independent oracle: every assignment of components, filtered by naturality.
    fn brute_force_count(dom: &Presheaf, cod: &Presheaf) -> usize {
        let base = dom.base();
        let slots: Vec<(usize, usize)> = base
            .objects()
            .flat_map(|x| (0..dom.size(x)).map(move |a| (x.0, a)))
            .collect();
        let radix: Vec<usize> = slots.iter().map(|(x, _)| cod.size(ObjId(*x))).collect();
        if radix.iter().any(|r| *r == 0) {
            return usize::from(slots.is_empty());
        }
        let total: usize = radix.iter().product();
        let mut count = 0;
        for mut code in 0..total {
            let mut comps: Vec<Vec<usize>> = base.objects().map(|x| vec![0; dom.size(x)]).collect();
            for (i, (x, a)) in slots.iter().enumerate() {
                comps[*x][*a] = code % radix[i];
                code /= radix[i];
            }
            if PresheafMorphism::new(dom, cod, comps).is_ok() {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn counts_match_brute_force_on_walking_arrow() {
        let c = FinCategory::walking_arrow();
        let f = c.morphism_id("f").unwrap();
        let mut all = Vec::new();
        for s0 in 0usize..=2 {
            for s1 in 0..=2 {
                if s0 == 0 && s1 > 0 {
                    continue;
                }
                let n = if s1 == 0 { 1 } else { s0.pow(s1 as u32) };
                for code in 0..n {
                    let p = Presheaf::from_sizes(&c, &[s0, s1], |m, y| {
                        assert_eq!(m, f);
                        (code / s0.pow(y as u32)) % s0
                    })
                    .unwrap();
                    all.push(p);
                }
            }
        }
        for a in &all {
            for b in &all {
                let homs = enumerate_morphisms(a, b, usize::MAX).unwrap();
                assert_eq!(homs.len(), brute_force_count(a, b));
                assert!(homs.iter().all(|m| m.naturality_failure().is_none()));
                let mut sigs: Vec<String> = homs.iter().map(|m| m.signature()).collect();
                sigs.dedup();
                assert_eq!(sigs.len(), homs.len());
            }
        }
    }

    #[test]
    fn cap_is_a_budget_error() {
        let a = Presheaf::set_of_size(3);
        let b = Presheaf::set_of_size(3);
        assert_eq!(count_morphisms(&a, &b).unwrap(), 27);
        assert!(enumerate_morphisms(&a, &b, 10).unwrap_err().is_budget());
    }

    #[test]
    fn isomorphism_search() {
        let z2 = FinCategory::monoid("z2", &["e", "s"], &[vec![0, 1], vec![1, 0]]).unwrap();
        let swap = Presheaf::from_names(
            &z2,
            &[("*", &["a", "b"])],
            &[("s", &[("a", "b"), ("b", "a")])],
        )
        .unwrap();
        let fixed = Presheaf::from_names(
            &z2,
            &[("*", &["a", "b"])],
            &[("s", &[("a", "a"), ("b", "b")])],
        )
        .unwrap();
        assert!(find_iso(&swap, &fixed).is_none());
        let swap2 = Presheaf::from_names(
            &z2,
            &[("*", &["u", "v"])],
            &[("s", &[("u", "v"), ("v", "u")])],
        )
        .unwrap();
        let iso = find_iso(&swap, &swap2).unwrap();
        assert!(iso.is_iso());
        assert_eq!(
            dedupe_isomorphic(vec![swap.clone(), fixed.clone(), swap2]).len(),
            2
        );
    }
}

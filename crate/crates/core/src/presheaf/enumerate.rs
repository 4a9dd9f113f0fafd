use super::core::{default_label, Presheaf};
use crate::error::{Error, Result};
use crate::fincat::{FinCategory, MorId};

/// Every presheaf on `base` whose value sets have at most `bound` elements,
/// with elements labelled `a, b, c, …`. Isomorphic copies are all listed.
///
/// Objects vary fastest-first by size, then actions in lexicographic order;
/// the order is deterministic. Fails once more than `cap` presheaves exist.
pub fn enumerate_presheaves(base: &FinCategory, bound: usize, cap: usize) -> Result<Vec<Presheaf>> {
    let mut out = Vec::new();
    for_each_presheaf(base, bound, &mut |p| {
        if out.len() == cap {
            return Err(Error::budget(
                format!("enumerating presheaves on `{}`", base.name()),
                cap,
            ));
        }
        out.push(p);
        Ok(())
    })?;
    Ok(out)
}

pub fn count_presheaves(base: &FinCategory, bound: usize) -> usize {
    let mut n = 0;
    for_each_presheaf(base, bound, &mut |_| {
        n += 1;
        Ok(())
    })
    .expect("counting never fails");
    n
}

pub fn for_each_presheaf(
    base: &FinCategory,
    bound: usize,
    visit: &mut dyn FnMut(Presheaf) -> Result<()>,
) -> Result<()> {
    let n_obj = base.num_objects();
    let arrows: Vec<MorId> = base.non_identity_morphisms().collect();
    let pos = |m: MorId| arrows.iter().position(|a| *a == m);
    // Constraint F(g∘f) = F(f) ∘ F(g), attached to the last arrow it mentions.
    let mut checks: Vec<Vec<(MorId, MorId, MorId)>> = vec![Vec::new(); arrows.len()];
    for &g in &arrows {
        for &f in &arrows {
            if let Some(h) = base.compose(g, f) {
                let last = [pos(g), pos(f), pos(h)]
                    .into_iter()
                    .flatten()
                    .max()
                    .unwrap();
                checks[last].push((g, f, h));
            }
        }
    }
    let mut sizes = vec![0usize; n_obj];
    loop {
        let labels: Vec<Vec<String>> = sizes
            .iter()
            .map(|n| (0..*n).map(default_label).collect())
            .collect();
        let mut actions: Vec<Vec<usize>> = base
            .morphisms()
            .map(|m| {
                if base.is_identity(m) {
                    (0..sizes[base.tgt(m).0]).collect()
                } else {
                    Vec::new()
                }
            })
            .collect();
        let cx = Ctx {
            base,
            arrows: &arrows,
            checks: &checks,
            sizes: &sizes,
            labels: &labels,
        };
        cx.go(0, &mut actions, visit)?;
        // odometer
        let mut i = 0;
        loop {
            if i == n_obj {
                return Ok(());
            }
            sizes[i] += 1;
            if sizes[i] <= bound {
                break;
            }
            sizes[i] = 0;
            i += 1;
        }
    }
}

struct Ctx<'a> {
    base: &'a FinCategory,
    arrows: &'a [MorId],
    checks: &'a [Vec<(MorId, MorId, MorId)>],
    sizes: &'a [usize],
    labels: &'a [Vec<String>],
}

impl Ctx<'_> {
    fn go(
        &self,
        k: usize,
        actions: &mut Vec<Vec<usize>>,
        visit: &mut dyn FnMut(Presheaf) -> Result<()>,
    ) -> Result<()> {
        if k == self.arrows.len() {
            return visit(Presheaf::new_unchecked(
                self.base.clone(),
                self.labels.to_vec(),
                actions.clone(),
            ));
        }
        let m = self.arrows[k];
        let (s, t) = (self.base.src(m).0, self.base.tgt(m).0);
        let (ns, nt) = (self.sizes[s], self.sizes[t]);
        if nt > 0 && ns == 0 {
            return Ok(());
        }
        let total = ns.pow(nt as u32);
        for code in 0..total {
            let mut c = code;
            let act: Vec<usize> = (0..nt)
                .map(|_| {
                    let v = c % ns;
                    c /= ns;
                    v
                })
                .collect();
            actions[m.0] = act;
            let ok = self.checks[k].iter().all(|&(g, f, h)| {
                let tg = self.base.tgt(g).0;
                (0..self.sizes[tg]).all(|z| actions[h.0][z] == actions[f.0][actions[g.0][z]])
            });
            if ok {
                self.go(k + 1, actions, visit)?;
            }
        }
        actions[m.0] = Vec::new();
        Ok(())
    }
}

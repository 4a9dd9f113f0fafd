use super::sheaf::{matching_families, restrict};
use super::topology::Site;
use crate::error::{Error, Result};
use crate::fincat::{FinCategory, MorId, ObjId};
use crate::presheaf::{yoneda_embed, yoneda_morphism_between, Presheaf, PresheafMorphism};

/// `F⁺` with its canonical map `F → F⁺` and the class representatives needed
/// to map families into it.
#[derive(Clone, Debug)]
pub struct PlusConstruction {
    pub presheaf: Presheaf,
    pub unit: PresheafMorphism,
    /// per object: one `(sieve index, family)` per class
    reps: Vec<Vec<(usize, Vec<usize>)>>,
}

/// Families on sieves `s` and `t` of `x` are identified when they agree on a
/// covering sieve contained in both.
fn equivalent(site: &Site, x: ObjId, s: usize, a: &[usize], t: usize, b: &[usize]) -> bool {
    let data = site.sieve_data(x);
    let (ds, dt) = (&data[s], &data[t]);
    let mut agree = 0u64;
    for (p, f) in ds.arrows.iter().enumerate() {
        let q = dt.pos[f.0];
        if q != usize::MAX && a[p] == b[q] {
            agree |= 1 << f.0;
        }
    }
    data.iter().any(|r| r.sieve.bits & !agree == 0)
}

impl PlusConstruction {
    fn class_of(&self, site: &Site, x: ObjId, s: usize, fam: &[usize]) -> usize {
        self.reps[x.0]
            .iter()
            .position(|(t, b)| equivalent(site, x, s, fam, *t, b))
            .expect("every matching family has a class")
    }
}

/// Matching families over covering sieves modulo agreement on a covering
/// sieve. A class holding a family on the maximal sieve keeps the label of its
/// first element of `F(X)`; others are named `[sieve|values]`.
pub fn plus_construction(f: &Presheaf, site: &Site) -> Result<PlusConstruction> {
    if f.base() != site.base() {
        return Err(Error::BaseMismatch(
            f.base().name().into(),
            site.base().name().into(),
        ));
    }
    let c = site.base();
    let mut reps: Vec<Vec<(usize, Vec<usize>)>> = Vec::with_capacity(c.num_objects());
    let mut labels = Vec::with_capacity(c.num_objects());
    let mut unit = Vec::with_capacity(c.num_objects());
    for x in c.objects() {
        let data = site.sieve_data(x);
        let mut classes: Vec<(usize, Vec<usize>)> = Vec::new();
        let mut names: Vec<String> = Vec::new();
        let mut unit_x = Vec::with_capacity(f.size(x));
        // maximal sieve first, in element order: these are the images of F(X)
        for a in 0..f.size(x) {
            let fam = restrict(f, &data[0], a);
            match classes
                .iter()
                .position(|(t, b)| equivalent(site, x, 0, &fam, *t, b))
            {
                Some(k) => unit_x.push(k),
                None => {
                    unit_x.push(classes.len());
                    classes.push((0, fam));
                    names.push(f.label(x, a).to_string());
                }
            }
        }
        for (s, d) in data.iter().enumerate().skip(1) {
            for fam in matching_families(f, d)? {
                if classes
                    .iter()
                    .any(|(t, b)| equivalent(site, x, s, &fam, *t, b))
                {
                    continue;
                }
                let vals: Vec<&str> = d
                    .arrows
                    .iter()
                    .zip(&fam)
                    .map(|(m, v)| f.label(c.src(*m), *v))
                    .collect();
                names.push(format!("[{}|{}]", s, vals.join(",")));
                classes.push((s, fam));
            }
        }
        dedupe(&mut names);
        reps.push(classes);
        labels.push(names);
        unit.push(unit_x);
    }
    let mut plus = PlusConstruction {
        presheaf: Presheaf::initial(c),
        unit: PresheafMorphism::identity(f),
        reps,
    };
    let actions = c
        .morphisms()
        .map(|g| {
            let (y, x) = (c.src(g), c.tgt(g));
            let gi = site
                .into_list(x)
                .iter()
                .position(|m| *m == g)
                .expect("g targets x");
            plus.reps[x.0]
                .iter()
                .map(|(s, fam)| {
                    let (t, positions) = &site.sieve_data(x)[*s].pullbacks[gi];
                    let pulled: Vec<usize> = positions.iter().map(|p| fam[*p]).collect();
                    plus.class_of(site, y, *t, &pulled)
                })
                .collect()
        })
        .collect();
    plus.presheaf = Presheaf::new_unchecked(c.clone(), labels, actions);
    plus.unit = PresheafMorphism::new_unchecked(f.clone(), plus.presheaf.clone(), unit);
    Ok(plus)
}

fn dedupe(labels: &mut [String]) {
    let mut seen = std::collections::HashSet::new();
    for l in labels.iter_mut() {
        while !seen.insert(l.clone()) {
            l.push('\'');
        }
    }
}

/// `m⁺: F⁺ → G⁺`, applying `m` to each family.
pub fn plus_map(
    site: &Site,
    m: &PresheafMorphism,
    dom: &PlusConstruction,
    cod: &PlusConstruction,
) -> PresheafMorphism {
    let c = site.base();
    let components = c
        .objects()
        .map(|x| {
            let data = site.sieve_data(x);
            dom.reps[x.0]
                .iter()
                .map(|(s, fam)| {
                    let image: Vec<usize> = data[*s]
                        .arrows
                        .iter()
                        .zip(fam)
                        .map(|(a, v)| m.apply(c.src(*a), *v))
                        .collect();
                    cod.class_of(site, x, *s, &image)
                })
                .collect()
        })
        .collect();
    PresheafMorphism::new_unchecked(dom.presheaf.clone(), cod.presheaf.clone(), components)
}

/// The associated sheaf `aF = F⁺⁺` and the unit `F → aF`.
#[derive(Clone, Debug)]
pub struct SheafificationResult {
    pub sheaf: Presheaf,
    pub unit: PresheafMorphism,
    /// `F⁺` and `F⁺⁺`
    pub stages: [Presheaf; 2],
    first: PlusConstruction,
    second: PlusConstruction,
}

pub fn sheafify(f: &Presheaf, site: &Site) -> Result<SheafificationResult> {
    let first = plus_construction(f, site)?;
    let second = plus_construction(&first.presheaf, site)?;
    let unit = second.unit.after(&first.unit)?;
    Ok(SheafificationResult {
        sheaf: second.presheaf.clone(),
        unit,
        stages: [first.presheaf.clone(), second.presheaf.clone()],
        first,
        second,
    })
}

/// `a(m): aF → aG`.
pub fn sheafify_map(
    site: &Site,
    m: &PresheafMorphism,
    dom: &SheafificationResult,
    cod: &SheafificationResult,
) -> Result<PresheafMorphism> {
    if m.dom() != dom.unit.dom() || m.cod() != cod.unit.dom() {
        return Err(Error::contract(
            "sheafified map does not match the given sheafifications",
        ));
    }
    let m1 = plus_map(site, m, &dom.first, &cod.first);
    Ok(plus_map(site, &m1, &dom.second, &cod.second))
}

/// `ε(X) = a(h_X)`.
pub fn epsilon(site: &Site, x: ObjId) -> Result<SheafificationResult> {
    sheafify(&yoneda_embed(site.base(), x)?, site)
}

/// The canonical functor `ε = a ∘ h` on all objects and morphisms.
#[derive(Clone, Debug)]
pub struct EpsilonFunctor {
    pub objects: Vec<SheafificationResult>,
    pub morphisms: Vec<PresheafMorphism>,
}

pub fn epsilon_functor(site: &Site) -> Result<EpsilonFunctor> {
    let c: &FinCategory = site.base();
    let reps: Vec<Presheaf> = c
        .objects()
        .map(|x| yoneda_embed(c, x))
        .collect::<Result<_>>()?;
    let objects: Vec<SheafificationResult> = reps
        .iter()
        .map(|h| sheafify(h, site))
        .collect::<Result<_>>()?;
    let morphisms = c
        .morphisms()
        .map(|f: MorId| {
            let (s, t) = (c.src(f), c.tgt(f));
            let hf = yoneda_morphism_between(c, f, &reps[s.0], &reps[t.0]);
            sheafify_map(site, &hf, &objects[s.0], &objects[t.0])
        })
        .collect::<Result<_>>()?;
    Ok(EpsilonFunctor { objects, morphisms })
}

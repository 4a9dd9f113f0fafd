use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fincat::{FinCategory, MorId, ObjId};

#[derive(Debug, PartialEq, Eq, Hash)]
struct Data {
    base: FinCategory,
    labels: Vec<Vec<String>>,
    /// `actions[f][y] = F(f)(y)` for `f: X → Y`, `y ∈ F(Y)`.
    actions: Vec<Vec<usize>>,
}

/// A presheaf `F: C^op → FinSet`. Elements of `F(X)` are addressed by index;
/// labels are unique within each object.
#[derive(Clone)]
pub struct Presheaf(Arc<Data>);

impl PartialEq for Presheaf {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl Eq for Presheaf {}

impl std::hash::Hash for Presheaf {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.labels.hash(state);
        self.0.actions.hash(state);
    }
}

impl fmt::Debug for Presheaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Presheaf[{}]", self.0.base.name())?;
        f.debug_map()
            .entries(
                self.0
                    .base
                    .objects()
                    .map(|x| (self.0.base.object_name(x), &self.0.labels[x.0])),
            )
            .finish()
    }
}

impl fmt::Display for Presheaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = &self.0.base;
        for x in base.objects() {
            writeln!(
                f,
                "  {} : {{{}}}",
                base.object_name(x),
                self.0.labels[x.0].join(", ")
            )?;
        }
        for m in base.non_identity_morphisms() {
            let (s, t) = (base.src(m), base.tgt(m));
            let pairs: Vec<String> = self.0.actions[m.0]
                .iter()
                .enumerate()
                .map(|(y, x)| format!("{}->{}", self.0.labels[t.0][y], self.0.labels[s.0][*x]))
                .collect();
            writeln!(f, "  {} : {}", base.morphism_name(m), pairs.join(" "))?;
        }
        Ok(())
    }
}

pub(crate) fn default_label(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("x{i}")
    }
}

impl Presheaf {
    /// Validates labels and functoriality (contravariant).
    pub fn new(
        base: &FinCategory,
        labels: Vec<Vec<String>>,
        actions: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if labels.len() != base.num_objects() || actions.len() != base.num_morphisms() {
            return Err(Error::InvalidPresheaf(
                "value or action table has the wrong length".into(),
            ));
        }
        for x in base.objects() {
            let mut seen = HashSet::new();
            if let Some(dup) = labels[x.0].iter().find(|l| !seen.insert(l.as_str())) {
                return Err(Error::InvalidPresheaf(format!(
                    "duplicate element `{dup}` at `{}`",
                    base.object_name(x)
                )));
            }
        }
        for f in base.morphisms() {
            let (s, t) = (base.src(f), base.tgt(f));
            let act = &actions[f.0];
            if act.len() != labels[t.0].len() || act.iter().any(|x| *x >= labels[s.0].len()) {
                return Err(Error::InvalidPresheaf(format!(
                    "action of `{}` is not a function {} → {}",
                    base.morphism_name(f),
                    base.object_name(t),
                    base.object_name(s)
                )));
            }
        }
        let p = Self::new_unchecked(base.clone(), labels, actions);
        p.check_functorial()?;
        Ok(p)
    }

    pub(crate) fn new_unchecked(
        base: FinCategory,
        labels: Vec<Vec<String>>,
        actions: Vec<Vec<usize>>,
    ) -> Self {
        Presheaf(Arc::new(Data {
            base,
            labels,
            actions,
        }))
    }

    /// Builds from value sizes and an action closure `(f, y) ↦ F(f)(y)`;
    /// identity actions are filled in. Labels are `a, b, c, …`.
    pub fn from_sizes(
        base: &FinCategory,
        sizes: &[usize],
        mut act: impl FnMut(MorId, usize) -> usize,
    ) -> Result<Self> {
        let labels = sizes
            .iter()
            .map(|n| (0..*n).map(default_label).collect())
            .collect();
        let actions = base
            .morphisms()
            .map(|f| {
                let t = base.tgt(f);
                if base.is_identity(f) {
                    (0..sizes[t.0]).collect()
                } else {
                    (0..sizes[t.0]).map(|y| act(f, y)).collect()
                }
            })
            .collect();
        Self::new(base, labels, actions)
    }

    /// Builds from element names and `(morphism, [(y, x)])` action pairs.
    /// Actions out of empty value sets may be omitted.
    pub fn from_names(
        base: &FinCategory,
        values: &[(&str, &[&str])],
        actions: &[(&str, &[(&str, &str)])],
    ) -> Result<Self> {
        let mut labels = vec![Vec::new(); base.num_objects()];
        for (x, elems) in values {
            labels[base.object_id(x)?.0] = elems.iter().map(|e| e.to_string()).collect();
        }
        let mut table: Vec<Option<Vec<usize>>> = vec![None; base.num_morphisms()];
        for x in base.objects() {
            table[base.identity(x).0] = Some((0..labels[x.0].len()).collect());
        }
        for f in base.morphisms() {
            if labels[base.tgt(f).0].is_empty() {
                table[f.0] = Some(Vec::new());
            }
        }
        for (f, pairs) in actions {
            let f = base.morphism_id(f)?;
            let (s, t) = (base.src(f), base.tgt(f));
            let mut act = vec![usize::MAX; labels[t.0].len()];
            for (y, x) in pairs.iter() {
                let yi = labels[t.0].iter().position(|l| l == y);
                let xi = labels[s.0].iter().position(|l| l == x);
                match (yi, xi) {
                    (Some(yi), Some(xi)) => act[yi] = xi,
                    _ => {
                        return Err(Error::InvalidPresheaf(format!(
                            "unknown element in `{y}->{x}`"
                        )))
                    }
                }
            }
            if act.contains(&usize::MAX) {
                return Err(Error::InvalidPresheaf(format!(
                    "action of `{}` is not total",
                    base.morphism_name(f)
                )));
            }
            table[f.0] = Some(act);
        }
        let actions = table
            .into_iter()
            .enumerate()
            .map(|(i, a)| {
                a.ok_or_else(|| {
                    Error::InvalidPresheaf(format!(
                        "missing action for `{}`",
                        base.morphism_name(MorId(i))
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(base, labels, actions)
    }

    /// A finite set, i.e. a presheaf on the terminal category.
    pub fn set<S: AsRef<str>>(elements: &[S]) -> Self {
        let base = FinCategory::terminal();
        let labels = vec![elements
            .iter()
            .map(|e| e.as_ref().to_string())
            .collect::<Vec<_>>()];
        let n = labels[0].len();
        Self::new(&base, labels, vec![(0..n).collect()]).expect("finite set")
    }

    /// The set `{a, b, …}` with `n` elements.
    pub fn set_of_size(n: usize) -> Self {
        let names: Vec<String> = (0..n).map(default_label).collect();
        Self::set(&names)
    }

    pub fn terminal(base: &FinCategory) -> Self {
        Self::new_unchecked(
            base.clone(),
            vec![vec!["*".to_string()]; base.num_objects()],
            vec![vec![0]; base.num_morphisms()],
        )
    }

    pub fn initial(base: &FinCategory) -> Self {
        Self::new_unchecked(
            base.clone(),
            vec![Vec::new(); base.num_objects()],
            vec![Vec::new(); base.num_morphisms()],
        )
    }

    pub fn base(&self) -> &FinCategory {
        &self.0.base
    }

    pub fn size(&self, x: ObjId) -> usize {
        self.0.labels[x.0].len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.0.labels.iter().map(Vec::len).collect()
    }

    pub fn total_size(&self) -> usize {
        self.0.labels.iter().map(Vec::len).sum()
    }

    pub fn labels(&self, x: ObjId) -> &[String] {
        &self.0.labels[x.0]
    }

    pub fn label(&self, x: ObjId, i: usize) -> &str {
        &self.0.labels[x.0][i]
    }

    pub fn element(&self, x: ObjId, label: &str) -> Option<usize> {
        self.0.labels[x.0].iter().position(|l| l == label)
    }

    /// `F(f)(y)`.
    pub fn act(&self, f: MorId, y: usize) -> usize {
        self.0.actions[f.0][y]
    }

    pub fn action(&self, f: MorId) -> &[usize] {
        &self.0.actions[f.0]
    }

    pub fn actions(&self) -> &[Vec<usize>] {
        &self.0.actions
    }

    pub fn all_labels(&self) -> &[Vec<String>] {
        &self.0.labels
    }

    /// Same structure with every element relabelled by its index.
    pub fn with_default_labels(&self) -> Self {
        let labels = self
            .0
            .labels
            .iter()
            .map(|l| (0..l.len()).map(default_label).collect())
            .collect();
        Self::new_unchecked(self.0.base.clone(), labels, self.0.actions.clone())
    }

    /// Reinterprets a presheaf on `C` as one on an equal category (by value).
    pub fn rebase(&self, base: &FinCategory) -> Result<Self> {
        if base != &self.0.base {
            return Err(Error::BaseMismatch(
                self.0.base.name().into(),
                base.name().into(),
            ));
        }
        Ok(Self::new_unchecked(
            base.clone(),
            self.0.labels.clone(),
            self.0.actions.clone(),
        ))
    }

    fn check_functorial(&self) -> Result<()> {
        let base = &self.0.base;
        for x in base.objects() {
            let id = base.identity(x);
            if self.0.actions[id.0]
                .iter()
                .enumerate()
                .any(|(i, v)| i != *v)
            {
                return Err(Error::InvalidPresheaf(format!(
                    "identity of `{}` does not act as the identity",
                    base.object_name(x)
                )));
            }
        }
        for g in base.morphisms() {
            for f in base.morphisms() {
                let Some(gf) = base.compose(g, f) else {
                    continue;
                };
                // F(g∘f) = F(f) ∘ F(g)
                let ok = (0..self.size(base.tgt(g)))
                    .all(|z| self.act(gf, z) == self.act(f, self.act(g, z)));
                if !ok {
                    return Err(Error::InvalidPresheaf(format!(
                        "action does not respect the composite of `{}` and `{}`",
                        base.morphism_name(g),
                        base.morphism_name(f)
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A natural transformation between presheaves on the same base.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PresheafMorphism {
    dom: Presheaf,
    cod: Presheaf,
    /// `components[x][a] = θ_X(a)`
    components: Vec<Vec<usize>>,
}

/// A failed naturality square: `G(f)(θ_Y(y)) ≠ θ_X(F(f)(y))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NaturalityFailure {
    pub morphism: MorId,
    pub element: usize,
}

impl PresheafMorphism {
    pub fn new(dom: &Presheaf, cod: &Presheaf, components: Vec<Vec<usize>>) -> Result<Self> {
        if dom.base() != cod.base() {
            return Err(Error::BaseMismatch(
                dom.base().name().into(),
                cod.base().name().into(),
            ));
        }
        let base = dom.base();
        if components.len() != base.num_objects()
            || base.objects().any(|x| {
                components[x.0].len() != dom.size(x)
                    || components[x.0].iter().any(|v| *v >= cod.size(x))
            })
        {
            return Err(Error::InvalidMorphism(
                "components are not functions between the value sets".into(),
            ));
        }
        let m = Self::new_unchecked(dom.clone(), cod.clone(), components);
        if let Some(w) = m.naturality_failure() {
            return Err(Error::InvalidMorphism(format!(
                "naturality fails at `{}`",
                base.morphism_name(w.morphism)
            )));
        }
        Ok(m)
    }

    pub(crate) fn new_unchecked(dom: Presheaf, cod: Presheaf, components: Vec<Vec<usize>>) -> Self {
        Self {
            dom,
            cod,
            components,
        }
    }

    pub fn identity(p: &Presheaf) -> Self {
        let components = p
            .base()
            .objects()
            .map(|x| (0..p.size(x)).collect())
            .collect();
        Self::new_unchecked(p.clone(), p.clone(), components)
    }

    /// The unique map into the terminal presheaf.
    pub fn to_terminal(p: &Presheaf, terminal: &Presheaf) -> Self {
        let components = p.base().objects().map(|x| vec![0; p.size(x)]).collect();
        Self::new_unchecked(p.clone(), terminal.clone(), components)
    }

    pub fn from_initial(initial: &Presheaf, p: &Presheaf) -> Self {
        Self::new_unchecked(
            initial.clone(),
            p.clone(),
            vec![Vec::new(); p.base().num_objects()],
        )
    }

    pub fn dom(&self) -> &Presheaf {
        &self.dom
    }

    pub fn cod(&self) -> &Presheaf {
        &self.cod
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn component(&self, x: ObjId) -> &[usize] {
        &self.components[x.0]
    }

    pub fn apply(&self, x: ObjId, a: usize) -> usize {
        self.components[x.0][a]
    }

    pub fn naturality_failure(&self) -> Option<NaturalityFailure> {
        let base = self.dom.base();
        for f in base.non_identity_morphisms() {
            let (s, t) = (base.src(f), base.tgt(f));
            for y in 0..self.dom.size(t) {
                if self.cod.act(f, self.components[t.0][y])
                    != self.components[s.0][self.dom.act(f, y)]
                {
                    return Some(NaturalityFailure {
                        morphism: f,
                        element: y,
                    });
                }
            }
        }
        None
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &PresheafMorphism) -> Result<Self> {
        if first.cod != self.dom {
            return Err(Error::contract(
                "composing presheaf morphisms with mismatched ends",
            ));
        }
        Ok(self.after_unchecked(first))
    }

    pub(crate) fn after_unchecked(&self, first: &PresheafMorphism) -> Self {
        let components = first
            .components
            .iter()
            .zip(&self.components)
            .map(|(f, g)| f.iter().map(|a| g[*a]).collect())
            .collect();
        Self::new_unchecked(first.dom.clone(), self.cod.clone(), components)
    }

    pub fn is_iso(&self) -> bool {
        self.dom.base().objects().all(|x| {
            let c = &self.components[x.0];
            c.len() == self.cod.size(x) && {
                let mut seen = vec![false; c.len()];
                c.iter().all(|v| !std::mem::replace(&mut seen[*v], true))
            }
        })
    }

    pub fn is_mono(&self) -> bool {
        self.components.iter().all(|c| {
            let mut s: Vec<usize> = c.clone();
            s.sort_unstable();
            s.windows(2).all(|w| w[0] != w[1])
        })
    }

    pub fn is_epi(&self) -> bool {
        self.dom.base().objects().all(|x| {
            let mut hit = vec![false; self.cod.size(x)];
            self.components[x.0].iter().for_each(|v| hit[*v] = true);
            hit.into_iter().all(|b| b)
        })
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_iso() {
            return None;
        }
        let components = self
            .components
            .iter()
            .map(|c| {
                let mut inv = vec![0; c.len()];
                for (a, b) in c.iter().enumerate() {
                    inv[*b] = a;
                }
                inv
            })
            .collect();
        Some(Self::new_unchecked(
            self.cod.clone(),
            self.dom.clone(),
            components,
        ))
    }

    /// Where the map fails to be a pointwise bijection, if anywhere.
    pub fn iso_failure(&self) -> Option<(ObjId, String)> {
        let base = self.dom.base();
        for x in base.objects() {
            let c = &self.components[x.0];
            let mut hit = vec![None; self.cod.size(x)];
            for (a, b) in c.iter().enumerate() {
                if let Some(prev) = hit[*b].replace(a) {
                    return Some((
                        x,
                        format!(
                            "`{}` and `{}` both map to `{}`",
                            self.dom.label(x, prev),
                            self.dom.label(x, a),
                            self.cod.label(x, *b)
                        ),
                    ));
                }
            }
            if let Some(missed) = hit.iter().position(Option::is_none) {
                return Some((x, format!("`{}` is not hit", self.cod.label(x, missed))));
            }
        }
        None
    }

    /// Compact rendering of the components, unique within a hom-set.
    pub fn signature(&self) -> String {
        let parts: Vec<String> = self
            .components
            .iter()
            .map(|c| {
                c.iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        format!("[{}]", parts.join("|"))
    }

    /// Same components, reattached to equal (by value) endpoints.
    pub(crate) fn reattach(&self, dom: &Presheaf, cod: &Presheaf) -> Self {
        debug_assert_eq!(&self.dom, dom);
        debug_assert_eq!(&self.cod, cod);
        Self::new_unchecked(dom.clone(), cod.clone(), self.components.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arrow_presheaf() -> Presheaf {
        let c = FinCategory::walking_arrow();
        Presheaf::from_names(
            &c,
            &[("0", &["p", "q"]), ("1", &["r"])],
            &[("f", &[("r", "q")])],
        )
        .unwrap()
    }

    #[test]
    fn builds_and_reads_back() {
        let p = arrow_presheaf();
        let c = p.base().clone();
        let f = c.morphism_id("f").unwrap();
        assert_eq!(p.sizes(), vec![2, 1]);
        assert_eq!(p.label(ObjId(0), p.act(f, 0)), "q");
    }

    #[test]
    fn rejects_non_functorial_action() {
        let z2 = FinCategory::monoid("z2", &["e", "s"], &[vec![0, 1], vec![1, 0]]).unwrap();
        // s acting as a constant map is not an involution.
        let err = Presheaf::from_names(
            &z2,
            &[("*", &["a", "b"])],
            &[("s", &[("a", "a"), ("b", "a")])],
        );
        assert!(matches!(err, Err(Error::InvalidPresheaf(_))));
        let ok = Presheaf::from_names(
            &z2,
            &[("*", &["a", "b"])],
            &[("s", &[("a", "b"), ("b", "a")])],
        );
        assert!(ok.is_ok());
    }

    #[test]
    fn rejects_duplicate_labels() {
        let one = FinCategory::terminal();
        assert!(Presheaf::new(&one, vec![vec!["a".into(), "a".into()]], vec![vec![0, 1]]).is_err());
    }

    #[test]
    fn broken_naturality_square_is_caught() {
        let p = arrow_presheaf();
        // Swapping p and q at 0 breaks the square for f.
        let err = PresheafMorphism::new(&p, &p, vec![vec![1, 0], vec![0]]);
        assert!(matches!(err, Err(Error::InvalidMorphism(_))));
        let id = PresheafMorphism::new(&p, &p, vec![vec![0, 1], vec![0]]).unwrap();
        assert!(id.is_iso());
        assert_eq!(id.inverse().unwrap(), id);
    }

    #[test]
    fn iso_failure_names_the_point() {
        let a = Presheaf::set_of_size(2);
        let b = Presheaf::set_of_size(1);
        let m = PresheafMorphism::new(&a, &b, vec![vec![0, 0]]).unwrap();
        assert!(m.is_epi() && !m.is_mono());
        let (x, msg) = m.iso_failure().unwrap();
        assert_eq!(x, ObjId(0));
        assert!(msg.contains("both map"));
    }
}

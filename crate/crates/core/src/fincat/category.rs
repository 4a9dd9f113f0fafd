use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

/// Index of an object inside its [`FinCategory`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ObjId(pub usize);

/// Index of a morphism inside its [`FinCategory`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct MorId(pub usize);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Morphism {
    pub name: String,
    pub src: ObjId,
    pub tgt: ObjId,
}

/// Size limits applied to user supplied and generated corpus categories.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_objects: usize,
    pub max_non_identity: usize,
}

pub const CORPUS_LIMITS: Limits = Limits {
    max_objects: 6,
    max_non_identity: 24,
};

/// Raw, name based description of a category as it appears in a workspace
/// file. Nothing about it is trusted until [`validate_category`] passes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CategoryData {
    pub name: String,
    pub objects: Vec<String>,
    /// `(name, src, tgt)`
    pub morphisms: Vec<(String, String, String)>,
    /// `(object, identity morphism)`
    pub identities: Vec<(String, String)>,
    /// `(g, f, g∘f)`. Composites with an identity may be omitted.
    pub compose: Vec<(String, String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    DuplicateName {
        name: String,
    },
    Dangling {
        entity: String,
        reference: String,
    },
    MissingIdentity {
        object: String,
    },
    BadIdentity {
        object: String,
        morphism: String,
    },
    NotComposable {
        g: String,
        f: String,
    },
    ConflictingComposite {
        g: String,
        f: String,
    },
    MissingComposite {
        g: String,
        f: String,
    },
    CompositeEnds {
        g: String,
        f: String,
        composite: String,
    },
    LeftUnit {
        identity: String,
        f: String,
    },
    RightUnit {
        f: String,
        identity: String,
    },
    Associativity {
        h: String,
        g: String,
        f: String,
    },
    SizeBound {
        what: String,
        found: usize,
        limit: usize,
    },
    /// Functor-level violations.
    Structural {
        detail: String,
    },
    Endpoints {
        morphism: String,
    },
    PreservesIdentity {
        object: String,
    },
    PreservesComposition {
        g: String,
        f: String,
    },
    Naturality {
        morphism: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            DuplicateName { name } => write!(f, "duplicate name `{name}`"),
            Dangling { entity, reference } => {
                write!(f, "`{entity}` refers to unknown `{reference}`")
            }
            MissingIdentity { object } => write!(f, "object `{object}` has no identity"),
            BadIdentity { object, morphism } => {
                write!(
                    f,
                    "identity `{morphism}` of `{object}` is not an endomorphism of it"
                )
            }
            NotComposable { g, f: ff } => write!(
                f,
                "composite ({g}, {ff}) declared for a non-composable pair"
            ),
            ConflictingComposite { g, f: ff } => write!(
                f,
                "composite ({g}, {ff}) declared twice with different values"
            ),
            MissingComposite { g, f: ff } => write!(f, "composite ({g}, {ff}) is missing"),
            CompositeEnds {
                g,
                f: ff,
                composite,
            } => {
                write!(
                    f,
                    "composite ({g}, {ff}) = {composite} has wrong source or target"
                )
            }
            LeftUnit { identity, f: ff } => write!(f, "left unit law fails at ({identity}, {ff})"),
            RightUnit { f: ff, identity } => {
                write!(f, "right unit law fails at ({ff}, {identity})")
            }
            Associativity { h, g, f: ff } => write!(f, "associativity fails at ({h}, {g}, {ff})"),
            SizeBound { what, found, limit } => {
                write!(f, "{what}: {found} exceeds the limit {limit}")
            }
            Structural { detail } => write!(f, "structural error: {detail}"),
            Endpoints { morphism } => write!(f, "image of `{morphism}` has wrong endpoints"),
            PreservesIdentity { object } => write!(f, "identity of `{object}` is not preserved"),
            PreservesComposition { g, f: ff } => {
                write!(f, "composite ({g}, {ff}) is not preserved")
            }
            Naturality { morphism } => {
                write!(f, "naturality square at `{morphism}` does not commute")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn first(&self) -> Option<&Violation> {
        self.violations.first()
    }

    pub(crate) fn push(&mut self, v: Violation) {
        self.violations.push(v);
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, PartialEq, Eq, Hash)]
struct Inner {
    name: String,
    objects: Vec<String>,
    morphisms: Vec<Morphism>,
    identities: Vec<MorId>,
    /// `compose[g * n + f]`, defined exactly on composable pairs.
    compose: Vec<Option<MorId>>,
    /// `homs[src * n_obj + tgt]`
    homs: Vec<Vec<MorId>>,
}

/// A finite category with a total composition table.
///
/// Cheap to clone; the data is shared and immutable.
#[derive(Clone)]
pub struct FinCategory(Arc<Inner>);

impl PartialEq for FinCategory {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl Eq for FinCategory {}

impl std::hash::Hash for FinCategory {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.hash(state)
    }
}

impl fmt::Debug for FinCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FinCategory({}: {} objects, {} morphisms)",
            self.0.name,
            self.0.objects.len(),
            self.0.morphisms.len()
        )
    }
}

pub fn validate_category(data: &CategoryData) -> ValidationReport {
    validate_category_with(data, Some(CORPUS_LIMITS))
}

pub fn validate_category_with(data: &CategoryData, limits: Option<Limits>) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut seen = BTreeSet::new();
    for o in &data.objects {
        if !seen.insert(o.as_str()) {
            report.push(Violation::DuplicateName { name: o.clone() });
        }
    }
    let obj_index: HashMap<&str, usize> = data
        .objects
        .iter()
        .enumerate()
        .map(|(i, o)| (o.as_str(), i))
        .collect();

    let mut mor_index: HashMap<&str, usize> = HashMap::new();
    let mut ends = Vec::with_capacity(data.morphisms.len());
    for (i, (name, src, tgt)) in data.morphisms.iter().enumerate() {
        if mor_index.insert(name.as_str(), i).is_some() {
            report.push(Violation::DuplicateName { name: name.clone() });
        }
        let s = obj_index.get(src.as_str()).copied();
        let t = obj_index.get(tgt.as_str()).copied();
        if s.is_none() {
            report.push(Violation::Dangling {
                entity: name.clone(),
                reference: src.clone(),
            });
        }
        if t.is_none() {
            report.push(Violation::Dangling {
                entity: name.clone(),
                reference: tgt.clone(),
            });
        }
        ends.push(s.zip(t));
    }

    let mut identity: Vec<Option<usize>> = vec![None; data.objects.len()];
    for (obj, mor) in &data.identities {
        let (Some(&o), Some(&m)) = (obj_index.get(obj.as_str()), mor_index.get(mor.as_str()))
        else {
            let reference = if obj_index.contains_key(obj.as_str()) {
                mor
            } else {
                obj
            };
            report.push(Violation::Dangling {
                entity: format!("identity {obj}"),
                reference: reference.clone(),
            });
            continue;
        };
        if ends[m] != Some((o, o)) {
            report.push(Violation::BadIdentity {
                object: obj.clone(),
                morphism: mor.clone(),
            });
        } else if identity[o].is_some() && identity[o] != Some(m) {
            report.push(Violation::DuplicateName {
                name: format!("identity of {obj}"),
            });
        } else {
            identity[o] = Some(m);
        }
    }
    for (o, id) in identity.iter().enumerate() {
        if id.is_none() {
            report.push(Violation::MissingIdentity {
                object: data.objects[o].clone(),
            });
        }
    }

    let n = data.morphisms.len();
    let mut table: Vec<Option<usize>> = vec![None; n * n];
    for (g, f, h) in &data.compose {
        let ids = [g, f, h].map(|x| mor_index.get(x.as_str()).copied());
        let [Some(gi), Some(fi), Some(hi)] = ids else {
            for (x, id) in [g, f, h].iter().zip(ids) {
                if id.is_none() {
                    report.push(Violation::Dangling {
                        entity: format!("compose {g} {f}"),
                        reference: (*x).clone(),
                    });
                }
            }
            continue;
        };
        let (Some((fs, ft)), Some((gs, gt)), Some(he)) = (ends[fi], ends[gi], ends[hi]) else {
            continue;
        };
        if gs != ft {
            report.push(Violation::NotComposable {
                g: g.clone(),
                f: f.clone(),
            });
            continue;
        }
        match table[gi * n + fi] {
            Some(prev) if prev != hi => {
                report.push(Violation::ConflictingComposite {
                    g: g.clone(),
                    f: f.clone(),
                });
                continue;
            }
            _ => {}
        }
        table[gi * n + fi] = Some(hi);
        if he != (fs, gt) {
            report.push(Violation::CompositeEnds {
                g: g.clone(),
                f: f.clone(),
                composite: h.clone(),
            });
        }
    }
    if !report.passed() {
        return report;
    }

    // Composites with identities default to the non-identity factor.
    let is_identity: Vec<bool> = (0..n).map(|m| identity.contains(&Some(m))).collect();
    for g in 0..n {
        for f in 0..n {
            let (_, ft) = ends[f].unwrap();
            let (gs, _) = ends[g].unwrap();
            if gs != ft || table[g * n + f].is_some() {
                continue;
            }
            if is_identity[g] {
                table[g * n + f] = Some(f);
            } else if is_identity[f] {
                table[g * n + f] = Some(g);
            } else {
                report.push(Violation::MissingComposite {
                    g: data.morphisms[g].0.clone(),
                    f: data.morphisms[f].0.clone(),
                });
            }
        }
    }
    if !report.passed() {
        return report;
    }

    let name = |m: usize| data.morphisms[m].0.clone();
    for f in 0..n {
        let (s, t) = ends[f].unwrap();
        let id_t = identity[t].unwrap();
        let id_s = identity[s].unwrap();
        if table[id_t * n + f] != Some(f) {
            report.push(Violation::LeftUnit {
                identity: name(id_t),
                f: name(f),
            });
        }
        if table[f * n + id_s] != Some(f) {
            report.push(Violation::RightUnit {
                f: name(f),
                identity: name(id_s),
            });
        }
    }
    if report.passed() {
        'outer: for f in 0..n {
            for g in 0..n {
                let Some(gf) = table[g * n + f] else { continue };
                for h in 0..n {
                    let Some(hg) = table[h * n + g] else { continue };
                    if table[h * n + gf] != table[hg * n + f] {
                        report.push(Violation::Associativity {
                            h: name(h),
                            g: name(g),
                            f: name(f),
                        });
                        break 'outer;
                    }
                }
            }
        }
    }

    if let Some(limits) = limits {
        if data.objects.len() > limits.max_objects {
            report.push(Violation::SizeBound {
                what: "objects".into(),
                found: data.objects.len(),
                limit: limits.max_objects,
            });
        }
        let non_id = n - is_identity.iter().filter(|b| **b).count();
        if non_id > limits.max_non_identity {
            report.push(Violation::SizeBound {
                what: "non-identity morphisms".into(),
                found: non_id,
                limit: limits.max_non_identity,
            });
        }
    }
    report
}

impl FinCategory {
    /// Validates `data` against the category axioms and the corpus limits.
    pub fn from_data(data: &CategoryData) -> Result<Self> {
        Self::from_data_with(data, Some(CORPUS_LIMITS))
    }

    pub fn from_data_with(data: &CategoryData, limits: Option<Limits>) -> Result<Self> {
        let report = validate_category_with(data, limits);
        if !report.passed() {
            return Err(Error::InvalidCategory {
                name: data.name.clone(),
                report,
            });
        }
        let obj_index: HashMap<&str, usize> = data
            .objects
            .iter()
            .enumerate()
            .map(|(i, o)| (o.as_str(), i))
            .collect();
        let mor_index: HashMap<&str, usize> = data
            .morphisms
            .iter()
            .enumerate()
            .map(|(i, m)| (m.0.as_str(), i))
            .collect();
        let morphisms: Vec<Morphism> = data
            .morphisms
            .iter()
            .map(|(name, s, t)| Morphism {
                name: name.clone(),
                src: ObjId(obj_index[s.as_str()]),
                tgt: ObjId(obj_index[t.as_str()]),
            })
            .collect();
        let mut identities = vec![MorId(0); data.objects.len()];
        for (o, m) in &data.identities {
            identities[obj_index[o.as_str()]] = MorId(mor_index[m.as_str()]);
        }
        let explicit: HashMap<(usize, usize), usize> = data
            .compose
            .iter()
            .map(|(g, f, h)| {
                (
                    (mor_index[g.as_str()], mor_index[f.as_str()]),
                    mor_index[h.as_str()],
                )
            })
            .collect();
        let n = morphisms.len();
        let is_id: Vec<bool> = (0..n).map(|m| identities.contains(&MorId(m))).collect();
        Ok(Self::assemble(
            data.name.clone(),
            data.objects.clone(),
            morphisms,
            identities,
            |g, f| {
                if let Some(h) = explicit.get(&(g.0, f.0)) {
                    MorId(*h)
                } else if is_id[g.0] {
                    f
                } else {
                    debug_assert!(is_id[f.0]);
                    g
                }
            },
        ))
    }

    /// Builds a category from data already known to satisfy the axioms.
    /// `compose` is only called on composable pairs.
    pub(crate) fn assemble(
        name: String,
        objects: Vec<String>,
        morphisms: Vec<Morphism>,
        identities: Vec<MorId>,
        mut compose: impl FnMut(MorId, MorId) -> MorId,
    ) -> Self {
        let n = morphisms.len();
        let n_obj = objects.len();
        let mut table = vec![None; n * n];
        for g in 0..n {
            for f in 0..n {
                if morphisms[g].src == morphisms[f].tgt {
                    table[g * n + f] = Some(compose(MorId(g), MorId(f)));
                }
            }
        }
        let mut homs = vec![Vec::new(); n_obj * n_obj];
        for (i, m) in morphisms.iter().enumerate() {
            homs[m.src.0 * n_obj + m.tgt.0].push(MorId(i));
        }
        FinCategory(Arc::new(Inner {
            name,
            objects,
            morphisms,
            identities,
            compose: table,
            homs,
        }))
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn with_name(&self, name: impl Into<String>) -> Self {
        FinCategory(Arc::new(Inner {
            name: name.into(),
            objects: self.0.objects.clone(),
            morphisms: self.0.morphisms.clone(),
            identities: self.0.identities.clone(),
            compose: self.0.compose.clone(),
            homs: self.0.homs.clone(),
        }))
    }

    pub fn num_objects(&self) -> usize {
        self.0.objects.len()
    }

    pub fn num_morphisms(&self) -> usize {
        self.0.morphisms.len()
    }

    pub fn objects(&self) -> impl ExactSizeIterator<Item = ObjId> + Clone {
        (0..self.0.objects.len()).map(ObjId)
    }

    pub fn morphisms(&self) -> impl ExactSizeIterator<Item = MorId> + Clone {
        (0..self.0.morphisms.len()).map(MorId)
    }

    pub fn non_identity_morphisms(&self) -> impl Iterator<Item = MorId> + '_ {
        self.morphisms().filter(move |m| !self.is_identity(*m))
    }

    pub fn object_name(&self, x: ObjId) -> &str {
        &self.0.objects[x.0]
    }

    pub fn morphism(&self, f: MorId) -> &Morphism {
        &self.0.morphisms[f.0]
    }

    pub fn morphism_name(&self, f: MorId) -> &str {
        &self.0.morphisms[f.0].name
    }

    pub fn src(&self, f: MorId) -> ObjId {
        self.0.morphisms[f.0].src
    }

    pub fn tgt(&self, f: MorId) -> ObjId {
        self.0.morphisms[f.0].tgt
    }

    pub fn identity(&self, x: ObjId) -> MorId {
        self.0.identities[x.0]
    }

    pub fn is_identity(&self, f: MorId) -> bool {
        let m = &self.0.morphisms[f.0];
        m.src == m.tgt && self.0.identities[m.src.0] == f
    }

    pub fn object_id(&self, name: &str) -> Result<ObjId> {
        self.0
            .objects
            .iter()
            .position(|o| o == name)
            .map(ObjId)
            .ok_or_else(|| Error::Unknown {
                kind: "object",
                name: name.to_string(),
            })
    }

    pub fn morphism_id(&self, name: &str) -> Result<MorId> {
        self.0
            .morphisms
            .iter()
            .position(|m| m.name == name)
            .map(MorId)
            .ok_or_else(|| Error::Unknown {
                kind: "morphism",
                name: name.to_string(),
            })
    }

    /// `g ∘ f`, or `None` when `src g != tgt f`.
    pub fn compose(&self, g: MorId, f: MorId) -> Option<MorId> {
        self.0.compose[g.0 * self.0.morphisms.len() + f.0]
    }

    /// `g ∘ f` for a pair known to be composable.
    pub fn comp(&self, g: MorId, f: MorId) -> MorId {
        self.compose(g, f).unwrap_or_else(|| {
            panic!(
                "{}: `{}` and `{}` are not composable",
                self.name(),
                self.morphism_name(g),
                self.morphism_name(f)
            )
        })
    }

    pub fn hom(&self, x: ObjId, y: ObjId) -> &[MorId] {
        &self.0.homs[x.0 * self.0.objects.len() + y.0]
    }

    /// All morphisms with target `x`, grouped by source in object order.
    pub fn arrows_into(&self, x: ObjId) -> Vec<MorId> {
        self.objects()
            .flat_map(|y| self.hom(y, x).iter().copied())
            .collect()
    }

    /// All morphisms with source `x`, grouped by target in object order.
    pub fn arrows_out_of(&self, x: ObjId) -> Vec<MorId> {
        self.objects()
            .flat_map(|y| self.hom(x, y).iter().copied())
            .collect()
    }

    pub fn opposite(&self) -> FinCategory {
        let name = match self.0.name.strip_suffix("^op") {
            Some(base) => base.to_string(),
            None => format!("{}^op", self.0.name),
        };
        let morphisms = self
            .0
            .morphisms
            .iter()
            .map(|m| Morphism {
                name: m.name.clone(),
                src: m.tgt,
                tgt: m.src,
            })
            .collect();
        Self::assemble(
            name,
            self.0.objects.clone(),
            morphisms,
            self.0.identities.clone(),
            |g, f| self.comp(f, g),
        )
    }

    /// Name based description; `from_data(to_data(c)) == c`.
    pub fn to_data(&self) -> CategoryData {
        let mut compose = Vec::new();
        for g in self.morphisms() {
            for f in self.morphisms() {
                if self.is_identity(g) || self.is_identity(f) {
                    continue;
                }
                if let Some(h) = self.compose(g, f) {
                    compose.push((
                        self.morphism_name(g).to_string(),
                        self.morphism_name(f).to_string(),
                        self.morphism_name(h).to_string(),
                    ));
                }
            }
        }
        CategoryData {
            name: self.0.name.clone(),
            objects: self.0.objects.clone(),
            morphisms: self
                .0
                .morphisms
                .iter()
                .map(|m| {
                    (
                        m.name.clone(),
                        self.0.objects[m.src.0].clone(),
                        self.0.objects[m.tgt.0].clone(),
                    )
                })
                .collect(),
            identities: self
                .objects()
                .map(|x| {
                    (
                        self.object_name(x).to_string(),
                        self.morphism_name(self.identity(x)).to_string(),
                    )
                })
                .collect(),
            compose,
        }
    }

    pub fn is_thin(&self) -> bool {
        self.0.homs.iter().all(|h| h.len() <= 1)
    }

    // ---- standard shapes -------------------------------------------------

    /// The terminal category `1` with one object `*`.
    pub fn terminal() -> Self {
        Self::discrete("1", &["*"])
    }

    pub fn discrete(name: &str, objects: &[&str]) -> Self {
        Self::poset(name, objects, &[])
    }

    /// The preorder generated by `leq`, closed reflexively and transitively.
    /// Non-identity arrows are named `x<=y`.
    pub fn poset(name: &str, objects: &[&str], leq: &[(&str, &str)]) -> Self {
        let n = objects.len();
        let idx = |s: &str| {
            objects
                .iter()
                .position(|o| *o == s)
                .expect("poset: unknown element")
        };
        let mut rel = vec![vec![false; n]; n];
        for (i, row) in rel.iter_mut().enumerate() {
            row[i] = true;
        }
        for (a, b) in leq {
            rel[idx(a)][idx(b)] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if rel[i][k] && rel[k][j] {
                        rel[i][j] = true;
                    }
                }
            }
        }
        let mut morphisms = Vec::new();
        let mut lookup = BTreeMap::new();
        let mut identities = Vec::new();
        for i in 0..n {
            lookup.insert((i, i), morphisms.len());
            identities.push(MorId(morphisms.len()));
            morphisms.push(Morphism {
                name: format!("id_{}", objects[i]),
                src: ObjId(i),
                tgt: ObjId(i),
            });
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && rel[i][j] {
                    lookup.insert((i, j), morphisms.len());
                    morphisms.push(Morphism {
                        name: format!("{}<={}", objects[i], objects[j]),
                        src: ObjId(i),
                        tgt: ObjId(j),
                    });
                }
            }
        }
        let ends: Vec<(usize, usize)> = morphisms.iter().map(|m| (m.src.0, m.tgt.0)).collect();
        Self::assemble(
            name.to_string(),
            objects.iter().map(|s| s.to_string()).collect(),
            morphisms,
            identities,
            |g, f| MorId(lookup[&(ends[f.0].0, ends[g.0].1)]),
        )
    }

    /// The chain `0 ≤ 1 ≤ … ≤ n-1`.
    pub fn chain(n: usize) -> Self {
        let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let objs: Vec<&str> = names.iter().map(String::as_str).collect();
        let leq: Vec<(&str, &str)> = objs.windows(2).map(|w| (w[0], w[1])).collect();
        Self::poset(&format!("chain{n}"), &objs, &leq)
    }

    /// `0 --f--> 1`.
    pub fn walking_arrow() -> Self {
        Self::assemble(
            "2".into(),
            vec!["0".into(), "1".into()],
            vec![
                Morphism {
                    name: "id_0".into(),
                    src: ObjId(0),
                    tgt: ObjId(0),
                },
                Morphism {
                    name: "id_1".into(),
                    src: ObjId(1),
                    tgt: ObjId(1),
                },
                Morphism {
                    name: "f".into(),
                    src: ObjId(0),
                    tgt: ObjId(1),
                },
            ],
            vec![MorId(0), MorId(1)],
            |g, f| if g.0 <= 1 { f } else { g },
        )
    }

    /// Two parallel arrows `f, g: 0 ⇉ 1`.
    pub fn parallel_pair() -> Self {
        Self::assemble(
            "parallel".into(),
            vec!["0".into(), "1".into()],
            vec![
                Morphism {
                    name: "id_0".into(),
                    src: ObjId(0),
                    tgt: ObjId(0),
                },
                Morphism {
                    name: "id_1".into(),
                    src: ObjId(1),
                    tgt: ObjId(1),
                },
                Morphism {
                    name: "f".into(),
                    src: ObjId(0),
                    tgt: ObjId(1),
                },
                Morphism {
                    name: "g".into(),
                    src: ObjId(0),
                    tgt: ObjId(1),
                },
            ],
            vec![MorId(0), MorId(1)],
            |g, f| if g.0 <= 1 { f } else { g },
        )
    }

    /// One-object category of a finite monoid. `elements[0]` is the unit and
    /// `table[a][b]` is the index of `a·b` (composite `a ∘ b`).
    pub fn monoid(name: &str, elements: &[&str], table: &[Vec<usize>]) -> Result<Self> {
        let data = CategoryData {
            name: name.to_string(),
            objects: vec!["*".into()],
            morphisms: elements
                .iter()
                .map(|e| (e.to_string(), "*".into(), "*".into()))
                .collect(),
            identities: vec![("*".into(), elements[0].to_string())],
            compose: (0..elements.len())
                .flat_map(|a| (0..elements.len()).map(move |b| (a, b)))
                .map(|(a, b)| {
                    (
                        elements[a].to_string(),
                        elements[b].to_string(),
                        elements[table[a][b]].to_string(),
                    )
                })
                .collect(),
        };
        Self::from_data(&data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arrow_data() -> CategoryData {
        FinCategory::walking_arrow().to_data()
    }

    #[test]
    fn terminal_category_validates() {
        let report = validate_category(&FinCategory::terminal().to_data());
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn unit_law_violation_reports_witness() {
        let mut data = arrow_data();
        data.compose
            .push(("f".into(), "id_0".into(), "id_0".into()));
        let report = validate_category(&data);
        assert!(!report.passed());
        assert!(report.violations.iter().any(|v| matches!(
            v,
            Violation::CompositeEnds { g, f, .. } if g == "f" && f == "id_0"
        )));
        // With consistent endpoints the same mistake surfaces as a unit-law failure.
        let mut data = arrow_data();
        data.morphisms.push(("e".into(), "0".into(), "0".into()));
        data.compose
            .push(("e".into(), "id_0".into(), "id_0".into()));
        data.compose.push(("e".into(), "e".into(), "e".into()));
        data.compose.push(("f".into(), "e".into(), "f".into()));
        let report = validate_category(&data);
        assert!(report.violations.iter().any(
            |v| matches!(v, Violation::RightUnit { f, identity } if f == "e" && identity == "id_0")
        ));
    }

    #[test]
    fn chain_poset_passes_exhaustive_scan() {
        let c = FinCategory::chain(3);
        assert!(validate_category(&c.to_data()).passed());
        assert_eq!(c.num_morphisms(), 6);
        // Independent scan over all triples.
        for f in c.morphisms() {
            assert_eq!(c.comp(c.identity(c.tgt(f)), f), f);
            assert_eq!(c.comp(f, c.identity(c.src(f))), f);
            for g in c.morphisms() {
                let Some(gf) = c.compose(g, f) else { continue };
                assert_eq!((c.src(gf), c.tgt(gf)), (c.src(f), c.tgt(g)));
                for h in c.morphisms() {
                    if let Some(hg) = c.compose(h, g) {
                        assert_eq!(c.comp(h, gf), c.comp(hg, f));
                    }
                }
            }
        }
    }

    #[test]
    fn dangling_references_are_reported() {
        let mut data = arrow_data();
        data.morphisms
            .push(("k".into(), "0".into(), "nowhere".into()));
        let report = validate_category(&data);
        assert_eq!(
            report.first(),
            Some(&Violation::Dangling {
                entity: "k".into(),
                reference: "nowhere".into()
            })
        );
    }

    #[test]
    fn missing_composite_is_reported() {
        let mut data = FinCategory::chain(3).to_data();
        data.compose.clear();
        let report = validate_category(&data);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::MissingComposite { .. })));
    }

    #[test]
    fn size_limit_is_enforced() {
        let names: Vec<String> = (0..7).map(|i| format!("o{i}")).collect();
        let objs: Vec<&str> = names.iter().map(String::as_str).collect();
        let c = FinCategory::discrete("big", &objs);
        let report = validate_category(&c.to_data());
        assert!(matches!(report.first(), Some(Violation::SizeBound { .. })));
        assert!(validate_category_with(&c.to_data(), None).passed());
    }

    #[test]
    fn opposite_is_an_involution() {
        for c in [
            FinCategory::terminal(),
            FinCategory::walking_arrow(),
            FinCategory::chain(3),
        ] {
            let op = c.opposite();
            assert!(validate_category(&op.to_data()).passed());
            assert_eq!(op.opposite(), c);
        }
        let op = FinCategory::walking_arrow().opposite();
        let f = op.morphism_id("f").unwrap();
        assert_eq!(
            (op.object_name(op.src(f)), op.object_name(op.tgt(f))),
            ("1", "0")
        );
    }

    #[test]
    fn data_round_trip() {
        let c = FinCategory::monoid("z2", &["e", "s"], &[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(FinCategory::from_data(&c.to_data()).unwrap(), c);
    }
}

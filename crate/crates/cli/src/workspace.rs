//! Workspace files: a line-oriented, hand-editable description of categories,
//! presheaves, transformations, sites, codomain handles, functors and suite
//! configurations.
//!
//! ```text
//! bounds presheaf=3 sample=2 handle=3 categories=2 presheaves=4
//!
//! category 2
//!   objects 0 1
//!   morphism id_0 : 0 -> 0
//!   morphism id_1 : 1 -> 1
//!   morphism f : 0 -> 1
//!   identity 0 = id_0
//!   identity 1 = id_1
//! end
//!
//! poset opens2
//!   objects 0 a b ab
//!   leq 0 a
//!   leq a ab
//! end
//!
//! presheaf arrow_pq on 2
//!   values 0 = p q
//!   values 1 = r
//!   action f = r->q
//! end
//!
//! site opens2 on opens2
//!   cover 0 =
//!   cover ab = a<=ab b<=ab
//! end
//!
//! handle finset3 = finset 3
//! handle psh_2 = presheaves 2 3
//! handle sh_opens2 = sheaves opens2 2
//!
//! functor collapse : 2 -> finset3
//!   value 0 = x y
//!   value 1 = u
//!   map f = x->u y->u
//!   continuous_for trivial(2)
//! end
//!
//! functor yoneda_arrow = yoneda psh_2
//! end
//!
//! suite quick = I II sheaves
//! ```
//!
//! Presheaf actions list `y->x` for `x = F(f)(y)`; functor maps into finite
//! sets list `x->y` for `y = p(f)(x)`. Transformation components list
//! `a->b`. Identity morphisms never need a line. Into presheaf or sheaf
//! handles, `value X = <presheaf>` names a declared presheaf and
//! `map f = <transformation>` a declared transformation, or `id`.
//! `role auxiliary` keeps a presheaf out of the suite corpus; `role control`
//! marks a functor as a negative control.

use std::collections::{HashMap, HashSet};
use std::fmt::{self, Write as _};
use std::path::Path;

use finitopos::fincat::{validate_category, CategoryData, FinCategory, ObjId, CORPUS_LIMITS};
use finitopos::handle::{Budget, ComputationalCategory, HandleFunctor};
use finitopos::presheaf::{Presheaf, PresheafMorphism};
use finitopos::site::Site;
use finitopos::verify::{
    corpus_from_fixtures, Bounds, Corpus, Fixtures, NamedFunctor, NamedPresheaf, Theorem,
    MAX_PRESHEAF_BOUND,
};

/// A located parse or validation error.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct WsError {
    pub line: usize,
    pub entity: String,
    pub reason: String,
}

impl fmt::Display for WsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}: {}", self.line, self.entity, self.reason)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    Bounds,
    Category,
    Presheaf,
    Transformation,
    Site,
    Handle,
    Functor,
    Suite,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Bounds => "bounds",
            Kind::Category => "category",
            Kind::Presheaf => "presheaf",
            Kind::Transformation => "transformation",
            Kind::Site => "site",
            Kind::Handle => "handle",
            Kind::Functor => "functor",
            Kind::Suite => "suite",
        }
    }
}

// ---- declarations ----------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CategoryDecl {
    Explicit(CategoryData),
    /// Preorder generated by `leq`; arrows are named `x<=y`.
    Poset {
        name: String,
        objects: Vec<String>,
        leq: Vec<(String, String)>,
    },
}

impl CategoryDecl {
    pub fn name(&self) -> &str {
        match self {
            CategoryDecl::Explicit(d) => &d.name,
            CategoryDecl::Poset { name, .. } => name,
        }
    }
}

/// `(x, y)` pairs written `x->y`.
pub type Pairs = Vec<(String, String)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresheafDecl {
    pub name: String,
    pub base: String,
    pub values: Vec<(String, Vec<String>)>,
    /// per morphism `f: X → Y`, pairs `y->x` with `x = F(f)(y)`
    pub actions: Vec<(String, Pairs)>,
    pub auxiliary: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformationDecl {
    pub name: String,
    pub dom: String,
    pub cod: String,
    pub components: Vec<(String, Pairs)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SiteDecl {
    pub name: String,
    pub base: String,
    pub covers: Vec<(String, Vec<String>)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HandleKind {
    FinSet,
    Presheaves(String),
    Sheaves(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HandleDecl {
    pub name: String,
    pub kind: HandleKind,
    pub bound: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FunctorBody {
    /// Explicit values and maps; tokens are interpreted by the codomain kind.
    Table {
        dom: String,
        values: Vec<(String, Vec<String>)>,
        maps: Vec<(String, Vec<String>)>,
    },
    Yoneda,
    Epsilon,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctorDecl {
    pub name: String,
    pub handle: String,
    pub body: FunctorBody,
    pub continuous_for: Option<String>,
    pub control: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteDecl {
    pub name: String,
    pub targets: Vec<String>,
}

/// Everything a workspace file says, before anything is built.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Declarations {
    pub bounds: Option<Bounds>,
    pub categories: Vec<CategoryDecl>,
    pub presheaves: Vec<PresheafDecl>,
    pub transformations: Vec<TransformationDecl>,
    pub sites: Vec<SiteDecl>,
    pub handles: Vec<HandleDecl>,
    pub functors: Vec<FunctorDecl>,
    pub suites: Vec<SuiteDecl>,
}

// ---- parsing ---------------------------------------------------------------

const BLOCKS: &[&str] = &[
    "category",
    "poset",
    "presheaf",
    "transformation",
    "site",
    "functor",
];
const LINES: &[&str] = &["bounds", "handle", "suite"];

type Line<'a> = (usize, Vec<&'a str>);

fn err(line: usize, entity: &str, reason: impl Into<String>) -> WsError {
    WsError {
        line,
        entity: entity.to_string(),
        reason: reason.into(),
    }
}

fn pairs(line: usize, entity: &str, toks: &[&str]) -> Result<Pairs, WsError> {
    toks.iter()
        .map(|t| match t.split_once("->") {
            Some((a, b)) if !a.is_empty() && !b.is_empty() => Ok((a.to_string(), b.to_string())),
            _ => Err(err(line, entity, format!("expected `a->b`, found `{t}`"))),
        })
        .collect()
}

fn owned(toks: &[&str]) -> Vec<String> {
    toks.iter().map(|s| s.to_string()).collect()
}

/// `<kw> NAME = tokens...`
fn assignment<'a>(l: &'a Line<'a>, entity: &str) -> Result<(&'a str, &'a [&'a str]), WsError> {
    match l.1.as_slice() {
        [_, name, "=", rest @ ..] => Ok((name, rest)),
        _ => Err(err(
            l.0,
            entity,
            format!("expected `{} NAME = ...`", l.1[0]),
        )),
    }
}

fn parse_bounds(l: &Line) -> Result<Bounds, WsError> {
    let mut b = Bounds::default();
    for t in &l.1[1..] {
        let (k, v) = t
            .split_once('=')
            .ok_or_else(|| err(l.0, "bounds", format!("expected `key=value`, found `{t}`")))?;
        let v: usize = v
            .parse()
            .map_err(|_| err(l.0, "bounds", format!("`{v}` is not a number")))?;
        match k {
            "presheaf" => b.presheaf_bound = v,
            "sample" => b.sample_bound = v,
            "handle" => b.handle_bound = v,
            "categories" => b.random_categories = v,
            "presheaves" => b.random_presheaves = v,
            _ => return Err(err(l.0, "bounds", format!("unknown bound `{k}`"))),
        }
    }
    Ok(b)
}

fn parse_handle(l: &Line) -> Result<HandleDecl, WsError> {
    let bad = || {
        err(
            l.0,
            "handle",
            "expected `handle NAME = finset B | presheaves CAT B | sheaves SITE B`",
        )
    };
    let bound = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| err(l.0, "handle", format!("`{s}` is not a bound")))
    };
    let (name, kind, b) = match l.1.as_slice() {
        [_, name, "=", "finset", b] => (name, HandleKind::FinSet, b),
        [_, name, "=", "presheaves", c, b] => (name, HandleKind::Presheaves(c.to_string()), b),
        [_, name, "=", "sheaves", s, b] => (name, HandleKind::Sheaves(s.to_string()), b),
        _ => return Err(bad()),
    };
    Ok(HandleDecl {
        name: name.to_string(),
        kind,
        bound: bound(b)?,
    })
}

fn parse_suite(l: &Line) -> Result<SuiteDecl, WsError> {
    let (name, rest) = assignment(l, "suite")?;
    if rest.is_empty() {
        return Err(err(l.0, name, "a suite needs at least one target"));
    }
    Ok(SuiteDecl {
        name: name.to_string(),
        targets: owned(rest),
    })
}

fn parse_category(head: &Line, body: &[Line]) -> Result<CategoryDecl, WsError> {
    let name = match head.1.as_slice() {
        [_, name] => name.to_string(),
        _ => {
            return Err(err(
                head.0,
                head.1[0],
                format!("expected `{} NAME`", head.1[0]),
            ))
        }
    };
    let poset = head.1[0] == "poset";
    let mut data = CategoryData {
        name: name.clone(),
        ..Default::default()
    };
    let mut leq = Vec::new();
    for l in body {
        match (l.1.as_slice(), poset) {
            (["objects", rest @ ..], _) => data.objects.extend(owned(rest)),
            (["leq", a, b], true) => leq.push((a.to_string(), b.to_string())),
            (["morphism", m, ":", a, "->", b], false) => {
                data.morphisms
                    .push((m.to_string(), a.to_string(), b.to_string()))
            }
            (["identity", x, "=", m], false) => {
                data.identities.push((x.to_string(), m.to_string()))
            }
            (["compose", g, ".", f, "=", h], false) => {
                data.compose
                    .push((g.to_string(), f.to_string(), h.to_string()))
            }
            _ => {
                return Err(err(
                    l.0,
                    &name,
                    format!("unexpected line `{}`", l.1.join(" ")),
                ))
            }
        }
    }
    Ok(if poset {
        CategoryDecl::Poset {
            name,
            objects: data.objects,
            leq,
        }
    } else {
        CategoryDecl::Explicit(data)
    })
}

fn parse_presheaf(head: &Line, body: &[Line]) -> Result<PresheafDecl, WsError> {
    let (name, base) = match head.1.as_slice() {
        [_, name, "on", base] => (name.to_string(), base.to_string()),
        _ => {
            return Err(err(
                head.0,
                "presheaf",
                "expected `presheaf NAME on CATEGORY`",
            ))
        }
    };
    let mut d = PresheafDecl {
        name,
        base,
        values: Vec::new(),
        actions: Vec::new(),
        auxiliary: false,
    };
    for l in body {
        match l.1.as_slice() {
            ["values", x, "=", rest @ ..] => d.values.push((x.to_string(), owned(rest))),
            ["action", f, "=", rest @ ..] => {
                d.actions.push((f.to_string(), pairs(l.0, &d.name, rest)?))
            }
            ["role", "auxiliary"] => d.auxiliary = true,
            _ => {
                return Err(err(
                    l.0,
                    &d.name,
                    format!("unexpected line `{}`", l.1.join(" ")),
                ))
            }
        }
    }
    Ok(d)
}

fn parse_transformation(head: &Line, body: &[Line]) -> Result<TransformationDecl, WsError> {
    let (name, dom, cod) = match head.1.as_slice() {
        [_, name, ":", a, "->", b] => (name.to_string(), a.to_string(), b.to_string()),
        _ => {
            return Err(err(
                head.0,
                "transformation",
                "expected `transformation NAME : P -> Q`",
            ))
        }
    };
    let mut d = TransformationDecl {
        name,
        dom,
        cod,
        components: Vec::new(),
    };
    for l in body {
        match l.1.as_slice() {
            ["component", x, "=", rest @ ..] => d
                .components
                .push((x.to_string(), pairs(l.0, &d.name, rest)?)),
            _ => {
                return Err(err(
                    l.0,
                    &d.name,
                    format!("unexpected line `{}`", l.1.join(" ")),
                ))
            }
        }
    }
    Ok(d)
}

fn parse_site(head: &Line, body: &[Line]) -> Result<SiteDecl, WsError> {
    let (name, base) = match head.1.as_slice() {
        [_, name, "on", base] => (name.to_string(), base.to_string()),
        _ => return Err(err(head.0, "site", "expected `site NAME on CATEGORY`")),
    };
    let mut d = SiteDecl {
        name,
        base,
        covers: Vec::new(),
    };
    for l in body {
        match l.1.as_slice() {
            ["cover", x, "=", rest @ ..] => d.covers.push((x.to_string(), owned(rest))),
            _ => {
                return Err(err(
                    l.0,
                    &d.name,
                    format!("unexpected line `{}`", l.1.join(" ")),
                ))
            }
        }
    }
    Ok(d)
}

fn parse_functor(head: &Line, body: &[Line]) -> Result<FunctorDecl, WsError> {
    let (name, handle, mut fbody) = match head.1.as_slice() {
        [_, name, ":", dom, "->", h] => (
            name.to_string(),
            h.to_string(),
            FunctorBody::Table { dom: dom.to_string(), values: Vec::new(), maps: Vec::new() },
        ),
        [_, name, "=", "yoneda", h] => (name.to_string(), h.to_string(), FunctorBody::Yoneda),
        [_, name, "=", "epsilon", h] => (name.to_string(), h.to_string(), FunctorBody::Epsilon),
        _ => {
            return Err(err(
                head.0,
                "functor",
                "expected `functor NAME : CATEGORY -> HANDLE` or `functor NAME = yoneda|epsilon HANDLE`",
            ))
        }
    };
    let mut d_site = None;
    let mut control = false;
    for l in body {
        match (l.1.as_slice(), &mut fbody) {
            (["value", x, "=", rest @ ..], FunctorBody::Table { values, .. }) => {
                values.push((x.to_string(), owned(rest)))
            }
            (["map", f, "=", rest @ ..], FunctorBody::Table { maps, .. }) => {
                maps.push((f.to_string(), owned(rest)))
            }
            (["continuous_for", s], _) => d_site = Some(s.to_string()),
            (["role", "control"], _) => control = true,
            _ => {
                return Err(err(
                    l.0,
                    &name,
                    format!("unexpected line `{}`", l.1.join(" ")),
                ))
            }
        }
    }
    Ok(FunctorDecl {
        name,
        handle,
        body: fbody,
        continuous_for: d_site,
        control,
    })
}

/// Source line of each declaration, keyed by kind and name.
pub type Locations = HashMap<(Kind, String), usize>;

/// Parses declarations without resolving references.
pub fn parse_declarations(text: &str) -> Result<(Declarations, Locations), Vec<WsError>> {
    let lines: Vec<Line> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split_whitespace().collect::<Vec<_>>()))
        .filter(|(_, t)| !t.is_empty() && !t[0].starts_with('#'))
        .collect();
    let mut decls = Declarations::default();
    let mut locs = Locations::new();
    let mut errors = Vec::new();
    let mut note = |kind: Kind, name: &str, line: usize, errors: &mut Vec<WsError>| {
        if locs.insert((kind, name.to_string()), line).is_some() {
            errors.push(err(line, name, format!("duplicate {} name", kind.as_str())));
        }
    };
    let mut i = 0;
    while i < lines.len() {
        let l = &lines[i];
        let kw = l.1[0];
        if LINES.contains(&kw) {
            i += 1;
            let r = match kw {
                "bounds" => parse_bounds(l).map(|b| {
                    note(Kind::Bounds, "bounds", l.0, &mut errors);
                    decls.bounds = Some(b)
                }),
                "handle" => parse_handle(l).map(|h| {
                    note(Kind::Handle, &h.name, l.0, &mut errors);
                    decls.handles.push(h)
                }),
                _ => parse_suite(l).map(|s| {
                    note(Kind::Suite, &s.name, l.0, &mut errors);
                    decls.suites.push(s)
                }),
            };
            if let Err(e) = r {
                errors.push(e);
            }
            continue;
        }
        if !BLOCKS.contains(&kw) {
            errors.push(err(l.0, "workspace", format!("unknown declaration `{kw}`")));
            i += 1;
            continue;
        }
        let mut j = i + 1;
        while j < lines.len()
            && lines[j].1 != ["end"]
            && !BLOCKS.contains(&lines[j].1[0])
            && !LINES.contains(&lines[j].1[0])
        {
            j += 1;
        }
        let body = &lines[i + 1..j];
        if j == lines.len() || lines[j].1 != ["end"] {
            errors.push(err(
                l.0,
                l.1.get(1).copied().unwrap_or(kw),
                format!("`{kw}` block is missing `end`"),
            ));
        }
        let r = match kw {
            "category" | "poset" => parse_category(l, body).map(|c| {
                note(Kind::Category, c.name(), l.0, &mut errors);
                decls.categories.push(c)
            }),
            "presheaf" => parse_presheaf(l, body).map(|p| {
                note(Kind::Presheaf, &p.name, l.0, &mut errors);
                decls.presheaves.push(p)
            }),
            "transformation" => parse_transformation(l, body).map(|t| {
                note(Kind::Transformation, &t.name, l.0, &mut errors);
                decls.transformations.push(t)
            }),
            "site" => parse_site(l, body).map(|s| {
                note(Kind::Site, &s.name, l.0, &mut errors);
                decls.sites.push(s)
            }),
            _ => parse_functor(l, body).map(|f| {
                note(Kind::Functor, &f.name, l.0, &mut errors);
                decls.functors.push(f)
            }),
        };
        if let Err(e) = r {
            errors.push(e);
        }
        i = if j < lines.len() && lines[j].1 == ["end"] {
            j + 1
        } else {
            j
        };
    }
    if errors.is_empty() {
        Ok((decls, locs))
    } else {
        Err(errors)
    }
}

// ---- printing --------------------------------------------------------------

fn join_pairs(p: &[(String, String)]) -> String {
    p.iter()
        .map(|(a, b)| format!("{a}->{b}"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// `head` followed by ` tail` unless `tail` is empty.
fn line(out: &mut String, head: String, tail: &str) {
    out.push_str(&head);
    if !tail.is_empty() {
        out.push(' ');
        out.push_str(tail);
    }
    out.push('\n');
}

impl fmt::Display for Declarations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        if let Some(b) = &self.bounds {
            writeln!(
                out,
                "bounds presheaf={} sample={} handle={} categories={} presheaves={}\n",
                b.presheaf_bound,
                b.sample_bound,
                b.handle_bound,
                b.random_categories,
                b.random_presheaves
            )?;
        }
        for c in &self.categories {
            match c {
                CategoryDecl::Explicit(d) => {
                    writeln!(out, "category {}", d.name)?;
                    line(&mut out, "  objects".into(), &d.objects.join(" "));
                    for (m, a, b) in &d.morphisms {
                        writeln!(out, "  morphism {m} : {a} -> {b}")?;
                    }
                    for (x, m) in &d.identities {
                        writeln!(out, "  identity {x} = {m}")?;
                    }
                    for (g, h, k) in &d.compose {
                        writeln!(out, "  compose {g} . {h} = {k}")?;
                    }
                }
                CategoryDecl::Poset { name, objects, leq } => {
                    writeln!(out, "poset {name}")?;
                    line(&mut out, "  objects".into(), &objects.join(" "));
                    for (a, b) in leq {
                        writeln!(out, "  leq {a} {b}")?;
                    }
                }
            }
            out.push_str("end\n\n");
        }
        for p in &self.presheaves {
            writeln!(out, "presheaf {} on {}", p.name, p.base)?;
            for (x, v) in &p.values {
                line(&mut out, format!("  values {x} ="), &v.join(" "));
            }
            for (m, a) in &p.actions {
                line(&mut out, format!("  action {m} ="), &join_pairs(a));
            }
            if p.auxiliary {
                out.push_str("  role auxiliary\n");
            }
            out.push_str("end\n\n");
        }
        for t in &self.transformations {
            writeln!(out, "transformation {} : {} -> {}", t.name, t.dom, t.cod)?;
            for (x, a) in &t.components {
                line(&mut out, format!("  component {x} ="), &join_pairs(a));
            }
            out.push_str("end\n\n");
        }
        for s in &self.sites {
            writeln!(out, "site {} on {}", s.name, s.base)?;
            for (x, ms) in &s.covers {
                line(&mut out, format!("  cover {x} ="), &ms.join(" "));
            }
            out.push_str("end\n\n");
        }
        for h in &self.handles {
            match &h.kind {
                HandleKind::FinSet => writeln!(out, "handle {} = finset {}", h.name, h.bound)?,
                HandleKind::Presheaves(c) => {
                    writeln!(out, "handle {} = presheaves {c} {}", h.name, h.bound)?
                }
                HandleKind::Sheaves(s) => {
                    writeln!(out, "handle {} = sheaves {s} {}", h.name, h.bound)?
                }
            }
        }
        if !self.handles.is_empty() {
            out.push('\n');
        }
        for d in &self.functors {
            match &d.body {
                FunctorBody::Table { dom, values, maps } => {
                    writeln!(out, "functor {} : {dom} -> {}", d.name, d.handle)?;
                    for (x, v) in values {
                        line(&mut out, format!("  value {x} ="), &v.join(" "));
                    }
                    for (m, v) in maps {
                        line(&mut out, format!("  map {m} ="), &v.join(" "));
                    }
                }
                FunctorBody::Yoneda => writeln!(out, "functor {} = yoneda {}", d.name, d.handle)?,
                FunctorBody::Epsilon => writeln!(out, "functor {} = epsilon {}", d.name, d.handle)?,
            }
            if let Some(s) = &d.continuous_for {
                writeln!(out, "  continuous_for {s}")?;
            }
            if d.control {
                out.push_str("  role control\n");
            }
            out.push_str("end\n\n");
        }
        for s in &self.suites {
            writeln!(out, "suite {} = {}", s.name, s.targets.join(" "))?;
        }
        f.write_str(out.trim_end())?;
        if !out.trim_end().is_empty() {
            f.write_str("\n")?;
        }
        Ok(())
    }
}

// ---- building --------------------------------------------------------------

/// The built entities of a workspace.
#[derive(Clone, Debug)]
pub struct Model {
    pub bounds: Bounds,
    pub categories: Vec<FinCategory>,
    pub presheaves: Vec<NamedPresheaf>,
    pub auxiliary: HashSet<String>,
    pub transformations: Vec<(String, PresheafMorphism)>,
    pub sites: Vec<Site>,
    pub handles: Vec<(String, ComputationalCategory)>,
    pub functors: Vec<NamedFunctor>,
    pub controls: Vec<NamedFunctor>,
    pub suites: Vec<(String, Vec<Theorem>)>,
}

impl Model {
    pub fn category(&self, name: &str) -> Option<&FinCategory> {
        self.categories.iter().find(|c| c.name() == name)
    }

    pub fn presheaf(&self, name: &str) -> Option<&Presheaf> {
        self.presheaves
            .iter()
            .find(|p| p.name == name)
            .map(|p| &p.presheaf)
    }

    pub fn transformation(&self, name: &str) -> Option<&PresheafMorphism> {
        self.transformations
            .iter()
            .find(|t| t.0 == name)
            .map(|t| &t.1)
    }

    pub fn site(&self, name: &str) -> Option<&Site> {
        self.sites.iter().find(|s| s.name() == name)
    }

    pub fn handle(&self, name: &str) -> Option<&ComputationalCategory> {
        self.handles.iter().find(|h| h.0 == name).map(|h| &h.1)
    }

    pub fn functor(&self, name: &str) -> Option<&NamedFunctor> {
        self.functors
            .iter()
            .chain(&self.controls)
            .find(|f| f.name() == name)
    }

    pub fn suite(&self, name: &str) -> Option<&[Theorem]> {
        self.suites
            .iter()
            .find(|s| s.0 == name)
            .map(|s| s.1.as_slice())
    }

    /// Presheaves on `c` that belong to the suite corpus, by name.
    pub fn corpus_presheaves_on(&self, c: &FinCategory) -> Vec<&NamedPresheaf> {
        self.presheaves
            .iter()
            .filter(|p| p.presheaf.base() == c && !self.auxiliary.contains(&p.name))
            .collect()
    }

    pub fn fixtures(&self) -> Fixtures {
        Fixtures {
            categories: self.categories.clone(),
            presheaves: self
                .presheaves
                .iter()
                .filter(|p| !self.auxiliary.contains(&p.name))
                .cloned()
                .collect(),
            sites: self.sites.clone(),
            functors: self.functors.clone(),
            controls: self.controls.clone(),
        }
    }

    /// The workspace entities plus seeded random additions.
    pub fn corpus(&self, seed: u64) -> finitopos::Result<Corpus> {
        corpus_from_fixtures(seed, self.bounds, self.fixtures())
    }
}

/// A parsed and fully validated workspace. Equality compares declarations.
#[derive(Clone, Debug)]
pub struct Workspace {
    pub decls: Declarations,
    pub model: Model,
    pub locations: Locations,
}

impl PartialEq for Workspace {
    fn eq(&self, other: &Self) -> bool {
        self.decls == other.decls
    }
}

pub fn parse_workspace(path: &Path, budget: Budget) -> Result<Workspace, Vec<WsError>> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        vec![err(
            0,
            &path.display().to_string(),
            format!("cannot read workspace: {e}"),
        )]
    })?;
    Workspace::parse(&text, budget)
}

impl Workspace {
    pub fn parse(text: &str, budget: Budget) -> Result<Self, Vec<WsError>> {
        let (decls, locations) = parse_declarations(text)?;
        Self::build(decls, locations, budget)
    }

    /// Workspace text; parsing it gives back an equal workspace.
    pub fn print(&self) -> String {
        self.decls.to_string()
    }

    pub fn build(
        decls: Declarations,
        locations: Locations,
        budget: Budget,
    ) -> Result<Self, Vec<WsError>> {
        let model = Builder::new(&decls, &locations, budget).run()?;
        Ok(Self {
            decls,
            model,
            locations,
        })
    }

    /// The fixtures as a workspace.
    pub fn from_fixtures(
        bounds: Bounds,
        fixtures: &Fixtures,
        budget: Budget,
    ) -> Result<Self, Vec<WsError>> {
        let decls = decompile(bounds, fixtures);
        Self::build(decls, Locations::new(), budget)
    }

    /// The built-in corpus fixtures at default bounds.
    pub fn builtin(budget: Budget) -> Result<Self, Vec<WsError>> {
        let bounds = Bounds::default();
        let fixtures = finitopos::verify::fixtures(&bounds)
            .map_err(|e| vec![err(0, "builtin", e.to_string())])?;
        Self::from_fixtures(bounds, &fixtures, budget)
    }
}

struct Builder<'a> {
    decls: &'a Declarations,
    locs: &'a Locations,
    budget: Budget,
    errors: Vec<WsError>,
    /// declared entities that failed to build; references to them are not
    /// reported again
    failed: HashSet<(Kind, String)>,
}

impl<'a> Builder<'a> {
    fn new(decls: &'a Declarations, locs: &'a Locations, budget: Budget) -> Self {
        Self {
            decls,
            locs,
            budget,
            errors: Vec::new(),
            failed: HashSet::new(),
        }
    }

    fn line(&self, kind: Kind, name: &str) -> usize {
        self.locs
            .get(&(kind, name.to_string()))
            .copied()
            .unwrap_or(0)
    }

    fn fail(&mut self, kind: Kind, name: &str, reason: impl Into<String>) {
        let line = self.line(kind, name);
        self.errors.push(err(line, name, reason));
        self.failed.insert((kind, name.to_string()));
    }

    /// Looks up a reference. A dangling one is reported against `owner`;
    /// a reference to an entity that failed to build is skipped silently.
    fn resolve<'m, T>(
        &mut self,
        owner: (Kind, &str),
        kind: Kind,
        name: &str,
        found: Option<&'m T>,
    ) -> Option<&'m T> {
        if found.is_some() {
            return found;
        }
        if self.failed.contains(&(kind, name.to_string())) {
            self.failed.insert((owner.0, owner.1.to_string()));
        } else {
            self.fail(
                owner.0,
                owner.1,
                format!("unknown {} `{name}`", kind.as_str()),
            );
        }
        None
    }

    fn run(mut self) -> Result<Model, Vec<WsError>> {
        let d = self.decls;
        let bounds = d.bounds.unwrap_or_default();
        if let Err(e) = bounds.check() {
            self.fail(Kind::Bounds, "bounds", e.to_string());
        }
        let mut m = Model {
            bounds,
            categories: Vec::new(),
            presheaves: Vec::new(),
            auxiliary: HashSet::new(),
            transformations: Vec::new(),
            sites: Vec::new(),
            handles: Vec::new(),
            functors: Vec::new(),
            controls: Vec::new(),
            suites: Vec::new(),
        };
        for c in &d.categories {
            match build_category(c) {
                Ok(cat) => m.categories.push(cat),
                Err(e) => self.fail(Kind::Category, c.name(), e),
            }
        }
        for s in &d.sites {
            let Some(base) = self.resolve(
                (Kind::Site, &s.name),
                Kind::Category,
                &s.base,
                m.category(&s.base),
            ) else {
                continue;
            };
            let covers: Vec<(&str, Vec<&str>)> = s
                .covers
                .iter()
                .map(|(x, ms)| (x.as_str(), ms.iter().map(String::as_str).collect()))
                .collect();
            let refs: Vec<(&str, &[&str])> =
                covers.iter().map(|(x, ms)| (*x, ms.as_slice())).collect();
            match Site::from_names(&s.name, base, &refs) {
                Ok(site) => m.sites.push(site),
                Err(e) => self.fail(Kind::Site, &s.name, e.to_string()),
            }
        }
        for h in &d.handles {
            if h.bound == 0 || h.bound > MAX_PRESHEAF_BOUND {
                self.fail(
                    Kind::Handle,
                    &h.name,
                    format!("bound {} is outside 1..={MAX_PRESHEAF_BOUND}", h.bound),
                );
                continue;
            }
            let owner = (Kind::Handle, h.name.as_str());
            let built = match &h.kind {
                HandleKind::FinSet => ComputationalCategory::finset(h.bound, self.budget),
                HandleKind::Presheaves(c) => {
                    let Some(c) = self.resolve(owner, Kind::Category, c, m.category(c)) else {
                        continue;
                    };
                    ComputationalCategory::presheaf_category(c, h.bound, self.budget)
                }
                HandleKind::Sheaves(s) => {
                    let Some(s) = self.resolve(owner, Kind::Site, s, m.site(s)) else {
                        continue;
                    };
                    ComputationalCategory::sheaf_category(s, h.bound, self.budget)
                }
            };
            match built {
                Ok(z) => m.handles.push((h.name.clone(), z)),
                Err(e) => self.fail(Kind::Handle, &h.name, e.to_string()),
            }
        }
        for p in &d.presheaves {
            let Some(base) = self.resolve(
                (Kind::Presheaf, &p.name),
                Kind::Category,
                &p.base,
                m.category(&p.base),
            ) else {
                continue;
            };
            let values: Vec<(&str, Vec<&str>)> = p
                .values
                .iter()
                .map(|(x, v)| (x.as_str(), v.iter().map(String::as_str).collect()))
                .collect();
            let values: Vec<(&str, &[&str])> =
                values.iter().map(|(x, v)| (*x, v.as_slice())).collect();
            let actions: Vec<(&str, Vec<(&str, &str)>)> = p
                .actions
                .iter()
                .map(|(f, ps)| {
                    (
                        f.as_str(),
                        ps.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect(),
                    )
                })
                .collect();
            let actions: Vec<(&str, &[(&str, &str)])> =
                actions.iter().map(|(f, ps)| (*f, ps.as_slice())).collect();
            match Presheaf::from_names(base, &values, &actions) {
                Ok(presheaf) => {
                    if p.auxiliary {
                        m.auxiliary.insert(p.name.clone());
                    }
                    m.presheaves.push(NamedPresheaf {
                        name: p.name.clone(),
                        presheaf,
                    })
                }
                Err(e) => self.fail(Kind::Presheaf, &p.name, e.to_string()),
            }
        }
        for t in &d.transformations {
            let owner = (Kind::Transformation, t.name.as_str());
            let Some(a) = self.resolve(owner, Kind::Presheaf, &t.dom, m.presheaf(&t.dom)) else {
                continue;
            };
            let Some(b) = self.resolve(owner, Kind::Presheaf, &t.cod, m.presheaf(&t.cod)) else {
                continue;
            };
            match build_transformation(a, b, &t.components) {
                Ok(mor) => m.transformations.push((t.name.clone(), mor)),
                Err(e) => self.fail(Kind::Transformation, &t.name, e),
            }
        }
        for f in &d.functors {
            let owner = (Kind::Functor, f.name.as_str());
            let Some(z) = self.resolve(owner, Kind::Handle, &f.handle, m.handle(&f.handle)) else {
                continue;
            };
            let built = match &f.body {
                FunctorBody::Yoneda => HandleFunctor::yoneda(z)
                    .map(|p| p.with_name(&f.name))
                    .map_err(|e| e.to_string()),
                FunctorBody::Epsilon => HandleFunctor::epsilon(z)
                    .map(|p| p.with_name(&f.name))
                    .map_err(|e| e.to_string()),
                FunctorBody::Table { dom, values, maps } => {
                    let Some(c) = self.resolve(owner, Kind::Category, dom, m.category(dom)) else {
                        continue;
                    };
                    if z.is_finset() {
                        set_valued(&f.name, c, z, values, maps)
                    } else {
                        match self.presheaf_valued(&f.name, c, z, values, maps, &m) {
                            Some(r) => r,
                            None => continue,
                        }
                    }
                }
            };
            let functor = match built {
                Ok(p) => p,
                Err(e) => {
                    self.fail(Kind::Functor, &f.name, e);
                    continue;
                }
            };
            if let Some(s) = &f.continuous_for {
                let trivial = *s == format!("trivial({})", functor.dom().name());
                match m.site(s) {
                    Some(site) if site.base() != functor.dom() => {
                        self.fail(
                            Kind::Functor,
                            &f.name,
                            format!("site `{s}` is not on `{}`", functor.dom().name()),
                        );
                        continue;
                    }
                    Some(_) => {}
                    None if trivial => {}
                    None => {
                        if self.resolve::<Site>(owner, Kind::Site, s, None).is_none() {
                            continue;
                        }
                    }
                }
            }
            let named = NamedFunctor {
                functor,
                site: f.continuous_for.clone(),
            };
            if f.control {
                m.controls.push(named);
            } else {
                m.functors.push(named);
            }
        }
        for s in &d.suites {
            let mut theorems = Vec::new();
            for t in &s.targets {
                if t == "all" {
                    theorems.extend(Theorem::ALL);
                } else if let Some(th) = Theorem::parse(t) {
                    theorems.push(th);
                } else {
                    self.fail(Kind::Suite, &s.name, format!("unknown suite target `{t}`"));
                }
            }
            m.suites.push((s.name.clone(), theorems));
        }
        if self.errors.is_empty() {
            Ok(m)
        } else {
            self.errors.sort_by_key(|e| e.line);
            Err(self.errors)
        }
    }

    fn presheaf_valued(
        &mut self,
        name: &str,
        c: &FinCategory,
        z: &ComputationalCategory,
        values: &[(String, Vec<String>)],
        maps: &[(String, Vec<String>)],
        m: &Model,
    ) -> Option<Result<HandleFunctor, String>> {
        let owner = (Kind::Functor, name);
        let mut objects = Vec::new();
        for x in c.objects() {
            let xn = c.object_name(x);
            let Some((_, v)) = values.iter().find(|(n, _)| n == xn) else {
                return Some(Err(format!("no value for object `{xn}`")));
            };
            let [pname] = v.as_slice() else {
                return Some(Err(format!("value of `{xn}` must name one presheaf")));
            };
            objects.push(
                self.resolve(owner, Kind::Presheaf, pname, m.presheaf(pname))?
                    .clone(),
            );
        }
        if let Some((x, _)) = values.iter().find(|(x, _)| c.object_id(x).is_err()) {
            return Some(Err(format!("unknown object `{x}`")));
        }
        let mut morphisms = Vec::new();
        for f in c.morphisms() {
            let (s, t) = (&objects[c.src(f).0], &objects[c.tgt(f).0]);
            let fname = c.morphism_name(f);
            let line = maps.iter().find(|(n, _)| n == fname);
            let mor = match line.map(|(_, v)| v.as_slice()) {
                None if c.is_identity(f) => PresheafMorphism::identity(s),
                None => return Some(Err(format!("no map for morphism `{fname}`"))),
                Some([id]) if id == "id" => {
                    if s != t {
                        return Some(Err(format!(
                            "`{fname}` maps between different values, `id` does not apply"
                        )));
                    }
                    PresheafMorphism::identity(s)
                }
                Some([tname]) => {
                    let mor =
                        self.resolve(owner, Kind::Transformation, tname, m.transformation(tname))?;
                    if mor.dom() != s || mor.cod() != t {
                        return Some(Err(format!(
                            "transformation `{tname}` does not match the values at `{fname}`"
                        )));
                    }
                    mor.clone()
                }
                Some(_) => {
                    return Some(Err(format!(
                        "map of `{fname}` must name one transformation or `id`"
                    )))
                }
            };
            morphisms.push(mor);
        }
        if let Some((f, _)) = maps.iter().find(|(f, _)| c.morphism_id(f).is_err()) {
            return Some(Err(format!("unknown morphism `{f}`")));
        }
        Some(HandleFunctor::new(name, c, z, objects, morphisms).map_err(|e| e.to_string()))
    }
}

fn build_category(c: &CategoryDecl) -> Result<FinCategory, String> {
    match c {
        CategoryDecl::Explicit(d) => FinCategory::from_data(d).map_err(|e| e.to_string()),
        CategoryDecl::Poset { name, objects, leq } => {
            let mut seen = HashSet::new();
            if let Some(o) = objects.iter().find(|o| !seen.insert(*o)) {
                return Err(format!("object `{o}` is listed twice"));
            }
            if let Some((a, b)) = leq
                .iter()
                .find(|(a, b)| !objects.contains(a) || !objects.contains(b))
            {
                return Err(format!("`leq {a} {b}` names an unknown object"));
            }
            if objects.len() > CORPUS_LIMITS.max_objects {
                return Err(format!(
                    "{} objects exceed the limit of {}",
                    objects.len(),
                    CORPUS_LIMITS.max_objects
                ));
            }
            let objs: Vec<&str> = objects.iter().map(String::as_str).collect();
            let leq: Vec<(&str, &str)> =
                leq.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
            let cat = FinCategory::poset(name, &objs, &leq);
            let report = validate_category(&cat.to_data());
            if !report.passed() {
                return Err(report.to_string());
            }
            Ok(cat)
        }
    }
}

fn build_transformation(
    a: &Presheaf,
    b: &Presheaf,
    components: &[(String, Pairs)],
) -> Result<PresheafMorphism, String> {
    let c = a.base();
    if b.base() != c {
        return Err(format!(
            "`{}` and `{}` are presheaves on different categories",
            c.name(),
            b.base().name()
        ));
    }
    let mut comps: Vec<Option<Vec<usize>>> = c
        .objects()
        .map(|x| a.labels(x).is_empty().then(Vec::new))
        .collect();
    for (xn, ps) in components {
        let x = c.object_id(xn).map_err(|e| e.to_string())?;
        let mut comp = vec![usize::MAX; a.labels(x).len()];
        for (s, t) in ps {
            let i = a.labels(x).iter().position(|l| l == s);
            let j = b.labels(x).iter().position(|l| l == t);
            match (i, j) {
                (Some(i), Some(j)) => comp[i] = j,
                _ => return Err(format!("unknown element in `{s}->{t}` at `{xn}`")),
            }
        }
        if comp.contains(&usize::MAX) {
            return Err(format!("component at `{xn}` is not total"));
        }
        comps[x.0] = Some(comp);
    }
    let comps = c
        .objects()
        .map(|x| {
            comps[x.0]
                .take()
                .ok_or_else(|| format!("missing component at `{}`", c.object_name(x)))
        })
        .collect::<Result<Vec<_>, _>>()?;
    PresheafMorphism::new(a, b, comps).map_err(|e| e.to_string())
}

fn set_valued(
    name: &str,
    c: &FinCategory,
    z: &ComputationalCategory,
    values: &[(String, Vec<String>)],
    maps: &[(String, Vec<String>)],
) -> Result<HandleFunctor, String> {
    let values: Vec<(&str, Vec<&str>)> = values
        .iter()
        .map(|(x, v)| (x.as_str(), v.iter().map(String::as_str).collect()))
        .collect();
    let values: Vec<(&str, &[&str])> = values.iter().map(|(x, v)| (*x, v.as_slice())).collect();
    let maps: Vec<(&str, Pairs)> = maps
        .iter()
        .map(|(f, toks)| {
            Ok((
                f.as_str(),
                pairs(
                    0,
                    name,
                    &toks.iter().map(String::as_str).collect::<Vec<_>>(),
                )?,
            ))
        })
        .collect::<Result<_, WsError>>()
        .map_err(|e| e.reason)?;
    let maps: Vec<(&str, Vec<(&str, &str)>)> = maps
        .iter()
        .map(|(f, ps)| {
            (
                *f,
                ps.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect(),
            )
        })
        .collect();
    let maps: Vec<(&str, &[(&str, &str)])> =
        maps.iter().map(|(f, ps)| (*f, ps.as_slice())).collect();
    HandleFunctor::set_valued(name, c, z, &values, &maps).map_err(|e| e.to_string())
}

// ---- decompiling -----------------------------------------------------------

fn category_decl(c: &FinCategory) -> CategoryDecl {
    if c.is_thin() {
        let objects: Vec<String> = c.objects().map(|x| c.object_name(x).to_string()).collect();
        let leq: Vec<(String, String)> = c
            .non_identity_morphisms()
            .map(|f| {
                (
                    c.object_name(c.src(f)).to_string(),
                    c.object_name(c.tgt(f)).to_string(),
                )
            })
            .collect();
        let objs: Vec<&str> = objects.iter().map(String::as_str).collect();
        let refs: Vec<(&str, &str)> = leq.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        if FinCategory::poset(c.name(), &objs, &refs) == *c {
            // keep only the covering relations
            let mut cover = leq.clone();
            cover.retain(|(a, b)| {
                !leq.iter()
                    .any(|(x, y)| x == a && y != b && leq.contains(&(y.clone(), b.clone())))
            });
            return CategoryDecl::Poset {
                name: c.name().to_string(),
                objects,
                leq: cover,
            };
        }
    }
    CategoryDecl::Explicit(c.to_data())
}

fn presheaf_decl(name: &str, p: &Presheaf, auxiliary: bool) -> PresheafDecl {
    let c = p.base();
    PresheafDecl {
        name: name.to_string(),
        base: c.name().to_string(),
        values: c
            .objects()
            .map(|x| (c.object_name(x).to_string(), p.labels(x).to_vec()))
            .collect(),
        actions: c
            .non_identity_morphisms()
            .filter(|&f| !p.labels(c.tgt(f)).is_empty())
            .map(|f| {
                let (s, t) = (c.src(f), c.tgt(f));
                let ps = p
                    .action(f)
                    .iter()
                    .enumerate()
                    .map(|(y, &x)| (p.label(t, y).to_string(), p.label(s, x).to_string()));
                (c.morphism_name(f).to_string(), ps.collect())
            })
            .collect(),
        auxiliary,
    }
}

fn handle_decl(z: &ComputationalCategory) -> HandleDecl {
    let (name, kind) = if z.is_finset() {
        (format!("finset{}", z.bound()), HandleKind::FinSet)
    } else if let Some(s) = z.site() {
        (
            format!("sh_{}_{}", s.name(), z.bound()),
            HandleKind::Sheaves(s.name().to_string()),
        )
    } else {
        (
            format!("psh_{}_{}", z.base().name(), z.bound()),
            HandleKind::Presheaves(z.base().name().to_string()),
        )
    };
    let name = name
        .chars()
        .map(|ch| {
            if ch.is_alphanumeric() || ch == '_' {
                ch
            } else {
                '_'
            }
        })
        .collect::<String>();
    HandleDecl {
        name: name.trim_end_matches('_').replace("__", "_"),
        kind,
        bound: z.bound(),
    }
}

fn same_tables(a: &HandleFunctor, b: &HandleFunctor) -> bool {
    a.objects() == b.objects() && a.morphisms() == b.morphisms()
}

fn decompile(bounds: Bounds, fx: &Fixtures) -> Declarations {
    let mut d = Declarations {
        bounds: Some(bounds),
        ..Default::default()
    };
    d.categories = fx.categories.iter().map(category_decl).collect();
    d.presheaves = fx
        .presheaves
        .iter()
        .map(|p| presheaf_decl(&p.name, &p.presheaf, false))
        .collect();
    let mut known: Vec<(String, Presheaf)> = fx
        .presheaves
        .iter()
        .map(|p| (p.name.clone(), p.presheaf.clone()))
        .collect();
    d.sites = fx
        .sites
        .iter()
        .map(|s| {
            let c = s.base();
            SiteDecl {
                name: s.name().to_string(),
                base: c.name().to_string(),
                covers: s
                    .covers()
                    .iter()
                    .map(|cv| {
                        (
                            c.object_name(cv.target).to_string(),
                            cv.arrows
                                .iter()
                                .map(|&m| c.morphism_name(m).to_string())
                                .collect(),
                        )
                    })
                    .collect(),
            }
        })
        .collect();
    for (nf, control) in fx
        .functors
        .iter()
        .map(|f| (f, false))
        .chain(fx.controls.iter().map(|f| (f, true)))
    {
        let p = &nf.functor;
        let z = p.cod();
        let h = handle_decl(z);
        if !d.handles.contains(&h) {
            d.handles.push(h.clone());
        }
        let c = p.dom();
        let body = if z.is_finset() {
            FunctorBody::Table {
                dom: c.name().to_string(),
                values: c
                    .objects()
                    .map(|x| {
                        (
                            c.object_name(x).to_string(),
                            p.ob(x).labels(ObjId(0)).to_vec(),
                        )
                    })
                    .collect(),
                maps: c
                    .non_identity_morphisms()
                    .filter(|&f| !p.ob(c.src(f)).labels(ObjId(0)).is_empty())
                    .map(|f| {
                        let (s, t) = (p.ob(c.src(f)), p.ob(c.tgt(f)));
                        let toks =
                            p.mor(f)
                                .component(ObjId(0))
                                .iter()
                                .enumerate()
                                .map(|(i, &j)| {
                                    format!("{}->{}", s.label(ObjId(0), i), t.label(ObjId(0), j))
                                });
                        (c.morphism_name(f).to_string(), toks.collect())
                    })
                    .collect(),
            }
        } else if z.site().is_some() && HandleFunctor::epsilon(z).is_ok_and(|e| same_tables(&e, p))
        {
            FunctorBody::Epsilon
        } else if z.site().is_none() && HandleFunctor::yoneda(z).is_ok_and(|y| same_tables(&y, p)) {
            FunctorBody::Yoneda
        } else {
            let mut values = Vec::new();
            for x in c.objects() {
                let v = p.ob(x);
                let name = match known.iter().find(|(_, q)| q == v) {
                    Some((n, _)) => n.clone(),
                    None => {
                        let n = format!("{}_{}", p.name(), c.object_name(x));
                        d.presheaves.push(presheaf_decl(&n, v, true));
                        known.push((n.clone(), v.clone()));
                        n
                    }
                };
                values.push((c.object_name(x).to_string(), vec![name]));
            }
            let mut maps = Vec::new();
            for f in c.non_identity_morphisms() {
                let m = p.mor(f);
                let tok = if m.dom() == m.cod() && *m == PresheafMorphism::identity(m.dom()) {
                    "id".to_string()
                } else {
                    let n = format!("{}_{}", p.name(), c.morphism_name(f));
                    let dn = &values[c.src(f).0].1[0];
                    let cn = &values[c.tgt(f).0].1[0];
                    let b = m.dom().base();
                    let components = b
                        .objects()
                        .filter(|&y| !m.dom().labels(y).is_empty())
                        .map(|y| {
                            let ps = m.component(y).iter().enumerate().map(|(i, &j)| {
                                (
                                    m.dom().label(y, i).to_string(),
                                    m.cod().label(y, j).to_string(),
                                )
                            });
                            (b.object_name(y).to_string(), ps.collect())
                        })
                        .collect();
                    d.transformations.push(TransformationDecl {
                        name: n.clone(),
                        dom: dn.clone(),
                        cod: cn.clone(),
                        components,
                    });
                    n
                };
                maps.push((c.morphism_name(f).to_string(), vec![tok]));
            }
            FunctorBody::Table {
                dom: c.name().to_string(),
                values,
                maps,
            }
        };
        d.functors.push(FunctorDecl {
            name: p.name().to_string(),
            handle: h.name,
            body,
            continuous_for: nf.site.clone(),
            control,
        });
    }
    d
}

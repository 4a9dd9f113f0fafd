//! Subcommand dispatch and report emission.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use finitopos::handle::Budget;
use finitopos::kan::{
    adjunction_phi, has_finite_limits, is_flat_bounded, is_flat_setvalued, left_exactness_failure,
    right_adjoint_hp, tilde_extend, ExtensionResult, FlatVerdict,
};
use finitopos::presheaf::{yoneda_embed, Presheaf};
use finitopos::site::{
    canonical_site, epsilon_functor, is_continuous, is_sheaf, is_subcanonical, sheafify, Site,
};
use finitopos::verify::{run_theorem_suite, Theorem};
use finitopos::Error;

use crate::workspace::{parse_workspace, Workspace, WsError};

pub const CLI_SCHEMA: &str = "finitopos.cli-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReportMode {
    Json,
    Text,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BudgetProfile {
    Small,
    Default,
    Large,
}

impl BudgetProfile {
    pub fn budget(self) -> Budget {
        match self {
            BudgetProfile::Small => Budget::SMALL,
            BudgetProfile::Default => Budget::DEFAULT,
            BudgetProfile::Large => Budget::LARGE,
        }
    }
}

/// Exact finite category theory on workspace files.
#[derive(Debug, Parser)]
#[command(name = "finitopos", version)]
pub struct Cli {
    /// workspace file; the built-in fixture corpus when absent
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value = "default")]
    pub budget: BudgetProfile,
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub report: ReportMode,
    /// directory for `<command>.json` and `<command>.txt`
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate the workspace, listing its entities.
    Validate,
    /// Sheafify presheaves on a site and report the unit.
    Sheafify {
        #[arg(long)]
        site: String,
        /// a workspace presheaf; representables and all workspace presheaves on the base when absent
        #[arg(long)]
        presheaf: Option<String>,
    },
    /// Evaluate the cocontinuous extension of a functor, with its cocone.
    Extend {
        #[arg(long)]
        functor: String,
        #[arg(long)]
        presheaf: Option<String>,
    },
    /// Tabulate the right adjoint Hom(p(-), Z) and check the adjunction on representables.
    Adjoint {
        #[arg(long)]
        functor: String,
        /// a workspace presheaf in the codomain; every enumerated object when absent
        #[arg(long)]
        target: Option<String>,
    },
    /// Decide flatness of a functor up to the budget.
    Flat {
        #[arg(long)]
        functor: String,
    },
    /// Check that a functor sends covers to strict epimorphic families.
    Continuous {
        #[arg(long)]
        functor: String,
        /// defaults to the site the functor is declared continuous for
        #[arg(long)]
        site: Option<String>,
    },
    /// The canonical functor from a site's base into its sheaves.
    Epsilon {
        #[arg(long)]
        site: String,
    },
    /// Run a theorem suite: I..VII, sheaves, lex, controls, all, or a workspace suite name.
    Suite { target: String },
    /// Universal strict epimorphic families of a category and the topology they generate.
    CanonicalTopology {
        #[arg(long)]
        category: String,
        /// largest family size considered
        #[arg(long, default_value_t = 3)]
        max_size: usize,
    },
}

impl Command {
    fn file_stem(&self) -> String {
        match self {
            Command::Validate => "validate".into(),
            Command::Sheafify { .. } => "sheafify".into(),
            Command::Extend { .. } => "extend".into(),
            Command::Adjoint { .. } => "adjoint".into(),
            Command::Flat { .. } => "flat".into(),
            Command::Continuous { .. } => "continuous".into(),
            Command::Epsilon { .. } => "epsilon".into(),
            Command::Suite { target } => format!("suite-{target}"),
            Command::CanonicalTopology { .. } => "canonical-topology".into(),
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Sheafify { .. } => "sheafify",
            Command::Extend { .. } => "extend",
            Command::Adjoint { .. } => "adjoint",
            Command::Flat { .. } => "flat",
            Command::Continuous { .. } => "continuous",
            Command::Epsilon { .. } => "epsilon",
            Command::Suite { .. } => "suite",
            Command::CanonicalTopology { .. } => "canonical-topology",
        }
    }
}

/// An error raised while running a check, with the check it belongs to.
#[derive(Clone, Debug, Serialize)]
pub struct CheckError {
    pub check: String,
    pub kind: &'static str,
    pub message: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: &'static str,
    pub seed: u64,
    pub budget: &'static str,
    pub checks_run: usize,
    pub failures: usize,
    pub verdict: &'static str,
    pub errors: Vec<CheckError>,
    pub results: Value,
    #[serde(skip)]
    pub text: Vec<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.errors.is_empty()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "{}: {} ({} checks, {} failures)\n",
            self.command, self.verdict, self.checks_run, self.failures
        );
        for l in &self.text {
            s.push_str(l);
            s.push('\n');
        }
        for e in &self.errors {
            s.push_str(&format!("error [{}] {}: {}\n", e.kind, e.check, e.message));
        }
        s
    }
}

/// Accumulates checks, results and text for one invocation.
struct Run {
    checks: usize,
    failures: usize,
    errors: Vec<CheckError>,
    text: Vec<String>,
}

impl Run {
    fn new() -> Self {
        Self {
            checks: 0,
            failures: 0,
            errors: Vec::new(),
            text: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool) -> bool {
        self.checks += 1;
        if !ok {
            self.failures += 1;
        }
        ok
    }

    fn error(&mut self, check: impl Into<String>, e: &Error) {
        let kind = match e {
            Error::Budget { .. } => "budget",
            Error::Refused(_) => "refused",
            _ => "error",
        };
        self.errors.push(CheckError {
            check: check.into(),
            kind,
            message: e.to_string(),
        });
    }

    /// Records an error of `r` against `check` and yields the value otherwise.
    fn get<T>(&mut self, check: &str, r: finitopos::Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.error(check, &e);
                None
            }
        }
    }

    fn say(&mut self, line: impl Into<String>) {
        self.text.push(line.into());
    }
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}

/// Outcome of a whole invocation: process exit status plus what was emitted.
pub struct Outcome {
    pub status: i32,
    pub report: Option<Report>,
}

/// Loads the workspace named by `--input`, or the built-in fixtures.
pub fn load(cli: &Cli) -> Result<Workspace, Vec<WsError>> {
    let budget = cli.budget.budget();
    match &cli.input {
        Some(p) => parse_workspace(p, budget),
        None => Workspace::builtin(budget),
    }
}

/// Runs one invocation, writing reports to `stdout`, `stderr` and `--out`.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Outcome {
    let ws = match load(cli) {
        Ok(ws) => ws,
        Err(errors) => {
            for e in &errors {
                let _ = writeln!(stderr, "{e}");
            }
            if !matches!(cli.command, Command::Validate) {
                return Outcome {
                    status: 2,
                    report: None,
                };
            }
            let mut run = Run::new();
            run.checks = errors.len();
            run.failures = errors.len();
            for e in &errors {
                run.say(e.to_string());
            }
            let results = json!({ "errors": errors });
            let report = finish(cli, run, results);
            return emit(cli, report, stdout, stderr);
        }
    };
    let mut run = Run::new();
    let results = dispatch(&cli.command, &ws, cli, &mut run);
    let report = finish(cli, run, results);
    emit(cli, report, stdout, stderr)
}

fn finish(cli: &Cli, run: Run, results: Value) -> Report {
    let passed = run.failures == 0 && run.errors.is_empty();
    Report {
        schema: CLI_SCHEMA,
        command: cli.command.name(),
        seed: cli.seed,
        budget: cli.budget.budget().profile,
        checks_run: run.checks,
        failures: run.failures,
        verdict: if passed { "pass" } else { "fail" },
        errors: run.errors,
        results,
        text: run.text,
    }
}

fn emit(cli: &Cli, report: Report, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Outcome {
    let json = report.to_json();
    let text = report.to_text();
    if let Some(dir) = &cli.out {
        if let Err(e) = write_artifacts(dir, &cli.command.file_stem(), cli.report, &json, &text) {
            let _ = writeln!(stderr, "cannot write reports to {}: {e}", dir.display());
            return Outcome {
                status: 2,
                report: Some(report),
            };
        }
    }
    let _ = match cli.report {
        ReportMode::Json => stdout.write_all(json.as_bytes()),
        ReportMode::Text => stdout.write_all(text.as_bytes()),
        ReportMode::Both => stdout
            .write_all(text.as_bytes())
            .and_then(|_| stdout.write_all(json.as_bytes())),
    };
    let status = if report.passed() { 0 } else { 1 };
    Outcome {
        status,
        report: Some(report),
    }
}

fn write_artifacts(
    dir: &Path,
    stem: &str,
    mode: ReportMode,
    json: &str,
    text: &str,
) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    if mode != ReportMode::Text {
        std::fs::write(dir.join(format!("{stem}.json")), json)?;
    }
    if mode != ReportMode::Json {
        std::fs::write(dir.join(format!("{stem}.txt")), text)?;
    }
    Ok(())
}

fn dispatch(cmd: &Command, ws: &Workspace, cli: &Cli, run: &mut Run) -> Value {
    let budget = cli.budget.budget();
    match cmd {
        Command::Validate => validate(ws, run),
        Command::Sheafify { site, presheaf } => cmd_sheafify(ws, site, presheaf.as_deref(), run),
        Command::Extend { functor, presheaf } => cmd_extend(ws, functor, presheaf.as_deref(), run),
        Command::Adjoint { functor, target } => cmd_adjoint(ws, functor, target.as_deref(), run),
        Command::Flat { functor } => cmd_flat(ws, functor, &budget, run),
        Command::Continuous { functor, site } => cmd_continuous(ws, functor, site.as_deref(), run),
        Command::Epsilon { site } => cmd_epsilon(ws, site, run),
        Command::Suite { target } => cmd_suite(ws, target, cli.seed, budget, run),
        Command::CanonicalTopology { category, max_size } => {
            cmd_canonical(ws, category, *max_size, run)
        }
    }
}

fn unknown(run: &mut Run, check: &str, kind: &'static str, name: &str) -> Value {
    run.error(
        check,
        &Error::Unknown {
            kind,
            name: name.to_string(),
        },
    );
    Value::Null
}

fn site_named(ws: &Workspace, name: &str) -> Option<Site> {
    if let Some(s) = ws.model.site(name) {
        return Some(s.clone());
    }
    let inner = name.strip_prefix("trivial(")?.strip_suffix(')')?;
    Site::trivial(ws.model.category(inner)?).ok()
}

// ---- validate --------------------------------------------------------------

fn validate(ws: &Workspace, run: &mut Run) -> Value {
    let m = &ws.model;
    let mut sites = Vec::new();
    for s in &m.sites {
        let sub = run.get(&format!("validate/{}", s.name()), is_subcanonical(s));
        sites.push(json!({
            "name": s.name(),
            "base": s.base().name(),
            "covers": s.covers().len(),
            "coverage": s.is_coverage(),
            "subcanonical": sub.map(|x| x.holds),
        }));
    }
    let entities = m.categories.len()
        + m.presheaves.len()
        + m.transformations.len()
        + m.sites.len()
        + m.handles.len()
        + m.functors.len()
        + m.controls.len()
        + m.suites.len();
    run.checks = entities;
    run.say(format!(
        "{} categories, {} presheaves, {} transformations, {} sites, {} handles, {} functors, {} controls, {} suites",
        m.categories.len(),
        m.presheaves.len(),
        m.transformations.len(),
        m.sites.len(),
        m.handles.len(),
        m.functors.len(),
        m.controls.len(),
        m.suites.len()
    ));
    let functor = |f: &finitopos::verify::NamedFunctor, control: bool| {
        json!({
            "name": f.name(),
            "dom": f.functor.dom().name(),
            "cod": f.functor.cod().name(),
            "continuous_for": f.site,
            "control": control,
        })
    };
    json!({
        "categories": m.categories.iter().map(|c| json!({
            "name": c.name(),
            "objects": c.num_objects(),
            "morphisms": c.num_morphisms(),
            "thin": c.is_thin(),
        })).collect::<Vec<_>>(),
        "presheaves": m.presheaves.iter().map(|p| json!({
            "name": p.name,
            "base": p.presheaf.base().name(),
            "sizes": p.presheaf.sizes(),
            "auxiliary": m.auxiliary.contains(&p.name),
        })).collect::<Vec<_>>(),
        "transformations": m.transformations.iter().map(|(n, t)| json!({
            "name": n,
            "signature": t.signature(),
        })).collect::<Vec<_>>(),
        "sites": sites,
        "handles": m.handles.iter().map(|(n, z)| json!({
            "name": n,
            "category": z.name(),
            "bound": z.bound(),
        })).collect::<Vec<_>>(),
        "functors": m.functors.iter().map(|f| functor(f, false))
            .chain(m.controls.iter().map(|f| functor(f, true))).collect::<Vec<_>>(),
        "suites": m.suites.iter().map(|(n, ts)| json!({
            "name": n,
            "targets": ts.iter().map(Theorem::id).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

// ---- sheafify --------------------------------------------------------------

/// Representables `h_X` followed by the named workspace presheaves on `c`.
fn inputs_on(
    ws: &Workspace,
    c: &finitopos::fincat::FinCategory,
) -> finitopos::Result<Vec<(String, Presheaf)>> {
    let mut out = Vec::new();
    for x in c.objects() {
        out.push((format!("h_{}", c.object_name(x)), yoneda_embed(c, x)?));
    }
    for p in ws
        .model
        .presheaves
        .iter()
        .filter(|p| p.presheaf.base() == c)
    {
        out.push((p.name.clone(), p.presheaf.clone()));
    }
    Ok(out)
}

fn named_inputs(
    ws: &Workspace,
    c: &finitopos::fincat::FinCategory,
    name: Option<&str>,
    run: &mut Run,
) -> Option<Vec<(String, Presheaf)>> {
    match name {
        Some(n) => match ws.model.presheaf(n) {
            Some(p) if p.base() == c => Some(vec![(n.to_string(), p.clone())]),
            Some(p) => {
                run.error(
                    n,
                    &Error::BaseMismatch(p.base().name().into(), c.name().into()),
                );
                None
            }
            None => {
                unknown(run, n, "presheaf", n);
                None
            }
        },
        None => run.get("inputs", inputs_on(ws, c)),
    }
}

fn cmd_sheafify(ws: &Workspace, site: &str, presheaf: Option<&str>, run: &mut Run) -> Value {
    let Some(s) = site_named(ws, site) else {
        return unknown(run, "sheafify", "site", site);
    };
    let Some(inputs) = named_inputs(ws, s.base(), presheaf, run) else {
        return Value::Null;
    };
    let mut out = Vec::new();
    for (name, p) in inputs {
        let check = format!("sheafify/{name}");
        let Some(before) = run.get(&check, is_sheaf(&p, &s)) else {
            continue;
        };
        let Some(r) = run.get(&check, sheafify(&p, &s)) else {
            continue;
        };
        let Some(after) = run.get(&check, is_sheaf(&r.sheaf, &s)) else {
            continue;
        };
        let unit_iso = r.unit.is_iso();
        let ok = run.check(after.holds) & run.check(unit_iso == before.holds);
        run.say(format!(
            "{name}: input sheaf {}, unit iso {unit_iso}, output sheaf {} [{}]",
            before.holds,
            after.holds,
            mark(ok)
        ));
        out.push(json!({
            "presheaf": name,
            "input_sizes": p.sizes(),
            "input_is_sheaf": before.holds,
            "input_witness": before.witness,
            "plus_sizes": [r.stages[0].sizes(), r.stages[1].sizes()],
            "sheaf_sizes": r.sheaf.sizes(),
            "sheaf_labels": r.sheaf.all_labels(),
            "unit": r.unit.signature(),
            "unit_is_iso": unit_iso,
            "output_is_sheaf": after.holds,
        }));
    }
    json!({ "site": s.name(), "base": s.base().name(), "results": out })
}

// ---- extend ----------------------------------------------------------------

fn functor<'a>(
    ws: &'a Workspace,
    name: &str,
    run: &mut Run,
) -> Option<&'a finitopos::verify::NamedFunctor> {
    let f = ws.model.functor(name);
    if f.is_none() {
        unknown(run, name, "functor", name);
    }
    f
}

fn cmd_extend(ws: &Workspace, fname: &str, presheaf: Option<&str>, run: &mut Run) -> Value {
    let Some(nf) = functor(ws, fname, run) else {
        return Value::Null;
    };
    let p = &nf.functor;
    let Some(inputs) = named_inputs(ws, p.dom(), presheaf, run) else {
        return Value::Null;
    };
    let ext = ExtensionResult::new(p);
    let mut out = Vec::new();
    for (name, h) in inputs {
        let check = format!("extend/{fname}/{name}");
        let Some(e) = run.get(&check, tilde_extend(p, &h)) else {
            continue;
        };
        let Some(inside) = run.get(&check, p.cod().contains(&e.apex)) else {
            continue;
        };
        run.check(inside);
        let s = e.summary();
        run.say(format!(
            "{name}: apex sizes {:?}, {} cocone legs [{}]",
            s.apex_sizes,
            s.legs.len(),
            mark(inside)
        ));
        out.push(json!({ "presheaf": name, "apex_in_codomain": inside, "extension": s }));
    }
    let mut eta = Value::Null;
    if presheaf.is_none() {
        if let Some(r) = run.get(&format!("extend/{fname}/eta"), ext.eta()) {
            let ok = run.check(r.holds());
            run.say(format!("unit p ≅ p̃∘h: {}", mark(ok)));
            eta = json!({ "holds": ok, "failure": r.failure });
        }
    }
    json!({ "functor": fname, "codomain": p.cod().name(), "results": out, "eta_iso": eta })
}

// ---- adjoint ---------------------------------------------------------------

fn cmd_adjoint(ws: &Workspace, fname: &str, target: Option<&str>, run: &mut Run) -> Value {
    let Some(nf) = functor(ws, fname, run) else {
        return Value::Null;
    };
    let p = &nf.functor;
    let c = p.dom();
    let targets: Vec<(String, Presheaf)> = match target {
        Some(t) => {
            let Some(z) = ws.model.presheaf(t) else {
                return unknown(run, t, "presheaf", t);
            };
            match p.cod().contains(z) {
                Ok(true) => vec![(t.to_string(), z.clone())],
                Ok(false) => {
                    run.error(
                        t,
                        &Error::Contract(format!("`{t}` is not an object of {}", p.cod().name())),
                    );
                    return Value::Null;
                }
                Err(e) => {
                    run.error(t, &e);
                    return Value::Null;
                }
            }
        }
        None => match run.get("adjoint/targets", p.cod().objects()) {
            Some(objs) => objs
                .iter()
                .enumerate()
                .map(|(i, z)| (format!("Z{i}"), z.clone()))
                .collect(),
            None => return Value::Null,
        },
    };
    let reps: Vec<_> = match run.get(
        "adjoint/representables",
        c.objects()
            .map(|x| tilde_extend(p, &yoneda_embed(c, x)?))
            .collect::<finitopos::Result<Vec<_>>>(),
    ) {
        Some(r) => r,
        None => return Value::Null,
    };
    let mut out = Vec::new();
    for (name, z) in targets {
        let check = format!("adjoint/{fname}/{name}");
        let Some(hp) = run.get(&check, right_adjoint_hp(p, &z)) else {
            continue;
        };
        let mut table = Vec::new();
        for x in c.objects() {
            let maps: Vec<String> = hp.maps(x).iter().map(|m| m.signature()).collect();
            table.push(json!({ "object": c.object_name(x), "maps": maps }));
        }
        let mut bijections = Vec::new();
        let mut all = true;
        for (x, e) in c.objects().zip(&reps) {
            let Some(b) = run.get(&check, adjunction_phi(p, e, &hp)) else {
                continue;
            };
            let ok = run.check(b.mutually_inverse());
            all &= ok;
            let (l, r) = b.counts();
            bijections.push(json!({ "object": c.object_name(x), "hom_extension": l, "nat_into_hp": r, "inverse": ok }));
        }
        run.say(format!(
            "{name}: h_p sizes {:?}, bijections on representables [{}]",
            hp.presheaf.sizes(),
            mark(all)
        ));
        out.push(json!({
            "target": name,
            "target_sizes": z.sizes(),
            "hp_sizes": hp.presheaf.sizes(),
            "hp": table,
            "bijections": bijections,
        }));
    }
    json!({ "functor": fname, "codomain": p.cod().name(), "results": out })
}

// ---- flat ------------------------------------------------------------------

fn cmd_flat(ws: &Workspace, fname: &str, budget: &Budget, run: &mut Run) -> Value {
    let Some(nf) = functor(ws, fname, run) else {
        return Value::Null;
    };
    let p = &nf.functor;
    let mut res = serde_json::Map::new();
    res.insert("functor".into(), json!(fname));
    if let Some(v) = run.get(&format!("flat/{fname}/bounded"), is_flat_bounded(p, budget)) {
        run.check(!v.is_counterexample());
        match &v {
            FlatVerdict::VerifiedUpToBudget { .. } => run.say(format!(
                "bounded exactness: verified up to budget ({} comparisons)",
                v.checks()
            )),
            FlatVerdict::Counterexample { kind, detail } => run.say(format!(
                "bounded exactness: counterexample ({kind:?}): {detail}"
            )),
        }
        res.insert("bounded".into(), json!(v));
    }
    if p.cod().is_finset() {
        if let Some(cf) = run.get(&format!("flat/{fname}/elements"), is_flat_setvalued(p)) {
            run.check(cf.holds);
            run.say(format!("elements cofiltered: {}", cf.holds));
            res.insert("elements_cofiltered".into(), json!(cf));
        }
    }
    if has_finite_limits(p.dom()) {
        if let Some(f) = run.get(
            &format!("flat/{fname}/left_exact"),
            left_exactness_failure(p),
        ) {
            run.check(f.is_none());
            match &f {
                None => run.say("left exact on the finite limits of the base"),
                Some(f) => run.say(format!("not left exact ({:?}): {}", f.kind, f.detail)),
            }
            res.insert("left_exactness_failure".into(), json!(f));
        }
    }
    Value::Object(res)
}

// ---- continuous ------------------------------------------------------------

fn cmd_continuous(ws: &Workspace, fname: &str, site: Option<&str>, run: &mut Run) -> Value {
    let Some(nf) = functor(ws, fname, run) else {
        return Value::Null;
    };
    let Some(sname) = site.map(str::to_string).or_else(|| nf.site.clone()) else {
        run.error(
            format!("continuous/{fname}"),
            &Error::Contract("no --site given and none declared".into()),
        );
        return Value::Null;
    };
    let Some(s) = site_named(ws, &sname) else {
        return unknown(run, "continuous", "site", &sname);
    };
    let Some(c) = run.get(
        &format!("continuous/{fname}/{sname}"),
        is_continuous(&nf.functor, &s),
    ) else {
        return Value::Null;
    };
    run.check(c.holds);
    run.say(format!(
        "{fname} on {sname}: {} covers checked, continuous {}",
        c.covers_checked, c.holds
    ));
    json!({ "functor": fname, "site": sname, "continuity": c })
}

// ---- epsilon ---------------------------------------------------------------

fn cmd_epsilon(ws: &Workspace, site: &str, run: &mut Run) -> Value {
    let Some(s) = site_named(ws, site) else {
        return unknown(run, "epsilon", "site", site);
    };
    let Some(eps) = run.get(&format!("epsilon/{site}"), epsilon_functor(&s)) else {
        return Value::Null;
    };
    let c = s.base();
    let mut objects = Vec::new();
    for x in c.objects() {
        let r = &eps.objects[x.0];
        let Some(v) = run.get(
            &format!("epsilon/{site}/{}", c.object_name(x)),
            is_sheaf(&r.sheaf, &s),
        ) else {
            continue;
        };
        let ok = run.check(v.holds);
        run.say(format!(
            "ε({}): sizes {:?}, representable already a sheaf {} [{}]",
            c.object_name(x),
            r.sheaf.sizes(),
            r.unit.is_iso(),
            mark(ok)
        ));
        objects.push(json!({
            "object": c.object_name(x),
            "sizes": r.sheaf.sizes(),
            "labels": r.sheaf.all_labels(),
            "unit_is_iso": r.unit.is_iso(),
            "is_sheaf": v.holds,
        }));
    }
    let morphisms: Vec<Value> = c
        .morphisms()
        .map(|f| json!({ "morphism": c.morphism_name(f), "image": eps.morphisms[f.0].signature() }))
        .collect();
    json!({ "site": s.name(), "objects": objects, "morphisms": morphisms })
}

// ---- suite -----------------------------------------------------------------

fn cmd_suite(ws: &Workspace, target: &str, seed: u64, budget: Budget, run: &mut Run) -> Value {
    let theorems: Vec<Theorem> = if target == "all" {
        Theorem::ALL.to_vec()
    } else if let Some(t) = Theorem::parse(target) {
        vec![t]
    } else if let Some(ts) = ws.model.suite(target) {
        ts.to_vec()
    } else {
        return unknown(run, "suite", "suite", target);
    };
    let Some(corpus) = run.get("suite/corpus", ws.model.corpus(seed)) else {
        return Value::Null;
    };
    let mut reports = Vec::new();
    for t in theorems {
        let r = run_theorem_suite(t, &corpus, budget);
        run.checks += r.checks_run;
        run.failures += r.failures;
        if r.checks_run == 0 {
            run.failures += 1;
        }
        run.say(format!(
            "{:<8} {:<4} checks {:>9}  failures {:>3}  {}",
            t.id(),
            if r.passed() { "pass" } else { "FAIL" },
            r.checks_run,
            r.failures,
            r.title
        ));
        for w in r.witnesses.iter().take(3) {
            run.say(format!(
                "         witness {} on {}: {}",
                w.check, w.subject, w.detail
            ));
        }
        for n in &r.budget_notes {
            run.say(format!("         budget: {n}"));
        }
        reports.push(r);
    }
    json!({ "target": target, "inputs_digest": corpus.digest(), "reports": reports })
}

// ---- canonical topology ----------------------------------------------------

fn cmd_canonical(ws: &Workspace, category: &str, max_size: usize, run: &mut Run) -> Value {
    let Some(c) = ws.model.category(category) else {
        return unknown(run, "canonical-topology", "category", category);
    };
    let check = format!("canonical-topology/{category}");
    let Some(site) = run.get(&check, canonical_site(c, max_size)) else {
        return Value::Null;
    };
    let covers: Vec<Value> = site
        .covers()
        .iter()
        .map(|cv| {
            json!({
                "target": c.object_name(cv.target),
                "family": cv.arrows.iter().map(|&m| c.morphism_name(m)).collect::<Vec<_>>(),
            })
        })
        .collect();
    let Some(sub) = run.get(&check, is_subcanonical(&site)) else {
        return Value::Null;
    };
    run.check(sub.holds);
    run.say(format!(
        "{} universal strict epimorphic families up to size {max_size}; subcanonical {}",
        covers.len(),
        sub.holds
    ));
    for x in c.objects() {
        let n = site.covering_sieves(x).len();
        run.say(format!("  {}: {n} covering sieves", c.object_name(x)));
    }
    json!({ "category": category, "max_size": max_size, "covers": covers, "topology": site.export(), "subcanonical": sub })
}

//! The eight acceptance criteria, run sequentially so the wall-clock limits
//! are measured without competing tests. One line per criterion is printed;
//! run with `--nocapture` to see them.

use std::process::Command;
use std::time::{Duration, Instant};

use finitopos::fincat::FinCategory;
use finitopos::handle::{Budget, ComputationalCategory, HandleFunctor};
use finitopos::kan::{adjunction_phi, right_adjoint_hp, tilde_extend};
use finitopos::presheaf::Presheaf;
use finitopos::verify::{
    corpus_generate, fixture_categories, run_theorem_suite, Bounds, Corpus, SuiteReport, Theorem,
};

struct Outcome {
    id: usize,
    name: &'static str,
    passed: bool,
    detail: String,
}

fn suites(corpus: &Corpus, theorems: &[Theorem]) -> (Vec<SuiteReport>, Duration) {
    let start = Instant::now();
    let reports = theorems
        .iter()
        .map(|&t| run_theorem_suite(t, corpus, Budget::DEFAULT))
        .collect();
    (reports, start.elapsed())
}

fn describe(reports: &[SuiteReport], took: Duration, limit: Duration) -> (bool, String) {
    let ok = reports
        .iter()
        .all(|r| r.passed() && r.failures == 0 && r.checks_run > 0)
        && took < limit;
    let parts: Vec<String> = reports
        .iter()
        .map(|r| {
            format!(
                "{} {} checks {} failures",
                r.theorem.id(),
                r.checks_run,
                r.failures
            )
        })
        .collect();
    (
        ok,
        format!(
            "{}; {:.1}s of {}s",
            parts.join(", "),
            took.as_secs_f64(),
            limit.as_secs()
        ),
    )
}

/// `C = 1`, `|S| = |A| = |Z| = 2`: `Hom(S × A, Z)` and `Nat(S, Hom(A, Z))`
/// both have 16 elements and φ is a bijection between them.
fn currying() -> (bool, String) {
    let one = FinCategory::terminal();
    let finset = ComputationalCategory::finset(3, Budget::DEFAULT).unwrap();
    let p = HandleFunctor::set_valued("A", &one, &finset, &[("*", &["a0", "a1"])], &[]).unwrap();
    let s = Presheaf::set(&["s0", "s1"]);
    let z = Presheaf::set(&["z0", "z1"]);
    let ext = tilde_extend(&p, &s).unwrap();
    let hp = right_adjoint_hp(&p, &z).unwrap();
    let b = adjunction_phi(&p, &ext, &hp).unwrap();
    let (l, r) = b.counts();
    (
        l == 16 && r == 16 && b.mutually_inverse(),
        format!("currying {l} = {r}, inverse {}", b.mutually_inverse()),
    )
}

#[test]
fn acceptance() {
    let mut out = Vec::new();
    let corpus = corpus_generate(0, Bounds::default()).unwrap();
    let budget = Budget::DEFAULT;

    let cats = fixture_categories();
    let small = cats.len() >= 8 && cats.iter().all(|c| c.num_objects() <= 4);
    let (r, t) = suites(&corpus, &[Theorem::I]);
    let (ok, d) = describe(&r, t, Duration::from_secs(60));
    out.push(Outcome {
        id: 1,
        name: "Yoneda I",
        passed: ok && small,
        detail: format!("{} fixture categories; {d}", cats.len()),
    });

    let (r, t) = suites(&corpus, &[Theorem::II]);
    let (ok, d) = describe(&r, t, Duration::from_secs(60));
    out.push(Outcome {
        id: 2,
        name: "Yoneda II",
        passed: ok,
        detail: d,
    });

    let (r, t) = suites(&corpus, &[Theorem::III, Theorem::IV]);
    let (ok, d) = describe(&r, t, Duration::from_secs(180));
    let (cur, cd) = currying();
    out.push(Outcome {
        id: 3,
        name: "Yoneda III/IV",
        passed: ok && cur,
        detail: format!("{d}; {cd}"),
    });

    let (r, t) = suites(&corpus, &[Theorem::Sheaves]);
    let (ok, d) = describe(&r, t, Duration::from_secs(180));
    out.push(Outcome {
        id: 4,
        name: "sheaf machinery",
        passed: ok,
        detail: d,
    });

    let (r, t) = suites(&corpus, &[Theorem::Lex]);
    let (ok, d) = describe(&r, t, Duration::from_secs(180));
    let sites = corpus.sites.len();
    // per site: the terminal comparison plus `samples` products and `samples` equalizers
    let enough = budget.samples >= 50
        && r[0].checks_run >= sites * (1 + 2 * budget.samples)
        && r[0].budget_notes.is_empty();
    out.push(Outcome {
        id: 5,
        name: "left exact sheafification",
        passed: ok && enough,
        detail: format!(
            "{d}; {sites} sites, {} product and {} equalizer instances each",
            budget.samples, budget.samples
        ),
    });

    let (r, t) = suites(&corpus, &[Theorem::VI]);
    let (ok, d) = describe(&r, t, Duration::from_secs(300));
    out.push(Outcome {
        id: 6,
        name: "Yoneda VI",
        passed: ok,
        detail: d,
    });

    let (r, t) = suites(&corpus, &[Theorem::VII]);
    let (ok, d) = describe(&r, t, Duration::from_secs(300));
    out.push(Outcome {
        id: 7,
        name: "Yoneda VII",
        passed: ok,
        detail: d,
    });

    let run = || {
        Command::new(env!("CARGO_BIN_EXE_finitopos"))
            .args(["--seed", "0", "--report", "json", "suite", "all"])
            .output()
            .expect("binary runs")
    };
    let start = Instant::now();
    let (a, b) = (run(), run());
    let same = a.stdout == b.stdout && !a.stdout.is_empty();
    let exit0 = a.status.success() && b.status.success();
    out.push(Outcome {
        id: 8,
        name: "determinism",
        passed: same && exit0,
        detail: format!(
            "two runs of `suite all --seed 0`: {} bytes, identical {same}, exit 0 {exit0}; {:.1}s",
            a.stdout.len(),
            start.elapsed().as_secs_f64()
        ),
    });

    for o in &out {
        println!(
            "acceptance {} {:<26} {}  {}",
            o.id,
            o.name,
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    let failed: Vec<usize> = out.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    assert!(failed.is_empty(), "acceptance criteria failed: {failed:?}");
}

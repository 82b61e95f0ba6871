//! Acceptance run: one line per criterion with its time budget, then a
//! check that the mutated oracle is caught. Exits nonzero on any failure.

use std::io::Write;
use std::time::{Duration, Instant};

use polyagg::config::WorkspaceConfig;
use polyagg::laws::{run_suite, LawSuiteReport};

struct Criterion {
    number: usize,
    suite: &'static str,
    seed: u64,
    cases: usize,
    limit_secs: u64,
    extra: fn(&LawSuiteReport) -> Result<(), String>,
}

fn none(_: &LawSuiteReport) -> Result<(), String> {
    Ok(())
}

fn at_least(r: &LawSuiteReport, key: &str, n: u64) -> Result<(), String> {
    let got = r.counter(key);
    if got >= n {
        Ok(())
    } else {
        Err(format!("expected at least {n} `{key}`, got {got}"))
    }
}

const CRITERIA: &[Criterion] = &[
    Criterion { number: 1, suite: "poly-monoidal", seed: 1, cases: 500, limit_secs: 5, extra: |r| at_least(r, "evaluated", 1000) },
    Criterion {
        number: 2,
        suite: "poly-adjunction",
        seed: 2,
        cases: 200,
        limit_secs: 10,
        extra: |r| {
            if r.counter("gave up") > 0 {
                Err("some triples never fit the cap".into())
            } else {
                Ok(())
            }
        },
    },
    Criterion {
        number: 3,
        suite: "comonoid",
        seed: 3,
        cases: 100,
        limit_secs: 5,
        extra: |r| {
            at_least(r, "round trips", 100)?;
            at_least(r, "mutations caught", 20)
        },
    },
    Criterion {
        number: 4,
        suite: "bicomodule-composition",
        seed: 4,
        cases: 50,
        limit_secs: 30,
        extra: |r| {
            if r.counter("gave up") > 0 {
                Err("some triples never fit the cap".into())
            } else {
                Ok(())
            }
        },
    },
    Criterion { number: 5, suite: "query", seed: 5, cases: 20, limit_secs: 5, extra: |r| at_least(r, "instances", 20) },
    Criterion { number: 6, suite: "migration", seed: 6, cases: 100, limit_secs: 10, extra: |r| at_least(r, "etale", 20) },
    Criterion { number: 7, suite: "duality", seed: 7, cases: 200, limit_secs: 5, extra: |r| at_least(r, "composite pairs", 100) },
    Criterion { number: 8, suite: "finskeleton", seed: 8, cases: 5, limit_secs: 2, extra: |r| at_least(r, "skeletons", 5) },
    Criterion { number: 9, suite: "finitary", seed: 9, cases: 100, limit_secs: 5, extra: none },
    Criterion {
        number: 10,
        suite: "aggregation-coherence",
        seed: 10,
        cases: 200,
        limit_secs: 5,
        extra: |r| at_least(r, "empty fibers", 1),
    },
    Criterion { number: 11, suite: "fin-module", seed: 11, cases: 2, limit_secs: 2, extra: |r| at_least(r, "monoids", 2) },
];

fn main() {
    let cfg = WorkspaceConfig::default();
    let mut out = std::io::stdout().lock();
    let mut failed = 0;
    for c in CRITERIA {
        let start = Instant::now();
        let verdict = match run_suite(c.suite, c.seed, Some(c.cases), &cfg) {
            Err(e) => Err(e.to_string()),
            Ok(r) if !r.passed() => Err(r.render_table().trim_end().replace('\n', "; ")),
            Ok(r) => (c.extra)(&r),
        };
        let took = start.elapsed();
        let verdict = verdict.and_then(|()| {
            if took <= Duration::from_secs(c.limit_secs) {
                Ok(())
            } else {
                Err(format!("over the {} s budget", c.limit_secs))
            }
        });
        let line = match &verdict {
            Ok(()) => format!(
                "criterion {:>2} PASS {:<22} {:>3} cases {:>7.3} s / {} s",
                c.number,
                c.suite,
                c.cases,
                took.as_secs_f64(),
                c.limit_secs
            ),
            Err(why) => format!(
                "criterion {:>2} FAIL {:<22} {:>3} cases {:>7.3} s / {} s: {why}",
                c.number,
                c.suite,
                c.cases,
                took.as_secs_f64(),
                c.limit_secs
            ),
        };
        writeln!(out, "{line}").unwrap();
        failed += usize::from(verdict.is_err());
    }

    let r = run_suite("self-test", 1, Some(20), &cfg).expect("self-test runs");
    let caught = r.failures.len() == r.cases && r.failures.iter().all(|f| f.witness.contains("mutated oracle"));
    writeln!(
        out,
        "self-test    {} mutated oracle reported {} of {} cases",
        if caught { "PASS" } else { "FAIL" },
        r.failures.len(),
        r.cases
    )
    .unwrap();
    failed += usize::from(!caught);

    writeln!(out, "acceptance: {} failed", failed).unwrap();
    if failed > 0 {
        std::process::exit(1);
    }
}

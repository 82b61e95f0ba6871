//! Seeded law suites over every module. A run is a pure function of
//! `(suite, seed, cases, config)`. Each case has its own generator, and
//! results from worker threads are merged back in case order.
//!
//! Every comparison goes through [`CaseCtx::agree`]. In self-test mode that
//! oracle is mutated to reject agreement, so a healthy suite must report
//! failures.

use std::collections::BTreeMap;
use std::fmt::{self, Debug, Display};
use std::sync::{Arc, OnceLock};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::Serialize;
use serde_json::json;

use crate::aggregation::{self, CommMonoid, Instance, Schema, Value};
use crate::bicomodule::Bicomodule;
use crate::category::FinCategory;
use crate::comonoid::{category_to_comonoid, comonoid_to_category, full_internal_subcategory};
use crate::config::WorkspaceConfig;
use crate::copresheaf::{self, Copresheaf};
use crate::error::{Error, Result};
use crate::finitary::{classify_finitary, skeleton_fin, skeleton_name, u_k, FinSkeleton};
use crate::functor::CatFunctor;
use crate::io;
use crate::label::{functions, FinLabelSet};
use crate::migrate;
use crate::poly::{enumerate_maps, hom_count, Poly};
use crate::random::{self, BicomoduleBounds, CategoryBounds, Rng};
use crate::span;

/// A suite's name, its default number of cases and a one-line summary.
#[derive(Clone, Copy, Debug)]
pub struct SuiteInfo {
    pub name: &'static str,
    pub default_cases: usize,
    pub about: &'static str,
}

type CaseFn = fn(&mut CaseCtx) -> Result<()>;

const TABLE: &[(SuiteInfo, CaseFn)] = &[
    (SuiteInfo { name: "poly-monoidal", default_cases: 500, about: "hom counts by enumeration; p◁q evaluates as p(q(X))" }, poly_monoidal),
    (SuiteInfo { name: "poly-adjunction", default_cases: 200, about: "closure of ⊗ and coclosure of ◁ by hom counts" }, poly_adjunction),
    (SuiteInfo { name: "comonoid", default_cases: 100, about: "category ↔ comonoid round trip; table mutations are caught" }, comonoid),
    (
        SuiteInfo { name: "bicomodule-composition", default_cases: 50, about: "apply(m◁n, X) ≅ apply(m, apply(n, X))" },
        bicomodule_composition,
    ),
    (SuiteInfo { name: "query", default_cases: 20, about: "duc-query evaluation against nested loops on city → state ← county" }, query),
    (SuiteInfo { name: "migration", default_cases: 100, about: "Δ ⊣ Π and, along etale functors, Σ ⊣ Δ by hom counts" }, migration),
    (SuiteInfo { name: "duality", default_cases: 200, about: "dual∘dual = id; both transposes; dual of composites" }, duality),
    (
        SuiteInfo { name: "finskeleton", default_cases: 5, about: "the Fin skeleton for K = 0..4 against the internal subcategory of u_K" },
        finskeleton,
    ),
    (SuiteInfo { name: "finitary", default_cases: 100, about: "classification tables are functorial and reconstruct X" }, finitary),
    (
        SuiteInfo { name: "aggregation", default_cases: 200, about: "ε and δ laws of aggregation, including empty fibers" },
        aggregation_suite,
    ),
    (SuiteInfo { name: "fin-module", default_cases: 2, about: "monoids as Fin-modules are functorial" }, fin_module),
];

/// The suites in run order. `self-test` runs `poly-monoidal` against the
/// mutated oracle.
pub fn suites() -> Vec<SuiteInfo> {
    let mut v: Vec<SuiteInfo> = TABLE.iter().map(|(i, _)| *i).collect();
    v.push(SuiteInfo { name: "self-test", default_cases: 20, about: "poly-monoidal with a mutated oracle; must report failures" });
    v
}

fn resolve(name: &str) -> Result<(SuiteInfo, CaseFn, bool)> {
    let (name, mutated) = match name {
        "aggregation-coherence" => ("aggregation", false),
        "self-test" => ("poly-monoidal", true),
        n => (n, false),
    };
    TABLE.iter().find(|(i, _)| i.name == name).map(|(i, f)| (*i, *f, mutated)).ok_or_else(|| Error::UnknownSuite(name.to_string()))
}

/// One failing case, with the seed that replays it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseFailure {
    pub case: usize,
    pub seed: u64,
    pub code: String,
    pub law: Option<String>,
    pub location: Option<String>,
    pub witness: String,
}

impl CaseFailure {
    fn from_error(case: usize, seed: u64, e: &Error) -> Self {
        let law = match e {
            Error::LawViolation { law, .. } => Some(law.clone()),
            _ => None,
        };
        CaseFailure {
            case,
            seed,
            code: e.code().to_string(),
            law,
            location: e.location().map(|l| l.to_string()),
            witness: e.witness().map(str::to_string).unwrap_or_else(|| e.to_string()),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LawSuiteReport {
    pub suite: String,
    pub seed: u64,
    pub mutated: bool,
    pub cases: usize,
    pub failures: Vec<CaseFailure>,
    /// Named tallies of sub-checks, e.g. redraws or mutations caught.
    pub counters: BTreeMap<String, u64>,
    /// Wall-clock time; left out of the serialized report so that reports
    /// compare byte for byte.
    #[serde(skip)]
    pub elapsed: Duration,
}

impl LawSuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn counter(&self, key: &str) -> u64 {
        self.counters.get(key).copied().unwrap_or(0)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }

    pub fn render_table(&self) -> String {
        let mut s = format!(
            "suite {}{}: {} cases, {} failures (seed {})\n",
            self.suite,
            if self.mutated { " [mutated oracle]" } else { "" },
            self.cases,
            self.failures.len(),
            self.seed
        );
        for (k, v) in &self.counters {
            s.push_str(&format!("  {k}: {v}\n"));
        }
        for f in &self.failures {
            s.push_str(&format!(
                "  FAIL case {} (case seed {}): {} {} at {}: {}\n",
                f.case,
                f.seed,
                f.code,
                f.law.as_deref().unwrap_or(""),
                f.location.as_deref().unwrap_or("-"),
                f.witness
            ));
        }
        s
    }
}

impl Display for LawSuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_table())
    }
}

/// The seed of case `i`, a splitmix64 mix of the suite seed and the index.
pub fn case_seed(seed: u64, i: usize) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    mix(seed ^ mix(i as u64))
}

/// State built once per run and shared by its cases.
#[derive(Default)]
struct Shared {
    skeletons: [OnceLock<std::result::Result<Arc<FinSkeleton>, Error>>; 5],
}

impl Shared {
    fn skeleton(&self, k: usize) -> Result<Arc<FinSkeleton>> {
        match self.skeletons.get(k) {
            Some(cell) => cell.get_or_init(|| skeleton_fin(k).map(Arc::new)).clone(),
            None => skeleton_fin(k).map(Arc::new),
        }
    }
}

pub struct CaseCtx<'a> {
    pub index: usize,
    pub seed: u64,
    pub rng: Rng,
    pub cfg: &'a WorkspaceConfig,
    mutated: bool,
    shared: &'a Shared,
    counters: BTreeMap<String, u64>,
}

const WITNESS_LIMIT: usize = 400;

fn clip(mut s: String) -> String {
    if s.len() > WITNESS_LIMIT {
        let mut cut = WITNESS_LIMIT;
        while !s.is_char_boundary(cut) {
            cut -= 1;
        }
        s.truncate(cut);
        s.push('…');
    }
    s
}

impl CaseCtx<'_> {
    /// The oracle: `lhs` and `rhs` must be equal.
    pub fn agree<T: PartialEq + Debug>(&self, law: &str, at: impl Display, lhs: T, rhs: T) -> Result<()> {
        let same = lhs == rhs;
        if same != self.mutated {
            return Ok(());
        }
        let witness = if self.mutated { format!("mutated oracle rejects {lhs:?} = {rhs:?}") } else { format!("{lhs:?} ≠ {rhs:?}") };
        Err(Error::law(law, at.to_string(), clip(witness)))
    }

    pub fn holds(&self, law: &str, at: impl Display, cond: bool) -> Result<()> {
        self.agree(law, at, cond, true)
    }

    pub fn count(&mut self, key: &str, n: u64) {
        *self.counters.entry(key.to_string()).or_default() += n;
    }

    fn cap(&self) -> usize {
        self.cfg.cap
    }
}

type CaseResult = (usize, u64, Result<()>, BTreeMap<String, u64>);

fn run_one(f: CaseFn, index: usize, seed: u64, cfg: &WorkspaceConfig, mutated: bool, shared: &Shared) -> CaseResult {
    let mut ctx = CaseCtx { index, seed, rng: random::rng(seed), cfg, mutated, shared, counters: BTreeMap::new() };
    let out = f(&mut ctx);
    (index, seed, out, ctx.counters)
}

/// Runs a suite. `cases = None` uses the suite's default.
pub fn run_suite(name: &str, seed: u64, cases: Option<usize>, cfg: &WorkspaceConfig) -> Result<LawSuiteReport> {
    run_suite_with(name, seed, cases, cfg, false)
}

/// Runs a suite, optionally against the mutated oracle.
pub fn run_suite_with(name: &str, seed: u64, cases: Option<usize>, cfg: &WorkspaceConfig, mutate: bool) -> Result<LawSuiteReport> {
    cfg.validate()?;
    let (info, f, forced) = resolve(name)?;
    let mutated = mutate || forced;
    let n = cases.unwrap_or(if forced { 20 } else { info.default_cases });
    let start = Instant::now();
    let shared = Shared::default();
    let threads = std::thread::available_parallelism().map(|t| t.get()).unwrap_or(1).clamp(1, 8).min(n.max(1));
    let mut results: Vec<CaseResult> = if threads <= 1 {
        (0..n).map(|i| run_one(f, i, case_seed(seed, i), cfg, mutated, &shared)).collect()
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..threads)
                .map(|t| {
                    let shared = &shared;
                    s.spawn(move || {
                        (t..n).step_by(threads).map(|i| run_one(f, i, case_seed(seed, i), cfg, mutated, shared)).collect::<Vec<_>>()
                    })
                })
                .collect();
            handles.into_iter().flat_map(|h| h.join().expect("suite worker panicked")).collect()
        })
    };
    results.sort_by_key(|r| r.0);
    let mut failures = Vec::new();
    let mut counters = BTreeMap::new();
    for (i, s, out, c) in results {
        if let Err(e) = out {
            failures.push(CaseFailure::from_error(i, s, &e));
        }
        for (k, v) in c {
            *counters.entry(k).or_default() += v;
        }
    }
    Ok(LawSuiteReport { suite: name.to_string(), seed, mutated, cases: n, failures, counters, elapsed: start.elapsed() })
}

/// Replays one case from its index and case seed, as printed in a failure.
pub fn replay_case(name: &str, index: usize, seed: u64, cfg: &WorkspaceConfig) -> Result<()> {
    let (_, f, mutated) = resolve(name)?;
    run_one(f, index, seed, cfg, mutated, &Shared::default()).2
}

/// Keeps drawing until `draw` succeeds without hitting a cap, counting the
/// redraws.
fn redraw<T>(ctx: &mut CaseCtx, tries: usize, mut draw: impl FnMut(&mut CaseCtx) -> Result<Option<T>>) -> Result<Option<T>> {
    for _ in 0..tries {
        match draw(ctx) {
            Ok(Some(t)) => return Ok(Some(t)),
            Ok(None) | Err(Error::SizeBlowup { .. }) => ctx.count("redraws", 1),
            Err(e) => return Err(e),
        }
    }
    ctx.count("gave up", 1);
    Ok(None)
}

// ---------------------------------------------------------------------------
// poly-core

/// `|Poly(p, q)|` by walking every function `q[j] -> p[i]`.
fn brute_hom_count(p: &Poly, q: &Poly) -> BigUint {
    let mut total = BigUint::from(1u32);
    for i in 0..p.num_positions() {
        let mut here = 0u64;
        for j in 0..q.num_positions() {
            here += functions(q.arity(j), p.arity(i)).count() as u64;
        }
        total *= BigUint::from(here);
    }
    total
}

/// Largest set the poly suites build element by element; bigger ones are
/// compared by exact cardinality.
const MATERIALIZE: usize = 10_000;

fn poly_monoidal(ctx: &mut CaseCtx) -> Result<()> {
    let p = random::random_poly(&mut ctx.rng, 4, 4);
    let q = random::random_poly(&mut ctx.rng, 4, 4);
    let at = format!("p = {p}, q = {q}");
    let count = hom_count(&p, &q);
    ctx.agree("hom count equals enumeration", &at, count.clone(), brute_hom_count(&p, &q))?;
    if count <= BigUint::from(ctx.cap().min(MATERIALIZE)) {
        ctx.agree("hom count equals enumerate_maps", &at, BigUint::from(enumerate_maps(&p, &q, ctx.cap())?.len()), count)?;
        ctx.count("maps enumerated", 1);
    }
    let pq = p.substitute(&q, ctx.cap())?;
    for n in 0..=3usize {
        let x = FinLabelSet::ordinal(n);
        let outer = p.cardinality(&q.cardinality(&BigUint::from(n)));
        if outer <= BigUint::from(ctx.cap().min(MATERIALIZE)) {
            let lhs = pq.evaluate(&x, ctx.cap())?.len();
            let rhs = p.evaluate(&q.evaluate(&x, ctx.cap())?, ctx.cap())?.len();
            ctx.agree("|(p◁q)(X)| = |p(q(X))|", format!("{at}, |X| = {n}"), lhs, rhs)?;
            ctx.count("evaluated", 1);
        } else {
            ctx.agree("|(p◁q)(X)| = |p(q(X))|", format!("{at}, |X| = {n}"), pq.cardinality(&BigUint::from(n)), outer)?;
            ctx.count("counted", 1);
        }
    }
    Ok(())
}

fn poly_adjunction(ctx: &mut CaseCtx) -> Result<()> {
    let found = redraw(ctx, 20, |ctx| {
        let p = random::random_poly(&mut ctx.rng, 3, 3);
        let q = random::random_poly(&mut ctx.rng, 3, 3);
        let r = random::random_poly(&mut ctx.rng, 3, 3);
        let cap = ctx.cap();
        let at = format!("p = {p}, q = {q}, r = {r}");
        let closure = (hom_count(&p.tensor(&q), &r), hom_count(&p, &q.internal_hom(&r, cap)?));
        let coclosure = (hom_count(&p, &r.substitute(&q, cap)?), hom_count(&p.coclosure(&q, cap)?, &r));
        Ok(Some((at, closure, coclosure, p, q, r)))
    })?;
    let Some((at, closure, coclosure, p, q, r)) = found else { return Ok(()) };
    ctx.agree("|Poly(p⊗q, r)| = |Poly(p, [q, r])|", &at, closure.0.clone(), closure.1)?;
    ctx.agree("|Poly(p, r◁q)| = |Poly([p/q], r)|", &at, coclosure.0.clone(), coclosure.1)?;
    if closure.0 <= BigUint::from(ctx.cap().min(MATERIALIZE)) {
        ctx.agree(
            "closure by enumeration",
            &at,
            enumerate_maps(&p.tensor(&q), &r, ctx.cap())?.len(),
            enumerate_maps(&p, &q.internal_hom(&r, ctx.cap())?, ctx.cap())?.len(),
        )?;
        ctx.count("closure enumerated", 1);
    }
    if coclosure.0 <= BigUint::from(ctx.cap().min(MATERIALIZE)) {
        let rq = r.substitute(&q, ctx.cap())?;
        ctx.agree(
            "coclosure by enumeration",
            &at,
            enumerate_maps(&p, &rq, ctx.cap())?.len(),
            enumerate_maps(&p.coclosure(&q, ctx.cap())?, &r, ctx.cap())?.len(),
        )?;
        ctx.count("coclosure enumerated", 1);
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// cat-comonoid

fn comonoid(ctx: &mut CaseCtx) -> Result<()> {
    let c = random::random_category(&mut ctx.rng, CategoryBounds { max_objects: 6, max_morphisms: 40 });
    let m = category_to_comonoid(&c)?;
    m.check_laws()?;
    let back = comonoid_to_category(&m)?;
    ctx.holds(
        "category → comonoid → category is the identity",
        format!("{} objects, {} morphisms", c.num_objects(), c.num_morphisms()),
        back == c,
    )?;
    ctx.count("round trips", 1);

    let mut pairs: Vec<(usize, usize)> = (0..c.num_morphisms())
        .filter(|&f| !c.is_identity(f))
        .flat_map(|f| c.out(c.cod(f)).iter().filter(|&&g| !c.is_identity(g)).map(move |&g| (f, g)))
        .collect();
    pairs.shuffle(&mut ctx.rng);
    let mut done = 0;
    for (f, g) in pairs {
        if done == 2 {
            break;
        }
        let h = c.compose(f, g);
        let others: Vec<usize> = c.hom(c.dom(f), c.cod(g)).into_iter().filter(|&k| k != h).collect();
        let Some(&k) = others.choose(&mut ctx.rng) else { continue };
        let bad = c.with_composite(f, g, k);
        if bad.validate().is_ok() {
            continue;
        }
        done += 1;
        ctx.count("mutations", 1);
        let caught = category_to_comonoid(&bad)?.check_laws().is_err();
        ctx.holds("mutated composition is caught by the comonoid laws", format!("{};{} := {}", c.name(f), c.name(g), c.name(k)), caught)?;
        ctx.count("mutations caught", 1);
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// bicomodule-query

fn bicomodule_composition(ctx: &mut CaseCtx) -> Result<()> {
    let bounds = CategoryBounds { max_objects: 4, max_morphisms: 12 };
    let b = BicomoduleBounds { max_positions: 2, max_pattern: 4 };
    let inner_cap = ctx.cap().min(2000);
    let found = redraw(ctx, 30, |ctx| {
        let c = Arc::new(random::random_category(&mut ctx.rng, bounds));
        let d = Arc::new(random::random_category(&mut ctx.rng, bounds));
        let e = Arc::new(random::random_category(&mut ctx.rng, bounds));
        let m = random::random_bicomodule(&mut ctx.rng, &c, &d, b);
        let n = random::random_bicomodule(&mut ctx.rng, &d, &e, b);
        let x = random::random_copresheaf(&mut ctx.rng, &e, 5);
        let lhs = m.apply(&n.apply(&x, inner_cap)?, inner_cap)?;
        let mn = m.compose(&n, ctx.cap())?;
        let rhs = mn.apply(&x, ctx.cap())?;
        Ok(Some((lhs, rhs, mn)))
    })?;
    let Some((lhs, rhs, mn)) = found else { return Ok(()) };
    mn.validate()?;
    ctx.count("triples", 1);
    ctx.agree(
        "table sizes of m(n(X)) and (m◁n)(X)",
        "copresheaf",
        lhs.all_rows().iter().map(FinLabelSet::len).collect::<Vec<_>>(),
        rhs.all_rows().iter().map(FinLabelSet::len).collect(),
    )?;
    ctx.holds("apply(m◁n, X) ≅ apply(m, apply(n, X))", "copresheaf", copresheaf::is_iso(&lhs, &rhs))
}

const CITIES: &str = r#"{
  "objects": ["city", "state", "county"],
  "morphisms": [
    {"name": "in_state", "dom": "city", "cod": "state"},
    {"name": "of_state", "dom": "county", "cod": "state"}
  ]
}"#;

/// `(city ×_state city) + city + state` and the symmetric
/// `(city ×_state city) + (city ×_state county) + (county ×_state county)`.
const CITY_QUERIES: &str = r#"{"patterns": [
  {"name": "pair", "output": "asym", "tables": {"city": ["city1", "city2"], "state": ["state"]},
   "maps": {"in_state": {"city1": "state", "city2": "state"}}},
  {"name": "city", "output": "asym", "tables": {"city": ["city"], "state": ["state"]},
   "maps": {"in_state": {"city": "state"}}},
  {"name": "state", "output": "asym", "tables": {"state": ["state"]}},
  {"name": "cc", "output": "sym", "tables": {"city": ["c1", "c2"], "state": ["s"]},
   "maps": {"in_state": {"c1": "s", "c2": "s"}}},
  {"name": "cy", "output": "sym", "tables": {"city": ["c"], "state": ["s"], "county": ["y"]},
   "maps": {"in_state": {"c": "s"}, "of_state": {"y": "s"}}},
  {"name": "yy", "output": "sym", "tables": {"state": ["s"], "county": ["y1", "y2"]},
   "maps": {"of_state": {"y1": "s", "y2": "s"}}}
]}"#;

/// The cospan schema `city → state ← county`.
pub fn cities_schema() -> FinCategory {
    io::category_from_json(&serde_json::from_str(CITIES).expect("cities json")).expect("cities schema")
}

/// Two duc-queries on the cospan schema, with outputs `asym` and `sym`.
pub fn cities_queries(d: &Arc<FinCategory>) -> Bicomodule {
    io::query_from_json(&serde_json::from_str(CITY_QUERIES).expect("query json"), d).expect("city queries")
}

/// Every assignment of pattern elements to rows that commutes with the
/// maps, by nested loops over all assignments.
fn nested_loop_matches(p: &Copresheaf, x: &Copresheaf) -> Vec<Vec<Vec<usize>>> {
    let c = &p.base;
    let radices: Vec<usize> = p.elements().iter().map(|&(a, _)| x.rows(a).len()).collect();
    let elems = p.elements();
    let mut out = Vec::new();
    'next: for choice in crate::label::Odometer::new(radices) {
        let mut comp: Vec<Vec<usize>> = (0..c.num_objects()).map(|a| vec![0; p.rows(a).len()]).collect();
        for (k, &(a, e)) in elems.iter().enumerate() {
            comp[a][e] = choice[k];
        }
        for f in 0..c.num_morphisms() {
            for e in 0..p.rows(c.dom(f)).len() {
                if comp[c.cod(f)][p.act(f, e)] != x.act(f, comp[c.dom(f)][e]) {
                    continue 'next;
                }
            }
        }
        out.push(comp);
    }
    out
}

fn random_cities_instance(rng: &mut Rng, d: &Arc<FinCategory>, max_rows: usize) -> Copresheaf {
    let n: Vec<usize> = (0..3).map(|_| rng.gen_range(0..=max_rows)).collect();
    let n = [n[0], n[1].max(usize::from(n[0] + n[2] > 0)), n[2]];
    let rows: Vec<FinLabelSet> = ["c", "s", "y"].iter().zip(n).map(|(p, k)| random::labels(p, k)).collect();
    let mut action = vec![Vec::new(); d.num_morphisms()];
    for a in 0..3 {
        action[d.identity(a)] = (0..n[a]).collect();
    }
    action[d.find_morphism("in_state").expect("in_state")] = random::random_function(rng, n[0], n[1]);
    action[d.find_morphism("of_state").expect("of_state")] = random::random_function(rng, n[2], n[1]);
    Copresheaf::new(d.clone(), rows, action).expect("cities instance")
}

fn query(ctx: &mut CaseCtx) -> Result<()> {
    let d = Arc::new(cities_schema());
    let q = cities_queries(&d);
    let x = random_cities_instance(&mut ctx.rng, &d, 6);
    let result = q.apply(&x, ctx.cap())?;
    for a in 0..q.left.num_objects() {
        let mut searched = Vec::new();
        let mut looped = Vec::new();
        for j in 0..q.positions(a).len() {
            let p = q.pattern(a, j);
            searched.extend(copresheaf::homs(p, &x, ctx.cap())?.into_iter().map(|h| (j, h.components)));
            looped.extend(nested_loop_matches(p, &x).into_iter().map(|comp| (j, comp)));
        }
        searched.sort();
        looped.sort();
        let output = q.left.object_label(a);
        ctx.agree("result rows equal nested loops", output, result.rows(a).len(), looped.len())?;
        ctx.agree("backtracking matches equal nested loops", output, searched, looped)?;
    }
    ctx.count("instances", 1);
    Ok(())
}

fn migration(ctx: &mut CaseCtx) -> Result<()> {
    let bounds = CategoryBounds { max_objects: 3, max_morphisms: 8 };
    let use_elements = ctx.index.is_multiple_of(2);
    let found = redraw(ctx, 30, |ctx| {
        let d = Arc::new(random::random_category(&mut ctx.rng, bounds));
        let f: CatFunctor = if use_elements {
            let x0 = random::random_copresheaf(&mut ctx.rng, &d, 2);
            if x0.num_elements() == 0 || x0.num_elements() > 6 {
                return Ok(None);
            }
            x0.category_of_elements().1
        } else {
            let c = Arc::new(random::random_category(&mut ctx.rng, bounds));
            match random::random_functor(&mut ctx.rng, &c, &d) {
                Some(f) => f,
                None => return Ok(None),
            }
        };
        let x = random::random_copresheaf(&mut ctx.rng, &d, 3);
        let y = random::random_copresheaf(&mut ctx.rng, &f.source, 3);
        let cap = ctx.cap();
        let dx = migrate::delta(&f, &x)?;
        let right = (copresheaf::count_homs(&dx, &y, cap)?, copresheaf::count_homs(&x, &migrate::pi(&f, &y, cap)?, cap)?);
        let left = if f.is_etale() {
            Some((copresheaf::count_homs(&migrate::sigma(&f, &y)?, &x, cap)?, copresheaf::count_homs(&y, &dx, cap)?))
        } else {
            None
        };
        Ok(Some((right, left)))
    })?;
    let Some((right, left)) = found else { return Ok(()) };
    ctx.agree("|c-Set(ΔX, Y)| = |d-Set(X, ΠY)|", "functor", right.0, right.1)?;
    if let Some((l, r)) = left {
        ctx.agree("|d-Set(ΣY, X)| = |c-Set(Y, ΔX)|", "etale functor", l, r)?;
        ctx.count("etale", 1);
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// span-duality

fn duality(ctx: &mut CaseCtx) -> Result<()> {
    let s = random::random_span(&mut ctx.rng, "s", 3, 6);
    ctx.agree("dual∘dual = id on spans", "span", span::dual_conjunctive(&span::dual_span(&s)).canonical(), s.canonical())?;
    let m = s.to_bicomodule();
    let back = span::Span::from_bicomodule(&span::dual(&span::dual(&m)?)?)?;
    ctx.agree("dual∘dual = id on span bicomodules", "span", back.canonical(), s.canonical())?;
    let (r1, r2) = span::transpose_routes(&s);
    ctx.agree("transpose through the right adjoint is the leg swap", "span", r1.canonical(), s.transpose().canonical())?;
    ctx.agree("transpose through the left adjoint is the leg swap", "span", r2.canonical(), s.transpose().canonical())?;

    let q = random::random_conjunctive(&mut ctx.rng, 3, 3);
    ctx.agree("dual∘dual = id on conjunctives", "conjunctive", span::dual_span(&span::dual_conjunctive(&q)).canonical(), q.canonical())?;
    let back = span::Conjunctive::from_bicomodule(&span::dual(&span::dual(&q.to_bicomodule())?)?)?;
    ctx.agree("dual∘dual = id on conjunctive bicomodules", "conjunctive", back.canonical(), q.canonical())?;

    let dq = span::dual_conjunctive(&q);
    let (t1, t2) = span::transpose_routes(&dq);
    ctx.agree(
        "both transposes agree on duals of conjunctives",
        "span",
        (t1.canonical(), t2.canonical()),
        (dq.transpose().canonical(), dq.transpose().canonical()),
    )?;

    if ctx.index.is_multiple_of(2) {
        let a = random::labels("a", ctx.rng.gen_range(1..4));
        let b = random::labels("b", ctx.rng.gen_range(1..4));
        let c = random::labels("c", ctx.rng.gen_range(1..4));
        let m = random::random_span_between(&mut ctx.rng, "m", &a, &b, 4);
        let n = random::random_span_between(&mut ctx.rng, "n", &b, &c, 4);
        let r = span::check_comp_dual(&m, &n, ctx.cap().min(20_000));
        ctx.holds("dual of a composite is the composite of duals", "span pair", r.is_ok())?;
        ctx.count("composite pairs", 1);
    }
    Ok(())
}

fn finskeleton(ctx: &mut CaseCtx) -> Result<()> {
    let top = ctx.cfg.fin_k.min(4);
    let k = ctx.index % (top + 1);
    let s = ctx.shared.skeleton(k)?;
    let c = &s.category;
    c.validate()?;
    s.check_functions()?;
    s.monad.check_laws()?;
    for m in 0..=k {
        for n in 0..=k {
            ctx.agree("|hom(M, N)| = N^M", format!("K = {k}, M = {m}, N = {n}"), s.hom(m, n).len(), n.pow(m as u32))?;
        }
    }
    let internal = full_internal_subcategory(&u_k(k), ctx.cap().max(1000))?;
    let same = internal.same_table_under(&c.opposite_direct(), &skeleton_name);
    ctx.agree("equals the opposite of the internal subcategory of u_K", format!("K = {k}"), same, Ok(()))?;
    ctx.count("skeletons", 1);
    Ok(())
}

fn finitary(ctx: &mut CaseCtx) -> Result<()> {
    let skeleton = ctx.shared.skeleton(ctx.cfg.fin_k.min(4))?;
    let c = Arc::new(random::random_category(&mut ctx.rng, CategoryBounds { max_objects: 4, max_morphisms: 16 }));
    let x = random::random_copresheaf(&mut ctx.rng, &c, skeleton.k);
    let cl = classify_finitary(&x, ctx.cfg.fin_k)?;
    cl.check_functorial(&c)?;
    ctx.holds("reconstruction recovers X", "classification", copresheaf::is_iso(&cl.reconstruct(&c)?, &x))?;
    let functor = cl.to_functor(&c, &skeleton)?;
    ctx.holds(
        "pulling the generic family back recovers X",
        "classifying functor",
        copresheaf::is_iso(&skeleton.generic_family().pullback(&functor), &x),
    )?;
    Ok(())
}

// ---------------------------------------------------------------------------
// aggregation

fn aggregation_suite(ctx: &mut CaseCtx) -> Result<()> {
    if ctx.index == 0 {
        let inst = aggregation::salary_example();
        let c = &inst.schema.category;
        let (w, p) = (c.find_morphism("w").expect("w"), c.find_morphism("p").expect("p"));
        let by_dept = aggregation::aggregate_along(&inst, w);
        let refold: Vec<Value> = (0..inst.data.rows(c.cod(p)).len())
            .map(|col| inst.schema.monoids[0].fold((0..by_dept.len()).filter(|&d| inst.data.act(p, d) == col).map(|d| &by_dept[d])))
            .collect();
        ctx.agree(
            "total salary by college = sum of department totals",
            "w;p",
            aggregation::aggregate_along(&inst, c.compose(w, p)),
            refold.clone(),
        )?;
        ctx.agree("total salary by college", "w;p", refold, vec![Value::int(30), Value::int(12)])?;
    }
    let c = Arc::new(random::random_category(&mut ctx.rng, CategoryBounds { max_objects: 4, max_morphisms: 16 }));
    let monoids = (0..c.num_objects())
        .map(|_| match ctx.rng.gen_range(0..3) {
            0 => CommMonoid::int_sum(),
            1 => CommMonoid::max_with_bottom(),
            _ => CommMonoid::multiset(random::labels("t", 3)),
        })
        .collect();
    let schema = Arc::new(Schema::new(c.clone(), monoids)?);
    let inst = Instance::random(&mut ctx.rng, &schema, 4);
    aggregation::check_epsilon_law(&inst)?;
    aggregation::check_coherence(&inst)?;
    aggregation::check_family_delta(&inst)?;
    for a in 0..c.num_objects() {
        ctx.agree(
            "ε: aggregating along an identity returns α",
            c.object_label(a),
            aggregation::aggregate_along(&inst, c.identity(a)),
            inst.attributes[a].clone(),
        )?;
    }
    let f = ctx.rng.gen_range(0..c.num_morphisms());
    let out = c.out(c.cod(f));
    let g = out[ctx.rng.gen_range(0..out.len())];
    let inner = aggregation::aggregate_along(&inst, f);
    let m = &schema.monoids[c.dom(f)];
    let refold: Vec<Value> = (0..inst.data.rows(c.cod(g)).len())
        .map(|z| m.fold((0..inner.len()).filter(|&y| inst.data.act(g, y) == z).map(|y| &inner[y])))
        .collect();
    ctx.agree(
        "δ: aggregating along f;g refolds along g",
        format!("{};{}", c.name(f), c.name(g)),
        aggregation::aggregate_along(&inst, c.compose(f, g)),
        refold,
    )?;
    let empty: u64 = (0..c.num_morphisms())
        .map(|h| {
            let mut hit = vec![false; inst.data.rows(c.cod(h)).len()];
            for e in 0..inst.data.rows(c.dom(h)).len() {
                hit[inst.data.act(h, e)] = true;
            }
            hit.iter().filter(|b| !**b).count() as u64
        })
        .sum();
    ctx.count("empty fibers", empty);
    Ok(())
}

fn fin_module(ctx: &mut CaseCtx) -> Result<()> {
    let skeleton = ctx.shared.skeleton(ctx.cfg.fin_k.min(3))?;
    let (m, values) = if ctx.index == 0 {
        (CommMonoid::int_sum(), vec![Value::int(-1), Value::int(0), Value::int(2)])
    } else {
        let m = random::random_table_monoid(&mut ctx.rng, 4);
        let v = m.elements().expect("finite carrier");
        (m, v)
    };
    let module = aggregation::monoid_as_fin_module(&m, &skeleton);
    module.check_functorial(&values)?;
    if ctx.index == 0 {
        if let Some(f) = skeleton.morphism(2, 1, &[0, 0]) {
            ctx.agree("sum along 2 → 1", "(3, 4)", module.act(f, &[Value::int(3), Value::int(4)])?, vec![Value::int(7)])?;
        }
    }
    let n = skeleton.k;
    for f in skeleton.hom(n, n.min(2)) {
        let tuple: Vec<Value> = (0..n).map(|i| values[i % values.len()].clone()).collect();
        let direct = aggregation::fold_along(&m, skeleton.function(f), skeleton.category.cod(f), &tuple);
        ctx.agree("module action folds fibers", skeleton.category.name(f), module.act(f, &tuple)?, direct)?;
    }
    ctx.count("monoids", 1);
    Ok(())
}

/// Returns the report as JSON with every suite's description, for listings.
pub fn describe_suites() -> serde_json::Value {
    json!(suites().iter().map(|s| json!({"name": s.name, "default_cases": s.default_cases, "about": s.about})).collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_reported() {
        let cfg = WorkspaceConfig::default();
        assert!(matches!(run_suite("nope", 1, Some(1), &cfg), Err(Error::UnknownSuite(_))));
    }

    #[test]
    fn reports_are_deterministic() {
        let cfg = WorkspaceConfig::default();
        let a = run_suite("poly-monoidal", 5, Some(30), &cfg).unwrap();
        let b = run_suite("poly-monoidal", 5, Some(30), &cfg).unwrap();
        assert!(a.passed());
        assert_eq!(a.to_json().to_string(), b.to_json().to_string());
    }

    #[test]
    fn mutated_oracle_fails_with_replayable_seeds() {
        let cfg = WorkspaceConfig::default();
        let r = run_suite("self-test", 3, Some(4), &cfg).unwrap();
        assert_eq!(r.failures.len(), 4);
        let f = &r.failures[2];
        assert_eq!(f.seed, case_seed(3, 2));
        assert!(f.witness.contains("mutated oracle"));
        assert!(replay_case("self-test", f.case, f.seed, &cfg).is_err());
        assert!(replay_case("poly-monoidal", f.case, f.seed, &cfg).is_ok());
    }

    #[test]
    fn nested_loops_match_search_on_a_small_case() {
        let d = Arc::new(cities_schema());
        let q = cities_queries(&d);
        let x = random_cities_instance(&mut random::rng(1), &d, 3);
        for j in 0..q.positions(0).len() {
            let p = q.pattern(0, j);
            assert_eq!(nested_loop_matches(p, &x).len(), copresheaf::count_homs(p, &x, 1000).unwrap());
        }
    }
}

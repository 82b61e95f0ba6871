use std::path::Path;
use std::sync::Arc;

use polyagg::aggregation::{aggregate_along, group_by, Schema};
use polyagg::comonoid::{category_to_comonoid, full_internal_subcategory};
use polyagg::config::WorkspaceConfig;
use polyagg::copresheaf::Copresheaf;
use polyagg::finitary::{skeleton_fin, skeleton_name, u_k};
use polyagg::io::{self, DocumentKind, Source};
use polyagg::laws::{self, run_suite_with, suites};
use polyagg::poly::{hom_count, parse::parse_poly};
use polyagg::span;
use polyagg::{Error, FinCategory, Result};
use serde_json::{json, Map, Value as Json};

use crate::render::{table, Output};
use crate::{CalcOp, Direction};

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn morphism(c: &FinCategory, name: &str) -> Result<usize> {
    c.find_morphism(name).ok_or_else(|| Error::parse("--morphism", format!("unknown morphism `{name}`")))
}

fn copresheaf_text(x: &Copresheaf) -> String {
    let c = &x.base;
    let mut s = String::new();
    for a in 0..c.num_objects() {
        let rows = x.rows(a);
        s.push_str(&format!("{} ({} rows)\n", c.object_label(a), rows.len()));
        for r in rows.iter() {
            s.push_str(&format!("  {r}\n"));
        }
    }
    for f in (0..c.num_morphisms()).filter(|&f| !c.is_identity(f)) {
        let (dom, cod) = (x.rows(c.dom(f)), x.rows(c.cod(f)));
        let pairs: Vec<String> = x.action(f).iter().enumerate().map(|(e, &t)| format!("{} ↦ {}", dom.get(e), cod.get(t))).collect();
        s.push_str(&format!("{}: {}\n", c.name(f), if pairs.is_empty() { "(empty)".to_string() } else { pairs.join(", ") }));
    }
    s
}

fn copresheaf_output(x: &Copresheaf) -> Output {
    Output::new(Json::Object(io::copresheaf_to_json(x)), copresheaf_text(x))
}

fn require_schema(schema: Option<&Path>, kind: DocumentKind) -> Result<String> {
    schema.map(path_str).ok_or_else(|| Error::parse("--schema", format!("a {} file needs --schema", kind.name())))
}

pub fn validate(file: &Path, schema: Option<&Path>, kind: Option<&str>) -> Result<Output> {
    let path = path_str(file);
    let src = Source::read(&path)?;
    let kind = match kind {
        Some(k) => DocumentKind::parse(k).ok_or_else(|| Error::parse("--kind", format!("unknown document kind `{k}`")))?,
        None => io::detect_kind(&src.json()?).ok_or_else(|| Error::parse(path.clone(), "cannot tell what kind of document this is"))?,
    };
    let mut facts: Vec<(String, Json)> = Vec::new();
    match kind {
        DocumentKind::Category => {
            let c = src.load("composition", io::category_from_json)?;
            category_to_comonoid(&c)?.check_laws()?;
            facts.push(("objects".into(), json!(c.num_objects())));
            facts.push(("morphisms".into(), json!(c.num_morphisms())));
            facts.push(("comonoid laws".into(), json!("hold")));
        }
        DocumentKind::Schema => {
            let s = src.load("monoids", io::schema_from_json)?;
            category_to_comonoid(&s.category)?.check_laws()?;
            facts.push(("objects".into(), json!(s.category.num_objects())));
            facts.push(("morphisms".into(), json!(s.category.num_morphisms())));
            let monoids: Map<String, Json> =
                (0..s.category.num_objects()).map(|a| (s.category.object_label(a).to_string(), json!(s.monoids[a].name()))).collect();
            facts.push(("monoids".into(), Json::Object(monoids)));
        }
        DocumentKind::Instance => {
            let schema = Arc::new(io::load_schema(&require_schema(schema, kind)?)?);
            let inst = src.load("attributes", |v| io::instance_from_json(v, &schema))?;
            let sizes: Map<String, Json> = (0..schema.category.num_objects())
                .map(|a| (schema.category.object_label(a).to_string(), json!(inst.data.rows(a).len())))
                .collect();
            facts.push(("rows".into(), Json::Object(sizes)));
        }
        DocumentKind::Query => {
            let d = Arc::new(io::load_category(&require_schema(schema, kind)?)?);
            let q = src.load("patterns", |v| io::query_from_json(v, &d))?;
            q.validate()?;
            let outputs: Map<String, Json> =
                (0..q.left.num_objects()).map(|a| (q.left.object_label(a).to_string(), json!(q.positions(a).len()))).collect();
            facts.push(("patterns per output".into(), Json::Object(outputs)));
        }
        DocumentKind::Functor => {
            let f = src.load("morphisms", io::functor_from_json)?;
            facts.push(("source objects".into(), json!(f.source.num_objects())));
            facts.push(("target objects".into(), json!(f.target.num_objects())));
            facts.push(("etale".into(), json!(f.is_etale())));
        }
        DocumentKind::Span => {
            let s = src.load("maps", io::span_from_json)?;
            facts.push(("apex".into(), json!(s.apex.len())));
        }
        DocumentKind::Conjunctive => {
            let q = src.load("patterns", io::conjunctive_from_json)?;
            facts.push(("left".into(), json!(q.left.len())));
            facts.push(("right".into(), json!(q.right.len())));
        }
        DocumentKind::Bridge => {
            src.load("maps", io::bridge_from_json)?;
        }
    }
    let mut text = format!("{path}: valid {}\n", kind.name());
    for (k, v) in &facts {
        text.push_str(&format!("  {k}: {}\n", if let Json::String(s) = v { s.clone() } else { v.to_string() }));
    }
    let mut doc = Map::new();
    doc.insert("file".into(), json!(path));
    doc.insert("kind".into(), json!(kind.name()));
    doc.insert("valid".into(), json!(true));
    doc.extend(facts);
    Ok(Output::new(Json::Object(doc), text))
}

pub fn query(schema: &Path, instance: &Path, q: &Path, cfg: &WorkspaceConfig) -> Result<Output> {
    let d = Arc::new(io::load_category(&path_str(schema))?);
    let x = io::load_copresheaf(&path_str(instance), &d)?;
    let q = io::load_query(&path_str(q), &d)?;
    let result = q.apply(&x, cfg.cap)?;
    let mut doc = Map::new();
    let mut text = String::new();
    for a in 0..q.left.num_objects() {
        let out = q.left.object_label(a);
        let rows = result.rows(a);
        doc.insert(out.to_string(), json!(rows.labels()));
        text.push_str(&format!("{out} ({} rows)\n", rows.len()));
        for r in rows.iter() {
            text.push_str(&format!("  {r}\n"));
        }
    }
    Ok(Output::new(json!({ "outputs": doc }), text))
}

pub fn migrate(functor: &Path, instance: &Path, direction: Direction, cfg: &WorkspaceConfig) -> Result<Output> {
    let f = io::load_functor(&path_str(functor))?;
    let path = path_str(instance);
    let out = match direction {
        Direction::Delta => polyagg::migrate::delta(&f, &io::load_copresheaf(&path, &f.target)?)?,
        Direction::Sigma => polyagg::migrate::sigma(&f, &io::load_copresheaf(&path, &f.source)?)?,
        Direction::Pi => polyagg::migrate::pi(&f, &io::load_copresheaf(&path, &f.source)?, cfg.cap)?,
    };
    Ok(copresheaf_output(&out))
}

fn load_schema_and_instance(schema: &Path, instance: &Path) -> Result<polyagg::aggregation::Instance> {
    let schema: Arc<Schema> = Arc::new(io::load_schema(&path_str(schema))?);
    io::load_instance(&path_str(instance), &schema)
}

pub fn aggregate(schema: &Path, instance: &Path, name: &str) -> Result<Output> {
    let inst = load_schema_and_instance(schema, instance)?;
    let c = &inst.schema.category;
    let f = morphism(c, name)?;
    let m = &inst.schema.monoids[c.dom(f)];
    let values = aggregate_along(&inst, f);
    let cod = inst.data.rows(c.cod(f));
    let results: Map<String, Json> = values.iter().enumerate().map(|(y, v)| (cod.get(y).to_string(), io::value_to_json(m, v))).collect();
    let rows: Vec<Vec<String>> = values.iter().enumerate().map(|(y, v)| vec![cod.get(y).to_string(), v.to_string()]).collect();
    let text = format!(
        "aggregate of {} along {name}: {} → {} under {}\n{}",
        c.object_label(c.dom(f)),
        c.object_label(c.dom(f)),
        c.object_label(c.cod(f)),
        m.name(),
        table(&[c.object_label(c.cod(f)), "value"], &rows)
    );
    Ok(Output::new(json!({"morphism": name, "monoid": m.name(), "results": results}), text))
}

pub fn groupby(schema: &Path, instance: &Path, name: &str) -> Result<Output> {
    let inst = load_schema_and_instance(schema, instance)?;
    let c = &inst.schema.category;
    let f = morphism(c, name)?;
    let groups = group_by(&inst.data, f);
    let cod = inst.data.rows(c.cod(f));
    let doc: Map<String, Json> = groups
        .iter()
        .enumerate()
        .map(|(y, g)| (cod.get(y).to_string(), Json::Object(g.iter().map(|(l, n)| (l.to_string(), json!(n))).collect())))
        .collect();
    let rows: Vec<Vec<String>> =
        groups.iter().enumerate().map(|(y, g)| vec![cod.get(y).to_string(), g.len().to_string(), g.to_string()]).collect();
    let text = table(&[c.object_label(c.cod(f)), "count", "group"], &rows);
    Ok(Output::new(json!({"morphism": name, "groups": doc}), text))
}

pub fn dual(file: &Path) -> Result<Output> {
    let path = path_str(file);
    let src = Source::read(&path)?;
    match io::detect_kind(&src.json()?) {
        Some(DocumentKind::Span) => {
            let q = span::dual_span(&src.load("maps", io::span_from_json)?);
            let v = io::conjunctive_to_json(&q);
            Ok(Output::new(v.clone(), format!("dual (conjunctive)\n{}", io::to_pretty(&v))))
        }
        Some(DocumentKind::Conjunctive) => {
            let s = span::dual_conjunctive(&src.load("patterns", io::conjunctive_from_json)?);
            let v = io::span_to_json(&s);
            Ok(Output::new(v.clone(), format!("dual (span)\n{}", io::to_pretty(&v))))
        }
        _ => Err(Error::WrongShape(format!("{path}: only spans and conjunctive bicomodules have duals here"))),
    }
}

pub fn transpose(file: &Path) -> Result<Output> {
    let path = path_str(file);
    let s = Source::read(&path)?.load("maps", io::span_from_json)?;
    let t = span::transpose(&s)?;
    let v = io::span_to_json(&t);
    Ok(Output::new(v.clone(), format!("transpose\n{}", io::to_pretty(&v))))
}

pub fn finskeleton(k: usize, cfg: &WorkspaceConfig) -> Result<Output> {
    let s = skeleton_fin(k)?;
    let c = &s.category;
    c.validate()?;
    s.check_functions()?;
    s.monad.check_laws()?;
    let internal = full_internal_subcategory(&u_k(k), cfg.cap)?;
    internal
        .same_table_under(&c.opposite_direct(), &skeleton_name)
        .map_err(|w| Error::law("equals the opposite of the internal subcategory of u_K", format!("K = {k}"), w))?;
    let hom: Vec<Vec<usize>> = (0..=k).map(|m| (0..=k).map(|n| s.hom(m, n).len()).collect()).collect();
    let mut header = vec!["M \\ N".to_string()];
    header.extend((0..=k).map(|n| n.to_string()));
    let rows: Vec<Vec<String>> =
        hom.iter().enumerate().map(|(m, r)| std::iter::once(m.to_string()).chain(r.iter().map(usize::to_string)).collect()).collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let text = format!(
        "Fin skeleton, K = {k}: {} objects, {} morphisms\n|hom(M, N)|\n{}associative and unital; equals the opposite of the internal subcategory of u_{k}\n",
        c.num_objects(),
        c.num_morphisms(),
        table(&header, &rows)
    );
    let doc = json!({
        "k": k,
        "objects": c.num_objects(),
        "morphisms": c.num_morphisms(),
        "hom": hom,
        "checks": ["associative", "unital", "functions compose", "monad laws", "opposite of internal subcategory of u_K"],
    });
    Ok(Output::new(doc, text))
}

pub fn calc(op: CalcOp, cfg: &WorkspaceConfig) -> Result<Output> {
    let parse = |s: &str| parse_poly(s);
    let (name, result) = match op {
        CalcOp::Compose { p, q } => ("compose", parse(&p)?.substitute(&parse(&q)?, cfg.cap)?.to_sum_string()),
        CalcOp::Tensor { p, q } => ("tensor", parse(&p)?.tensor(&parse(&q)?).to_sum_string()),
        CalcOp::Sum { p, q } => ("sum", parse(&p)?.add(&parse(&q)?).to_sum_string()),
        CalcOp::Product { p, q } => ("product", parse(&p)?.mul(&parse(&q)?).to_sum_string()),
        CalcOp::Homcount { p, q } => ("homcount", hom_count(&parse(&p)?, &parse(&q)?).to_string()),
        CalcOp::Hom { p, q } => ("hom", parse(&p)?.internal_hom(&parse(&q)?, cfg.cap)?.to_sum_string()),
        CalcOp::Coclosure { p, q } => ("coclosure", parse(&p)?.coclosure(&parse(&q)?, cfg.cap)?.to_sum_string()),
        CalcOp::Eval { p, n } => ("eval", parse(&p)?.cardinality(&n.into()).to_string()),
    };
    Ok(Output::new(json!({"op": name, "result": result}), result))
}

pub fn list_suites() -> Output {
    let rows: Vec<Vec<String>> =
        suites().iter().map(|s| vec![s.name.to_string(), s.default_cases.to_string(), s.about.to_string()]).collect();
    Output::new(laws::describe_suites(), table(&["suite", "cases", "checks"], &rows))
}

pub fn laws(name: &str, cases: Option<usize>, self_test: bool, cfg: &WorkspaceConfig) -> Result<Output> {
    let names: Vec<String> = if name == "all" {
        suites().into_iter().filter(|s| s.name != "self-test").map(|s| s.name.to_string()).collect()
    } else {
        vec![name.to_string()]
    };
    let mut reports = Vec::new();
    for n in &names {
        reports.push(run_suite_with(n, cfg.seed, cases, cfg, self_test)?);
    }
    let failed = reports.iter().any(|r| !r.passed());
    let text: String = reports.iter().map(|r| r.render_table()).collect();
    let doc = if reports.len() == 1 {
        reports[0].to_json()
    } else {
        json!({"passed": !failed, "suites": reports.iter().map(|r| r.to_json()).collect::<Vec<_>>()})
    };
    let mut out = Output::new(doc, text);
    out.failed = failed;
    out.notes = reports.iter().map(|r| format!("{}: {:.3} s", r.suite, r.elapsed.as_secs_f64())).collect();
    Ok(out)
}

pub fn replay_case(name: &str, case: usize, seed: u64, cfg: &WorkspaceConfig) -> Result<Output> {
    laws::replay_case(name, case, seed, cfg)?;
    Ok(Output::new(
        json!({"suite": name, "case": case, "seed": seed, "passed": true}),
        format!("{name} case {case} (case seed {seed}) passes"),
    ))
}

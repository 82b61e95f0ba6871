//! Browser bindings. Every export takes and returns strings holding JSON,
//! either `{"ok": ...}` or `{"error": {"code", "location", "message", "witness"}}`,
//! so the same functions run unchanged in native tests.

use std::sync::Arc;

use polyagg::aggregation::{aggregate_along, group_by};
use polyagg::finitary::skeleton_fin;
use polyagg::io;
use polyagg::poly::{hom_count, parse::parse_poly, DEFAULT_CAP};
use polyagg::{Error, Result};
use serde_json::{json, Map, Value as Json};
use wasm_bindgen::prelude::*;

/// Largest K the page offers; bigger skeletons take too long in a tab.
pub const MAX_PAGE_K: usize = 4;

pub const SAMPLE_SCHEMA: &str = include_str!("../../../data/departments.schema.json");
pub const SAMPLE_INSTANCE: &str = include_str!("../../../data/departments.instance.json");

fn respond(r: Result<Json>) -> String {
    let v = match r {
        Ok(v) => json!({ "ok": v }),
        Err(e) => json!({
            "error": {
                "code": e.code(),
                "location": e.location().map(|l| l.to_string()),
                "message": e.to_string(),
                "witness": e.witness(),
            }
        }),
    };
    v.to_string()
}

fn calc_inner(op: &str, p: &str, q: &str) -> Result<Json> {
    let (p, q) = (parse_poly(p)?, parse_poly(q)?);
    let out = match op {
        "compose" => p.substitute(&q, DEFAULT_CAP)?.to_sum_string(),
        "tensor" => p.tensor(&q).to_sum_string(),
        "sum" => p.add(&q).to_sum_string(),
        "product" => p.mul(&q).to_sum_string(),
        "homcount" => hom_count(&p, &q).to_string(),
        "hom" => p.internal_hom(&q, DEFAULT_CAP)?.to_sum_string(),
        "coclosure" => p.coclosure(&q, DEFAULT_CAP)?.to_sum_string(),
        other => return Err(Error::parse("op", format!("unknown operation `{other}`"))),
    };
    Ok(json!(out))
}

/// `op` is one of compose, tensor, sum, product, homcount, hom, coclosure.
#[wasm_bindgen]
pub fn calc(op: &str, p: &str, q: &str) -> String {
    respond(calc_inner(op, p, q))
}

fn skeleton_inner(k: usize) -> Result<Json> {
    if k > MAX_PAGE_K {
        return Err(Error::blowup(format!("Fin skeleton at K = {k} in the browser"), MAX_PAGE_K));
    }
    let s = skeleton_fin(k)?;
    s.category.validate()?;
    s.monad.check_laws()?;
    let hom: Vec<Vec<usize>> = (0..=k).map(|m| (0..=k).map(|n| s.hom(m, n).len()).collect()).collect();
    Ok(json!({"k": k, "objects": s.category.num_objects(), "morphisms": s.category.num_morphisms(), "hom": hom}))
}

/// `|hom(M, N)|` for `M, N ≤ k`, after checking the category laws.
#[wasm_bindgen]
pub fn fin_skeleton_table(k: usize) -> String {
    respond(skeleton_inner(k))
}

fn aggregate_inner(schema: &str, instance: &str, morphism: &str) -> Result<Json> {
    let schema_src = io::Source { file: Some("schema".into()), text: schema.to_string() };
    let schema = Arc::new(schema_src.load("monoids", io::schema_from_json)?);
    let inst_src = io::Source { file: Some("instance".into()), text: instance.to_string() };
    let inst = inst_src.load("attributes", |v| io::instance_from_json(v, &schema))?;
    let c = &schema.category;
    let f = c.find_morphism(morphism).ok_or_else(|| Error::parse("morphism", format!("unknown morphism `{morphism}`")))?;
    let m = &schema.monoids[c.dom(f)];
    let cod = inst.data.rows(c.cod(f));
    let values: Map<String, Json> =
        aggregate_along(&inst, f).iter().enumerate().map(|(y, v)| (cod.get(y).to_string(), io::value_to_json(m, v))).collect();
    let groups: Map<String, Json> = group_by(&inst.data, f)
        .iter()
        .enumerate()
        .map(|(y, g)| {
            (cod.get(y).to_string(), json!(g.iter().flat_map(|(l, n)| std::iter::repeat_n(l.to_string(), n)).collect::<Vec<_>>()))
        })
        .collect();
    Ok(json!({
        "morphism": morphism,
        "from": c.object_label(c.dom(f)),
        "to": c.object_label(c.cod(f)),
        "monoid": m.name(),
        "groups": groups,
        "values": values,
    }))
}

/// Aggregates the attributes of an instance along a morphism, returning
/// both the groups and their folded values.
#[wasm_bindgen]
pub fn aggregate(schema: &str, instance: &str, morphism: &str) -> String {
    respond(aggregate_inner(schema, instance, morphism))
}

#[wasm_bindgen]
pub fn sample_schema() -> String {
    SAMPLE_SCHEMA.to_string()
}

#[wasm_bindgen]
pub fn sample_instance() -> String {
    SAMPLE_INSTANCE.to_string()
}

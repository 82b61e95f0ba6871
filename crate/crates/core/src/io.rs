//! JSON file formats. Loaders validate everything they build and report
//! errors with the file and line they point at; printers produce documents
//! that load back to an identical value.
//!
//! Formats, by example:
//!
//! ```text
//! category   {"objects": ["a","b"],
//!             "morphisms": [{"name":"f","dom":"a","cod":"b"}],
//!             "identities": {"a":"id_a","b":"id_b"},
//!             "composition": {"f;g":"h"}}
//! schema     category fields + "monoids": {"a": {"kind":"int-sum"}}
//! instance   {"tables": {"a":["r1"]}, "maps": {"f":{"r1":"s1"}},
//!             "attributes": {"a": {"r1": 3}}}
//! query      {"patterns": [{"name":"q","output":"result","tables":…,"maps":…}]}
//! functor    {"source": category, "target": category,
//!             "objects": {"a":"x"}, "morphisms": {"f":"u"}}
//! span       {"tables": {"left":…,"apex":…,"right":…}, "maps": {"f":…,"g":…}}
//! conjunctive {"tables": {"left":…,"right":…}, "patterns": {"a": {"v":"d"}}}
//! bridge     {"tables": {"d":…,"e":…,"b":…,"c":…}, "maps": {"f":…,"g":…,"h":…}}
//! ```
//!
//! Identity entries may be left out of composition tables, instance maps
//! and functors. Composition may also be given as a list of
//! `["f","g","h"]` triples, which the printer uses when a morphism name
//! contains `;` and a key would be ambiguous.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use serde_json::{json, Map, Value as Json};

use crate::aggregation::{CommMonoid, Instance, MonoidKind, Multiset, Schema, Value};
use crate::bicomodule::Bicomodule;
use crate::category::{FinCategory, Morphism};
use crate::copresheaf::Copresheaf;
use crate::error::{Error, Location, Result};
use crate::functor::CatFunctor;
use crate::label::FinLabelSet;
use crate::span::{BridgeDiagram, Conjunctive, Span};

/// The text of an input document, kept for locating errors.
#[derive(Clone, Debug)]
pub struct Source {
    pub file: Option<String>,
    pub text: String,
}

impl Source {
    pub fn read(path: &str) -> Result<Source> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io { path: path.to_string(), message: e.to_string() })?;
        Ok(Source { file: Some(path.to_string()), text })
    }

    pub fn from_text(text: impl Into<String>) -> Source {
        Source { file: None, text: text.into() }
    }

    pub fn json(&self) -> Result<Json> {
        serde_json::from_str(&self.text).map_err(|e| Error::Parse {
            location: Location { file: self.file.clone(), path: "json".into(), line: Some(e.line()) },
            message: e.to_string(),
        })
    }

    /// First line holding `"needle"` at or after the section key `"after"`.
    fn line_of(&self, needle: &str, after: &str) -> Option<usize> {
        let start = self.text.find(&format!("\"{after}\"")).unwrap_or(0);
        let at = self.text[start..].find(&format!("\"{needle}\""))? + start;
        Some(self.text[..at].matches('\n').count() + 1)
    }

    /// Fills in the file and, when the text shows where, the line.
    pub fn locate(&self, mut e: Error, section: &str) -> Error {
        if let Some(loc) = e.location_mut() {
            loc.file = self.file.clone();
            if loc.line.is_none() {
                let last = loc.path.rsplit(' ').next().unwrap_or("").to_string();
                loc.line = self
                    .line_of(&loc.path, section)
                    .or_else(|| self.line_of(&last, section))
                    .or_else(|| self.line_of(section, section))
                    .or_else(|| last.split(';').find_map(|part| self.line_of(part, section)));
            }
        }
        e
    }

    pub fn load<T>(&self, section: &str, build: impl FnOnce(&Json) -> Result<T>) -> Result<T> {
        let v = self.json()?;
        build(&v).map_err(|e| self.locate(e, section))
    }
}

pub fn to_pretty(v: &Json) -> String {
    serde_json::to_string_pretty(v).expect("json values always print")
}

// ---------------------------------------------------------------------------
// small readers

fn obj<'a>(v: &'a Json, what: &str) -> Result<&'a Map<String, Json>> {
    v.as_object().ok_or_else(|| Error::parse(what, "expected an object"))
}

fn field<'a>(m: &'a Map<String, Json>, key: &str, what: &str) -> Result<&'a Json> {
    m.get(key).ok_or_else(|| Error::parse(what, format!("missing field `{key}`")))
}

fn string<'a>(v: &'a Json, what: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| Error::parse(what, "expected a string"))
}

fn label_set(v: &Json, what: &str) -> Result<FinLabelSet> {
    let items = v.as_array().ok_or_else(|| Error::parse(what, "expected a list of labels"))?;
    let labels = items.iter().map(|x| string(x, what).map(str::to_string)).collect::<Result<Vec<_>>>()?;
    FinLabelSet::new(labels).map_err(|e| match e {
        Error::Parse { message, .. } => Error::parse(what, message),
        e => e,
    })
}

fn index_in(set: &FinLabelSet, label: &str, what: &str) -> Result<usize> {
    set.index_of(label).ok_or_else(|| Error::parse(format!("{what} {label}"), format!("unknown {what} `{label}`")))
}

/// A total function between label sets given as `{x: y}`.
fn function(v: &Json, dom: &FinLabelSet, cod: &FinLabelSet, what: &str) -> Result<Vec<usize>> {
    let m = obj(v, what)?;
    let mut out = vec![usize::MAX; dom.len()];
    for (x, y) in m {
        let i = dom.index_of(x).ok_or_else(|| Error::parse(format!("{what} {x}"), format!("`{x}` is not in the domain")))?;
        out[i] = cod
            .index_of(string(y, what)?)
            .ok_or_else(|| Error::mismatch(format!("{what} {x}"), format!("`{}` is not in the codomain", string(y, what).unwrap_or(""))))?;
    }
    if let Some(i) = out.iter().position(|&v| v == usize::MAX) {
        return Err(Error::mismatch(format!("{what} {}", dom.get(i)), "no value given"));
    }
    Ok(out)
}

fn function_json(f: &[usize], dom: &FinLabelSet, cod: &FinLabelSet) -> Json {
    Json::Object(f.iter().enumerate().map(|(x, &y)| (dom.get(x).to_string(), json!(cod.get(y)))).collect())
}

fn labels_json(set: &FinLabelSet) -> Json {
    json!(set.labels())
}

// ---------------------------------------------------------------------------
// categories

pub fn category_from_json(v: &Json) -> Result<FinCategory> {
    let m = obj(v, "category")?;
    let objects = label_set(field(m, "objects", "category")?, "objects")?;
    let mut morphisms = Vec::new();
    let mut names = HashMap::new();
    if let Some(list) = m.get("morphisms") {
        for item in list.as_array().ok_or_else(|| Error::parse("morphisms", "expected a list"))? {
            let e = obj(item, "morphisms")?;
            let name = string(field(e, "name", "morphism")?, "morphism name")?.to_string();
            let dom = index_in(&objects, string(field(e, "dom", &name)?, &name)?, "object")?;
            let cod = index_in(&objects, string(field(e, "cod", &name)?, &name)?, "object")?;
            if names.insert(name.clone(), morphisms.len()).is_some() {
                return Err(Error::parse(format!("morphism {name}"), "duplicate morphism name"));
            }
            morphisms.push(Morphism { name, dom, cod });
        }
    }
    let given = match m.get("identities") {
        Some(v) => obj(v, "identities")?.clone(),
        None => Map::new(),
    };
    for key in given.keys() {
        index_in(&objects, key, "object")?;
    }
    let mut identities = Vec::with_capacity(objects.len());
    for (a, label) in objects.iter().enumerate() {
        let id = match given.get(label) {
            Some(n) => {
                let n = string(n, "identities")?;
                *names.get(n).ok_or_else(|| Error::parse(format!("identity {n}"), format!("unknown morphism `{n}`")))?
            }
            None => {
                let n = format!("id_{label}");
                match names.get(&n) {
                    Some(&i) => i,
                    None => {
                        names.insert(n.clone(), morphisms.len());
                        morphisms.push(Morphism { name: n, dom: a, cod: a });
                        morphisms.len() - 1
                    }
                }
            }
        };
        identities.push(id);
    }
    let mut table: HashMap<(usize, usize), usize> = HashMap::new();
    let lookup = |n: &str| names.get(n).copied().ok_or_else(|| Error::parse(format!("composition {n}"), format!("unknown morphism `{n}`")));
    match m.get("composition") {
        None => {}
        Some(Json::Object(entries)) => {
            for (key, h) in entries {
                let (f, g) = split_pair(key, &names, &morphisms)?;
                table.insert((f, g), lookup(string(h, key)?)?);
            }
        }
        Some(Json::Array(entries)) => {
            for e in entries {
                let t = e.as_array().filter(|t| t.len() == 3).ok_or_else(|| Error::parse("composition", "expected [f, g, h] triples"))?;
                let (f, g, h) = (
                    lookup(string(&t[0], "composition")?)?,
                    lookup(string(&t[1], "composition")?)?,
                    lookup(string(&t[2], "composition")?)?,
                );
                table.insert((f, g), h);
            }
        }
        Some(_) => return Err(Error::parse("composition", "expected an object or a list of triples")),
    }
    for &(f, g) in table.keys() {
        if morphisms[f].cod != morphisms[g].dom {
            return Err(Error::mismatch(
                format!("{};{}", morphisms[f].name, morphisms[g].name),
                "composition entry for a pair that is not composable",
            ));
        }
    }
    let is_id: Vec<bool> = (0..morphisms.len()).map(|f| identities.contains(&f)).collect();
    FinCategory::new(objects, morphisms, identities, |f, g| {
        table.get(&(f, g)).copied().or(if is_id[f] {
            Some(g)
        } else if is_id[g] {
            Some(f)
        } else {
            None
        })
    })
}

/// Splits `f;g` into two morphism names; names may themselves contain `;`.
fn split_pair(key: &str, names: &HashMap<String, usize>, morphisms: &[Morphism]) -> Result<(usize, usize)> {
    let splits: Vec<(usize, usize)> =
        key.match_indices(';').filter_map(|(i, _)| Some((*names.get(&key[..i])?, *names.get(&key[i + 1..])?))).collect();
    match splits.as_slice() {
        [one] => Ok(*one),
        [] => Err(Error::parse(format!("composition {key}"), "key is not a pair `f;g` of morphisms")),
        many => {
            let typed: Vec<_> = many.iter().filter(|(f, g)| morphisms[*f].cod == morphisms[*g].dom).collect();
            match typed.as_slice() {
                [one] => Ok(**one),
                _ => Err(Error::parse(format!("composition {key}"), "ambiguous key; use the list-of-triples form")),
            }
        }
    }
}

pub fn category_to_json(c: &FinCategory) -> Json {
    let morphisms: Vec<Json> =
        c.morphisms().iter().map(|m| json!({"name": m.name, "dom": c.object_label(m.dom), "cod": c.object_label(m.cod)})).collect();
    let identities: Map<String, Json> =
        (0..c.num_objects()).map(|a| (c.object_label(a).to_string(), json!(c.name(c.identity(a))))).collect();
    let mut pairs = Vec::new();
    for f in 0..c.num_morphisms() {
        for &g in c.out(c.cod(f)) {
            if !c.is_identity(f) && !c.is_identity(g) {
                pairs.push((f, g, c.compose(f, g)));
            }
        }
    }
    let ambiguous = c.morphisms().iter().any(|m| m.name.contains(';'));
    let composition = if ambiguous {
        Json::Array(pairs.iter().map(|&(f, g, h)| json!([c.name(f), c.name(g), c.name(h)])).collect())
    } else {
        Json::Object(pairs.iter().map(|&(f, g, h)| (format!("{};{}", c.name(f), c.name(g)), json!(c.name(h)))).collect())
    };
    json!({
        "objects": labels_json(c.objects()),
        "morphisms": morphisms,
        "identities": identities,
        "composition": composition,
    })
}

pub fn load_category(path: &str) -> Result<FinCategory> {
    Source::read(path)?.load("composition", category_from_json)
}

// ---------------------------------------------------------------------------
// copresheaves and instances

pub fn copresheaf_from_json(v: &Json, c: &Arc<FinCategory>) -> Result<Copresheaf> {
    let m = obj(v, "instance")?;
    let empty = Map::new();
    let tables = match m.get("tables") {
        Some(t) => obj(t, "tables")?,
        None => &empty,
    };
    for key in tables.keys() {
        index_in(c.objects(), key, "object")?;
    }
    let rows = (0..c.num_objects())
        .map(|a| match tables.get(c.object_label(a)) {
            Some(list) => label_set(list, &format!("table {}", c.object_label(a))),
            None => Ok(FinLabelSet::default()),
        })
        .collect::<Result<Vec<_>>>()?;
    let maps = match m.get("maps") {
        Some(t) => obj(t, "maps")?,
        None => &empty,
    };
    let mut action: Vec<Option<Vec<usize>>> = vec![None; c.num_morphisms()];
    for (name, map) in maps {
        let f = c.find_morphism(name).ok_or_else(|| Error::parse(format!("map {name}"), format!("unknown morphism `{name}`")))?;
        action[f] = Some(function(map, &rows[c.dom(f)], &rows[c.cod(f)], &format!("map {name}"))?);
    }
    for a in 0..c.num_objects() {
        let id = c.identity(a);
        action[id].get_or_insert_with(|| (0..rows[a].len()).collect());
    }
    // So may maps out of empty tables.
    for f in 0..c.num_morphisms() {
        if rows[c.dom(f)].is_empty() {
            action[f].get_or_insert_with(Vec::new);
        }
    }
    // Composites of given maps may be left out.
    let mut changed = true;
    while changed {
        changed = false;
        for f in 0..c.num_morphisms() {
            let Some(af) = action[f].clone() else { continue };
            for &g in c.out(c.cod(f)) {
                let h = c.compose(f, g);
                if action[h].is_none() {
                    if let Some(ag) = &action[g] {
                        action[h] = Some(af.iter().map(|&x| ag[x]).collect());
                        changed = true;
                    }
                }
            }
        }
    }
    let action = action
        .into_iter()
        .enumerate()
        .map(|(f, a)| a.ok_or_else(|| Error::mismatch(format!("map {}", c.name(f)), "no map given for this morphism")))
        .collect::<Result<Vec<_>>>()?;
    Copresheaf::new(c.clone(), rows, action)
}

/// Tables and the maps of every non-identity morphism.
pub fn copresheaf_to_json(x: &Copresheaf) -> Map<String, Json> {
    let c = &x.base;
    let tables: Map<String, Json> = (0..c.num_objects()).map(|a| (c.object_label(a).to_string(), labels_json(x.rows(a)))).collect();
    let maps: Map<String, Json> = (0..c.num_morphisms())
        .filter(|&f| !c.is_identity(f))
        .map(|f| (c.name(f).to_string(), function_json(x.action(f), x.rows(c.dom(f)), x.rows(c.cod(f)))))
        .collect();
    let mut m = Map::new();
    m.insert("tables".into(), Json::Object(tables));
    m.insert("maps".into(), Json::Object(maps));
    m
}

pub fn load_copresheaf(path: &str, c: &Arc<FinCategory>) -> Result<Copresheaf> {
    Source::read(path)?.load("maps", |v| copresheaf_from_json(v, c))
}

pub fn value_from_json(m: &CommMonoid, v: &Json, at: &str) -> Result<Value> {
    let bad = || Error::mismatch(at, format!("`{v}` is not an element of {}", m.name()));
    let int = |v: &Json| -> Option<BigInt> {
        match v {
            Json::Number(n) => n.as_i64().map(BigInt::from).or_else(|| n.as_u64().map(BigInt::from)),
            Json::String(s) => s.parse().ok(),
            _ => None,
        }
    };
    let value = match (m.kind(), v) {
        (MonoidKind::IntSum | MonoidKind::IntProduct, _) => Value::Int(int(v).ok_or_else(bad)?),
        (MonoidKind::MaxWithBottom, Json::String(s)) if s == "bottom" => Value::Bottom,
        (MonoidKind::MinWithTop, Json::String(s)) if s == "top" => Value::Top,
        (MonoidKind::MaxWithBottom | MonoidKind::MinWithTop, _) => Value::Int(int(v).ok_or_else(bad)?),
        (MonoidKind::Multiset(_), Json::Array(items)) => {
            let mut bag = Multiset::default();
            for i in items {
                bag.add(i.as_str().ok_or_else(bad)?, 1);
            }
            Value::Bag(bag)
        }
        (MonoidKind::Multiset(_), Json::Object(counts)) => {
            let mut bag = Multiset::default();
            for (l, n) in counts {
                bag.add(l, n.as_u64().ok_or_else(bad)? as usize);
            }
            Value::Bag(bag)
        }
        (MonoidKind::Trivial, Json::String(s)) if s == "*" => Value::Star,
        (MonoidKind::Trivial, Json::Null) => Value::Star,
        (MonoidKind::Table { elements, .. }, Json::String(s)) => Value::Elem(elements.index_of(s).ok_or_else(bad)?),
        _ => return Err(bad()),
    };
    m.check_value(&value, at)?;
    Ok(value)
}

pub fn value_to_json(m: &CommMonoid, v: &Value) -> Json {
    match v {
        Value::Int(n) => match i64::try_from(n) {
            Ok(i) => json!(i),
            Err(_) => json!(n.to_string()),
        },
        Value::Bottom => json!("bottom"),
        Value::Top => json!("top"),
        Value::Bag(bag) => Json::Object(bag.iter().map(|(l, n)| (l.to_string(), json!(n))).collect()),
        Value::Star => json!("*"),
        Value::Elem(_) => json!(m.show(v)),
    }
}

pub fn instance_from_json(v: &Json, schema: &Arc<Schema>) -> Result<Instance> {
    let data = copresheaf_from_json(v, &schema.category)?;
    let c = &schema.category;
    let m = obj(v, "instance")?;
    let empty = Map::new();
    let attrs = match m.get("attributes") {
        Some(a) => obj(a, "attributes")?,
        None => &empty,
    };
    for key in attrs.keys() {
        index_in(c.objects(), key, "object")?;
    }
    let mut attributes = Vec::with_capacity(c.num_objects());
    for a in 0..c.num_objects() {
        let label = c.object_label(a);
        let monoid = &schema.monoids[a];
        let given = match attrs.get(label) {
            Some(col) => Some(obj(col, &format!("attributes {label}"))?),
            None => None,
        };
        if let Some(col) = given {
            if let Some(row) = col.keys().find(|r| !data.rows(a).contains(r)) {
                return Err(Error::parse(format!("attributes {row}"), format!("`{row}` is not a row of {label}")));
            }
        }
        let mut column = Vec::with_capacity(data.rows(a).len());
        for row in data.rows(a).iter() {
            let at = format!("attributes.{label}.{row}");
            match given.and_then(|col| col.get(row)) {
                Some(v) => column.push(value_from_json(monoid, v, &at)?),
                None if *monoid.kind() == MonoidKind::Trivial => column.push(Value::Star),
                None => return Err(Error::mismatch(format!("attributes {row}"), format!("row `{row}` of {label} has no value"))),
            }
        }
        attributes.push(column);
    }
    Instance::new(schema.clone(), data, attributes)
}

pub fn instance_to_json(inst: &Instance) -> Json {
    let c = &inst.schema.category;
    let mut m = copresheaf_to_json(&inst.data);
    let attrs: Map<String, Json> = (0..c.num_objects())
        .filter(|&a| *inst.schema.monoids[a].kind() != MonoidKind::Trivial)
        .map(|a| {
            let col: Map<String, Json> = inst
                .data
                .rows(a)
                .iter()
                .zip(&inst.attributes[a])
                .map(|(r, v)| (r.to_string(), value_to_json(&inst.schema.monoids[a], v)))
                .collect();
            (c.object_label(a).to_string(), Json::Object(col))
        })
        .collect();
    m.insert("attributes".into(), Json::Object(attrs));
    Json::Object(m)
}

pub fn load_instance(path: &str, schema: &Arc<Schema>) -> Result<Instance> {
    Source::read(path)?.load("attributes", |v| instance_from_json(v, schema))
}

// ---------------------------------------------------------------------------
// schemas

fn monoid_from_json(v: &Json, at: &str) -> Result<CommMonoid> {
    let m = obj(v, at)?;
    let kind = field(m, "kind", at)?;
    let table_json = |t: &Map<String, Json>| -> Result<CommMonoid> {
        let elements = label_set(field(t, "elements", at)?, at)?;
        let unit = index_in(&elements, string(field(t, "unit", at)?, at)?, "element")?;
        let rows = field(t, "op", at)?.as_array().ok_or_else(|| Error::parse(at, "op must be a square table"))?;
        let mut op = Vec::with_capacity(rows.len());
        for row in rows {
            let row = row.as_array().ok_or_else(|| Error::parse(at, "op must be a square table"))?;
            op.push(row.iter().map(|e| index_in(&elements, string(e, at)?, "element")).collect::<Result<Vec<_>>>()?);
        }
        if op.len() != elements.len() || op.iter().any(|r| r.len() != elements.len()) {
            return Err(Error::parse(at, "op must be a square table over the elements"));
        }
        CommMonoid::table(elements, op, unit).map_err(|e| match e {
            Error::LawViolation { law, location, witness } => {
                Error::LawViolation { law, location: Location::at(format!("{at} {}", location.path)), witness }
            }
            e => e,
        })
    };
    match kind {
        Json::String(k) => match k.as_str() {
            "int-sum" | "sum" => Ok(CommMonoid::int_sum()),
            "int-product" | "product" => Ok(CommMonoid::int_product()),
            "max-with-bottom" | "max" => Ok(CommMonoid::max_with_bottom()),
            "min-with-top" | "min" => Ok(CommMonoid::min_with_top()),
            "trivial" => Ok(CommMonoid::trivial()),
            "multiset" => Ok(CommMonoid::multiset(match m.get("over") {
                Some(o) => label_set(o, at)?,
                None => FinLabelSet::default(),
            })),
            "table" => table_json(m),
            other => Err(Error::parse(at, format!("unknown monoid kind `{other}`"))),
        },
        Json::Object(k) => match k.get("table") {
            Some(t) => table_json(obj(t, at)?),
            None => Err(Error::parse(at, "unknown monoid kind")),
        },
        _ => Err(Error::parse(at, "monoid kind must be a name or {\"table\": …}")),
    }
}

fn monoid_to_json(m: &CommMonoid) -> Json {
    match m.kind() {
        MonoidKind::Multiset(over) => json!({"kind": "multiset", "over": labels_json(over)}),
        MonoidKind::Table { elements, op, unit } => {
            let op: Vec<Vec<&str>> = op.iter().map(|r| r.iter().map(|&e| elements.get(e)).collect()).collect();
            json!({"kind": {"table": {"elements": labels_json(elements), "op": op, "unit": elements.get(*unit)}}})
        }
        _ => json!({"kind": m.name()}),
    }
}

/// A schema; category files without `"monoids"` load with trivial monoids.
pub fn schema_from_json(v: &Json) -> Result<Schema> {
    let c = Arc::new(category_from_json(v)?);
    let m = obj(v, "schema")?;
    let empty = Map::new();
    let given = match m.get("monoids") {
        Some(g) => obj(g, "monoids")?,
        None => &empty,
    };
    for key in given.keys() {
        index_in(c.objects(), key, "object")?;
    }
    let monoids = (0..c.num_objects())
        .map(|a| match given.get(c.object_label(a)) {
            Some(v) => monoid_from_json(v, &format!("monoid {}", c.object_label(a))),
            None => Ok(CommMonoid::trivial()),
        })
        .collect::<Result<Vec<_>>>()?;
    Schema::new(c, monoids)
}

pub fn schema_to_json(s: &Schema) -> Json {
    let mut v = category_to_json(&s.category);
    let monoids: Map<String, Json> =
        (0..s.category.num_objects()).map(|a| (s.category.object_label(a).to_string(), monoid_to_json(&s.monoids[a]))).collect();
    v.as_object_mut().expect("object").insert("monoids".into(), Json::Object(monoids));
    v
}

pub fn load_schema(path: &str) -> Result<Schema> {
    Source::read(path)?.load("composition", schema_from_json)
}

// ---------------------------------------------------------------------------
// queries

pub const DEFAULT_OUTPUT: &str = "result";

/// A duc-query over `d`: a bicomodule from a discrete category of output
/// tables, one position per pattern.
pub fn query_from_json(v: &Json, d: &Arc<FinCategory>) -> Result<Bicomodule> {
    let m = obj(v, "query")?;
    let list = field(m, "patterns", "query")?.as_array().ok_or_else(|| Error::parse("patterns", "expected a list"))?;
    let mut outputs: Vec<String> = Vec::new();
    let mut names: Vec<Vec<String>> = Vec::new();
    let mut patterns: Vec<Vec<Copresheaf>> = Vec::new();
    for (i, p) in list.iter().enumerate() {
        let e = obj(p, "pattern")?;
        let out = match e.get("output") {
            Some(o) => string(o, "output")?.to_string(),
            None => DEFAULT_OUTPUT.to_string(),
        };
        let name = match e.get("name") {
            Some(n) => string(n, "name")?.to_string(),
            None => format!("q{i}"),
        };
        let k = match outputs.iter().position(|o| *o == out) {
            Some(k) => k,
            None => {
                outputs.push(out);
                names.push(Vec::new());
                patterns.push(Vec::new());
                outputs.len() - 1
            }
        };
        if names[k].contains(&name) {
            return Err(Error::parse(format!("pattern {name}"), "duplicate pattern name"));
        }
        names[k].push(name);
        patterns[k].push(copresheaf_from_json(p, d)?);
    }
    if outputs.is_empty() {
        outputs.push(DEFAULT_OUTPUT.into());
        names.push(Vec::new());
        patterns.push(Vec::new());
    }
    let left = Arc::new(FinCategory::discrete(&FinLabelSet::new(outputs)?));
    let positions = names.into_iter().map(FinLabelSet::new).collect::<Result<Vec<_>>>()?;
    Bicomodule::discrete_left(left, d.clone(), positions, patterns)
}

pub fn query_to_json(q: &Bicomodule) -> Result<Json> {
    if !q.left.is_discrete() {
        return Err(Error::WrongShape("only queries with a discrete output category print as query files".into()));
    }
    let mut patterns = Vec::new();
    for a in 0..q.left.num_objects() {
        for (j, name) in q.positions(a).iter().enumerate() {
            let mut e = Map::new();
            e.insert("name".into(), json!(name));
            e.insert("output".into(), json!(q.left.object_label(a)));
            e.extend(copresheaf_to_json(q.pattern(a, j)));
            patterns.push(Json::Object(e));
        }
    }
    Ok(json!({ "patterns": patterns }))
}

pub fn load_query(path: &str, d: &Arc<FinCategory>) -> Result<Bicomodule> {
    Source::read(path)?.load("patterns", |v| query_from_json(v, d))
}

// ---------------------------------------------------------------------------
// functors

pub fn functor_from_json(v: &Json) -> Result<CatFunctor> {
    let m = obj(v, "functor")?;
    let c = Arc::new(category_from_json(field(m, "source", "functor")?)?);
    let d = Arc::new(category_from_json(field(m, "target", "functor")?)?);
    let on_objects = function(field(m, "objects", "functor")?, c.objects(), d.objects(), "objects")?;
    let empty = Map::new();
    let given = match m.get("morphisms") {
        Some(g) => obj(g, "morphisms")?,
        None => &empty,
    };
    let mut on_morphisms = vec![usize::MAX; c.num_morphisms()];
    for (f, g) in given {
        let fi = c.find_morphism(f).ok_or_else(|| Error::parse(format!("morphisms {f}"), format!("unknown morphism `{f}`")))?;
        let gn = string(g, f)?;
        on_morphisms[fi] = d.find_morphism(gn).ok_or_else(|| Error::parse(format!("morphisms {f}"), format!("unknown morphism `{gn}`")))?;
    }
    for a in 0..c.num_objects() {
        let id = c.identity(a);
        if on_morphisms[id] == usize::MAX {
            on_morphisms[id] = d.identity(on_objects[a]);
        }
    }
    if let Some(f) = on_morphisms.iter().position(|&g| g == usize::MAX) {
        return Err(Error::mismatch(format!("morphisms {}", c.name(f)), "no image given"));
    }
    CatFunctor::new(c, d, on_objects, on_morphisms)
}

pub fn functor_to_json(f: &CatFunctor) -> Json {
    let (c, d) = (&f.source, &f.target);
    json!({
        "source": category_to_json(c),
        "target": category_to_json(d),
        "objects": function_json(&f.on_objects, c.objects(), d.objects()),
        "morphisms": Json::Object((0..c.num_morphisms())
            .filter(|&g| !c.is_identity(g))
            .map(|g| (c.name(g).to_string(), json!(d.name(f.on_morphisms[g]))))
            .collect()),
    })
}

pub fn load_functor(path: &str) -> Result<CatFunctor> {
    Source::read(path)?.load("morphisms", functor_from_json)
}

// ---------------------------------------------------------------------------
// spans, conjunctives, bridges

fn tables_of<'a>(v: &'a Json, what: &str) -> Result<&'a Map<String, Json>> {
    obj(field(obj(v, what)?, "tables", what)?, "tables")
}

fn maps_of<'a>(v: &'a Json, what: &str) -> Result<&'a Map<String, Json>> {
    obj(field(obj(v, what)?, "maps", what)?, "maps")
}

fn table(t: &Map<String, Json>, key: &str) -> Result<FinLabelSet> {
    label_set(field(t, key, "tables")?, &format!("table {key}"))
}

pub fn span_from_json(v: &Json) -> Result<Span> {
    let t = tables_of(v, "span")?;
    let (left, apex, right) = (table(t, "left")?, table(t, "apex")?, table(t, "right")?);
    let m = maps_of(v, "span")?;
    let f = function(field(m, "f", "maps")?, &apex, &left, "map f")?;
    let g = function(field(m, "g", "maps")?, &apex, &right, "map g")?;
    Span::new(left, apex, right, f, g)
}

pub fn span_to_json(s: &Span) -> Json {
    json!({
        "tables": {"left": labels_json(&s.left), "apex": labels_json(&s.apex), "right": labels_json(&s.right)},
        "maps": {"f": function_json(&s.f, &s.apex, &s.left), "g": function_json(&s.g, &s.apex, &s.right)},
    })
}

pub fn conjunctive_from_json(v: &Json) -> Result<Conjunctive> {
    let t = tables_of(v, "conjunctive")?;
    let (left, right) = (table(t, "left")?, table(t, "right")?);
    let given = obj(field(obj(v, "conjunctive")?, "patterns", "conjunctive")?, "patterns")?;
    for key in given.keys() {
        index_in(&left, key, "object")?;
    }
    let patterns = (0..left.len())
        .map(|a| match given.get(left.get(a)) {
            Some(vars) => obj(vars, "pattern")?
                .iter()
                .map(|(x, b)| Ok((x.clone(), index_in(&right, string(b, x)?, "object")?)))
                .collect::<Result<Vec<_>>>(),
            None => Ok(Vec::new()),
        })
        .collect::<Result<Vec<_>>>()?;
    Conjunctive::new(left, right, patterns)
}

pub fn conjunctive_to_json(q: &Conjunctive) -> Json {
    let patterns: Map<String, Json> = q
        .patterns
        .iter()
        .enumerate()
        .map(|(a, vars)| (q.left.get(a).to_string(), Json::Object(vars.iter().map(|(x, b)| (x.clone(), json!(q.right.get(*b)))).collect())))
        .collect();
    json!({"tables": {"left": labels_json(&q.left), "right": labels_json(&q.right)}, "patterns": patterns})
}

pub fn bridge_from_json(v: &Json) -> Result<BridgeDiagram> {
    let t = tables_of(v, "bridge")?;
    let (d, e, b, c) = (table(t, "d")?, table(t, "e")?, table(t, "b")?, table(t, "c")?);
    let m = maps_of(v, "bridge")?;
    let f = function(field(m, "f", "maps")?, &e, &d, "map f")?;
    let g = function(field(m, "g", "maps")?, &e, &b, "map g")?;
    let h = function(field(m, "h", "maps")?, &b, &c, "map h")?;
    BridgeDiagram::new(d, e, b, c, f, g, h)
}

pub fn bridge_to_json(br: &BridgeDiagram) -> Json {
    json!({
        "tables": {"d": labels_json(&br.d), "e": labels_json(&br.e), "b": labels_json(&br.b), "c": labels_json(&br.c)},
        "maps": {
            "f": function_json(&br.f, &br.e, &br.d),
            "g": function_json(&br.g, &br.e, &br.b),
            "h": function_json(&br.h, &br.b, &br.c),
        },
    })
}

pub fn load_span(path: &str) -> Result<Span> {
    Source::read(path)?.load("maps", span_from_json)
}

pub fn load_conjunctive(path: &str) -> Result<Conjunctive> {
    Source::read(path)?.load("patterns", conjunctive_from_json)
}

pub fn load_bridge(path: &str) -> Result<BridgeDiagram> {
    Source::read(path)?.load("maps", bridge_from_json)
}

// ---------------------------------------------------------------------------
// detection

/// What a document looks like it is, judged by its keys.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DocumentKind {
    Category,
    Schema,
    Instance,
    Query,
    Functor,
    Span,
    Conjunctive,
    Bridge,
}

impl DocumentKind {
    pub fn name(self) -> &'static str {
        match self {
            DocumentKind::Category => "category",
            DocumentKind::Schema => "schema",
            DocumentKind::Instance => "instance",
            DocumentKind::Query => "query",
            DocumentKind::Functor => "functor",
            DocumentKind::Span => "span",
            DocumentKind::Conjunctive => "conjunctive",
            DocumentKind::Bridge => "bridge",
        }
    }

    pub fn parse(s: &str) -> Option<DocumentKind> {
        use DocumentKind::*;
        [Category, Schema, Instance, Query, Functor, Span, Conjunctive, Bridge].into_iter().find(|k| k.name() == s)
    }
}

pub fn detect_kind(v: &Json) -> Option<DocumentKind> {
    let m = v.as_object()?;
    let tables = m.get("tables").and_then(Json::as_object);
    Some(if m.contains_key("source") && m.contains_key("target") {
        DocumentKind::Functor
    } else if m.contains_key("monoids") {
        DocumentKind::Schema
    } else if m.contains_key("objects") {
        DocumentKind::Category
    } else if m.get("patterns").is_some_and(Json::is_array) {
        DocumentKind::Query
    } else if m.get("patterns").is_some_and(Json::is_object) {
        DocumentKind::Conjunctive
    } else if tables.is_some_and(|t| t.contains_key("apex")) {
        DocumentKind::Span
    } else if tables.is_some_and(|t| ["d", "e", "b", "c"].iter().all(|k| t.contains_key(*k)))
        && m.get("maps").and_then(|x| x.get("h")).is_some()
    {
        DocumentKind::Bridge
    } else if m.contains_key("tables") {
        DocumentKind::Instance
    } else {
        return None;
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const ARROW: &str = r#"{
  "objects": ["a", "b"],
  "morphisms": [
    {"name": "f", "dom": "a", "cod": "b"}
  ]
}"#;

    #[test]
    fn identities_may_be_omitted() {
        let c = category_from_json(&Source::from_text(ARROW).json().unwrap()).unwrap();
        assert_eq!(c.num_morphisms(), 3);
        assert_eq!(c.name(c.identity(1)), "id_b");
        let again = category_from_json(&category_to_json(&c)).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn missing_composite_names_the_pair() {
        let text = r#"{
  "objects": ["a"],
  "morphisms": [{"name": "e", "dom": "a", "cod": "a"}],
  "composition": {}
}"#;
        let src = Source::from_text(text);
        let err = src.load("composition", category_from_json).unwrap_err();
        match err {
            Error::LawViolation { law, location, .. } => {
                assert_eq!(law, "composition table total");
                assert_eq!(location.path, "e;e");
                assert_eq!(location.line, Some(4));
            }
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_lines() {
        let err = Source::from_text("{\n  \"objects\": [\n  ,]\n}").json().unwrap_err();
        assert_eq!(err.location().unwrap().line, Some(3));
    }

    #[test]
    fn names_with_semicolons_split_by_lookup() {
        let mut names = HashMap::new();
        for (i, n) in ["w", "p", "w;p"].iter().enumerate() {
            names.insert(n.to_string(), i);
        }
        let ms: Vec<Morphism> = vec![
            Morphism { name: "w".into(), dom: 0, cod: 1 },
            Morphism { name: "p".into(), dom: 1, cod: 2 },
            Morphism { name: "w;p".into(), dom: 0, cod: 2 },
        ];
        assert_eq!(split_pair("w;p", &names, &ms).unwrap(), (0, 1));
        assert!(split_pair("w;q", &names, &ms).is_err());
    }
}

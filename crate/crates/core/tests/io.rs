use std::sync::Arc;

use polyagg::aggregation::{CommMonoid, Instance, Schema};
use polyagg::io::*;
use polyagg::random::{self, labels, BicomoduleBounds, CategoryBounds};
use polyagg::{Error, FinCategory, FinLabelSet};
use proptest::prelude::*;
use rand::Rng;
use serde_json::Value as Json;

fn reparse(v: &Json) -> Json {
    Source::from_text(to_pretty(v)).json().unwrap()
}

fn bounds() -> CategoryBounds {
    CategoryBounds { max_objects: 4, max_morphisms: 16 }
}

fn random_schema(rng: &mut random::Rng) -> Schema {
    let c = Arc::new(random::random_category(rng, bounds()));
    let monoids = (0..c.num_objects())
        .map(|_| match rng.gen_range(0..7) {
            0 => CommMonoid::int_sum(),
            1 => CommMonoid::int_product(),
            2 => CommMonoid::max_with_bottom(),
            3 => CommMonoid::min_with_top(),
            4 => CommMonoid::multiset(labels("t", 2)),
            5 => CommMonoid::trivial(),
            _ => random::random_table_monoid(rng, 3),
        })
        .collect();
    Schema::new(c, monoids).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn categories_round_trip(seed in any::<u64>()) {
        let c = random::random_category(&mut random::rng(seed), bounds());
        let once = category_from_json(&reparse(&category_to_json(&c))).unwrap();
        prop_assert_eq!(&once, &c);
        prop_assert_eq!(category_to_json(&once), category_to_json(&c));
    }

    #[test]
    fn schemas_and_instances_round_trip(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let schema = Arc::new(random_schema(&mut rng));
        let back = schema_from_json(&reparse(&schema_to_json(&schema))).unwrap();
        prop_assert_eq!(&back, &*schema);
        let inst = Instance::random(&mut rng, &schema, 4);
        let again = instance_from_json(&reparse(&instance_to_json(&inst)), &schema).unwrap();
        prop_assert_eq!(&again, &inst);
    }

    #[test]
    fn queries_round_trip(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let d = Arc::new(random::random_category(&mut rng, bounds()));
        let left = Arc::new(FinCategory::discrete(&labels("out", rng.gen_range(1..3))));
        let q = random::random_bicomodule(&mut rng, &left, &d, BicomoduleBounds { max_positions: 3, max_pattern: 3 });
        let printed = query_to_json(&q).unwrap();
        let back = query_from_json(&reparse(&printed), &d).unwrap();
        prop_assert_eq!(query_to_json(&back).unwrap(), printed);
        prop_assert_eq!(back.carrier().normal_form(), q.carrier().normal_form());
        let again = query_from_json(&query_to_json(&back).unwrap(), &d).unwrap();
        prop_assert_eq!(again, back);
    }

    #[test]
    fn functors_round_trip(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let c = Arc::new(random::random_category(&mut rng, bounds()));
        let d = Arc::new(random::random_category(&mut rng, bounds()));
        if let Some(f) = random::random_functor(&mut rng, &c, &d) {
            let back = functor_from_json(&reparse(&functor_to_json(&f))).unwrap();
            prop_assert_eq!(back, f);
        }
    }

    #[test]
    fn spans_conjunctives_and_bridges_round_trip(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let s = random::random_span(&mut rng, "s", 3, 5);
        prop_assert_eq!(span_from_json(&reparse(&span_to_json(&s))).unwrap(), s);
        let q = random::random_conjunctive(&mut rng, 3, 3);
        prop_assert_eq!(conjunctive_from_json(&reparse(&conjunctive_to_json(&q))).unwrap(), q);
        let br = random::random_bridge(&mut rng, 3);
        prop_assert_eq!(bridge_from_json(&reparse(&bridge_to_json(&br))).unwrap(), br);
    }
}

#[test]
fn detection_recognizes_every_printer() {
    let mut rng = random::rng(3);
    let schema = Arc::new(random_schema(&mut rng));
    let inst = Instance::random(&mut rng, &schema, 3);
    let c = Arc::new(FinCategory::discrete(&labels("o", 1)));
    let q = random::random_bicomodule(&mut rng, &c, &schema.category, BicomoduleBounds { max_positions: 2, max_pattern: 2 });
    let cases = [
        (category_to_json(&schema.category), DocumentKind::Category),
        (schema_to_json(&schema), DocumentKind::Schema),
        (instance_to_json(&inst), DocumentKind::Instance),
        (query_to_json(&q).unwrap(), DocumentKind::Query),
        (span_to_json(&random::random_span(&mut rng, "s", 2, 3)), DocumentKind::Span),
        (conjunctive_to_json(&random::random_conjunctive(&mut rng, 2, 2)), DocumentKind::Conjunctive),
        (bridge_to_json(&random::random_bridge(&mut rng, 2)), DocumentKind::Bridge),
    ];
    for (v, kind) in cases {
        assert_eq!(detect_kind(&v), Some(kind));
    }
}

const DEPARTMENTS: &str = r#"{
  "objects": ["employee", "department"],
  "morphisms": [{"name": "works_in", "dom": "employee", "cod": "department"}],
  "monoids": {
    "employee": {"kind": "int-sum"},
    "department": {"kind": {"table": {"elements": ["no", "yes"], "op": [["no", "yes"], ["yes", "yes"]], "unit": "no"}}}
  }
}"#;

#[test]
fn department_schema_loads_and_rejects_bad_attributes() {
    let schema = Arc::new(schema_from_json(&Source::from_text(DEPARTMENTS).json().unwrap()).unwrap());
    assert_eq!(schema.monoids[1].name(), "table");
    let good = r#"{"tables": {"employee": ["e1"], "department": ["d1"]},
  "maps": {"works_in": {"e1": "d1"}},
  "attributes": {"employee": {"e1": 10}, "department": {"d1": "yes"}}}"#;
    let inst = instance_from_json(&Source::from_text(good).json().unwrap(), &schema).unwrap();
    assert_eq!(inst.data.rows(0).len(), 1);

    let bad = good.replace("\"yes\"}", "\"maybe\"}");
    let src = Source::from_text(bad);
    let err = src.load("attributes", |v| instance_from_json(v, &schema)).unwrap_err();
    assert!(matches!(err, Error::TypeMismatch { .. }), "{err:?}");
    assert_eq!(err.location().unwrap().line, Some(3));
}

#[test]
fn non_associative_table_monoid_is_a_law_violation() {
    let text = DEPARTMENTS
        .replace(r#"[["no", "yes"], ["yes", "yes"]]"#, r#"[["no", "yes"], ["yes", "no"]]"#)
        .replace("\"unit\": \"no\"", "\"unit\": \"yes\"");
    let err = schema_from_json(&Source::from_text(text).json().unwrap()).unwrap_err();
    assert!(matches!(err, Error::LawViolation { .. }), "{err:?}");
}

#[test]
fn missing_maps_of_composites_are_derived() {
    let inst = polyagg::aggregation::salary_example();
    let mut v = instance_to_json(&inst);
    v["maps"].as_object_mut().unwrap().remove("w;p");
    let back = instance_from_json(&v, &inst.schema).unwrap();
    assert_eq!(back, inst);
    v["maps"].as_object_mut().unwrap().remove("w");
    assert!(matches!(instance_from_json(&v, &inst.schema), Err(Error::TypeMismatch { .. })));
}

#[test]
fn unknown_labels_are_parse_errors() {
    let c = Arc::new(FinCategory::discrete(&FinLabelSet::new(["a"]).unwrap()));
    let v: Json = serde_json::from_str(r#"{"tables": {"zz": []}}"#).unwrap();
    assert!(matches!(copresheaf_from_json(&v, &c), Err(Error::Parse { .. })));
}

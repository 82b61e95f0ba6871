use polyagg_web::{aggregate, calc, fin_skeleton_table, sample_instance, sample_schema};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn calculator() {
    assert_eq!(parse(calc("homcount", "y^2+y", "y^3+1"))["ok"], "18");
    assert_eq!(parse(calc("compose", "y^2", "y+1"))["ok"], "y^2 + 2y + 1");
    assert_eq!(parse(calc("coclosure", "y^2", "y+1"))["ok"], "y^3");
    let e = parse(calc("compose", "y^", "y"));
    assert_eq!(e["error"]["code"], "parse");
    assert_eq!(parse(calc("divide", "y", "y"))["error"]["code"], "parse");
}

#[test]
fn skeleton_table() {
    let v = parse(fin_skeleton_table(3));
    assert_eq!(v["ok"]["hom"][2][3], 9);
    assert_eq!(v["ok"]["objects"], 4);
    assert_eq!(parse(fin_skeleton_table(7))["error"]["code"], "size-blowup");
}

#[test]
fn aggregation_demo() {
    let v = parse(aggregate(&sample_schema(), &sample_instance(), "wp"));
    assert_eq!(v["ok"]["values"], serde_json::json!({"c1": 30, "c2": 12}));
    assert_eq!(v["ok"]["groups"]["c2"], serde_json::json!(["e3", "e4"]));
    let bad = parse(aggregate(&sample_schema(), "{\"tables\": {\"nowhere\": []}}", "w"));
    assert_eq!(bad["error"]["code"], "parse");
    assert!(bad["error"]["location"].as_str().unwrap().starts_with("instance"));
}

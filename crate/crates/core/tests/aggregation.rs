use std::sync::Arc;

use polyagg::aggregation::*;
use polyagg::copresheaf::Copresheaf;
use polyagg::finitary::skeleton_fin;
use polyagg::random::{self, labels, CategoryBounds, Rng};
use polyagg::span::Span;
use polyagg::{FinCategory, FinLabelSet};
use rand::Rng as _;

fn random_schema(rng: &mut Rng) -> Arc<Schema> {
    let c = Arc::new(random::random_category(rng, CategoryBounds { max_objects: 4, max_morphisms: 16 }));
    let monoids = (0..c.num_objects())
        .map(|_| match rng.gen_range(0..3) {
            0 => CommMonoid::int_sum(),
            1 => CommMonoid::max_with_bottom(),
            _ => CommMonoid::multiset(labels("t", 3)),
        })
        .collect();
    Arc::new(Schema::new(c, monoids).unwrap())
}

#[test]
fn coherence_on_random_instances() {
    let mut rng = random::rng(41);
    let mut empty_fibers = 0;
    for _ in 0..200 {
        let schema = random_schema(&mut rng);
        let inst = Instance::random(&mut rng, &schema, 4);
        check_coherence(&inst).unwrap();
        check_family_delta(&inst).unwrap();
        let c = &schema.category;
        for f in 0..c.num_morphisms() {
            let mut hit = vec![false; inst.data.rows(c.cod(f)).len()];
            for e in 0..inst.data.rows(c.dom(f)).len() {
                hit[inst.data.act(f, e)] = true;
            }
            empty_fibers += hit.iter().filter(|h| !**h).count();
        }
    }
    assert!(empty_fibers > 0);
}

#[test]
fn discrete_schemas_aggregate_to_attributes() {
    let mut rng = random::rng(42);
    let c = Arc::new(FinCategory::discrete(&labels("o", 3)));
    let schema = Arc::new(Schema::new(c.clone(), vec![CommMonoid::int_sum(); 3]).unwrap());
    let inst = Instance::random(&mut rng, &schema, 4);
    for (a, fams) in aggregate_all(&inst).iter().enumerate() {
        for (x, fam) in fams.iter().enumerate() {
            assert_eq!(*fam, Family::Node { object: a, components: vec![Family::Leaf(inst.attributes[a][x].clone())] });
        }
    }
}

#[test]
fn pi_comonad_laws() {
    let mut rng = random::rng(43);
    let chain = Arc::new(FinCategory::poset(&labels("p", 3), |a, b| a <= b).unwrap());
    let z3 = Arc::new(random::cyclic_group(3));
    let disc = Arc::new(FinCategory::discrete(&labels("o", 2)));
    for c in [chain.clone(), z3.clone(), disc] {
        let n = c.num_objects();
        let schema = Schema::new(c, vec![CommMonoid::int_sum(); n]).unwrap();
        pi_comonad_check(&schema, &mut rng, 20).unwrap();
    }
    for _ in 0..50 {
        let schema = random_schema(&mut rng);
        pi_comonad_check(&schema, &mut rng, 5).unwrap();
    }

    let c: &FinCategory = &chain;
    let top = 2;
    let v = Family::Node { object: top, components: c.into(top).iter().map(|&f| Family::Leaf(Value::int(f as i64))).collect() };
    let d = v.delta(c);
    let Family::Node { components, .. } = &d else { panic!() };
    for (k, &g) in c.into(top).iter().enumerate() {
        let Family::Node { components: inner, .. } = &components[k] else { panic!() };
        for (l, &f) in c.into(c.dom(g)).iter().enumerate() {
            assert_eq!(inner[l], Family::Leaf(Value::int(c.compose(f, g) as i64)));
        }
    }
}

#[test]
fn salary_example_refolds() {
    let inst = salary_example();
    let c = &inst.schema.category;
    let (w, p, wp) = (c.find_morphism("w").unwrap(), c.find_morphism("p").unwrap(), c.find_morphism("w;p").unwrap());
    assert_eq!(c.compose(w, p), wp);
    let by_dept = aggregate_along(&inst, w);
    assert_eq!(by_dept, vec![Value::int(30), Value::int(12), Value::int(0)]);
    let refold: Vec<Value> =
        (0..2).map(|col| CommMonoid::int_sum().fold((0..3).filter(|&d| inst.data.act(p, d) == col).map(|d| &by_dept[d]))).collect();
    assert_eq!(aggregate_along(&inst, wp), refold);
    check_delta_law(&inst, w, p).unwrap();
}

fn arrow_data(cod: usize, map: Vec<usize>) -> (Copresheaf, usize) {
    let c = Arc::new(FinCategory::poset(&labels("p", 2), |a, b| a <= b).unwrap());
    let f = c.hom(0, 1)[0];
    let mut action = vec![Vec::new(); c.num_morphisms()];
    action[c.identity(0)] = (0..map.len()).collect();
    action[c.identity(1)] = (0..cod).collect();
    let rows = vec![labels("e", map.len()), labels("d", cod)];
    action[f] = map;
    (Copresheaf::new(c, rows, action).unwrap(), f)
}

#[test]
fn group_by_examples() {
    let (x, f) = arrow_data(3, vec![2, 0, 1]);
    assert!(group_by(&x, f).iter().all(|m| m.len() <= 1));
    let (x, f) = arrow_data(2, vec![1, 1, 1, 1]);
    let g = group_by(&x, f);
    assert_eq!(g[1].len(), 4);
    assert!(g[0].is_empty());
    let (x, f) = arrow_data(2, vec![0, 1, 0, 1, 0]);
    let sizes: Vec<usize> = group_by(&x, f).iter().map(|m| m.len()).collect();
    assert_eq!(sizes, vec![3, 2]);

    let mut rng = random::rng(44);
    for _ in 0..100 {
        let c = Arc::new(random::random_category(&mut rng, CategoryBounds { max_objects: 4, max_morphisms: 16 }));
        let x = random::random_copresheaf(&mut rng, &c, 5);
        for f in 0..c.num_morphisms() {
            let groups = group_by(&x, f);
            assert_eq!(groups.iter().map(|m| m.len()).sum::<usize>(), x.rows(c.dom(f)).len());
            for &g in c.out(c.cod(f)) {
                let direct = group_by(&x, c.compose(f, g));
                let mut refined = vec![Multiset::default(); x.rows(c.cod(g)).len()];
                for (e, m) in groups.iter().enumerate() {
                    refined[x.act(g, e)].union(m);
                }
                assert_eq!(direct, refined);
            }
        }
    }
}

#[test]
fn fin_module_functoriality() {
    let skeleton = skeleton_fin(3).unwrap();
    let sum = CommMonoid::int_sum();
    let module = monoid_as_fin_module(&sum, &skeleton);
    module.check_functorial(&[Value::int(-1), Value::int(0), Value::int(2)]).unwrap();
    let two_to_one = skeleton.morphism(2, 1, &[0, 0]).unwrap();
    assert_eq!(module.act(two_to_one, &[Value::int(3), Value::int(4)]).unwrap(), vec![Value::int(7)]);
    let id1 = skeleton.category.identity(1);
    assert_eq!(skeleton.category.compose(two_to_one, id1), two_to_one);

    let mut rng = random::rng(45);
    for _ in 0..3 {
        let m = random::random_table_monoid(&mut rng, 4);
        let module = monoid_as_fin_module(&m, &skeleton);
        module.check_functorial(&m.elements().unwrap()).unwrap();
    }
}

#[test]
fn aggregation_through_the_classifying_functor() {
    let skeleton = skeleton_fin(4).unwrap();
    let mut rng = random::rng(46);
    let mut done = 0;
    while done < 50 {
        let schema = random_schema(&mut rng);
        let inst = Instance::random(&mut rng, &schema, 4);
        if inst.data.max_rows() > 4 {
            continue;
        }
        for f in 0..schema.category.num_morphisms() {
            assert_eq!(aggregate_via_module(&inst, f, &skeleton).unwrap(), aggregate_along(&inst, f));
        }
        done += 1;
    }
}

#[test]
fn tagged_aggregation() {
    let inst = salary_example();
    let c = inst.schema.category.clone();
    let w = c.find_morphism("w").unwrap();
    let objects = c.objects().clone();

    let identity = Span::identity(&objects);
    let tagged = TaggedSchema { category: c.clone(), tags: inst.schema.monoids.clone(), occurrences: identity };
    let ti = TaggedInstance::new(Arc::new(tagged), inst.data.clone(), inst.attributes.clone()).unwrap();
    assert_eq!(aggregate_generalized(&ti, w), vec![(0, aggregate_along(&inst, w))]);

    let occ = Span::new(objects.clone(), FinLabelSet::new(["salary", "age"]).unwrap(), labels("tag", 2), vec![0, 0], vec![0, 1]).unwrap();
    let tagged = TaggedSchema { category: c.clone(), tags: vec![CommMonoid::int_sum(), CommMonoid::max_with_bottom()], occurrences: occ };
    let ages: Vec<Value> = [30, 41, 25, 52].iter().map(|&a| Value::int(a)).collect();
    let ti = TaggedInstance::new(Arc::new(tagged), inst.data.clone(), vec![inst.attributes[0].clone(), ages]).unwrap();
    let out = aggregate_generalized(&ti, w);
    assert_eq!(out[0].1, vec![Value::int(30), Value::int(12), Value::int(0)]);
    assert_eq!(out[1].1, vec![Value::int(41), Value::int(52), Value::Bottom]);
    let p = c.find_morphism("p").unwrap();
    assert!(aggregate_generalized(&ti, p).is_empty());
    for k in 0..2 {
        check_coherence(&ti.project(k)).unwrap();
    }
}

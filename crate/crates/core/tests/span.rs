use polyagg::copresheaf::{self, Copresheaf};
use polyagg::random::{self, labels, CategoryBounds};
use polyagg::span::*;
use polyagg::{FinCategory, FinLabelSet, Poly};
use rand::Rng;

const CAP: usize = 20_000;

#[test]
fn dual_is_an_involution() {
    let mut rng = random::rng(11);
    for i in 0..200 {
        let s = random::random_span(&mut rng, "s", 3, 6);
        assert_eq!(dual_conjunctive(&dual_span(&s)).canonical(), s.canonical(), "span {i}");
        let m = s.to_bicomodule();
        let back = Span::from_bicomodule(&dual(&dual(&m).unwrap()).unwrap()).unwrap();
        assert_eq!(back.canonical(), s.canonical());

        let q = random::random_conjunctive(&mut rng, 3, 3);
        assert_eq!(dual_span(&dual_conjunctive(&q)), q, "conjunctive {i}");
        let m = q.to_bicomodule();
        let back = Conjunctive::from_bicomodule(&dual(&dual(&m).unwrap()).unwrap()).unwrap();
        assert_eq!(back.canonical(), q.canonical());
    }
}

#[test]
fn graph_spans_are_self_dual() {
    let mut rng = random::rng(12);
    for _ in 0..50 {
        let a = labels("a", rng.gen_range(1..5));
        let b = labels("b", rng.gen_range(1..4));
        let f = random::random_function(&mut rng, a.len(), b.len());
        let s = Span::new(a.clone(), a.clone(), b, (0..a.len()).collect(), f).unwrap();
        let m = s.to_bicomodule();
        assert!(dual(&m).unwrap().find_iso(&m).is_some());
    }
}

#[test]
fn dual_of_identity_has_one_variable_per_object() {
    let c = labels("c", 3);
    let q = dual_span(&Span::identity(&c));
    for (a, vars) in q.patterns.iter().enumerate() {
        assert_eq!(vars.len(), 1);
        assert_eq!(vars[0].1, a);
    }
    assert_eq!(q.to_bicomodule().carrier().normal_form(), vec![(1, 3)]);
}

#[test]
fn raw_local_hom_agrees_with_dual() {
    let mut rng = random::rng(13);
    for _ in 0..40 {
        let m = random::random_span(&mut rng, "s", 3, 4).to_bicomodule();
        assert!(dual_raw(&m, CAP).unwrap().find_iso(&dual(&m).unwrap()).is_some());
        let q = random::random_conjunctive(&mut rng, 2, 3).to_bicomodule();
        assert!(dual_raw(&q, CAP).unwrap().find_iso(&dual(&q).unwrap()).is_some());
    }
}

#[test]
fn dual_commutes_with_composition() {
    let mut rng = random::rng(14);
    for _ in 0..100 {
        let a = labels("a", rng.gen_range(1..4));
        let b = labels("b", rng.gen_range(1..4));
        let c = labels("c", rng.gen_range(1..4));
        let m = random::random_span_between(&mut rng, "m", &a, &b, 4);
        let n = random::random_span_between(&mut rng, "n", &b, &c, 4);
        check_comp_dual(&m, &n, CAP).unwrap();
    }
}

#[test]
fn transpose_routes_agree_with_leg_swap() {
    let mut rng = random::rng(15);
    for _ in 0..200 {
        let s = random::random_span(&mut rng, "s", 3, 6);
        let (r1, r2) = transpose_routes(&s);
        assert_eq!(r1.canonical(), s.transpose().canonical());
        assert_eq!(r2.canonical(), s.transpose().canonical());
    }
    let c = labels("c", 2);
    let sym = Span::new(c.clone(), labels("m", 3), c.clone(), vec![0, 1, 1], vec![0, 1, 1]).unwrap();
    assert_eq!(transpose(&sym).unwrap(), sym.canonical());
    let d = labels("d", 2);
    let s = Span::new(c, labels("m", 3), d, vec![0, 1, 1], vec![1, 1, 0]).unwrap();
    assert_eq!(transpose(&s).unwrap(), s.transpose().canonical());
}

#[test]
fn adjoints_invert_and_count_correctly() {
    let mut rng = random::rng(16);
    for _ in 0..60 {
        let s = random::random_span(&mut rng, "s", 3, 4);
        assert_eq!(left_adjoint(&right_adjoint(&s)).canonical(), s.canonical());
        let l = s.to_bicomodule();
        let r = right_adjoint(&s).to_bicomodule();
        let (cc, dd) = (l.left.clone(), l.right.clone());
        let x = Copresheaf::discrete(&dd, (0..dd.num_objects()).map(|i| labels(&format!("x{i}_"), rng.gen_range(0..3))).collect()).unwrap();
        let y = Copresheaf::discrete(&cc, (0..cc.num_objects()).map(|i| labels(&format!("y{i}_"), rng.gen_range(0..3))).collect()).unwrap();
        let lhs = copresheaf::count_homs(&l.apply(&x, CAP).unwrap(), &y, CAP).unwrap();
        let rhs = copresheaf::count_homs(&x, &r.apply(&y, CAP).unwrap(), CAP).unwrap();
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn linear_and_exponential_polynomials_are_adjoint() {
    let one = labels("*", 1);
    let a = labels("a", 3);
    let s = Span::new(one.clone(), a.clone(), one, vec![0; 3], vec![0; 3]).unwrap();
    assert!(s.to_bicomodule().carrier().is_iso(&Poly::linear(&a)));
    assert!(right_adjoint(&s).to_bicomodule().carrier().is_iso(&Poly::representable(&a)));
}

#[test]
fn bridges_round_trip_and_compute_sigma_pi_delta() {
    let mut rng = random::rng(17);
    for _ in 0..100 {
        let br = random::random_bridge(&mut rng, 3);
        let m = br.to_bicomodule();
        assert_eq!(BridgeDiagram::from_bicomodule(&m).unwrap().to_bicomodule(), m);
        let dd = m.right.clone();
        let x: Vec<FinLabelSet> = (0..dd.num_objects()).map(|i| labels(&format!("x{i}_"), rng.gen_range(0..3))).collect();
        let direct = br.sigma_pi_delta(&x, CAP).unwrap();
        let applied = m.apply(&Copresheaf::discrete(&dd, x).unwrap(), CAP).unwrap();
        for (c, rows) in direct.iter().enumerate() {
            let mut l: Vec<&str> = rows.iter().collect();
            let mut r: Vec<&str> = applied.rows(c).iter().collect();
            l.sort();
            r.sort();
            assert_eq!(l, r);
        }
    }
}

#[test]
fn special_bridges_are_spans_and_conjunctives() {
    let mut rng = random::rng(18);
    for _ in 0..30 {
        let s = random::random_span(&mut rng, "s", 3, 4);
        let n = s.apex.len();
        let br =
            BridgeDiagram::new(s.right.clone(), s.apex.clone(), s.apex.clone(), s.left.clone(), s.g.clone(), (0..n).collect(), s.f.clone())
                .unwrap();
        assert_eq!(br.to_bicomodule(), s.to_bicomodule());

        let q = random::random_conjunctive(&mut rng, 3, 3);
        let vars: Vec<(usize, &(String, usize))> = q.patterns.iter().enumerate().flat_map(|(a, v)| v.iter().map(move |x| (a, x))).collect();
        let br = BridgeDiagram::new(
            q.right.clone(),
            FinLabelSet::generated(vars.iter().map(|(_, x)| x.0.as_str())),
            q.left.clone(),
            q.left.clone(),
            vars.iter().map(|(_, x)| x.1).collect(),
            vars.iter().map(|(a, _)| *a).collect(),
            (0..q.left.len()).collect(),
        )
        .unwrap();
        assert_eq!(Conjunctive::from_bicomodule(&br.to_bicomodule()).unwrap().canonical(), q.canonical());
    }
}

#[test]
fn categories_are_span_monads() {
    let mut rng = random::rng(19);
    for _ in 0..40 {
        let c = random::random_category(&mut rng, CategoryBounds { max_objects: 4, max_morphisms: 20 });
        let m = category_as_span_monad(&c);
        m.check_laws().unwrap();
        m.to_category().unwrap().same_table(&c).unwrap();
        opposite_via_dual(&c).unwrap().same_table(&c.opposite_direct()).unwrap();
    }
    let d = FinCategory::discrete(&labels("o", 3));
    let m = category_as_span_monad(&d);
    assert!(m.span.is_iso(&Span::identity(d.objects())));

    let z3 = random::cyclic_group(3);
    let m = category_as_span_monad(&z3);
    assert_eq!((m.span.left.len(), m.span.apex.len()), (1, 3));
    m.to_category().unwrap().same_table(&z3).unwrap();

    let arrow = FinCategory::poset(&labels("p", 2), |a, b| a <= b).unwrap();
    opposite_via_dual(&arrow).unwrap().same_table(&arrow.opposite_direct()).unwrap();
}

#[test]
fn left_closure_is_terminal() {
    let mut rng = random::rng(20);
    let (a, b, c) = (labels("a", 2), labels("b", 2), labels("c", 2));
    for _ in 0..6 {
        let x = random::random_span_between(&mut rng, "x", &b, &c, 3);
        let y = random::random_span_between(&mut rng, "y", &a, &c, 4);
        let w = span_left_closure(&x, &y, CAP).unwrap();
        for v in spans_up_to_iso(&a, &b, 4) {
            for theta in two_cells(&v, &x, &y, CAP).unwrap() {
                assert!(w.factorizations(&x, &v, &theta).iter().all(|&n| n == 1));
            }
        }
    }
}

#[test]
fn left_closure_edge_cases() {
    let mut rng = random::rng(21);
    for _ in 0..20 {
        let y = random::random_span(&mut rng, "y", 3, 5);
        let x = Span::identity(&y.right);
        assert!(span_left_closure(&x, &y, CAP).unwrap().span.is_iso(&y));

        let b = labels("b", rng.gen_range(1..4));
        let x = random::random_span_between(&mut rng, "x", &b, &y.right, 4);
        let empty = Span::new(y.left.clone(), FinLabelSet::default(), y.right.clone(), vec![], vec![]).unwrap();
        let w = span_left_closure(&x, &empty, CAP).unwrap().span;
        for a in 0..w.left.len() {
            for bb in 0..b.len() {
                let expect = usize::from(x.fiber(bb).is_empty());
                let got = (0..w.apex.len()).filter(|&k| w.f[k] == a && w.g[k] == bb).count();
                assert_eq!(got, expect);
            }
        }
    }
}

#[test]
fn dualizing_object_is_a_full_span() {
    let bottom = DualizingObject { c: labels("c", 2), d: labels("d", 3) };
    let m = bottom.to_bicomodule();
    assert_eq!(m.carrier().normal_form(), vec![(1, 6)]);
    let q = Conjunctive::from_bicomodule(&dual(&m).unwrap()).unwrap();
    assert!(q.patterns.iter().all(|v| v.len() == 3));
}

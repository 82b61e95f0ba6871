use std::sync::Arc;

use polyagg::bicomodule::Bicomodule;
use polyagg::category::FinCategory;
use polyagg::copresheaf::{self, Copresheaf};
use polyagg::functor::Cofunctor;
use polyagg::poly::{parse::parse_poly, DEFAULT_CAP};
use polyagg::random::{self, BicomoduleBounds, CategoryBounds};
use polyagg::FinLabelSet;

fn small() -> CategoryBounds {
    CategoryBounds { max_objects: 3, max_morphisms: 8 }
}

const B: BicomoduleBounds = BicomoduleBounds { max_positions: 2, max_pattern: 3 };

#[test]
fn polynomials_compose_like_substitution() {
    for (p, q) in [("y^2 + 1", "y + 1"), ("2y^3", "y^2 + y + 1"), ("y", "3"), ("0", "y^2")] {
        let (p, q) = (parse_poly(p).unwrap(), parse_poly(q).unwrap());
        let composite = Bicomodule::from_poly(&p).compose(&Bicomodule::from_poly(&q), DEFAULT_CAP).unwrap();
        composite.validate().unwrap();
        assert_eq!(composite.carrier().normal_form(), p.substitute(&q, DEFAULT_CAP).unwrap().normal_form());
        let t = Bicomodule::from_poly(&p).local_tensor(&Bicomodule::from_poly(&q)).unwrap();
        assert_eq!(t.carrier().normal_form(), p.tensor(&q).normal_form());
    }
}

#[test]
fn random_bicomodules_are_valid_and_unital() {
    let mut rng = random::rng(11);
    for _ in 0..25 {
        let c = Arc::new(random::random_category(&mut rng, small()));
        let d = Arc::new(random::random_category(&mut rng, small()));
        let m = random::random_bicomodule(&mut rng, &c, &d, B);
        m.validate().unwrap();
        let left = Bicomodule::identity(&c).compose(&m, DEFAULT_CAP).unwrap();
        left.validate().unwrap();
        assert!(left.find_iso(&m).is_some());
        let right = m.compose(&Bicomodule::identity(&d), DEFAULT_CAP).unwrap();
        right.validate().unwrap();
        assert!(right.find_iso(&m).is_some());
        let x = random::random_copresheaf(&mut rng, &d, 3);
        let mx = m.apply(&x, DEFAULT_CAP).unwrap();
        mx.validate().unwrap();
        let ix = Bicomodule::identity(&d).apply(&x, DEFAULT_CAP).unwrap();
        assert!(copresheaf::is_iso(&ix, &x));
    }
}

#[test]
fn composite_applies_as_iterated_application() {
    let mut rng = random::rng(12);
    let mut done = 0;
    while done < 15 {
        let c = Arc::new(random::random_category(&mut rng, small()));
        let d = Arc::new(random::random_category(&mut rng, small()));
        let e = Arc::new(random::random_category(&mut rng, small()));
        let m = random::random_bicomodule(&mut rng, &c, &d, B);
        let n = random::random_bicomodule(&mut rng, &d, &e, B);
        let x = random::random_copresheaf(&mut rng, &e, 3);
        let Ok(nx) = n.apply(&x, 2000) else { continue };
        let Ok(lhs) = m.apply(&nx, 2000) else { continue };
        let mn = m.compose(&n, DEFAULT_CAP).unwrap();
        mn.validate().unwrap();
        let rhs = mn.apply(&x, DEFAULT_CAP).unwrap();
        rhs.validate().unwrap();
        assert!(copresheaf::is_iso(&lhs, &rhs));
        done += 1;
    }
}

#[test]
fn local_tensor_unit_and_closure() {
    let mut rng = random::rng(13);
    for _ in 0..20 {
        let n = 1 + (done_count(&mut rng) % 2);
        let c = Arc::new(FinCategory::discrete(&random::labels("a", n)));
        let d = Arc::new(random::random_category(&mut rng, small()));
        let p = random::random_bicomodule(&mut rng, &c, &d, B);
        let q = random::random_bicomodule(&mut rng, &c, &d, B);
        let r = random::random_bicomodule(&mut rng, &c, &d, B);
        let unit = Bicomodule::local_unit(&c, &d);
        let pu = p.local_tensor(&unit).unwrap();
        pu.validate().unwrap();
        assert!(pu.find_iso(&p).is_some());
        let pq = p.local_tensor(&q).unwrap();
        let qr = Bicomodule::local_hom_discrete(&q, &r, DEFAULT_CAP).unwrap();
        assert_eq!(pq.hom_count_discrete(&r, DEFAULT_CAP).unwrap(), p.hom_count_discrete(&qr, DEFAULT_CAP).unwrap());
    }
}

fn done_count(rng: &mut random::Rng) -> usize {
    use rand::Rng;
    rng.gen_range(0..10)
}

#[test]
fn coclosure_is_left_adjoint_on_discrete_bases() {
    let mut rng = random::rng(14);
    for _ in 0..20 {
        let c = Arc::new(FinCategory::discrete(&random::labels("a", 2)));
        let d = Arc::new(FinCategory::discrete(&random::labels("b", 2)));
        let e = Arc::new(random::random_category(&mut rng, small()));
        let p = random::random_bicomodule(&mut rng, &c, &e, B);
        let q = random::random_bicomodule(&mut rng, &d, &e, B);
        let m = random::random_bicomodule(&mut rng, &c, &d, BicomoduleBounds { max_positions: 2, max_pattern: 2 });
        let cc = Bicomodule::coclosure(&p, &q, DEFAULT_CAP).unwrap();
        cc.validate().unwrap();
        let mq = m.compose(&q, DEFAULT_CAP).unwrap();
        assert_eq!(cc.hom_count_discrete(&m, DEFAULT_CAP).unwrap(), p.hom_count_discrete(&mq, DEFAULT_CAP).unwrap());
    }
}

#[test]
fn coclosure_over_general_left_category_validates() {
    let mut rng = random::rng(15);
    for _ in 0..20 {
        let c = Arc::new(random::random_category(&mut rng, small()));
        let d = Arc::new(random::random_category(&mut rng, small()));
        let e = Arc::new(random::random_category(&mut rng, small()));
        let p = random::random_bicomodule(&mut rng, &c, &e, B);
        let q = random::random_bicomodule(&mut rng, &d, &e, B);
        Bicomodule::coclosure(&p, &q, DEFAULT_CAP).unwrap().validate().unwrap();
    }
}

#[test]
fn extension_along_identities_is_trivial() {
    let mut rng = random::rng(16);
    for _ in 0..10 {
        let c = Arc::new(random::random_category(&mut rng, small()));
        let d = Arc::new(random::random_category(&mut rng, small()));
        let m = random::random_bicomodule(&mut rng, &c, &d, B);
        let ext = m.extend(&Cofunctor::identity(&c), &Cofunctor::identity(&d)).unwrap();
        ext.validate().unwrap();
        assert_eq!(ext, m);
    }
}

#[test]
fn extension_along_etale_lifts() {
    let mut rng = random::rng(17);
    for _ in 0..10 {
        let d = Arc::new(random::random_category(&mut rng, small()));
        let x = random::random_copresheaf(&mut rng, &d, 2);
        let (el, proj) = x.category_of_elements();
        let el = Arc::new(el);
        let beta = proj.to_cofunctor().unwrap();
        let c = Arc::new(random::random_category(&mut rng, small()));
        let m = random::random_bicomodule(&mut rng, &c, &el, B);
        let ext = m.extend(&Cofunctor::identity(&c), &beta).unwrap();
        ext.validate().unwrap();
        assert_eq!(ext.num_positions(), m.num_positions());
    }
}

#[test]
fn copresheaves_embed_as_bicomodules_into_zero() {
    let mut rng = random::rng(18);
    let c = Arc::new(random::random_category(&mut rng, small()));
    let x = random::random_copresheaf(&mut rng, &c, 3);
    let m = Bicomodule::from_copresheaf(&x);
    m.validate().unwrap();
    let back: Copresheaf = m.to_copresheaf().unwrap();
    assert_eq!(back, x);
    let zero = Arc::new(FinCategory::empty());
    let applied = m.apply(&Copresheaf::empty(&zero), DEFAULT_CAP).unwrap();
    assert!(copresheaf::is_iso(&applied, &x));
    let _ = FinLabelSet::default();
}

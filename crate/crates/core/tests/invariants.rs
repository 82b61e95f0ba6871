use std::sync::Arc;

use num_bigint::BigUint;
use polyagg::aggregation::{check_coherence, CommMonoid, Instance, Schema};
use polyagg::comonoid::{category_to_comonoid, comonoid_to_category};
use polyagg::poly::{hom_count, parse::parse_poly, Poly};
use polyagg::random::{self, CategoryBounds};
use polyagg::span;
use proptest::prelude::*;

fn poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec(0usize..4, 0..4).prop_map(|e| Poly::from_exponents(&e))
}

const CAP: usize = 100_000;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn substitution_is_associative_and_unital(p in poly(), q in poly(), r in poly()) {
        let y = Poly::y();
        prop_assert!(p.substitute(&y, CAP).unwrap().is_iso(&p));
        prop_assert!(y.substitute(&p, CAP).unwrap().is_iso(&p));
        if let (Ok(pq), Ok(qr)) = (p.substitute(&q, CAP), q.substitute(&r, CAP)) {
            if let (Ok(a), Ok(b)) = (pq.substitute(&r, CAP), p.substitute(&qr, CAP)) {
                prop_assert!(a.is_iso(&b));
            }
        }
    }

    #[test]
    fn tensor_is_commutative_with_unit_y(p in poly(), q in poly()) {
        prop_assert!(p.tensor(&q).is_iso(&q.tensor(&p)));
        prop_assert!(p.tensor(&Poly::y()).is_iso(&p));
    }

    #[test]
    fn hom_counts_into_products_multiply(p in poly(), q in poly(), r in poly()) {
        prop_assert_eq!(hom_count(&p, &q.mul(&r)), hom_count(&p, &q) * hom_count(&p, &r));
        prop_assert_eq!(hom_count(&p.add(&q), &r), hom_count(&p, &r) * hom_count(&q, &r));
    }

    #[test]
    fn cardinality_of_composites(p in poly(), q in poly(), n in 0u32..4) {
        let n = BigUint::from(n);
        prop_assert_eq!(p.substitute(&q, CAP).unwrap().cardinality(&n), p.cardinality(&q.cardinality(&n)));
    }

    #[test]
    fn printing_a_polynomial_parses_back(p in poly()) {
        prop_assert!(parse_poly(&p.to_sum_string()).unwrap().is_iso(&p));
    }

    #[test]
    fn categories_survive_the_comonoid_round_trip(seed in any::<u64>()) {
        let c = random::random_category(&mut random::rng(seed), CategoryBounds { max_objects: 5, max_morphisms: 24 });
        let m = category_to_comonoid(&c).unwrap();
        prop_assert!(m.check_laws().is_ok());
        prop_assert_eq!(comonoid_to_category(&m).unwrap(), c);
    }

    #[test]
    fn spans_are_their_own_double_duals(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let s = random::random_span(&mut rng, "s", 3, 5);
        prop_assert_eq!(span::dual_conjunctive(&span::dual_span(&s)).canonical(), s.canonical());
        prop_assert_eq!(s.transpose().transpose().canonical(), s.canonical());
    }

    #[test]
    fn aggregation_is_coherent(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let c = Arc::new(random::random_category(&mut rng, CategoryBounds { max_objects: 3, max_morphisms: 10 }));
        let n = c.num_objects();
        let schema = Arc::new(Schema::new(c, vec![CommMonoid::max_with_bottom(); n]).unwrap());
        prop_assert!(check_coherence(&Instance::random(&mut rng, &schema, 4)).is_ok());
    }
}

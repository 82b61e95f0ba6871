use std::sync::Arc;
use std::time::Instant;

use polyagg::comonoid::full_internal_subcategory;
use polyagg::copresheaf::{self, Copresheaf};
use polyagg::finitary::*;
use polyagg::random::{self, labels, CategoryBounds};
use polyagg::{Error, FinCategory};

#[test]
fn skeleton_laws_up_to_four() {
    for k in 0..=4 {
        let t = Instant::now();
        let s = skeleton_fin(k).unwrap();
        s.category.validate().unwrap();
        s.check_functions().unwrap();
        s.monad.check_laws().unwrap();
        for m in 0..=k {
            for n in 0..=k {
                assert_eq!(s.hom(m, n).len(), n.pow(m as u32));
            }
        }
        let internal = full_internal_subcategory(&u_k(k), 10_000).unwrap();
        internal.same_table_under(&s.category.opposite_direct(), &skeleton_name).unwrap();
        eprintln!("K = {k}: {} morphisms in {:?}", s.category.num_morphisms(), t.elapsed());
    }
}

#[test]
fn classification_reconstructs() {
    let skeleton = skeleton_fin(4).unwrap();
    let generic = skeleton.generic_family();
    let mut rng = random::rng(31);
    let mut done = 0;
    while done < 100 {
        let c = Arc::new(random::random_category(&mut rng, CategoryBounds { max_objects: 4, max_morphisms: 16 }));
        let x = random::random_copresheaf(&mut rng, &c, 4);
        if x.max_rows() > 4 {
            assert!(matches!(classify_finitary(&x, 4), Err(Error::RowTooLarge { .. })));
            continue;
        }
        let cl = classify_finitary(&x, 4).unwrap();
        cl.check_functorial(&c).unwrap();
        assert!(copresheaf::is_iso(&cl.reconstruct(&c).unwrap(), &x));
        let f = cl.to_functor(&c, &skeleton).unwrap();
        assert!(copresheaf::is_iso(&generic.pullback(&f), &x));
        done += 1;
    }
}

#[test]
fn classification_examples() {
    let arrow = Arc::new(FinCategory::poset(&labels("p", 2), |a, b| a <= b).unwrap());
    let f = arrow.hom(0, 1)[0];
    let mut action = vec![Vec::new(); arrow.num_morphisms()];
    action[arrow.identity(0)] = vec![0, 1, 2];
    action[arrow.identity(1)] = vec![0, 1];
    action[f] = vec![1, 0, 1];
    let x = Copresheaf::new(arrow.clone(), vec![labels("x", 3), labels("y", 2)], action).unwrap();
    let cl = classify_finitary(&x, 4).unwrap();
    assert_eq!(cl.sizes, vec![3, 2]);
    assert_eq!(cl.tables[f], vec![1, 0, 1]);
    let skeleton = skeleton_fin(3).unwrap();
    let h = cl.to_functor(&arrow, &skeleton).unwrap();
    assert_eq!(skeleton.category.name(h.on_morphisms[f]), "3->2:[2,1,2]");

    let t = Copresheaf::terminal(&arrow);
    let cl = classify_finitary(&t, 4).unwrap();
    assert_eq!(cl.sizes, vec![1, 1]);
    assert!(cl.tables.iter().all(|v| v == &vec![0]));
    let e = Copresheaf::empty(&arrow);
    assert_eq!(classify_finitary(&e, 4).unwrap().sizes, vec![0, 0]);

    let big = Copresheaf::discrete(&Arc::new(FinCategory::terminal()), vec![labels("r", 5)]).unwrap();
    assert!(matches!(classify_finitary(&big, 4), Err(Error::RowTooLarge { rows: 5, bound: 4, .. })));
}

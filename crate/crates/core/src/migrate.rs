//! Data migration along a functor `F : c -> d`: pullback `Δ_F`, its right
//! adjoint `Π_F`, and its left adjoint `Σ_F` when `F` is etale.

use std::collections::HashMap;

use crate::copresheaf::{self, Copresheaf, CopresheafHom};
use crate::error::{Error, Result};
use crate::functor::CatFunctor;
use crate::label::FinLabelSet;

/// `Δ_F X = X ∘ F`.
pub fn delta(f: &CatFunctor, x: &Copresheaf) -> Result<Copresheaf> {
    if *x.base != *f.target {
        return Err(Error::mismatch("Δ", "instance does not live over the functor's target"));
    }
    Ok(x.pullback(f))
}

/// `(Π_F Y)(b) = c-Set(Δ_F d(b, -), Y)`.
pub fn pi(f: &CatFunctor, y: &Copresheaf, cap: usize) -> Result<Copresheaf> {
    let (c, d) = (&f.source, &f.target);
    if *y.base != **c {
        return Err(Error::mismatch("Π", "instance does not live over the functor's source"));
    }
    let reps: Vec<Copresheaf> = (0..d.num_objects()).map(|b| Copresheaf::representable(d, b).pullback(f)).collect();
    let mut sections = Vec::with_capacity(d.num_objects());
    let mut total = 0;
    for rep in &reps {
        let s = copresheaf::homs(rep, y, cap)?;
        total += s.len();
        if total > cap {
            return Err(Error::blowup("rows of Π_F Y", cap));
        }
        sections.push(s);
    }
    let index: Vec<HashMap<&CopresheafHom, usize>> = sections.iter().map(|s| s.iter().enumerate().map(|(k, h)| (h, k)).collect()).collect();
    let rows = sections.iter().map(|s| FinLabelSet::generated(s.iter().map(|h| h.label(y)))).collect();
    let action = (0..d.num_morphisms())
        .map(|g| {
            let (b, b2) = (d.dom(g), d.cod(g));
            // d(b2, -) -> d(b, -), h ↦ g ; h, read at each F a
            let (src, tgt) = (&reps[b2], &reps[b]);
            let pre = CopresheafHom {
                components: (0..c.num_objects())
                    .map(|a| {
                        (0..src.rows(a).len())
                            .map(|k| {
                                let h = d.find_morphism(src.rows(a).get(k)).expect("representable rows are morphisms");
                                tgt.rows(a).index_of(d.name(d.compose(g, h))).expect("composite in hom-set")
                            })
                            .collect()
                    })
                    .collect(),
            };
            sections[b].iter().map(|s| index[b2][&pre.then(s)]).collect()
        })
        .collect();
    Copresheaf::new_unchecked(d.clone(), rows, action)
}

/// `(Σ_F Y)(b) = Σ_{F a = b} Y(a)` for an etale `F`.
pub fn sigma(f: &CatFunctor, y: &Copresheaf) -> Result<Copresheaf> {
    let (c, d) = (&f.source, &f.target);
    if *y.base != **c {
        return Err(Error::mismatch("Σ", "instance does not live over the functor's source"));
    }
    let lift = f.to_cofunctor()?;
    let mut place = vec![Vec::new(); c.num_objects()];
    let mut owner: Vec<Vec<(usize, usize)>> = vec![Vec::new(); d.num_objects()];
    for a in 0..c.num_objects() {
        let b = f.on_objects[a];
        for x in 0..y.rows(a).len() {
            place[a].push(owner[b].len());
            owner[b].push((a, x));
        }
    }
    let rows = owner.iter().map(|own| FinLabelSet::generated(own.iter().map(|&(a, x)| y.rows(a).get(x)))).collect();
    let action = (0..d.num_morphisms())
        .map(|g| {
            owner[d.dom(g)]
                .iter()
                .map(|&(a, x)| {
                    let h = lift.lift(a, g);
                    place[c.cod(h)][y.act(h, x)]
                })
                .collect()
        })
        .collect();
    Copresheaf::new_unchecked(d.clone(), rows, action)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::FinCategory;
    use std::sync::Arc;

    fn arrow() -> Arc<FinCategory> {
        Arc::new(FinCategory::poset(&FinLabelSet::ordinal(2), |a, b| a <= b).unwrap())
    }

    #[test]
    fn pi_along_terminal_is_limit() {
        // Π along c -> 1 is the set of global sections
        let c = arrow();
        let one = Arc::new(FinCategory::terminal());
        let f = CatFunctor::new(c.clone(), one.clone(), vec![0, 0], vec![0; c.num_morphisms()]).unwrap();
        let rows = vec![FinLabelSet::ordinal(3), FinLabelSet::ordinal(2)];
        let action =
            (0..c.num_morphisms()).map(|g| if c.is_identity(g) { (0..rows[c.dom(g)].len()).collect() } else { vec![0, 1, 1] }).collect();
        let y = Copresheaf::new(c.clone(), rows, action).unwrap();
        let p = pi(&f, &y, 1000).unwrap();
        p.validate().unwrap();
        // the limit of an arrow diagram is its source
        assert_eq!(p.rows(0).len(), 3);
        assert!(matches!(sigma(&f, &y), Err(Error::NotEtale { .. })));
    }

    #[test]
    fn sigma_along_elements_projection() {
        let c = arrow();
        let rows = vec![FinLabelSet::ordinal(2), FinLabelSet::ordinal(1)];
        let action =
            (0..c.num_morphisms()).map(|g| if c.is_identity(g) { (0..rows[c.dom(g)].len()).collect() } else { vec![0, 0] }).collect();
        let x = Copresheaf::new(c.clone(), rows, action).unwrap();
        let (_, proj) = x.category_of_elements();
        let t = Copresheaf::terminal(&proj.source);
        let s = sigma(&proj, &t).unwrap();
        s.validate().unwrap();
        // Σ of the terminal copresheaf along el(X) -> c recovers X
        assert!(copresheaf::is_iso(&s, &x));
    }
}

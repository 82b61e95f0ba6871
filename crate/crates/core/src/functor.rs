//! Functors and cofunctors between finite categories.

use std::sync::Arc;

use crate::category::FinCategory;
use crate::comonoid::{carrier_of, category_to_comonoid};
use crate::error::{Error, Result};
use crate::poly::PolyMap;

#[derive(Clone, Debug, PartialEq)]
pub struct CatFunctor {
    pub source: Arc<FinCategory>,
    pub target: Arc<FinCategory>,
    pub on_objects: Vec<usize>,
    pub on_morphisms: Vec<usize>,
}

impl CatFunctor {
    pub fn new(source: Arc<FinCategory>, target: Arc<FinCategory>, on_objects: Vec<usize>, on_morphisms: Vec<usize>) -> Result<Self> {
        let f = CatFunctor { source, target, on_objects, on_morphisms };
        f.validate()?;
        Ok(f)
    }

    pub fn identity(c: &Arc<FinCategory>) -> Self {
        CatFunctor {
            source: c.clone(),
            target: c.clone(),
            on_objects: (0..c.num_objects()).collect(),
            on_morphisms: (0..c.num_morphisms()).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (c, d) = (&self.source, &self.target);
        if self.on_objects.len() != c.num_objects() || self.on_morphisms.len() != c.num_morphisms() {
            return Err(Error::WrongShape("functor data does not cover the source".into()));
        }
        for f in 0..c.num_morphisms() {
            let g = self.on_morphisms[f];
            if d.dom(g) != self.on_objects[c.dom(f)] || d.cod(g) != self.on_objects[c.cod(f)] {
                return Err(Error::law("functor typing", c.name(f), format!("image {} has the wrong endpoints", d.name(g))));
            }
        }
        for a in 0..c.num_objects() {
            if self.on_morphisms[c.identity(a)] != d.identity(self.on_objects[a]) {
                return Err(Error::law("functor preserves identities", c.object_label(a), "identity not sent to identity"));
            }
        }
        for f in 0..c.num_morphisms() {
            for &g in c.out(c.cod(f)) {
                let lhs = self.on_morphisms[c.compose(f, g)];
                let rhs = d.compose(self.on_morphisms[f], self.on_morphisms[g]);
                if lhs != rhs {
                    return Err(Error::law(
                        "functor preserves composition",
                        format!("{};{}", c.name(f), c.name(g)),
                        format!("{} vs {}", d.name(lhs), d.name(rhs)),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Diagrammatic composite `self ; g`.
    pub fn then(&self, g: &CatFunctor) -> CatFunctor {
        CatFunctor {
            source: self.source.clone(),
            target: g.target.clone(),
            on_objects: self.on_objects.iter().map(|&b| g.on_objects[b]).collect(),
            on_morphisms: self.on_morphisms.iter().map(|&f| g.on_morphisms[f]).collect(),
        }
    }

    /// Whether each `c[a] -> d[F a]` is a bijection; on failure names the object.
    pub fn check_etale(&self) -> Result<()> {
        let (c, d) = (&self.source, &self.target);
        for a in 0..c.num_objects() {
            let fa = self.on_objects[a];
            let mut hit = vec![false; d.out(fa).len()];
            for &f in c.out(a) {
                let k = d.out_index(self.on_morphisms[f]);
                if hit[k] {
                    return Err(Error::NotEtale {
                        object: c.object_label(a).to_string(),
                        message: format!("two morphisms map to {}", d.name(self.on_morphisms[f])),
                    });
                }
                hit[k] = true;
            }
            if let Some(k) = hit.iter().position(|h| !h) {
                return Err(Error::NotEtale {
                    object: c.object_label(a).to_string(),
                    message: format!("{} has no lift", d.name(d.out(fa)[k])),
                });
            }
        }
        Ok(())
    }

    pub fn is_etale(&self) -> bool {
        self.check_etale().is_ok()
    }

    /// The unique lifting cofunctor of an etale functor.
    pub fn to_cofunctor(&self) -> Result<Cofunctor> {
        self.check_etale()?;
        let (c, d) = (&self.source, &self.target);
        let back = (0..c.num_objects())
            .map(|a| {
                let mut lifts = vec![0; d.out(self.on_objects[a]).len()];
                for &f in c.out(a) {
                    lifts[d.out_index(self.on_morphisms[f])] = f;
                }
                lifts
            })
            .collect();
        Ok(Cofunctor { source: c.clone(), target: d.clone(), on_objects: self.on_objects.clone(), back })
    }
}

/// All functors `c -> d`, or `SizeBlowup` once more than `cap` are found.
pub fn enumerate_functors(c: &Arc<FinCategory>, d: &Arc<FinCategory>, cap: usize) -> Result<Vec<CatFunctor>> {
    let mut out = Vec::new();
    let mut objs = vec![0; c.num_objects()];
    search_objects(c, d, 0, &mut objs, cap, &mut out)?;
    Ok(out)
}

fn search_objects(
    c: &Arc<FinCategory>,
    d: &Arc<FinCategory>,
    k: usize,
    objs: &mut Vec<usize>,
    cap: usize,
    out: &mut Vec<CatFunctor>,
) -> Result<()> {
    if k == c.num_objects() {
        let mut mors = vec![usize::MAX; c.num_morphisms()];
        return search_morphisms(c, d, 0, objs, &mut mors, cap, out);
    }
    for b in 0..d.num_objects() {
        objs[k] = b;
        search_objects(c, d, k + 1, objs, cap, out)?;
    }
    Ok(())
}

fn search_morphisms(
    c: &Arc<FinCategory>,
    d: &Arc<FinCategory>,
    k: usize,
    objs: &[usize],
    mors: &mut Vec<usize>,
    cap: usize,
    out: &mut Vec<CatFunctor>,
) -> Result<()> {
    if k == c.num_morphisms() {
        if out.len() >= cap {
            return Err(Error::blowup("functors", cap));
        }
        out.push(CatFunctor { source: c.clone(), target: d.clone(), on_objects: objs.to_vec(), on_morphisms: mors.clone() });
        return Ok(());
    }
    let candidates = if c.is_identity(k) { vec![d.identity(objs[c.dom(k)])] } else { d.hom(objs[c.dom(k)], objs[c.cod(k)]) };
    'next: for g in candidates {
        mors[k] = g;
        for f in 0..=k {
            for h in 0..=k {
                if let Some(fh) = c.try_compose(f, h) {
                    if fh <= k && d.compose(mors[f], mors[h]) != mors[fh] {
                        continue 'next;
                    }
                }
            }
        }
        search_morphisms(c, d, k + 1, objs, mors, cap, out)?;
    }
    mors[k] = usize::MAX;
    Ok(())
}

/// A cofunctor `c ↛ d`: objects go forward, and each morphism of `d` out of
/// `F a` lifts to a morphism of `c` out of `a`.
#[derive(Clone, Debug)]
pub struct Cofunctor {
    pub source: Arc<FinCategory>,
    pub target: Arc<FinCategory>,
    pub on_objects: Vec<usize>,
    /// `back[a][k]` lifts the `k`-th morphism of `target.out(F a)`.
    pub back: Vec<Vec<usize>>,
}

impl Cofunctor {
    pub fn new(source: Arc<FinCategory>, target: Arc<FinCategory>, on_objects: Vec<usize>, back: Vec<Vec<usize>>) -> Result<Self> {
        let f = Cofunctor { source, target, on_objects, back };
        f.validate()?;
        Ok(f)
    }

    pub fn identity(c: &Arc<FinCategory>) -> Self {
        Cofunctor {
            source: c.clone(),
            target: c.clone(),
            on_objects: (0..c.num_objects()).collect(),
            back: (0..c.num_objects()).map(|a| c.out(a).to_vec()).collect(),
        }
    }

    /// The lift of `g` (a morphism of the target out of `F a`) at `a`.
    pub fn lift(&self, a: usize, g: usize) -> usize {
        self.back[a][self.target.out_index(g)]
    }

    pub fn validate(&self) -> Result<()> {
        let (c, d) = (&self.source, &self.target);
        if self.on_objects.len() != c.num_objects() || self.back.len() != c.num_objects() {
            return Err(Error::WrongShape("cofunctor data does not cover the source".into()));
        }
        for a in 0..c.num_objects() {
            let fa = self.on_objects[a];
            if self.back[a].len() != d.out(fa).len() {
                return Err(Error::WrongShape(format!("lifts at {} do not cover d[F a]", c.object_label(a))));
            }
            for (k, &f) in self.back[a].iter().enumerate() {
                if c.dom(f) != a {
                    return Err(Error::law("cofunctor typing", c.object_label(a), format!("lift {} does not start here", c.name(f))));
                }
                let g = d.out(fa)[k];
                if self.on_objects[c.cod(f)] != d.cod(g) {
                    return Err(Error::law("cofunctor preserves codomains", d.name(g), format!("lift {} lands elsewhere", c.name(f))));
                }
            }
            if self.lift(a, d.identity(fa)) != c.identity(a) {
                return Err(Error::law("cofunctor preserves identities", c.object_label(a), "identity lifts to a non-identity"));
            }
            for &g in d.out(fa) {
                let f = self.lift(a, g);
                for &h in d.out(d.cod(g)) {
                    let lhs = self.lift(a, d.compose(g, h));
                    let rhs = c.compose(f, self.lift(c.cod(f), h));
                    if lhs != rhs {
                        return Err(Error::law(
                            "cofunctor preserves composition",
                            format!("{} at {}: {};{}", c.object_label(a), d.name(g), d.name(g), d.name(h)),
                            format!("{} vs {}", c.name(lhs), c.name(rhs)),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Diagrammatic composite `self ; g`.
    pub fn then(&self, g: &Cofunctor) -> Cofunctor {
        let back = (0..self.source.num_objects())
            .map(|a| {
                let fa = self.on_objects[a];
                g.back[fa].iter().map(|&m| self.lift(a, m)).collect()
            })
            .collect();
        Cofunctor {
            source: self.source.clone(),
            target: g.target.clone(),
            on_objects: self.on_objects.iter().map(|&b| g.on_objects[b]).collect(),
            back,
        }
    }

    /// The underlying map of carriers.
    pub fn to_poly_map(&self) -> PolyMap {
        let (c, d) = (&self.source, &self.target);
        PolyMap {
            source: Arc::new(carrier_of(c)),
            target: Arc::new(carrier_of(d)),
            on_positions: self.on_objects.clone(),
            on_directions: self.back.iter().map(|ls| ls.iter().map(|&f| c.out_index(f)).collect()).collect(),
        }
    }

    /// Checks that the carrier map commutes with counits and comultiplications.
    pub fn check_comonoid_map(&self) -> Result<()> {
        let mc = category_to_comonoid(&self.source)?;
        let md = category_to_comonoid(&self.target)?;
        let phi = self.to_poly_map();
        if phi.then(&md.counit)? != mc.counit {
            return Err(Error::law("cofunctor respects counits", "φ ; ε", "identity lifts differ"));
        }
        let lhs = md.comult.precompose(&phi)?;
        let rhs = mc.comult.map_at(0, &phi)?.map_at(1, &phi)?;
        if let Some(w) = lhs.first_difference(&rhs) {
            return Err(Error::law("cofunctor respects comultiplication", "φ ; δ", w));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::FinLabelSet;

    #[test]
    fn functors_from_a_chain() {
        let two = Arc::new(FinCategory::poset(&FinLabelSet::ordinal(2), |a, b| a <= b).unwrap());
        let three = Arc::new(FinCategory::poset(&FinLabelSet::ordinal(3), |a, b| a <= b).unwrap());
        // monotone maps 2 -> 3
        let fs = enumerate_functors(&two, &three, 100).unwrap();
        assert_eq!(fs.len(), 6);
        for f in &fs {
            f.validate().unwrap();
        }
    }

    #[test]
    fn identity_cofunctor_is_a_comonoid_map() {
        let c = Arc::new(FinCategory::codiscrete(&FinLabelSet::ordinal(3)));
        let id = Cofunctor::identity(&c);
        id.validate().unwrap();
        id.check_comonoid_map().unwrap();
        let twice = id.then(&id);
        assert_eq!(twice.back, id.back);
    }

    #[test]
    fn non_etale_is_reported() {
        let two = Arc::new(FinCategory::poset(&FinLabelSet::ordinal(2), |a, b| a <= b).unwrap());
        let one = Arc::new(FinCategory::terminal());
        let f = CatFunctor::new(two.clone(), one, vec![0, 0], vec![0; two.num_morphisms()]).unwrap();
        assert!(matches!(f.check_etale(), Err(Error::NotEtale { .. })));
    }
}

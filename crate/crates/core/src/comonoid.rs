//! Categories as polynomial comonoids `(c, ε, δ)`.

use std::collections::HashMap;
use std::sync::Arc;

use crate::category::{FinCategory, Morphism};
use crate::composite::{Component, CompositeMap, Tree};
use crate::error::{Error, Result};
use crate::label::{functions, list_label, tuple_label, FinLabelSet};
use crate::poly::{Poly, PolyMap};

/// A polynomial comonoid. The comultiplication is a map into `c ◁ c`
/// kept in tree form, see [`CompositeMap`].
#[derive(Clone, Debug)]
pub struct Comonoid {
    pub carrier: Arc<Poly>,
    pub counit: PolyMap,
    pub comult: CompositeMap,
}

/// The outfacing polynomial `Σ_a y^{c[a]}` of a category.
pub fn carrier_of(c: &FinCategory) -> Poly {
    let dirs = (0..c.num_objects()).map(|a| FinLabelSet::generated(c.out(a).iter().map(|&f| c.name(f)))).collect();
    Poly::new(c.objects().clone(), dirs).expect("carrier")
}

/// Reads a composition table as a comonoid. The table need not satisfy the
/// category laws, but composites must be typed so that `δ` is a map.
pub fn category_to_comonoid(c: &FinCategory) -> Result<Comonoid> {
    let carrier = Arc::new(carrier_of(c));
    let y = Arc::new(Poly::y());
    let counit = PolyMap::new(
        carrier.clone(),
        y.clone(),
        vec![0; c.num_objects()],
        (0..c.num_objects()).map(|a| vec![c.out_index(c.identity(a))]).collect(),
    )?;
    let mut components = Vec::with_capacity(c.num_objects());
    for a in 0..c.num_objects() {
        let children = c.out(a).iter().map(|&f| Tree::Node(c.cod(f), vec![Tree::Leaf; c.out(c.cod(f)).len()])).collect();
        let mut back = HashMap::new();
        for (d, &f) in c.out(a).iter().enumerate() {
            for (e, &g) in c.out(c.cod(f)).iter().enumerate() {
                let pair = format!("{};{}", c.name(f), c.name(g));
                let h = c.try_compose(f, g).ok_or_else(|| Error::law("composition table total", pair.clone(), "missing composite"))?;
                if c.dom(h) != a {
                    return Err(Error::mismatch(pair, format!("composite {} does not start at {}", c.name(h), c.object_label(a))));
                }
                back.insert(vec![d, e], c.out_index(h));
            }
        }
        components.push(Component { tree: Tree::Node(a, children), back });
    }
    let comult = CompositeMap { source: carrier.clone(), levels: vec![carrier.clone(), carrier.clone()], components };
    Ok(Comonoid { carrier, counit, comult })
}

impl Comonoid {
    /// Checks the counit and coassociativity laws by composing the diagram
    /// legs as maps and comparing them componentwise.
    pub fn check_laws(&self) -> Result<()> {
        let c = &self.carrier;
        if *self.counit.source != **c || self.counit.target.num_positions() != 1 || self.counit.target.arity(0) != 1 {
            return Err(Error::mismatch("counit", "counit must be a map c -> y"));
        }
        if self.comult.levels.len() != 2 || *self.comult.levels[0] != **c || *self.comult.levels[1] != **c {
            return Err(Error::mismatch("comultiplication", "comultiplication must land in c ◁ c"));
        }
        let id = CompositeMap::from_map(&PolyMap::identity(c));
        let left = self.comult.map_at(0, &self.counit)?.remove_unit_level(0)?;
        if let Some(w) = left.first_difference(&id) {
            return Err(Error::law("left counit", "(ε ◁ c) ∘ δ", w));
        }
        let right = self.comult.map_at(1, &self.counit)?.remove_unit_level(1)?;
        if let Some(w) = right.first_difference(&id) {
            return Err(Error::law("right counit", "(c ◁ ε) ∘ δ", w));
        }
        let outer = self.comult.substitute_at(0, &self.comult)?;
        let inner = self.comult.substitute_at(1, &self.comult)?;
        if let Some(w) = outer.first_difference(&inner) {
            return Err(Error::law("coassociativity", "(δ ◁ c) ∘ δ vs (c ◁ δ) ∘ δ", w));
        }
        Ok(())
    }

    /// Tensor product of comonoids on `c ⊗ d`.
    pub fn tensor(&self, other: &Comonoid) -> Comonoid {
        let (c, d) = (&self.carrier, &other.carrier);
        let carrier = Arc::new(c.tensor(d));
        let nd = d.num_positions();
        let counit_dirs = (0..c.num_positions())
            .flat_map(|a| (0..nd).map(move |b| (a, b)))
            .map(|(a, b)| vec![self.counit.on_directions[a][0] * d.arity(b) + other.counit.on_directions[b][0]])
            .collect();
        let counit = PolyMap {
            source: carrier.clone(),
            target: Arc::new(Poly::y()),
            on_positions: vec![0; carrier.num_positions()],
            on_directions: counit_dirs,
        };
        let mut components = Vec::new();
        for a in 0..c.num_positions() {
            for b in 0..nd {
                let (ca, cb) = (&self.comult.components[a], &other.comult.components[b]);
                let (Tree::Node(ra, ka), Tree::Node(rb, kb)) = (&ca.tree, &cb.tree) else {
                    unreachable!("comultiplication trees have depth two")
                };
                let root = |t: &Tree| match t {
                    Tree::Node(i, _) => *i,
                    Tree::Leaf => unreachable!(),
                };
                let mut children = Vec::new();
                let mut back = HashMap::new();
                for (f, tf) in ka.iter().enumerate() {
                    for (g, tg) in kb.iter().enumerate() {
                        let (x, z) = (root(tf), root(tg));
                        children.push(Tree::Node(x * nd + z, vec![Tree::Leaf; c.arity(x) * d.arity(z)]));
                        let dir = f * d.arity(b) + g;
                        for f2 in 0..c.arity(x) {
                            for g2 in 0..d.arity(z) {
                                let h1 = ca.back[&vec![f, f2]];
                                let h2 = cb.back[&vec![g, g2]];
                                back.insert(vec![dir, f2 * d.arity(z) + g2], h1 * d.arity(b) + h2);
                            }
                        }
                    }
                }
                components.push(Component { tree: Tree::Node(ra * nd + rb, children), back });
            }
        }
        let comult = CompositeMap { source: carrier.clone(), levels: vec![carrier.clone(), carrier.clone()], components };
        Comonoid { carrier, counit, comult }
    }
}

/// Reads a comonoid back as a category: objects are positions, morphisms
/// out of `a` are the directions at `a`.
pub fn comonoid_to_category(m: &Comonoid) -> Result<FinCategory> {
    m.check_laws()?;
    let c = &m.carrier;
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for a in 0..c.num_positions() {
        for d in c.directions(a).iter() {
            *counts.entry(d).or_default() += 1;
        }
    }
    let mut morphisms = Vec::new();
    let mut base = Vec::with_capacity(c.num_positions());
    for a in 0..c.num_positions() {
        base.push(morphisms.len());
        let Tree::Node(_, children) = &m.comult.components[a].tree else { unreachable!() };
        for (d, label) in c.directions(a).iter().enumerate() {
            let name = if counts[label] == 1 { label.to_string() } else { format!("{}/{}", c.positions().get(a), label) };
            let Tree::Node(cod, _) = children[d] else { unreachable!() };
            morphisms.push(Morphism { name, dom: a, cod });
        }
    }
    let ids = (0..c.num_positions()).map(|a| base[a] + m.counit.on_directions[a][0]).collect();
    let owner: Vec<(usize, usize)> = morphisms.iter().enumerate().map(|(k, mm)| (mm.dom, k - base[mm.dom])).collect();
    let cods: Vec<usize> = morphisms.iter().map(|mm| mm.cod).collect();
    FinCategory::new(c.positions().clone(), morphisms, ids, |f, g| {
        let (a, d) = owner[f];
        let (_, e) = owner[g];
        debug_assert_eq!(cods[f], owner[g].0);
        let h = m.comult.components[a].back[&vec![d, e]];
        Some(base[a] + h)
    })
}

/// The full internal subcategory `F_p`: objects `p(1)`, morphisms `i -> i'`
/// the functions `p[i'] -> p[i]`. Morphisms are named `(i,i',[images])`.
pub fn full_internal_subcategory(p: &Poly, cap: usize) -> Result<FinCategory> {
    let n = p.num_positions();
    let total: usize = (0..n)
        .map(|i| (0..n).map(|i2| p.arity(i).checked_pow(p.arity(i2) as u32).unwrap_or(usize::MAX)).fold(0usize, usize::saturating_add))
        .fold(0usize, usize::saturating_add);
    if total > cap {
        return Err(Error::blowup(format!("morphisms of the full internal subcategory ({total})"), cap));
    }
    let mut morphisms = Vec::with_capacity(total);
    let mut index: HashMap<(usize, usize, Vec<usize>), usize> = HashMap::with_capacity(total);
    let mut data = Vec::with_capacity(total);
    for i in 0..n {
        for i2 in 0..n {
            for f in functions(p.arity(i2), p.arity(i)) {
                let name = tuple_label(&[
                    p.positions().get(i).to_string(),
                    p.positions().get(i2).to_string(),
                    list_label(f.iter().map(|&d| p.directions(i).get(d))),
                ]);
                index.insert((i, i2, f.clone()), morphisms.len());
                data.push((i, i2, f));
                morphisms.push(Morphism { name, dom: i, cod: i2 });
            }
        }
    }
    let ids = (0..n).map(|i| index[&(i, i, (0..p.arity(i)).collect())]).collect();
    FinCategory::new_unchecked(p.positions().clone(), morphisms, ids, |f, g| {
        let (i, _, ff) = &data[f];
        let (_, i3, gg) = &data[g];
        let composite: Vec<usize> = gg.iter().map(|&x| ff[x]).collect();
        index.get(&(*i, *i3, composite)).copied()
    })
}

/// The product category, computed through the tensor of comonoids.
pub fn product_category(c: &FinCategory, d: &FinCategory) -> Result<FinCategory> {
    let m = category_to_comonoid(c)?.tensor(&category_to_comonoid(d)?);
    comonoid_to_category(&m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse::parse_poly;

    fn chain(n: usize) -> FinCategory {
        FinCategory::poset(&FinLabelSet::ordinal(n), |a, b| a <= b).unwrap()
    }

    #[test]
    fn roundtrip_is_identity() {
        for c in [chain(3), FinCategory::codiscrete(&FinLabelSet::ordinal(3)), FinCategory::discrete(&FinLabelSet::ordinal(2))] {
            let m = category_to_comonoid(&c).unwrap();
            m.check_laws().unwrap();
            assert_eq!(comonoid_to_category(&m).unwrap(), c);
        }
    }

    #[test]
    fn corrupted_composite_breaks_a_law() {
        let c = FinCategory::monoid(&FinLabelSet::ordinal(3), 0, |a, b| (a + b) % 3).unwrap();
        let bad = c.with_composite(1, 1, 0);
        let m = category_to_comonoid(&bad).unwrap();
        assert!(matches!(m.check_laws(), Err(Error::LawViolation { .. })));
    }

    #[test]
    fn representable_comonoid_is_a_monoid() {
        let c = FinCategory::monoid(&FinLabelSet::ordinal(2), 0, |a, b| a ^ b).unwrap();
        let m = category_to_comonoid(&c).unwrap();
        assert_eq!(m.carrier.to_sum_string(), "y^2");
    }

    #[test]
    fn full_internal_subcategory_of_sets() {
        let p = parse_poly("{a: [x, y], b: [z]}").unwrap();
        let f = full_internal_subcategory(&p, 1000).unwrap();
        f.validate().unwrap();
        // hom(a, a) = 2^2, hom(a, b) = 2^1, hom(b, a) = 1^2, hom(b, b) = 1
        assert_eq!(f.num_morphisms(), 4 + 2 + 1 + 1);
        let m = category_to_comonoid(&f).unwrap();
        m.check_laws().unwrap();
    }

    #[test]
    fn product_through_tensor_matches_direct() {
        let (c, d) = (chain(2), FinCategory::codiscrete(&FinLabelSet::ordinal(2)));
        product_category(&c, &d).unwrap().same_table(&c.product_direct(&d)).unwrap();
    }
}

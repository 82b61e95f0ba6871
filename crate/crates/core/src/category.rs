//! Finite categories given by explicit composition tables.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::label::{tuple_label, FinLabelSet};

const NONE: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Morphism {
    pub name: String,
    pub dom: usize,
    pub cod: usize,
}

#[derive(Clone)]
pub struct FinCategory {
    objects: FinLabelSet,
    morphisms: Vec<Morphism>,
    names: HashMap<String, usize>,
    identities: Vec<usize>,
    table: Vec<u32>,
    out: Vec<Vec<usize>>,
    into: Vec<Vec<usize>>,
    out_index: Vec<usize>,
}

impl FinCategory {
    /// Builds and validates a category. `compose(f, g)` is the diagrammatic
    /// composite `f ; g` and is only consulted when `cod f = dom g`.
    pub fn new(
        objects: FinLabelSet,
        morphisms: Vec<Morphism>,
        identities: Vec<usize>,
        compose: impl FnMut(usize, usize) -> Option<usize>,
    ) -> Result<Self> {
        let c = FinCategory::new_unchecked(objects, morphisms, identities, compose)?;
        c.validate()?;
        Ok(c)
    }

    /// Builds the table without checking the category laws. Shapes (name
    /// uniqueness, index ranges) are still checked.
    pub fn new_unchecked(
        objects: FinLabelSet,
        morphisms: Vec<Morphism>,
        identities: Vec<usize>,
        mut compose: impl FnMut(usize, usize) -> Option<usize>,
    ) -> Result<Self> {
        let n = morphisms.len();
        let k = objects.len();
        let mut names = HashMap::with_capacity(n);
        for (i, m) in morphisms.iter().enumerate() {
            if m.dom >= k || m.cod >= k {
                return Err(Error::mismatch(format!("morphism {}", m.name), "endpoint is not an object"));
            }
            if names.insert(m.name.clone(), i).is_some() {
                return Err(Error::parse(format!("morphism {}", m.name), "duplicate morphism name"));
            }
        }
        if identities.len() != k || identities.iter().any(|&i| i >= n) {
            return Err(Error::WrongShape("every object needs exactly one identity".into()));
        }
        let mut out = vec![Vec::new(); k];
        let mut into = vec![Vec::new(); k];
        let mut out_index = vec![0; n];
        for (i, m) in morphisms.iter().enumerate() {
            out_index[i] = out[m.dom].len();
            out[m.dom].push(i);
            into[m.cod].push(i);
        }
        let mut table = vec![NONE; n * n];
        for f in 0..n {
            for &g in &out[morphisms[f].cod] {
                if let Some(h) = compose(f, g) {
                    if h >= n {
                        return Err(Error::mismatch(
                            format!("composition {};{}", morphisms[f].name, morphisms[g].name),
                            "composite is not a morphism",
                        ));
                    }
                    table[f * n + g] = h as u32;
                }
            }
        }
        Ok(FinCategory { objects, morphisms, names, identities, table, out, into, out_index })
    }

    /// Checks the composition table against the category laws, reporting the
    /// first offending pair or triple.
    pub fn validate(&self) -> Result<()> {
        for (a, &i) in self.identities.iter().enumerate() {
            let m = &self.morphisms[i];
            if m.dom != a || m.cod != a {
                return Err(Error::law(
                    "identity typing",
                    format!("identity of {}", self.objects.get(a)),
                    format!("{} is not an endomorphism of {}", m.name, self.objects.get(a)),
                ));
            }
        }
        for f in 0..self.num_morphisms() {
            for &g in self.out(self.cod(f)) {
                let pair = format!("{};{}", self.name(f), self.name(g));
                let h = self.try_compose(f, g).ok_or_else(|| Error::law("composition table total", pair.clone(), "missing composite"))?;
                if self.dom(h) != self.dom(f) || self.cod(h) != self.cod(g) {
                    return Err(Error::law("composite typing", pair, format!("{} has the wrong endpoints", self.name(h))));
                }
            }
        }
        for f in 0..self.num_morphisms() {
            let (a, b) = (self.dom(f), self.cod(f));
            if self.compose(self.identities[a], f) != f {
                return Err(Error::law("left unit", format!("id;{}", self.name(f)), self.name(self.compose(self.identities[a], f))));
            }
            if self.compose(f, self.identities[b]) != f {
                return Err(Error::law("right unit", format!("{};id", self.name(f)), self.name(self.compose(f, self.identities[b]))));
            }
        }
        for f in 0..self.num_morphisms() {
            for &g in self.out(self.cod(f)) {
                let fg = self.compose(f, g);
                for &h in self.out(self.cod(g)) {
                    let l = self.compose(fg, h);
                    let r = self.compose(f, self.compose(g, h));
                    if l != r {
                        return Err(Error::law(
                            "associativity",
                            format!("({};{});{}", self.name(f), self.name(g), self.name(h)),
                            format!("{} vs {}", self.name(l), self.name(r)),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn objects(&self) -> &FinLabelSet {
        &self.objects
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn object_label(&self, a: usize) -> &str {
        self.objects.get(a)
    }

    pub fn morphisms(&self) -> &[Morphism] {
        &self.morphisms
    }

    pub fn num_morphisms(&self) -> usize {
        self.morphisms.len()
    }

    pub fn name(&self, f: usize) -> &str {
        &self.morphisms[f].name
    }

    pub fn find_morphism(&self, name: &str) -> Option<usize> {
        self.names.get(name).copied()
    }

    pub fn dom(&self, f: usize) -> usize {
        self.morphisms[f].dom
    }

    pub fn cod(&self, f: usize) -> usize {
        self.morphisms[f].cod
    }

    pub fn identity(&self, a: usize) -> usize {
        self.identities[a]
    }

    pub fn identities(&self) -> &[usize] {
        &self.identities
    }

    pub fn is_identity(&self, f: usize) -> bool {
        self.identities[self.dom(f)] == f
    }

    /// Morphisms out of `a`, i.e. the directions `c[a]` of the carrier.
    pub fn out(&self, a: usize) -> &[usize] {
        &self.out[a]
    }

    pub fn into(&self, a: usize) -> &[usize] {
        &self.into[a]
    }

    /// Position of `f` within `out(dom f)`.
    pub fn out_index(&self, f: usize) -> usize {
        self.out_index[f]
    }

    pub fn try_compose(&self, f: usize, g: usize) -> Option<usize> {
        let h = self.table[f * self.morphisms.len() + g];
        (h != NONE).then_some(h as usize)
    }

    /// Diagrammatic composite `f ; g`. Panics if the pair is not composable.
    pub fn compose(&self, f: usize, g: usize) -> usize {
        self.try_compose(f, g).unwrap_or_else(|| panic!("{} and {} are not composable", self.name(f), self.name(g)))
    }

    pub fn hom(&self, a: usize, b: usize) -> Vec<usize> {
        self.out[a].iter().copied().filter(|&f| self.cod(f) == b).collect()
    }

    pub fn is_discrete(&self) -> bool {
        self.morphisms.len() == self.objects.len()
    }

    /// The same table with one composite replaced. Used to exercise law
    /// checkers on corrupted input.
    pub fn with_composite(&self, f: usize, g: usize, h: usize) -> FinCategory {
        let mut c = self.clone();
        let n = c.morphisms.len();
        c.table[f * n + g] = h as u32;
        c
    }

    pub fn empty() -> Self {
        FinCategory::discrete(&FinLabelSet::default())
    }

    pub fn terminal() -> Self {
        FinCategory::discrete(&FinLabelSet::generated(["*"]))
    }

    pub fn discrete(objects: &FinLabelSet) -> Self {
        let morphisms = objects.iter().enumerate().map(|(a, l)| Morphism { name: format!("id_{l}"), dom: a, cod: a }).collect();
        FinCategory::new(objects.clone(), morphisms, (0..objects.len()).collect(), |f, _| Some(f)).expect("discrete category")
    }

    /// One morphism `a->b` for every ordered pair.
    pub fn codiscrete(objects: &FinLabelSet) -> Self {
        let k = objects.len();
        let mut morphisms = Vec::with_capacity(k * k);
        for a in 0..k {
            for b in 0..k {
                morphisms.push(Morphism { name: format!("{}->{}", objects.get(a), objects.get(b)), dom: a, cod: b });
            }
        }
        let ids = (0..k).map(|a| a * k + a).collect();
        FinCategory::new(objects.clone(), morphisms, ids, |f, g| Some((f / k) * k + g % k)).expect("codiscrete")
    }

    /// A one-object category from a monoid; `mul(x, y)` is "x then y".
    pub fn monoid(elements: &FinLabelSet, unit: usize, mut mul: impl FnMut(usize, usize) -> usize) -> Result<Self> {
        let morphisms = elements.iter().map(|l| Morphism { name: l.to_string(), dom: 0, cod: 0 }).collect();
        FinCategory::new(FinLabelSet::generated(["*"]), morphisms, vec![unit], |f, g| Some(mul(f, g)))
    }

    /// The poset category of a reflexive transitive relation.
    pub fn poset(objects: &FinLabelSet, leq: impl Fn(usize, usize) -> bool) -> Result<Self> {
        let k = objects.len();
        let mut morphisms = Vec::new();
        let mut index = HashMap::new();
        for a in 0..k {
            for b in 0..k {
                if a == b || leq(a, b) {
                    index.insert((a, b), morphisms.len());
                    morphisms.push(Morphism { name: format!("{}<={}", objects.get(a), objects.get(b)), dom: a, cod: b });
                }
            }
        }
        let ids = (0..k).map(|a| index[&(a, a)]).collect();
        let pairs: Vec<(usize, usize)> = morphisms.iter().map(|m| (m.dom, m.cod)).collect();
        FinCategory::new(objects.clone(), morphisms, ids, |f, g| index.get(&(pairs[f].0, pairs[g].1)).copied())
    }

    pub fn opposite_direct(&self) -> FinCategory {
        let morphisms = self.morphisms.iter().map(|m| Morphism { name: m.name.clone(), dom: m.cod, cod: m.dom }).collect();
        FinCategory::new_unchecked(self.objects.clone(), morphisms, self.identities.clone(), |f, g| self.try_compose(g, f))
            .expect("opposite of a category")
    }

    /// The product category computed directly from the two tables.
    pub fn product_direct(&self, d: &FinCategory) -> FinCategory {
        let objects = FinLabelSet::generated(self.objects.iter().flat_map(|a| d.objects.iter().map(move |b| tuple_label(&[a, b]))));
        let nd = d.num_morphisms();
        let mut morphisms = Vec::new();
        for f in 0..self.num_morphisms() {
            for g in 0..nd {
                morphisms.push(Morphism {
                    name: tuple_label(&[self.name(f), d.name(g)]),
                    dom: self.dom(f) * d.num_objects() + d.dom(g),
                    cod: self.cod(f) * d.num_objects() + d.cod(g),
                });
            }
        }
        let ids = (0..self.num_objects())
            .flat_map(|a| (0..d.num_objects()).map(move |b| (a, b)))
            .map(|(a, b)| self.identity(a) * nd + d.identity(b))
            .collect();
        FinCategory::new_unchecked(objects, morphisms, ids, |x, y| {
            let (f1, g1) = (x / nd, x % nd);
            let (f2, g2) = (y / nd, y % nd);
            Some(self.try_compose(f1, f2)? * nd + d.try_compose(g1, g2)?)
        })
        .expect("product of categories")
    }

    /// The same category with every morphism renamed.
    pub fn renamed(&self, rename: &dyn Fn(&str) -> String) -> Result<FinCategory> {
        let morphisms = self.morphisms.iter().map(|m| Morphism { name: rename(&m.name), dom: m.dom, cod: m.cod }).collect();
        FinCategory::new_unchecked(self.objects.clone(), morphisms, self.identities.clone(), |f, g| self.try_compose(f, g))
    }

    /// Object-label and name-based comparison, ignoring storage order.
    pub fn same_table(&self, other: &FinCategory) -> std::result::Result<(), String> {
        self.same_table_under(other, &|s| s.to_string())
    }

    /// Like [`same_table`](Self::same_table) after renaming this category's
    /// morphisms with `rename`.
    pub fn same_table_under(&self, other: &FinCategory, rename: &dyn Fn(&str) -> String) -> std::result::Result<(), String> {
        if self.objects != other.objects {
            return Err("object lists differ".into());
        }
        if self.num_morphisms() != other.num_morphisms() {
            return Err(format!("{} vs {} morphisms", self.num_morphisms(), other.num_morphisms()));
        }
        let mut map = Vec::with_capacity(self.num_morphisms());
        for f in 0..self.num_morphisms() {
            let name = rename(self.name(f));
            let g = other.find_morphism(&name).ok_or_else(|| format!("no morphism named {name}"))?;
            if other.dom(g) != self.dom(f) || other.cod(g) != self.cod(f) {
                return Err(format!("{name} has different endpoints"));
            }
            map.push(g);
        }
        for a in 0..self.num_objects() {
            if map[self.identity(a)] != other.identity(a) {
                return Err(format!("identity of {} differs", self.object_label(a)));
            }
        }
        for f in 0..self.num_morphisms() {
            for &g in self.out(self.cod(f)) {
                if map[self.compose(f, g)] != other.compose(map[f], map[g]) {
                    return Err(format!("composite {};{} differs", self.name(f), self.name(g)));
                }
            }
        }
        Ok(())
    }
}

impl PartialEq for FinCategory {
    fn eq(&self, other: &Self) -> bool {
        self.same_table(other).is_ok()
    }
}

impl fmt::Debug for FinCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FinCategory")
            .field("objects", &self.objects)
            .field("morphisms", &self.morphisms.iter().map(|m| &m.name).collect::<Vec<_>>())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(n: usize) -> FinLabelSet {
        FinLabelSet::generated((0..n).map(|i| format!("o{i}")))
    }

    #[test]
    fn standard_families_validate() {
        FinCategory::discrete(&labels(3)).validate().unwrap();
        FinCategory::codiscrete(&labels(3)).validate().unwrap();
        let z3 = FinCategory::monoid(&FinLabelSet::ordinal(3), 0, |a, b| (a + b) % 3).unwrap();
        assert_eq!(z3.num_morphisms(), 3);
        let chain = FinCategory::poset(&labels(3), |a, b| a <= b).unwrap();
        assert_eq!(chain.num_morphisms(), 6);
        chain.validate().unwrap();
    }

    #[test]
    fn opposite_and_product() {
        let chain = FinCategory::poset(&labels(3), |a, b| a <= b).unwrap();
        let op = chain.opposite_direct();
        op.validate().unwrap();
        assert_eq!(op.opposite_direct(), chain);
        let prod = chain.product_direct(&FinCategory::codiscrete(&labels(2)));
        prod.validate().unwrap();
        assert_eq!(prod.num_objects(), 6);
        assert_eq!(prod.num_morphisms(), 24);
    }

    #[test]
    fn corrupted_tables_are_rejected() {
        let z3 = FinCategory::monoid(&FinLabelSet::ordinal(3), 0, |a, b| (a + b) % 3).unwrap();
        let bad = z3.with_composite(1, 1, 1);
        match bad.validate() {
            Err(Error::LawViolation { .. }) => {}
            other => panic!("expected a law violation, got {other:?}"),
        }
        let missing = FinCategory::new_unchecked(
            labels(2),
            vec![
                Morphism { name: "i0".into(), dom: 0, cod: 0 },
                Morphism { name: "i1".into(), dom: 1, cod: 1 },
                Morphism { name: "f".into(), dom: 0, cod: 1 },
            ],
            vec![0, 1],
            |f, g| {
                if f == 2 && g == 1 {
                    None
                } else if f == 2 || g == 2 {
                    Some(2)
                } else {
                    Some(f)
                }
            },
        )
        .unwrap();
        let err = missing.validate().unwrap_err();
        assert_eq!(err.location().unwrap().path, "f;i1");
    }
}

//! Copresheaves `X : c -> FinSet` (instances) and the natural
//! transformations between them.

use std::collections::HashMap;
use std::sync::Arc;

use crate::category::{FinCategory, Morphism};
use crate::error::{Error, Result};
use crate::functor::{CatFunctor, Cofunctor};
use crate::label::{list_label, tuple_label, FinLabelSet};

#[derive(Clone, Debug)]
pub struct Copresheaf {
    pub base: Arc<FinCategory>,
    rows: Vec<FinLabelSet>,
    /// `action[f][x]` is the image of row `x` of `dom f` in `cod f`.
    action: Vec<Vec<usize>>,
}

impl PartialEq for Copresheaf {
    fn eq(&self, other: &Self) -> bool {
        *self.base == *other.base && self.rows == other.rows && self.action == other.action
    }
}

impl Copresheaf {
    pub fn new(base: Arc<FinCategory>, rows: Vec<FinLabelSet>, action: Vec<Vec<usize>>) -> Result<Self> {
        let x = Copresheaf::new_unchecked(base, rows, action)?;
        x.validate()?;
        Ok(x)
    }

    /// Checks only the shape of the data, not functoriality.
    pub fn new_unchecked(base: Arc<FinCategory>, rows: Vec<FinLabelSet>, action: Vec<Vec<usize>>) -> Result<Self> {
        if rows.len() != base.num_objects() || action.len() != base.num_morphisms() {
            return Err(Error::WrongShape("copresheaf data does not match its category".into()));
        }
        for (f, m) in base.morphisms().iter().enumerate() {
            if action[f].len() != rows[m.dom].len() || action[f].iter().any(|&y| y >= rows[m.cod].len()) {
                return Err(Error::mismatch(format!("map {}", m.name), "not a function between the tables"));
            }
        }
        Ok(Copresheaf { base, rows, action })
    }

    pub fn validate(&self) -> Result<()> {
        let c = &self.base;
        for a in 0..c.num_objects() {
            let id = &self.action[c.identity(a)];
            if let Some(x) = (0..id.len()).find(|&x| id[x] != x) {
                return Err(Error::law(
                    "identity acts trivially",
                    format!("table {}", c.object_label(a)),
                    format!("row {} moves", self.rows[a].get(x)),
                ));
            }
        }
        for f in 0..c.num_morphisms() {
            for &g in c.out(c.cod(f)) {
                let h = c.compose(f, g);
                for x in 0..self.rows[c.dom(f)].len() {
                    if self.action[h][x] != self.action[g][self.action[f][x]] {
                        return Err(Error::law(
                            "composition acts functorially",
                            format!("{};{}", c.name(f), c.name(g)),
                            format!("row {}", self.rows[c.dom(f)].get(x)),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn rows(&self, a: usize) -> &FinLabelSet {
        &self.rows[a]
    }

    pub fn all_rows(&self) -> &[FinLabelSet] {
        &self.rows
    }

    pub fn action(&self, f: usize) -> &[usize] {
        &self.action[f]
    }

    pub fn act(&self, f: usize, x: usize) -> usize {
        self.action[f][x]
    }

    pub fn num_elements(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    pub fn max_rows(&self) -> usize {
        self.rows.iter().map(|r| r.len()).max().unwrap_or(0)
    }

    /// `(object, row)` for every element, object by object.
    pub fn elements(&self) -> Vec<(usize, usize)> {
        (0..self.rows.len()).flat_map(|a| (0..self.rows[a].len()).map(move |x| (a, x))).collect()
    }

    pub fn empty(base: &Arc<FinCategory>) -> Self {
        Copresheaf {
            base: base.clone(),
            rows: vec![FinLabelSet::default(); base.num_objects()],
            action: vec![Vec::new(); base.num_morphisms()],
        }
    }

    /// One element `*` at every object.
    pub fn terminal(base: &Arc<FinCategory>) -> Self {
        Copresheaf {
            base: base.clone(),
            rows: vec![FinLabelSet::generated(["*"]); base.num_objects()],
            action: vec![vec![0]; base.num_morphisms()],
        }
    }

    /// The representable `c(a, -)`; rows are morphism names.
    pub fn representable(base: &Arc<FinCategory>, a: usize) -> Self {
        let c = base;
        let homs: Vec<Vec<usize>> = (0..c.num_objects()).map(|b| c.hom(a, b)).collect();
        let pos: HashMap<usize, usize> = homs.iter().flat_map(|h| h.iter().enumerate().map(|(k, &f)| (f, k))).collect();
        let rows = homs.iter().map(|h| FinLabelSet::generated(h.iter().map(|&f| c.name(f)))).collect();
        let action = (0..c.num_morphisms()).map(|g| homs[c.dom(g)].iter().map(|&f| pos[&c.compose(f, g)]).collect()).collect();
        Copresheaf { base: base.clone(), rows, action }
    }

    /// Builds a copresheaf over a discrete category from its tables.
    pub fn discrete(base: &Arc<FinCategory>, rows: Vec<FinLabelSet>) -> Result<Self> {
        if !base.is_discrete() {
            return Err(Error::WrongShape("category is not discrete".into()));
        }
        let action = (0..base.num_morphisms()).map(|f| (0..rows[base.dom(f)].len()).collect()).collect();
        Copresheaf::new(base.clone(), rows, action)
    }

    pub fn product(&self, other: &Copresheaf) -> Copresheaf {
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(r, s)| FinLabelSet::generated(r.iter().flat_map(|x| s.iter().map(move |y| tuple_label(&[x, y])))))
            .collect();
        let c = &self.base;
        let action = (0..c.num_morphisms())
            .map(|f| {
                let (n, n2) = (other.rows[c.dom(f)].len(), other.rows[c.cod(f)].len());
                (0..self.rows[c.dom(f)].len() * n).map(|k| self.action[f][k / n] * n2 + other.action[f][k % n]).collect()
            })
            .collect();
        Copresheaf { base: self.base.clone(), rows, action }
    }

    /// Disjoint union of a list of copresheaves; rows are tagged with the
    /// summand index when labels collide.
    pub fn coproduct(base: &Arc<FinCategory>, parts: &[&Copresheaf]) -> Copresheaf {
        let c = base;
        let mut offsets = vec![vec![0; parts.len()]; c.num_objects()];
        let rows = (0..c.num_objects())
            .map(|a| {
                let mut labels = Vec::new();
                for (k, p) in parts.iter().enumerate() {
                    offsets[a][k] = labels.len();
                    labels.extend(p.rows[a].iter().map(|x| x.to_string()));
                }
                FinLabelSet::generated(labels)
            })
            .collect();
        let action = (0..c.num_morphisms())
            .map(|f| {
                let mut v = Vec::new();
                for (k, p) in parts.iter().enumerate() {
                    v.extend(p.action[f].iter().map(|&y| offsets[c.cod(f)][k] + y));
                }
                v
            })
            .collect();
        Copresheaf { base: base.clone(), rows, action }
    }

    /// `Δ_F X = X ∘ F` for `F : c -> d` and `X` over `d`.
    pub fn pullback(&self, f: &CatFunctor) -> Copresheaf {
        let rows = f.on_objects.iter().map(|&b| self.rows[b].clone()).collect();
        let action = f.on_morphisms.iter().map(|&g| self.action[g].clone()).collect();
        Copresheaf { base: f.source.clone(), rows, action }
    }

    /// Pushes a copresheaf over `d` along a cofunctor `β : d ↛ d'`.
    /// Elements keep their identity; an element at `b` now lives at `β b`,
    /// and `h'` acts through its lift `β♯_b h'`.
    pub fn push_cofunctor(&self, beta: &Cofunctor) -> Copresheaf {
        let (d, d2) = (&beta.source, &beta.target);
        let (place, owner) = push_places(&self.rows, beta);
        let mut labels = vec![Vec::new(); d2.num_objects()];
        for (b2, own) in owner.iter().enumerate() {
            labels[b2] = own.iter().map(|&(b, x)| self.rows[b].get(x).to_string()).collect();
        }
        let action = (0..d2.num_morphisms())
            .map(|h| {
                owner[d2.dom(h)]
                    .iter()
                    .map(|&(b, x)| {
                        let g = beta.lift(b, h);
                        place[d.cod(g)][self.action[g][x]]
                    })
                    .collect()
            })
            .collect();
        Copresheaf { base: d2.clone(), rows: labels.into_iter().map(FinLabelSet::generated).collect(), action }
    }

    /// The category of elements `el_c(X)` with its projection to `c`.
    pub fn category_of_elements(&self) -> (FinCategory, CatFunctor) {
        let c = &self.base;
        let elems = self.elements();
        let flat: HashMap<(usize, usize), usize> = elems.iter().enumerate().map(|(k, &e)| (e, k)).collect();
        let objects = FinLabelSet::generated(elems.iter().map(|&(a, x)| tuple_label(&[c.object_label(a), self.rows[a].get(x)])));
        let mut morphisms = Vec::new();
        let mut data = Vec::new();
        let mut index = HashMap::new();
        for (k, &(a, x)) in elems.iter().enumerate() {
            for &f in c.out(a) {
                let target = flat[&(c.cod(f), self.action[f][x])];
                index.insert((f, x), morphisms.len());
                data.push((f, x));
                morphisms.push(Morphism { name: tuple_label(&[c.name(f), self.rows[a].get(x)]), dom: k, cod: target });
            }
        }
        let ids = elems.iter().map(|&(a, x)| index[&(c.identity(a), x)]).collect();
        let cat = FinCategory::new_unchecked(objects, morphisms, ids, |m1, m2| {
            let (f, x) = data[m1];
            Some(index[&(c.compose(f, data[m2].0), x)])
        })
        .expect("category of elements");
        let on_objects = elems.iter().map(|&(a, _)| a).collect();
        let on_morphisms = data.iter().map(|&(f, _)| f).collect();
        let cat = Arc::new(cat);
        (cat.as_ref().clone(), CatFunctor { source: cat, target: c.clone(), on_objects, on_morphisms })
    }

    pub fn describe_row(&self, a: usize, x: usize) -> String {
        format!("{}.{}", self.base.object_label(a), self.rows[a].get(x))
    }
}

/// Where each element lands when tables are pushed along a cofunctor:
/// `place[b][x]` is its new row at `β b`, and `owner[b'][k]` inverts that.
pub fn push_places(rows: &[FinLabelSet], beta: &Cofunctor) -> (Vec<Vec<usize>>, Vec<Vec<(usize, usize)>>) {
    let mut place = vec![Vec::new(); rows.len()];
    let mut owner = vec![Vec::new(); beta.target.num_objects()];
    for (b, r) in rows.iter().enumerate() {
        let b2 = beta.on_objects[b];
        for x in 0..r.len() {
            place[b].push(owner[b2].len());
            owner[b2].push((b, x));
        }
    }
    (place, owner)
}

/// A natural transformation; `components[a][x]` is the image of row `x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CopresheafHom {
    pub components: Vec<Vec<usize>>,
}

impl CopresheafHom {
    pub fn identity(x: &Copresheaf) -> Self {
        CopresheafHom { components: x.rows.iter().map(|r| (0..r.len()).collect()).collect() }
    }

    /// `self` then `other`.
    pub fn then(&self, other: &CopresheafHom) -> CopresheafHom {
        CopresheafHom {
            components: self.components.iter().zip(&other.components).map(|(f, g)| f.iter().map(|&y| g[y]).collect()).collect(),
        }
    }

    pub fn is_natural(&self, p: &Copresheaf, x: &Copresheaf) -> bool {
        let c = &p.base;
        (0..c.num_morphisms()).all(|f| {
            (0..p.rows[c.dom(f)].len()).all(|e| self.components[c.cod(f)][p.action[f][e]] == x.action[f][self.components[c.dom(f)][e]])
        })
    }

    /// Label listing the image of every element of `p`, in element order.
    pub fn label(&self, x: &Copresheaf) -> String {
        list_label(self.components.iter().enumerate().flat_map(|(a, comp)| comp.iter().map(move |&y| x.rows[a].get(y))))
    }
}

struct Search<'a> {
    p: &'a Copresheaf,
    x: &'a Copresheaf,
    offsets: Vec<usize>,
    elems: Vec<(usize, usize)>,
    assign: Vec<usize>,
    used: Option<Vec<Vec<bool>>>,
    colors: Option<(Vec<u32>, Vec<u32>)>,
    trail: Vec<usize>,
}

const UNSET: usize = usize::MAX;

impl<'a> Search<'a> {
    fn new(p: &'a Copresheaf, x: &'a Copresheaf, injective: bool) -> Self {
        let mut offsets = Vec::with_capacity(p.rows.len());
        let mut acc = 0;
        for r in &p.rows {
            offsets.push(acc);
            acc += r.len();
        }
        let used = injective.then(|| x.rows.iter().map(|r| vec![false; r.len()]).collect());
        let colors = injective.then(|| refine_colors(p, x));
        Search { p, x, offsets, elems: p.elements(), assign: vec![UNSET; acc], used, colors, trail: Vec::new() }
    }

    /// Assigns `e := v` and everything it forces; false on conflict.
    fn assign(&mut self, e: usize, v: usize) -> bool {
        let c = &self.p.base;
        let mut stack = vec![(e, v)];
        while let Some((e, v)) = stack.pop() {
            let (a, row) = self.elems[e];
            if self.assign[e] != UNSET {
                if self.assign[e] != v {
                    return false;
                }
                continue;
            }
            if let Some((cp, cx)) = &self.colors {
                if cp[e] != cx[self.x_flat(a, v)] {
                    return false;
                }
            }
            if let Some(used) = &mut self.used {
                if used[a][v] {
                    return false;
                }
                used[a][v] = true;
            }
            self.assign[e] = v;
            self.trail.push(e);
            for &f in c.out(a) {
                let e2 = self.offsets[c.cod(f)] + self.p.action[f][row];
                stack.push((e2, self.x.action[f][v]));
            }
        }
        true
    }

    fn x_flat(&self, a: usize, v: usize) -> usize {
        self.x.rows[..a].iter().map(|r| r.len()).sum::<usize>() + v
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let e = self.trail.pop().unwrap();
            if let Some(used) = &mut self.used {
                let (a, _) = self.elems[e];
                used[a][self.assign[e]] = false;
            }
            self.assign[e] = UNSET;
        }
    }

    fn result(&self) -> CopresheafHom {
        CopresheafHom {
            components: (0..self.p.rows.len())
                .map(|a| (0..self.p.rows[a].len()).map(|x| self.assign[self.offsets[a] + x]).collect())
                .collect(),
        }
    }

    /// Most constrained first: fewest candidate rows, then the element that
    /// forces the most others.
    fn order(&self) -> Vec<usize> {
        let c = &self.p.base;
        let mut keyed: Vec<(usize, std::cmp::Reverse<usize>, usize)> = (0..self.elems.len())
            .map(|e| {
                let (a, row) = self.elems[e];
                let reach = c.out(a).iter().map(|&f| (c.cod(f), self.p.action[f][row])).collect::<std::collections::HashSet<_>>().len();
                (self.x.rows[a].len(), std::cmp::Reverse(reach), e)
            })
            .collect();
        keyed.sort();
        keyed.into_iter().map(|(_, _, e)| e).collect()
    }

    fn run(&mut self, order: &[usize], k: usize, visit: &mut dyn FnMut(&Search) -> bool) -> bool {
        let mut k = k;
        while k < order.len() && self.assign[order[k]] != UNSET {
            k += 1;
        }
        if k == order.len() {
            return visit(self);
        }
        let e = order[k];
        let (a, _) = self.elems[e];
        for v in 0..self.x.rows[a].len() {
            let mark = self.trail.len();
            if self.assign(e, v) && !self.run(order, k + 1, visit) {
                self.undo(mark);
                return false;
            }
            self.undo(mark);
        }
        true
    }
}

/// Joint colour refinement of the elements of `p` and `x`; isomorphisms
/// can only match elements of equal colour.
fn refine_colors(p: &Copresheaf, x: &Copresheaf) -> (Vec<u32>, Vec<u32>) {
    let c = &p.base;
    let init = |y: &Copresheaf| -> Vec<u32> { y.elements().iter().map(|&(a, _)| a as u32).collect() };
    let (mut cp, mut cx) = (init(p), init(x));
    let mut classes = c.num_objects();
    loop {
        let mut table: HashMap<(u32, Vec<u32>, Vec<(usize, u32)>), u32> = HashMap::new();
        let step = |y: &Copresheaf, col: &Vec<u32>, table: &mut HashMap<_, u32>| -> Vec<u32> {
            let elems = y.elements();
            let mut offs = vec![0; y.rows.len()];
            let mut acc = 0;
            for (a, r) in y.rows.iter().enumerate() {
                offs[a] = acc;
                acc += r.len();
            }
            let mut pre: Vec<Vec<(usize, u32)>> = vec![Vec::new(); elems.len()];
            for (e, &(a, row)) in elems.iter().enumerate() {
                for &f in c.out(a) {
                    pre[offs[c.cod(f)] + y.action[f][row]].push((f, col[e]));
                }
            }
            elems
                .iter()
                .enumerate()
                .map(|(e, &(a, row))| {
                    let fwd: Vec<u32> = c.out(a).iter().map(|&f| col[offs[c.cod(f)] + y.action[f][row]]).collect();
                    let mut back = std::mem::take(&mut pre[e]);
                    back.sort_unstable();
                    let n = table.len() as u32;
                    *table.entry((col[e], fwd, back)).or_insert(n)
                })
                .collect()
        };
        let np = step(p, &cp, &mut table);
        let nx = step(x, &cx, &mut table);
        cp = np;
        cx = nx;
        if table.len() == classes {
            return (cp, cx);
        }
        classes = table.len();
    }
}

/// All natural transformations `p -> x`, sorted, failing past `cap`.
pub fn homs(p: &Copresheaf, x: &Copresheaf, cap: usize) -> Result<Vec<CopresheafHom>> {
    check_same_base(p, x)?;
    let mut s = Search::new(p, x, false);
    let order = s.order();
    let mut out = Vec::new();
    let mut over = false;
    s.run(&order, 0, &mut |s| {
        if out.len() >= cap {
            over = true;
            return false;
        }
        out.push(s.result());
        true
    });
    if over {
        return Err(Error::blowup("natural transformations", cap));
    }
    out.sort();
    Ok(out)
}

pub fn count_homs(p: &Copresheaf, x: &Copresheaf, cap: usize) -> Result<usize> {
    check_same_base(p, x)?;
    let mut s = Search::new(p, x, false);
    let order = s.order();
    let mut n = 0usize;
    let mut over = false;
    s.run(&order, 0, &mut |_| {
        if n >= cap {
            over = true;
            return false;
        }
        n += 1;
        true
    });
    if over {
        Err(Error::blowup("natural transformations", cap))
    } else {
        Ok(n)
    }
}

/// Some isomorphism `p -> x`, if there is one.
pub fn find_iso(p: &Copresheaf, x: &Copresheaf) -> Option<CopresheafHom> {
    if *p.base != *x.base || p.rows.iter().zip(&x.rows).any(|(a, b)| a.len() != b.len()) {
        return None;
    }
    let mut s = Search::new(p, x, true);
    let order = s.order();
    let mut found = None;
    s.run(&order, 0, &mut |s| {
        found = Some(s.result());
        false
    });
    found
}

/// All isomorphisms `p -> x`, failing past `cap`.
pub fn isos(p: &Copresheaf, x: &Copresheaf, cap: usize) -> Result<Vec<CopresheafHom>> {
    check_same_base(p, x)?;
    if p.rows.iter().zip(&x.rows).any(|(a, b)| a.len() != b.len()) {
        return Ok(Vec::new());
    }
    let mut s = Search::new(p, x, true);
    let order = s.order();
    let mut out = Vec::new();
    let mut over = false;
    s.run(&order, 0, &mut |s| {
        if out.len() >= cap {
            over = true;
            return false;
        }
        out.push(s.result());
        true
    });
    if over {
        return Err(Error::blowup("isomorphisms", cap));
    }
    Ok(out)
}

pub fn is_iso(p: &Copresheaf, x: &Copresheaf) -> bool {
    find_iso(p, x).is_some()
}

fn check_same_base(p: &Copresheaf, x: &Copresheaf) -> Result<()> {
    if Arc::ptr_eq(&p.base, &x.base) || *p.base == *x.base {
        Ok(())
    } else {
        Err(Error::mismatch("natural transformation", "copresheaves live over different categories"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arrow() -> Arc<FinCategory> {
        Arc::new(FinCategory::poset(&FinLabelSet::ordinal(2), |a, b| a <= b).unwrap())
    }

    fn graph_map(base: &Arc<FinCategory>, src: usize, tgt: usize, map: Vec<usize>) -> Copresheaf {
        let rows = vec![FinLabelSet::ordinal(src), FinLabelSet::ordinal(tgt)];
        let action = (0..base.num_morphisms())
            .map(|f| if base.is_identity(f) { (0..rows[base.dom(f)].len()).collect() } else { map.clone() })
            .collect();
        Copresheaf::new(base.clone(), rows, action).unwrap()
    }

    #[test]
    fn representable_yoneda() {
        let c = arrow();
        let x = graph_map(&c, 3, 2, vec![0, 1, 1]);
        for a in 0..2 {
            let rep = Copresheaf::representable(&c, a);
            rep.validate().unwrap();
            assert_eq!(count_homs(&rep, &x, 1000).unwrap(), x.rows(a).len());
        }
    }

    #[test]
    fn hom_enumeration_matches_brute_force() {
        let c = arrow();
        let p = graph_map(&c, 2, 2, vec![0, 0]);
        let x = graph_map(&c, 3, 2, vec![0, 1, 1]);
        let found = homs(&p, &x, 1000).unwrap();
        let mut brute = 0;
        for a0 in 0..3 {
            for a1 in 0..3 {
                for b0 in 0..2 {
                    for b1 in 0..2 {
                        let h = CopresheafHom { components: vec![vec![a0, a1], vec![b0, b1]] };
                        if h.is_natural(&p, &x) {
                            brute += 1;
                            assert!(found.contains(&h));
                        }
                    }
                }
            }
        }
        assert_eq!(found.len(), brute);
    }

    #[test]
    fn iso_search() {
        let c = arrow();
        let x = graph_map(&c, 3, 2, vec![0, 1, 1]);
        let y = graph_map(&c, 3, 2, vec![1, 0, 0]);
        let z = graph_map(&c, 3, 2, vec![0, 0, 0]);
        let iso = find_iso(&x, &y).unwrap();
        assert!(iso.is_natural(&x, &y));
        assert!(find_iso(&x, &z).is_none());
    }

    #[test]
    fn elements_category_projects() {
        let c = arrow();
        let x = graph_map(&c, 3, 2, vec![0, 1, 1]);
        let (el, proj) = x.category_of_elements();
        el.validate().unwrap();
        proj.validate().unwrap();
        assert!(proj.is_etale());
        assert_eq!(el.num_objects(), 5);
    }

    #[test]
    fn products_and_coproducts() {
        let c = arrow();
        let x = graph_map(&c, 3, 2, vec![0, 1, 1]);
        let t = Copresheaf::terminal(&c);
        let xt = x.product(&t);
        xt.validate().unwrap();
        assert!(is_iso(&xt, &x));
        let s = Copresheaf::coproduct(&c, &[&x, &t]);
        s.validate().unwrap();
        assert_eq!(s.rows(0).len(), 4);
    }
}

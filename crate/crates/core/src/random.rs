//! Seeded generators for the objects this crate works with. The generator
//! is ChaCha8, so a seed reproduces the same values on every platform.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::aggregation::CommMonoid;
use crate::bicomodule::{Bicomodule, MorphismAction};
use crate::category::FinCategory;
use crate::copresheaf::{Copresheaf, CopresheafHom};
use crate::functor::{enumerate_functors, CatFunctor};
use crate::label::FinLabelSet;
use crate::poly::Poly;
use crate::span::{BridgeDiagram, Conjunctive, Span};

pub type Rng = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A polynomial with at most `max_positions` positions, each with at most
/// `max_directions` directions.
pub fn random_poly(rng: &mut Rng, max_positions: usize, max_directions: usize) -> Poly {
    let n = rng.gen_range(0..=max_positions);
    let exps: Vec<usize> = (0..n).map(|_| rng.gen_range(0..=max_directions)).collect();
    Poly::from_exponents(&exps)
}

pub fn labels(prefix: &str, n: usize) -> FinLabelSet {
    FinLabelSet::generated((0..n).map(|i| format!("{prefix}{i}")))
}

/// Bounds for [`random_category`].
#[derive(Clone, Copy, Debug)]
pub struct CategoryBounds {
    pub max_objects: usize,
    pub max_morphisms: usize,
}

impl Default for CategoryBounds {
    fn default() -> Self {
        CategoryBounds { max_objects: 6, max_morphisms: 40 }
    }
}

/// A random category. Draws cover the discrete and codiscrete cases, monoids,
/// posets, products, opposites and categories of elements.
pub fn random_category(rng: &mut Rng, bounds: CategoryBounds) -> FinCategory {
    loop {
        let c = random_family(rng, bounds, 2);
        if c.num_objects() >= 1 && c.num_objects() <= bounds.max_objects && c.num_morphisms() <= bounds.max_morphisms {
            return c;
        }
    }
}

fn random_family(rng: &mut Rng, bounds: CategoryBounds, depth: usize) -> FinCategory {
    let kinds = if depth == 0 { 6 } else { 9 };
    let n = rng.gen_range(1..=bounds.max_objects.clamp(1, 6));
    match rng.gen_range(0..kinds) {
        0 => FinCategory::discrete(&labels("o", n)),
        1 => FinCategory::codiscrete(&labels("o", n.min(4))),
        2 => cyclic_group(rng.gen_range(1..=6)),
        3 => cyclic_monoid(rng.gen_range(0..=3), rng.gen_range(1..=3)),
        4 => transformation_monoid(rng),
        5 => random_poset(rng, n.min(5)),
        6 => {
            let small = CategoryBounds { max_objects: 3, max_morphisms: 8 };
            let a = random_family(rng, small, 0);
            let b = random_family(rng, small, 0);
            a.product_direct(&b)
        }
        7 => random_family(rng, bounds, depth - 1).opposite_direct(),
        _ => {
            let small = CategoryBounds { max_objects: 3, max_morphisms: 8 };
            let base = Arc::new(random_family(rng, small, 0));
            let x = random_copresheaf(rng, &base, 2);
            x.category_of_elements().0
        }
    }
}

pub fn cyclic_group(n: usize) -> FinCategory {
    FinCategory::monoid(&labels("g", n), 0, |a, b| (a + b) % n).expect("cyclic group")
}

/// `⟨x | x^{k+p} = x^k⟩`, elements `x^0 .. x^{k+p-1}`.
pub fn cyclic_monoid(k: usize, p: usize) -> FinCategory {
    let reduce = move |e: usize| if e < k { e } else { k + (e - k) % p };
    FinCategory::monoid(&labels("x", k + p), 0, |a, b| reduce(a + b)).expect("cyclic monoid")
}

/// The monoid of self-maps of `{0,1,2}` generated by one or two random maps.
pub fn transformation_monoid(rng: &mut Rng) -> FinCategory {
    let gens: Vec<Vec<usize>> = (0..rng.gen_range(1..=2)).map(|_| (0..3).map(|_| rng.gen_range(0..3)).collect()).collect();
    let mut elems: Vec<Vec<usize>> = vec![vec![0, 1, 2]];
    let mut k = 0;
    while k < elems.len() {
        for g in &gens {
            // "x then g"
            let next: Vec<usize> = elems[k].iter().map(|&v| g[v]).collect();
            if !elems.contains(&next) {
                elems.push(next);
            }
        }
        k += 1;
    }
    let names = FinLabelSet::generated(elems.iter().map(|e| format!("t{}{}{}", e[0], e[1], e[2])));
    FinCategory::monoid(&names, 0, |a, b| {
        let comp: Vec<usize> = elems[a].iter().map(|&v| elems[b][v]).collect();
        elems.iter().position(|e| *e == comp).expect("closed under composition")
    })
    .expect("transformation monoid")
}

pub fn random_poset(rng: &mut Rng, n: usize) -> FinCategory {
    let mut leq = vec![vec![false; n]; n];
    for (i, row) in leq.iter_mut().enumerate() {
        row[i] = true;
    }
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(0.4) {
                leq[i][j] = true;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if leq[i][k] && leq[k][j] {
                    leq[i][j] = true;
                }
            }
        }
    }
    FinCategory::poset(&labels("p", n), |a, b| leq[a][b]).expect("poset")
}

/// A random copresheaf with at most `max_rows` rows per table: a quotient of
/// a sum of representables by a random congruence.
pub fn random_copresheaf(rng: &mut Rng, base: &Arc<FinCategory>, max_rows: usize) -> Copresheaf {
    let c = base;
    for _ in 0..50 {
        if c.num_objects() == 0 {
            return Copresheaf::empty(base);
        }
        let count = if rng.gen_bool(0.1) { 0 } else { rng.gen_range(1..=4) };
        let gens: Vec<usize> = (0..count).map(|_| rng.gen_range(0..c.num_objects())).collect();
        let reps: Vec<Copresheaf> = gens.iter().map(|&a| Copresheaf::representable(c, a)).collect();
        let sum = Copresheaf::coproduct(c, &reps.iter().collect::<Vec<_>>());
        let merges = rng.gen_range(0..=sum.num_elements() / 2 + 1);
        let q = quotient(rng, &sum, merges);
        if q.max_rows() <= max_rows {
            return relabel_rows(&q, "r");
        }
    }
    Copresheaf::terminal(base)
}

fn quotient(rng: &mut Rng, x: &Copresheaf, merges: usize) -> Copresheaf {
    let c = &x.base;
    let elems = x.elements();
    let mut offs = vec![0; c.num_objects()];
    let mut acc = 0;
    for (a, off) in offs.iter_mut().enumerate() {
        *off = acc;
        acc += x.rows(a).len();
    }
    let mut parent: Vec<usize> = (0..elems.len()).collect();
    fn find(p: &mut [usize], mut v: usize) -> usize {
        while p[v] != v {
            p[v] = p[p[v]];
            v = p[v];
        }
        v
    }
    let mut pending = Vec::new();
    for _ in 0..merges {
        let a = rng.gen_range(0..c.num_objects());
        let n = x.rows(a).len();
        if n >= 2 {
            pending.push((offs[a] + rng.gen_range(0..n), offs[a] + rng.gen_range(0..n)));
        }
    }
    while let Some((u, v)) = pending.pop() {
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        if ru == rv {
            continue;
        }
        parent[ru.max(rv)] = ru.min(rv);
        let (a, xu) = elems[u];
        let (_, xv) = elems[v];
        for &f in c.out(a) {
            let b = c.cod(f);
            pending.push((offs[b] + x.act(f, xu), offs[b] + x.act(f, xv)));
        }
    }
    let mut class_of = vec![usize::MAX; elems.len()];
    let mut reps: Vec<Vec<usize>> = vec![Vec::new(); c.num_objects()];
    for (k, &(a, _)) in elems.iter().enumerate() {
        let r = find(&mut parent, k);
        if class_of[r] == usize::MAX {
            class_of[r] = reps[a].len();
            reps[a].push(k);
        }
        class_of[k] = class_of[r];
    }
    let rows = reps.iter().map(|r| FinLabelSet::generated(r.iter().map(|&k| x.rows(elems[k].0).get(elems[k].1)))).collect();
    let action =
        (0..c.num_morphisms()).map(|f| reps[c.dom(f)].iter().map(|&k| class_of[offs[c.cod(f)] + x.act(f, elems[k].1)]).collect()).collect();
    Copresheaf::new_unchecked(c.clone(), rows, action).expect("quotient")
}

/// Renames rows `{prefix}{object}_{k}` so labels are short and globally distinct.
pub fn relabel_rows(x: &Copresheaf, prefix: &str) -> Copresheaf {
    let c = &x.base;
    let rows = (0..c.num_objects()).map(|a| FinLabelSet::generated((0..x.rows(a).len()).map(|k| format!("{prefix}{a}_{k}")))).collect();
    let action = (0..c.num_morphisms()).map(|f| x.action(f).to_vec()).collect();
    Copresheaf::new_unchecked(c.clone(), rows, action).expect("relabel")
}

/// A random functor `c -> d`; falls back to a constant functor when there
/// are too many to list.
pub fn random_functor(rng: &mut Rng, c: &Arc<FinCategory>, d: &Arc<FinCategory>) -> Option<CatFunctor> {
    match enumerate_functors(c, d, 5000) {
        Ok(fs) if !fs.is_empty() => fs.choose(rng).cloned(),
        Ok(_) => None,
        Err(_) => {
            let b = rng.gen_range(0..d.num_objects());
            Some(CatFunctor {
                source: c.clone(),
                target: d.clone(),
                on_objects: vec![b; c.num_objects()],
                on_morphisms: vec![d.identity(b); c.num_morphisms()],
            })
        }
    }
}

/// Bounds for [`random_bicomodule`].
#[derive(Clone, Copy, Debug)]
pub struct BicomoduleBounds {
    pub max_positions: usize,
    pub max_pattern: usize,
}

/// A random bicomodule `(c, d)`: a positions copresheaf `P` on `c` and a
/// copresheaf on `el(P)^op × d` giving the patterns.
pub fn random_bicomodule(rng: &mut Rng, c: &Arc<FinCategory>, d: &Arc<FinCategory>, bounds: BicomoduleBounds) -> Bicomodule {
    for _ in 0..50 {
        let p = random_copresheaf(rng, c, bounds.max_positions);
        let (el, _) = p.category_of_elements();
        let base = Arc::new(el.opposite_direct().product_direct(d));
        let q = random_copresheaf(rng, &base, bounds.max_pattern);
        let nd = d.num_objects();
        let too_big = (0..el.num_objects()).any(|k| (0..nd).map(|b| q.rows(k * nd + b).len()).sum::<usize>() > bounds.max_pattern);
        if !too_big {
            return from_profunctor(&p, &el, d, &q);
        }
    }
    let p = Copresheaf::terminal(c);
    let (el, _) = p.category_of_elements();
    let base = Arc::new(el.opposite_direct().product_direct(d));
    from_profunctor(&p, &el, d, &Copresheaf::empty(&base))
}

/// Builds a bicomodule from positions `p` on `c` and patterns given as a
/// copresheaf `q` on `el(p)^op × d`.
pub fn from_profunctor(p: &Copresheaf, el: &FinCategory, d: &Arc<FinCategory>, q: &Copresheaf) -> Bicomodule {
    let c = &p.base;
    let (nd, ndm) = (d.num_objects(), d.num_morphisms());
    let elems = p.elements();
    let mut first = vec![0; elems.len()];
    let mut acc = 0;
    for (k, &(a, _)) in elems.iter().enumerate() {
        first[k] = acc;
        acc += c.out(a).len();
    }
    let flat = |a: usize, x: usize| elems.iter().position(|&e| e == (a, x)).unwrap();
    let pattern = |k: usize| -> Copresheaf {
        let rows = (0..nd).map(|b| q.rows(k * nd + b).clone()).collect();
        let action = (0..ndm).map(|g| q.action(el.identity(k) * ndm + g).to_vec()).collect();
        Copresheaf::new_unchecked(d.clone(), rows, action).expect("pattern")
    };
    let mut patterns: Vec<Vec<Copresheaf>> = vec![Vec::new(); c.num_objects()];
    for (k, &(a, _)) in elems.iter().enumerate() {
        patterns[a].push(pattern(k));
    }
    let action = (0..c.num_morphisms())
        .map(|f| {
            let a = c.dom(f);
            let mut pmaps = Vec::new();
            for x in 0..p.rows(a).len() {
                let k = flat(a, x);
                let e = first[k] + c.out_index(f);
                let comps = (0..nd).map(|b| q.action(e * ndm + d.identity(b)).to_vec()).collect();
                pmaps.push(CopresheafHom { components: comps });
            }
            MorphismAction { positions: p.action(f).to_vec(), patterns: pmaps }
        })
        .collect();
    Bicomodule::new(c.clone(), d.clone(), p.all_rows().to_vec(), patterns, action).expect("bicomodule from a profunctor")
}

/// A random function `{0..n} -> {0..m}`.
pub fn random_function(rng: &mut Rng, n: usize, m: usize) -> Vec<usize> {
    (0..n).map(|_| rng.gen_range(0..m)).collect()
}

/// A span between sets of sizes `1..=max_feet` with at most `max_apex`
/// apex elements. Apex labels use `prefix`.
pub fn random_span(rng: &mut Rng, prefix: &str, max_feet: usize, max_apex: usize) -> Span {
    let c = labels("c", rng.gen_range(1..=max_feet));
    let d = labels("d", rng.gen_range(1..=max_feet));
    random_span_between(rng, prefix, &c, &d, max_apex)
}

pub fn random_span_between(rng: &mut Rng, prefix: &str, c: &FinLabelSet, d: &FinLabelSet, max_apex: usize) -> Span {
    let n = if c.is_empty() || d.is_empty() { 0 } else { rng.gen_range(0..=max_apex) };
    let f = random_function(rng, n, c.len());
    let g = random_function(rng, n, d.len());
    Span::new(c.clone(), labels(prefix, n), d.clone(), f, g).expect("random span")
}

/// A conjunctive with at most `max_vars` variables per pattern; variable
/// labels are distinct across patterns.
pub fn random_conjunctive(rng: &mut Rng, max_feet: usize, max_vars: usize) -> Conjunctive {
    let c = labels("c", rng.gen_range(1..=max_feet));
    let d = labels("d", rng.gen_range(1..=max_feet));
    let mut next = 0;
    let patterns = (0..c.len())
        .map(|_| {
            (0..rng.gen_range(0..=max_vars))
                .map(|_| {
                    next += 1;
                    (format!("v{}", next - 1), rng.gen_range(0..d.len()))
                })
                .collect()
        })
        .collect();
    Conjunctive::new(c, d, patterns).expect("random conjunctive")
}

pub fn random_bridge(rng: &mut Rng, max_set: usize) -> BridgeDiagram {
    let d = labels("d", rng.gen_range(1..=max_set));
    let c = labels("c", rng.gen_range(1..=max_set));
    let b = labels("b", rng.gen_range(1..=max_set));
    let e = labels("e", rng.gen_range(0..=max_set));
    let f = random_function(rng, e.len(), d.len());
    let g = random_function(rng, e.len(), b.len());
    let h = random_function(rng, b.len(), c.len());
    BridgeDiagram::new(d, e, b, c, f, g, h).expect("random bridge")
}

/// A commutative monoid on `n` elements drawn from cyclic groups, saturating
/// addition, max on a chain and multiplication mod `n`, with the non-unit
/// elements relabeled by a random permutation.
pub fn random_table_monoid(rng: &mut Rng, n: usize) -> CommMonoid {
    assert!(n >= 1);
    let base: Vec<Vec<usize>> = match rng.gen_range(0..4) {
        0 => (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect(),
        1 => (0..n).map(|a| (0..n).map(|b| (a + b).min(n - 1)).collect()).collect(),
        2 => (0..n).map(|a| (0..n).map(|b| a.max(b)).collect()).collect(),
        _ => {
            // multiplication mod n with 1 as the unit, relabeled so the unit is 0
            let to = |v: usize| (v + n - 1) % n;
            let from = |i: usize| (i + 1) % n;
            (0..n).map(|a| (0..n).map(|b| to(from(a) * from(b) % n.max(1))).collect()).collect()
        }
    };
    let mut perm: Vec<usize> = (1..n).collect();
    perm.shuffle(rng);
    perm.insert(0, 0);
    let mut op = vec![vec![0; n]; n];
    for a in 0..n {
        for b in 0..n {
            op[perm[a]][perm[b]] = perm[base[a][b]];
        }
    }
    CommMonoid::table(labels("m", n), op, 0).expect("random table monoid")
}

//! Polynomial functors `p = Σ_{i ∈ p(1)} y^{p[i]}` with labeled positions
//! and directions, the maps between them, and the usual monoidal structures.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::label::{functions, list_label, tuple_label, FinLabelSet, Odometer};

pub mod parse;

/// Default bound on any enumeration performed by this crate.
pub const DEFAULT_CAP: usize = 100_000;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly {
    positions: FinLabelSet,
    directions: Vec<FinLabelSet>,
}

impl Poly {
    pub fn new(positions: FinLabelSet, directions: Vec<FinLabelSet>) -> Result<Self> {
        if positions.len() != directions.len() {
            return Err(Error::WrongShape(format!("{} positions but {} direction sets", positions.len(), directions.len())));
        }
        Ok(Poly { positions, directions })
    }

    /// Builds a polynomial from `(position, directions)` pairs.
    pub fn from_pairs<S: Into<String>, D: Into<String>>(pairs: Vec<(S, Vec<D>)>) -> Result<Self> {
        let mut labels = Vec::new();
        let mut dirs = Vec::new();
        for (p, ds) in pairs {
            labels.push(p.into());
            dirs.push(FinLabelSet::new(ds.into_iter().map(Into::into))?);
        }
        Poly::new(FinLabelSet::new(labels)?, dirs)
    }

    /// One position per entry, with `ord n` as its directions.
    pub fn from_exponents(exponents: &[usize]) -> Self {
        Poly { positions: FinLabelSet::ordinal(exponents.len()), directions: exponents.iter().map(|&n| FinLabelSet::ordinal(n)).collect() }
    }

    /// The polynomial with the given normal form, listed as `(exponent, coefficient)`.
    pub fn from_normal_form(terms: &[(usize, usize)]) -> Self {
        let exps: Vec<usize> = terms.iter().flat_map(|&(e, c)| std::iter::repeat_n(e, c)).collect();
        Poly::from_exponents(&exps)
    }

    pub fn zero() -> Self {
        Poly::from_exponents(&[])
    }

    pub fn one() -> Self {
        Poly::from_exponents(&[0])
    }

    pub fn y() -> Self {
        Poly::from_exponents(&[1])
    }

    /// `A y`: one position per element of `a`, each with one direction.
    pub fn linear(a: &FinLabelSet) -> Self {
        Poly { positions: a.clone(), directions: a.iter().map(|l| FinLabelSet::generated([l])).collect() }
    }

    /// `y^A`
    pub fn representable(a: &FinLabelSet) -> Self {
        Poly { positions: FinLabelSet::generated(["*"]), directions: vec![a.clone()] }
    }

    pub fn positions(&self) -> &FinLabelSet {
        &self.positions
    }

    pub fn directions(&self, i: usize) -> &FinLabelSet {
        &self.directions[i]
    }

    pub fn num_positions(&self) -> usize {
        self.positions.len()
    }

    pub fn arity(&self, i: usize) -> usize {
        self.directions[i].len()
    }

    pub fn total_directions(&self) -> usize {
        self.directions.iter().map(|d| d.len()).sum()
    }

    /// `(exponent, coefficient)` pairs sorted by decreasing exponent.
    pub fn normal_form(&self) -> Vec<(usize, usize)> {
        let mut exps: Vec<usize> = self.directions.iter().map(|d| d.len()).collect();
        exps.sort_unstable_by(|a, b| b.cmp(a));
        let mut out: Vec<(usize, usize)> = Vec::new();
        for e in exps {
            match out.last_mut() {
                Some((x, c)) if *x == e => *c += 1,
                _ => out.push((e, 1)),
            }
        }
        out
    }

    /// Two polynomials are isomorphic exactly when their normal forms agree.
    pub fn is_iso(&self, other: &Poly) -> bool {
        self.normal_form() == other.normal_form()
    }

    /// An explicit isomorphism `self -> other`, if one exists.
    pub fn find_iso(&self, other: &Poly) -> Option<PolyMap> {
        if !self.is_iso(other) {
            return None;
        }
        let mut used = vec![false; other.num_positions()];
        let mut on_positions = Vec::new();
        for i in 0..self.num_positions() {
            let j = (0..other.num_positions()).find(|&j| !used[j] && other.arity(j) == self.arity(i))?;
            used[j] = true;
            on_positions.push(j);
        }
        let on_directions = on_positions.iter().map(|&j| (0..other.arity(j)).collect()).collect();
        Some(PolyMap { source: Arc::new(self.clone()), target: Arc::new(other.clone()), on_positions, on_directions })
    }

    pub fn to_sum_string(&self) -> String {
        let nf = self.normal_form();
        if nf.is_empty() {
            return "0".to_string();
        }
        let terms: Vec<String> = nf
            .iter()
            .map(|&(e, c)| {
                let coeff = if c == 1 && e > 0 { String::new() } else { c.to_string() };
                let mono = match e {
                    0 => String::new(),
                    1 => "y".to_string(),
                    _ => format!("y^{e}"),
                };
                format!("{coeff}{mono}")
            })
            .collect();
        terms.join(" + ")
    }

    pub fn to_labeled_string(&self) -> String {
        let parts: Vec<String> = (0..self.num_positions())
            .map(|i| {
                let ds: Vec<String> = self.directions[i].iter().map(parse::quote_label).collect();
                format!("{}: [{}]", parse::quote_label(self.positions.get(i)), ds.join(", "))
            })
            .collect();
        format!("{{{}}}", parts.join(", "))
    }

    /// Enumerates `p(X) = {(i, f: p[i] -> X)}`.
    pub fn evaluate(&self, x: &FinLabelSet, cap: usize) -> Result<FinLabelSet> {
        let size = self.cardinality(&BigUint::from(x.len()));
        check_cap(&size, cap, "evaluation p(X)")?;
        let mut out = Vec::new();
        for i in 0..self.num_positions() {
            for f in functions(self.arity(i), x.len()) {
                out.push(tuple_label(&[self.positions.get(i).to_string(), list_label(f.iter().map(|&k| x.get(k)))]));
            }
        }
        Ok(FinLabelSet::generated(out))
    }

    /// `|p(X)|` for `|X| = n`.
    pub fn cardinality(&self, n: &BigUint) -> BigUint {
        self.directions.iter().map(|d| n.pow(d.len() as u32)).sum()
    }

    pub fn add(&self, q: &Poly) -> Poly {
        let positions = FinLabelSet::generated(
            self.positions.iter().map(|l| format!("inl({l})")).chain(q.positions.iter().map(|l| format!("inr({l})"))),
        );
        let directions = self.directions.iter().chain(q.directions.iter()).cloned().collect();
        Poly { positions, directions }
    }

    pub fn mul(&self, q: &Poly) -> Poly {
        let mut labels = Vec::new();
        let mut dirs = Vec::new();
        for i in 0..self.num_positions() {
            for j in 0..q.num_positions() {
                labels.push(tuple_label(&[self.positions.get(i), q.positions.get(j)]));
                dirs.push(FinLabelSet::generated(
                    self.directions[i].iter().map(|d| format!("inl({d})")).chain(q.directions[j].iter().map(|e| format!("inr({e})"))),
                ));
            }
        }
        Poly { positions: FinLabelSet::generated(labels), directions: dirs }
    }

    /// The Dirichlet (parallel) product `p ⊗ q`.
    pub fn tensor(&self, q: &Poly) -> Poly {
        let mut labels = Vec::new();
        let mut dirs = Vec::new();
        for i in 0..self.num_positions() {
            for j in 0..q.num_positions() {
                labels.push(tuple_label(&[self.positions.get(i), q.positions.get(j)]));
                let mut ds = Vec::new();
                for d in self.directions[i].iter() {
                    for e in q.directions[j].iter() {
                        ds.push(tuple_label(&[d, e]));
                    }
                }
                dirs.push(FinLabelSet::generated(ds));
            }
        }
        Poly { positions: FinLabelSet::generated(labels), directions: dirs }
    }

    /// The substitution product `p ◁ q`.
    pub fn substitute(&self, q: &Poly, cap: usize) -> Result<Poly> {
        let layout = SubstLayout::new(self, q, cap)?;
        let mut labels = Vec::with_capacity(layout.total);
        let mut dirs = Vec::with_capacity(layout.total);
        for i in 0..self.num_positions() {
            for js in functions(self.arity(i), q.num_positions()) {
                labels.push(tuple_label(&[self.positions.get(i).to_string(), list_label(js.iter().map(|&j| q.positions.get(j)))]));
                let mut ds = Vec::new();
                for (d, &j) in js.iter().enumerate() {
                    for e in q.directions[j].iter() {
                        ds.push(tuple_label(&[self.directions[i].get(d), e]));
                    }
                }
                dirs.push(FinLabelSet::generated(ds));
            }
        }
        Ok(Poly { positions: FinLabelSet::generated(labels), directions: dirs })
    }

    /// `Σ_i p[i] y`, pairing each position with each of its directions.
    pub fn dirichlet_transform(&self) -> Poly {
        let mut labels = Vec::new();
        let mut dirs = Vec::new();
        for i in 0..self.num_positions() {
            let single = self.arity(i) == 1;
            for d in self.directions[i].iter() {
                labels.push(if single { self.positions.get(i).to_string() } else { tuple_label(&[self.positions.get(i), d]) });
                dirs.push(FinLabelSet::generated([d]));
            }
        }
        Poly { positions: FinLabelSet::generated(labels), directions: dirs }
    }

    /// The internal hom `[p, q] = Σ_{φ: p → q} y^{Σ_i q[φ₁ i]}`.
    pub fn internal_hom(&self, q: &Poly, cap: usize) -> Result<Poly> {
        let maps = enumerate_maps(self, q, cap)?;
        let mut labels = Vec::with_capacity(maps.len());
        let mut dirs = Vec::with_capacity(maps.len());
        for phi in &maps {
            labels.push(phi.short_label());
            let mut ds = Vec::new();
            for i in 0..self.num_positions() {
                for e in q.directions[phi.on_positions[i]].iter() {
                    ds.push(tuple_label(&[self.positions.get(i), e]));
                }
            }
            dirs.push(FinLabelSet::generated(ds));
        }
        Ok(Poly { positions: FinLabelSet::generated(labels), directions: dirs })
    }

    /// The coclosure `[p / q] = Σ_i y^{q(p[i])}`, left adjoint data for `◁`.
    pub fn coclosure(&self, q: &Poly, cap: usize) -> Result<Poly> {
        let mut dirs = Vec::with_capacity(self.num_positions());
        for i in 0..self.num_positions() {
            let n = self.arity(i);
            check_cap(&q.cardinality(&BigUint::from(n)), cap, "coclosure directions")?;
            let mut ds = Vec::new();
            for j in 0..q.num_positions() {
                for f in functions(q.arity(j), n) {
                    ds.push(tuple_label(&[q.positions.get(j).to_string(), list_label(f.iter().map(|&d| self.directions[i].get(d)))]));
                }
            }
            dirs.push(FinLabelSet::generated(ds));
        }
        Ok(Poly { positions: self.positions.clone(), directions: dirs })
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sum_string())
    }
}

pub(crate) fn check_cap(size: &BigUint, cap: usize, what: &str) -> Result<()> {
    if *size > BigUint::from(cap) {
        Err(Error::blowup(format!("{what} ({size} elements)"), cap))
    } else {
        Ok(())
    }
}

/// `|Poly(p, q)| = Π_i Σ_j |p[i]|^{|q[j]|}`.
pub fn hom_count(p: &Poly, q: &Poly) -> BigUint {
    (0..p.num_positions())
        .map(|i| {
            let n = BigUint::from(p.arity(i));
            (0..q.num_positions()).map(|j| n.pow(q.arity(j) as u32)).sum::<BigUint>()
        })
        .product()
}

/// All maps `p -> q`, in a canonical order.
pub fn enumerate_maps(p: &Poly, q: &Poly, cap: usize) -> Result<Vec<PolyMap>> {
    let count = hom_count(p, q);
    check_cap(&count, cap, "Poly(p, q)")?;
    // With no maps, the per-position option lists below could still be huge.
    if count == BigUint::from(0u32) {
        return Ok(Vec::new());
    }
    let options: Vec<Vec<(usize, Vec<usize>)>> = (0..p.num_positions())
        .map(|i| {
            let mut opts = Vec::new();
            for j in 0..q.num_positions() {
                for f in functions(q.arity(j), p.arity(i)) {
                    opts.push((j, f));
                }
            }
            opts
        })
        .collect();
    let source = Arc::new(p.clone());
    let target = Arc::new(q.clone());
    let mut out = Vec::new();
    for choice in Odometer::new(options.iter().map(|o| o.len()).collect()) {
        let (on_positions, on_directions) = choice.iter().enumerate().map(|(i, &k)| options[i][k].clone()).unzip();
        out.push(PolyMap { source: source.clone(), target: target.clone(), on_positions, on_directions });
    }
    Ok(out)
}

/// A map of polynomials: forward on positions, backward on directions.
///
/// `on_directions[i][e]` is the direction of `source[i]` that the direction
/// `e` of `target[on_positions[i]]` is sent back to.
#[derive(Clone, Debug)]
pub struct PolyMap {
    pub source: Arc<Poly>,
    pub target: Arc<Poly>,
    pub on_positions: Vec<usize>,
    pub on_directions: Vec<Vec<usize>>,
}

impl PartialEq for PolyMap {
    fn eq(&self, other: &Self) -> bool {
        self.on_positions == other.on_positions
            && self.on_directions == other.on_directions
            && *self.source == *other.source
            && *self.target == *other.target
    }
}

impl PolyMap {
    pub fn new(source: Arc<Poly>, target: Arc<Poly>, on_positions: Vec<usize>, on_directions: Vec<Vec<usize>>) -> Result<Self> {
        let m = PolyMap { source, target, on_positions, on_directions };
        m.validate()?;
        Ok(m)
    }

    pub fn identity(p: &Arc<Poly>) -> Self {
        PolyMap {
            source: p.clone(),
            target: p.clone(),
            on_positions: (0..p.num_positions()).collect(),
            on_directions: (0..p.num_positions()).map(|i| (0..p.arity(i)).collect()).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (p, q) = (&self.source, &self.target);
        if self.on_positions.len() != p.num_positions() || self.on_directions.len() != p.num_positions() {
            return Err(Error::WrongShape("map data does not cover every source position".into()));
        }
        for i in 0..p.num_positions() {
            let j = self.on_positions[i];
            if j >= q.num_positions() {
                return Err(Error::mismatch(format!("position {}", p.positions.get(i)), "image out of range"));
            }
            if self.on_directions[i].len() != q.arity(j) || self.on_directions[i].iter().any(|&d| d >= p.arity(i)) {
                return Err(Error::mismatch(format!("position {}", p.positions.get(i)), "direction map has the wrong type"));
            }
        }
        Ok(())
    }

    /// Diagrammatic composite `self ; g`.
    pub fn then(&self, g: &PolyMap) -> Result<PolyMap> {
        if *self.target != *g.source {
            return Err(Error::mismatch("composite", "target of the first map is not the source of the second"));
        }
        let on_positions: Vec<usize> = self.on_positions.iter().map(|&j| g.on_positions[j]).collect();
        let on_directions = (0..self.source.num_positions())
            .map(|i| {
                let j = self.on_positions[i];
                g.on_directions[j].iter().map(|&e| self.on_directions[i][e]).collect()
            })
            .collect();
        Ok(PolyMap { source: self.source.clone(), target: g.target.clone(), on_positions, on_directions })
    }

    pub fn is_iso(&self) -> bool {
        let q = &self.target;
        let mut hit = vec![false; q.num_positions()];
        for (i, &j) in self.on_positions.iter().enumerate() {
            if hit[j] || self.source.arity(i) != q.arity(j) {
                return false;
            }
            hit[j] = true;
            let mut seen = vec![false; self.source.arity(i)];
            for &d in &self.on_directions[i] {
                if seen[d] {
                    return false;
                }
                seen[d] = true;
            }
        }
        hit.iter().all(|&h| h)
    }

    /// A compact structural label, e.g. `<a>x[1,1];b>y[]>`.
    pub fn short_label(&self) -> String {
        let parts: Vec<String> = (0..self.source.num_positions())
            .map(|i| {
                let j = self.on_positions[i];
                format!(
                    "{}>{}{}",
                    self.source.positions.get(i),
                    self.target.positions.get(j),
                    list_label(self.on_directions[i].iter().map(|&d| self.source.directions[i].get(d)))
                )
            })
            .collect();
        format!("<{}>", parts.join(";"))
    }
}

/// Index arithmetic for `p ◁ q` as materialized by [`Poly::substitute`].
#[derive(Clone, Debug)]
pub struct SubstLayout {
    q_positions: usize,
    offsets: Vec<usize>,
    pub total: usize,
}

impl SubstLayout {
    pub fn new(p: &Poly, q: &Poly, cap: usize) -> Result<Self> {
        let n = BigUint::from(q.num_positions());
        let total_big: BigUint = (0..p.num_positions()).map(|i| n.pow(p.arity(i) as u32)).sum();
        check_cap(&total_big, cap, "p ◁ q positions")?;
        let mut offsets = Vec::with_capacity(p.num_positions());
        let mut acc = 0usize;
        for i in 0..p.num_positions() {
            offsets.push(acc);
            acc += q.num_positions().pow(p.arity(i) as u32);
        }
        Ok(SubstLayout { q_positions: q.num_positions(), offsets, total: acc })
    }

    pub fn position(&self, i: usize, js: &[usize]) -> usize {
        self.offsets[i] + js.iter().fold(0, |acc, &j| acc * self.q_positions + j)
    }

    pub fn decode(&self, idx: usize, p: &Poly) -> (usize, Vec<usize>) {
        let i = match self.offsets.binary_search(&idx) {
            Ok(mut k) => {
                // several positions of arity zero towards no q-position share an offset
                while k + 1 < self.offsets.len() && self.offsets[k + 1] == idx {
                    k += 1;
                }
                k
            }
            Err(k) => k - 1,
        };
        let mut rest = idx - self.offsets[i];
        let mut js = vec![0; p.arity(i)];
        for slot in js.iter_mut().rev() {
            *slot = rest % self.q_positions;
            rest /= self.q_positions;
        }
        (i, js)
    }

    pub fn direction(q: &Poly, js: &[usize], d: usize, e: usize) -> usize {
        js[..d].iter().map(|&j| q.arity(j)).sum::<usize>() + e
    }

    pub fn decode_direction(q: &Poly, js: &[usize], mut idx: usize) -> (usize, usize) {
        for (d, &j) in js.iter().enumerate() {
            if idx < q.arity(j) {
                return (d, idx);
            }
            idx -= q.arity(j);
        }
        panic!("direction index out of range")
    }
}

/// `f ◁ g : p ◁ q -> p' ◁ q'`.
pub fn substitute_maps(f: &PolyMap, g: &PolyMap, cap: usize) -> Result<PolyMap> {
    let (p, q) = (&*f.source, &*g.source);
    let (p2, q2) = (&*f.target, &*g.target);
    let src = SubstLayout::new(p, q, cap)?;
    let tgt = SubstLayout::new(p2, q2, cap)?;
    let mut on_positions = vec![0; src.total];
    let mut on_directions = vec![Vec::new(); src.total];
    for i in 0..p.num_positions() {
        let i2 = f.on_positions[i];
        for js in functions(p.arity(i), q.num_positions()) {
            let k = src.position(i, &js);
            // direction d2 of p2[i2] pulls back to f♯(d2) in p[i]
            let js2: Vec<usize> = f.on_directions[i].iter().map(|&d| g.on_positions[js[d]]).collect();
            on_positions[k] = tgt.position(i2, &js2);
            let mut back = Vec::new();
            for (d2, &j2) in js2.iter().enumerate() {
                let d = f.on_directions[i][d2];
                let j = js[d];
                for e2 in 0..q2.arity(j2) {
                    let e = g.on_directions[j][e2];
                    back.push(SubstLayout::direction(q, &js, d, e));
                }
            }
            on_directions[k] = back;
        }
    }
    Ok(PolyMap { source: Arc::new(p.substitute(q, cap)?), target: Arc::new(p2.substitute(q2, cap)?), on_positions, on_directions })
}

/// `f ⊗ g : p ⊗ q -> p' ⊗ q'`.
pub fn tensor_maps(f: &PolyMap, g: &PolyMap) -> PolyMap {
    let (p, q) = (&*f.source, &*g.source);
    let (p2, q2) = (&*f.target, &*g.target);
    let mut on_positions = Vec::new();
    let mut on_directions = Vec::new();
    for i in 0..p.num_positions() {
        for j in 0..q.num_positions() {
            let (i2, j2) = (f.on_positions[i], g.on_positions[j]);
            on_positions.push(i2 * q2.num_positions() + j2);
            let mut back = Vec::new();
            for d2 in 0..p2.arity(i2) {
                for e2 in 0..q2.arity(j2) {
                    back.push(f.on_directions[i][d2] * q.arity(j) + g.on_directions[j][e2]);
                }
            }
            on_directions.push(back);
        }
    }
    PolyMap { source: Arc::new(p.tensor(q)), target: Arc::new(p2.tensor(q2)), on_positions, on_directions }
}

/// The duoidal interchange `(p ◁ q) ⊗ (p' ◁ q') -> (p ⊗ p') ◁ (q ⊗ q')`.
pub fn duoidal_map(p: &Poly, q: &Poly, p2: &Poly, q2: &Poly, cap: usize) -> Result<PolyMap> {
    let l1 = SubstLayout::new(p, q, cap)?;
    let l2 = SubstLayout::new(p2, q2, cap)?;
    let pp = p.tensor(p2);
    let qq = q.tensor(q2);
    let lt = SubstLayout::new(&pp, &qq, cap)?;
    let n2 = l2.total;
    let mut on_positions = vec![0; l1.total * n2];
    let mut on_directions = vec![Vec::new(); l1.total * n2];
    for a in 0..l1.total {
        let (i, js) = l1.decode(a, p);
        for b in 0..n2 {
            let (i2, js2) = l2.decode(b, p2);
            let src_dirs_right: usize = js2.iter().map(|&j| q2.arity(j)).sum();
            let mut tjs = Vec::with_capacity(js.len() * js2.len());
            for &j in &js {
                for &j2 in &js2 {
                    tjs.push(j * q2.num_positions() + j2);
                }
            }
            let k = a * n2 + b;
            on_positions[k] = lt.position(i * p2.num_positions() + i2, &tjs);
            let mut back = Vec::new();
            for (d, &j) in js.iter().enumerate() {
                for (d2, &j2) in js2.iter().enumerate() {
                    for e in 0..q.arity(j) {
                        for e2 in 0..q2.arity(j2) {
                            let left = SubstLayout::direction(q, &js, d, e);
                            let right = SubstLayout::direction(q2, &js2, d2, e2);
                            back.push(left * src_dirs_right + right);
                        }
                    }
                }
            }
            on_directions[k] = back;
        }
    }
    let source = p.substitute(q, cap)?.tensor(&p2.substitute(q2, cap)?);
    Ok(PolyMap { source: Arc::new(source), target: Arc::new(pp.substitute(&qq, cap)?), on_positions, on_directions })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Poly {
        parse::parse_poly(s).unwrap()
    }

    #[test]
    fn worked_examples() {
        assert_eq!(hom_count(&p("y^2 + y"), &p("y^3 + 1")), BigUint::from(18u32));
        assert_eq!(p("y^2").coclosure(&p("y + 1"), DEFAULT_CAP).unwrap().to_sum_string(), "y^3");
        assert_eq!(p("y^2 + y").tensor(&p("y + 1")).to_sum_string(), "y^2 + y + 2");
        assert_eq!(p("y^2").substitute(&p("y + 1"), DEFAULT_CAP).unwrap().to_sum_string(), "y^2 + 2y + 1");
    }

    #[test]
    fn enumeration_matches_count() {
        let (a, b) = (p("y^2 + y + 1"), p("y^2 + 2"));
        let maps = enumerate_maps(&a, &b, DEFAULT_CAP).unwrap();
        assert_eq!(BigUint::from(maps.len()), hom_count(&a, &b));
        for m in &maps {
            m.validate().unwrap();
        }
    }

    #[test]
    fn cap_is_enforced() {
        let big = Poly::from_exponents(&[6; 4]);
        assert!(matches!(enumerate_maps(&big, &big, 1000), Err(Error::SizeBlowup { .. })));
    }

    #[test]
    fn subst_layout_roundtrip() {
        let (a, b) = (p("y^2 + 1 + y"), p("y^3 + 2y"));
        let l = SubstLayout::new(&a, &b, DEFAULT_CAP).unwrap();
        let comp = a.substitute(&b, DEFAULT_CAP).unwrap();
        assert_eq!(l.total, comp.num_positions());
        for k in 0..l.total {
            let (i, js) = l.decode(k, &a);
            assert_eq!(l.position(i, &js), k);
            let dirs: usize = js.iter().map(|&j| b.arity(j)).sum();
            assert_eq!(dirs, comp.arity(k));
        }
    }

    #[test]
    fn subst_layout_zero_arity_runs() {
        let (a, b) = (p("1 + 1 + y"), p("0"));
        let l = SubstLayout::new(&a, &b, DEFAULT_CAP).unwrap();
        assert_eq!(l.total, 2);
        assert_eq!(l.decode(0, &a).0, 0);
        assert_eq!(l.decode(1, &a).0, 1);
    }

    #[test]
    fn composition_is_associative_on_samples() {
        let (a, b, c) = (p("y^2 + y"), p("y + 1"), p("2y^2"));
        let ab = enumerate_maps(&a, &b, DEFAULT_CAP).unwrap();
        let bc = enumerate_maps(&b, &c, DEFAULT_CAP).unwrap();
        let cc = enumerate_maps(&c, &c, DEFAULT_CAP).unwrap();
        for f in ab.iter().take(5) {
            for g in bc.iter().take(5) {
                for h in cc.iter().take(5) {
                    let l = f.then(g).unwrap().then(h).unwrap();
                    let r = f.then(&g.then(h).unwrap()).unwrap();
                    assert_eq!(l, r);
                }
            }
        }
        let id = PolyMap::identity(&ab[0].source);
        assert_eq!(id.then(&ab[3]).unwrap(), ab[3]);
    }

    #[test]
    fn duoidal_map_is_well_typed() {
        let m = duoidal_map(&p("y^2 + 1"), &p("y + 1"), &p("y"), &p("2y^2"), DEFAULT_CAP).unwrap();
        m.validate().unwrap();
    }

    #[test]
    fn dirichlet_transform_idempotent() {
        let a = p("{a: [x, y], b: [], c: [z]}");
        let t = a.dirichlet_transform();
        assert_eq!(t.to_sum_string(), "3y");
        assert_eq!(t.dirichlet_transform(), t);
    }

    #[test]
    fn find_iso_builds_an_iso() {
        let a = p("y^2 + 1 + y");
        let b = p("1 + y + y^2");
        let iso = a.find_iso(&b).unwrap();
        assert!(iso.is_iso());
        assert!(a.find_iso(&p("y^2 + y")).is_none());
    }
}

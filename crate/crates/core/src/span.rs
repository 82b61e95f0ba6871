//! Spans of finite sets and the conjunctive queries dual to them.
//!
//! A span `C <-f- S -g-> D` is the linear bicomodule `Cy ⊲-- Sy --⊲ Dy`: one
//! position per apex element, each with a single-element pattern. A
//! conjunctive bicomodule has exactly one position over every object of `C`,
//! and its pattern is an arbitrary finite `D`-set. Duality exchanges the two
//! shapes by swapping coefficients and exponents fiberwise.

use std::collections::HashMap;
use std::sync::Arc;

use crate::bicomodule::Bicomodule;
use crate::category::{FinCategory, Morphism};
use crate::copresheaf::Copresheaf;
use crate::error::{Error, Result};
use crate::label::{list_label, tuple_label, FinLabelSet, Odometer};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Span {
    pub left: FinLabelSet,
    pub apex: FinLabelSet,
    pub right: FinLabelSet,
    /// Left leg `S -> C`.
    pub f: Vec<usize>,
    /// Right leg `S -> D`.
    pub g: Vec<usize>,
}

/// A conjunctive bicomodule `(C, D)`: for every `a ∈ C` a list of variables,
/// each a label together with the object of `D` it ranges over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Conjunctive {
    pub left: FinLabelSet,
    pub right: FinLabelSet,
    pub patterns: Vec<Vec<(String, usize)>>,
}

/// `D <-f- E -g-> B -h-> C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BridgeDiagram {
    pub d: FinLabelSet,
    pub e: FinLabelSet,
    pub b: FinLabelSet,
    pub c: FinLabelSet,
    pub f: Vec<usize>,
    pub g: Vec<usize>,
    pub h: Vec<usize>,
}

/// The span `C <- C×D -> D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualizingObject {
    pub c: FinLabelSet,
    pub d: FinLabelSet,
}

fn check_function(what: &str, f: &[usize], dom: &FinLabelSet, cod: &FinLabelSet) -> Result<()> {
    if f.len() != dom.len() {
        return Err(Error::mismatch(what, format!("has {} values for {} elements", f.len(), dom.len())));
    }
    if let Some(k) = f.iter().position(|&v| v >= cod.len()) {
        return Err(Error::mismatch(what, format!("value at {} is out of range", dom.get(k))));
    }
    Ok(())
}

/// Keeps labels when they are globally distinct, and otherwise prefixes each
/// with its tag.
fn unique_or_tagged(items: &[(String, String)]) -> FinLabelSet {
    match FinLabelSet::new(items.iter().map(|(_, l)| l.clone())) {
        Ok(set) => set,
        Err(_) => FinLabelSet::generated(items.iter().map(|(t, l)| tuple_label(&[t, l]))),
    }
}

fn discrete_of(set: &FinLabelSet) -> Arc<FinCategory> {
    Arc::new(FinCategory::discrete(set))
}

fn require_discrete(m: &Bicomodule) -> Result<()> {
    if !m.left.is_discrete() || !m.right.is_discrete() {
        return Err(Error::WrongShape("expected a bicomodule between discrete categories".into()));
    }
    Ok(())
}

impl Span {
    pub fn new(left: FinLabelSet, apex: FinLabelSet, right: FinLabelSet, f: Vec<usize>, g: Vec<usize>) -> Result<Self> {
        check_function("left leg", &f, &apex, &left)?;
        check_function("right leg", &g, &apex, &right)?;
        Ok(Span { left, apex, right, f, g })
    }

    pub fn identity(c: &FinLabelSet) -> Span {
        let n = c.len();
        Span { left: c.clone(), apex: c.clone(), right: c.clone(), f: (0..n).collect(), g: (0..n).collect() }
    }

    /// The apex elements over `a ∈ C`, in apex order.
    pub fn fiber(&self, a: usize) -> Vec<usize> {
        (0..self.apex.len()).filter(|&s| self.f[s] == a).collect()
    }

    /// The leg-swapped span `D <- S -> C`.
    pub fn transpose(&self) -> Span {
        Span { left: self.right.clone(), apex: self.apex.clone(), right: self.left.clone(), f: self.g.clone(), g: self.f.clone() }
    }

    /// Apex sorted by left foot and then by label.
    pub fn canonical(&self) -> Span {
        let mut order: Vec<usize> = (0..self.apex.len()).collect();
        order.sort_by(|&s, &t| (self.f[s], self.apex.get(s)).cmp(&(self.f[t], self.apex.get(t))));
        self.reorder(&order)
    }

    fn reorder(&self, order: &[usize]) -> Span {
        Span {
            left: self.left.clone(),
            apex: FinLabelSet::generated(order.iter().map(|&s| self.apex.get(s))),
            right: self.right.clone(),
            f: order.iter().map(|&s| self.f[s]).collect(),
            g: order.iter().map(|&s| self.g[s]).collect(),
        }
    }

    /// Same feet and the same number of apex elements over every pair.
    pub fn is_iso(&self, other: &Span) -> bool {
        let count = |s: &Span| {
            let mut m: HashMap<(usize, usize), usize> = HashMap::new();
            for k in 0..s.apex.len() {
                *m.entry((s.f[k], s.g[k])).or_default() += 1;
            }
            m
        };
        self.left == other.left && self.right == other.right && count(self) == count(other)
    }

    /// Pullback composite `A <- S ×_B T -> C`; apex labels are `(s,t)`.
    pub fn compose(&self, other: &Span) -> Result<Span> {
        if self.right != other.left {
            return Err(Error::mismatch("span composite", "middle sets differ"));
        }
        let mut labels = Vec::new();
        let (mut f, mut g) = (Vec::new(), Vec::new());
        for s in 0..self.apex.len() {
            for t in other.fiber(self.g[s]) {
                labels.push(tuple_label(&[self.apex.get(s), other.apex.get(t)]));
                f.push(self.f[s]);
                g.push(other.g[t]);
            }
        }
        Ok(Span { left: self.left.clone(), apex: FinLabelSet::generated(labels), right: other.right.clone(), f, g })
    }

    /// The linear bicomodule: positions over `a` are the fiber `f⁻¹(a)`, and
    /// the pattern of `s` is one element, labeled `s`, at `g(s)`.
    pub fn to_bicomodule(&self) -> Bicomodule {
        let (c, d) = (discrete_of(&self.left), discrete_of(&self.right));
        let mut positions = Vec::new();
        let mut patterns = Vec::new();
        for a in 0..self.left.len() {
            let fib = self.fiber(a);
            positions.push(FinLabelSet::generated(fib.iter().map(|&s| self.apex.get(s))));
            patterns.push(
                fib.iter()
                    .map(|&s| {
                        let rows = (0..self.right.len())
                            .map(|b| if b == self.g[s] { FinLabelSet::generated([self.apex.get(s)]) } else { FinLabelSet::default() })
                            .collect();
                        Copresheaf::discrete(&d, rows).expect("sets over a discrete category")
                    })
                    .collect(),
            );
        }
        Bicomodule::discrete_left(c, d, positions, patterns).expect("linear bicomodule")
    }

    /// Reads a linear bicomodule between discrete categories back as a span.
    pub fn from_bicomodule(m: &Bicomodule) -> Result<Span> {
        require_discrete(m)?;
        let mut items = Vec::new();
        let (mut f, mut g) = (Vec::new(), Vec::new());
        for a in 0..m.left.num_objects() {
            for (j, label) in m.positions(a).iter().enumerate() {
                let p = m.pattern(a, j);
                let elems = p.elements();
                if elems.len() != 1 {
                    return Err(Error::WrongShape(format!(
                        "position {label} over {} has {} pattern elements, so the bicomodule is not linear",
                        m.left.object_label(a),
                        elems.len()
                    )));
                }
                items.push((m.left.object_label(a).to_string(), label.to_string()));
                f.push(a);
                g.push(elems[0].0);
            }
        }
        Ok(Span { left: m.left.objects().clone(), apex: unique_or_tagged(&items), right: m.right.objects().clone(), f, g })
    }
}

impl Conjunctive {
    pub fn new(left: FinLabelSet, right: FinLabelSet, patterns: Vec<Vec<(String, usize)>>) -> Result<Self> {
        if patterns.len() != left.len() {
            return Err(Error::mismatch("conjunctive", "one pattern per left object is required"));
        }
        for (a, vars) in patterns.iter().enumerate() {
            FinLabelSet::new(vars.iter().map(|(l, _)| l.clone()))
                .map_err(|_| Error::parse(format!("pattern {}", left.get(a)), "duplicate variable"))?;
            if let Some((l, _)) = vars.iter().find(|(_, b)| *b >= right.len()) {
                return Err(Error::mismatch(format!("pattern {}", left.get(a)), format!("variable {l} has no object")));
            }
        }
        Ok(Conjunctive { left, right, patterns })
    }

    /// Variables sorted by object and then label within every pattern.
    pub fn canonical(&self) -> Conjunctive {
        let mut c = self.clone();
        for vars in &mut c.patterns {
            vars.sort_by(|x, y| (x.1, &x.0).cmp(&(y.1, &y.0)));
        }
        c
    }

    /// Same feet and patterns of the same shape.
    pub fn is_iso(&self, other: &Conjunctive) -> bool {
        let shape = |q: &Conjunctive| -> Vec<Vec<usize>> {
            q.patterns
                .iter()
                .map(|vars| {
                    let mut v: Vec<usize> = vars.iter().map(|x| x.1).collect();
                    v.sort();
                    v
                })
                .collect()
        };
        self.left == other.left && self.right == other.right && shape(self) == shape(other)
    }

    /// `M ◁_B N`: the pattern at `a` is `Σ_{x ∈ M[a]} N[obj x]`, labeled `(x,y)`.
    pub fn compose(&self, other: &Conjunctive) -> Result<Conjunctive> {
        if self.right != other.left {
            return Err(Error::mismatch("conjunctive composite", "middle sets differ"));
        }
        let patterns = self
            .patterns
            .iter()
            .map(|vars| vars.iter().flat_map(|(x, b)| other.patterns[*b].iter().map(move |(y, c)| (tuple_label(&[x, y]), *c))).collect())
            .collect();
        Ok(Conjunctive { left: self.left.clone(), right: other.right.clone(), patterns })
    }

    pub fn to_bicomodule(&self) -> Bicomodule {
        let (c, d) = (discrete_of(&self.left), discrete_of(&self.right));
        let positions = (0..self.left.len()).map(|a| FinLabelSet::generated([self.left.get(a)])).collect();
        let patterns = self
            .patterns
            .iter()
            .map(|vars| {
                let rows =
                    (0..self.right.len()).map(|b| FinLabelSet::generated(vars.iter().filter(|x| x.1 == b).map(|x| x.0.as_str()))).collect();
                vec![Copresheaf::discrete(&d, rows).expect("sets over a discrete category")]
            })
            .collect();
        Bicomodule::discrete_left(c, d, positions, patterns).expect("conjunctive bicomodule")
    }

    /// Reads a conjunctive bicomodule between discrete categories. Variables
    /// come out grouped by object.
    pub fn from_bicomodule(m: &Bicomodule) -> Result<Conjunctive> {
        require_discrete(m)?;
        let mut patterns = Vec::new();
        for a in 0..m.left.num_objects() {
            if m.positions(a).len() != 1 {
                return Err(Error::WrongShape(format!(
                    "{} positions over {}, so the bicomodule is not conjunctive",
                    m.positions(a).len(),
                    m.left.object_label(a)
                )));
            }
            let p = m.pattern(a, 0);
            patterns.push(p.elements().into_iter().map(|(b, x)| (p.rows(b).get(x).to_string(), b)).collect());
        }
        Ok(Conjunctive { left: m.left.objects().clone(), right: m.right.objects().clone(), patterns })
    }
}

/// `Σ_a M_a y ↦ Σ_a y^{M_a}`: the variables of the pattern at `a` are the
/// apex elements over `a`.
pub fn dual_span(s: &Span) -> Conjunctive {
    let patterns = (0..s.left.len()).map(|a| s.fiber(a).into_iter().map(|t| (s.apex.get(t).to_string(), s.g[t])).collect()).collect();
    Conjunctive { left: s.left.clone(), right: s.right.clone(), patterns }
}

/// `Σ_a y^{M_a} ↦ Σ_a M_a y`: the apex collects every variable of every
/// pattern.
pub fn dual_conjunctive(q: &Conjunctive) -> Span {
    let mut items = Vec::new();
    let (mut f, mut g) = (Vec::new(), Vec::new());
    for (a, vars) in q.patterns.iter().enumerate() {
        for (x, b) in vars {
            items.push((q.left.get(a).to_string(), x.clone()));
            f.push(a);
            g.push(*b);
        }
    }
    Span { left: q.left.clone(), apex: unique_or_tagged(&items), right: q.right.clone(), f, g }
}

/// The dual of a linear or conjunctive bicomodule between discrete
/// categories. A bicomodule of both shapes is read as conjunctive when every
/// position carries the label of its object, as
/// [`Conjunctive::to_bicomodule`] produces, and as linear otherwise.
pub fn dual(m: &Bicomodule) -> Result<Bicomodule> {
    require_discrete(m).map_err(|_| Error::NotDualizable("duality needs discrete left and right categories".into()))?;
    let conj_labels = (0..m.left.num_objects()).all(|a| m.positions(a).iter().all(|label| label == m.left.object_label(a)));
    let linear = Span::from_bicomodule(m);
    let conjunctive = Conjunctive::from_bicomodule(m);
    match (linear, conjunctive) {
        (Ok(_), Ok(q)) if conj_labels => Ok(dual_conjunctive(&q).to_bicomodule()),
        (Ok(s), _) => Ok(dual_span(&s).to_bicomodule()),
        (Err(_), Ok(q)) => Ok(dual_conjunctive(&q).to_bicomodule()),
        (Err(_), Err(_)) => Err(Error::NotDualizable("the bicomodule is neither linear nor conjunctive".into())),
    }
}

/// The raw local hom `[m, ⊥]` into the dualizing object, for inspection.
pub fn dual_raw(m: &Bicomodule, cap: usize) -> Result<Bicomodule> {
    require_discrete(m)?;
    let bottom = DualizingObject { c: m.left.objects().clone(), d: m.right.objects().clone() };
    Bicomodule::local_hom_discrete(m, &bottom.to_span().to_bicomodule(), cap)
}

/// For `C <-f- S -g-> D`, the conjunctive `(D, C)` whose pattern at `b` has
/// the variables `g⁻¹(b)`, each ranging over its `f`-image.
pub fn right_adjoint(s: &Span) -> Conjunctive {
    dual_span(&s.transpose())
}

/// For a conjunctive `(C, D)`, the span `D <- {(a, x)} -> C` sending a
/// variable `x` of the pattern at `a` to its object and to `a`.
pub fn left_adjoint(q: &Conjunctive) -> Span {
    dual_conjunctive(q).transpose()
}

/// Right adjoint of a linear bicomodule, as a bicomodule.
pub fn right_adjoint_bicomodule(m: &Bicomodule) -> Result<Bicomodule> {
    Ok(right_adjoint(&Span::from_bicomodule(m)?).to_bicomodule())
}

/// Left adjoint of a conjunctive bicomodule, as a bicomodule.
pub fn left_adjoint_bicomodule(m: &Bicomodule) -> Result<Bicomodule> {
    Ok(left_adjoint(&Conjunctive::from_bicomodule(m)?).to_bicomodule())
}

/// The transpose by the dual of the right adjoint, and by the left adjoint
/// of the dual.
pub fn transpose_routes(s: &Span) -> (Span, Span) {
    let r = right_adjoint(s);
    let route1 = Span::from_bicomodule(&dual(&r.to_bicomodule()).expect("conjunctive")).expect("linear");
    let d = Conjunctive::from_bicomodule(&dual(&s.to_bicomodule()).expect("linear")).expect("conjunctive");
    (route1, left_adjoint(&d))
}

/// The transpose, checked against both dual routes.
pub fn transpose(s: &Span) -> Result<Span> {
    let swap = s.transpose().canonical();
    let (r1, r2) = transpose_routes(s);
    for (name, r) in [("right adjoint then dual", r1), ("dual then left adjoint", r2)] {
        if r.canonical() != swap {
            return Err(Error::law("transpose", name, "route disagrees with the leg swap"));
        }
    }
    Ok(swap)
}

/// Checks that dualizing a composite of spans agrees with composing the duals.
pub fn check_comp_dual(m: &Span, n: &Span, cap: usize) -> Result<()> {
    let left = dual_span(&m.compose(n)?);
    let right = dual_span(m).compose(&dual_span(n))?;
    if left != right {
        return Err(Error::law("dual of a composite", "representation", format!("{left:?} vs {right:?}")));
    }
    let via = dual(&m.to_bicomodule().compose(&n.to_bicomodule(), cap)?)?;
    let composed = dual(&m.to_bicomodule())?.compose(&dual(&n.to_bicomodule())?, cap)?;
    if via.find_iso(&composed).is_none() {
        return Err(Error::law("dual of a composite", "bicomodules", "no isomorphism found"));
    }
    Ok(())
}

impl DualizingObject {
    pub fn to_span(&self) -> Span {
        let mut labels = Vec::new();
        let (mut f, mut g) = (Vec::new(), Vec::new());
        for a in 0..self.c.len() {
            for b in 0..self.d.len() {
                labels.push(tuple_label(&[self.c.get(a), self.d.get(b)]));
                f.push(a);
                g.push(b);
            }
        }
        Span { left: self.c.clone(), apex: FinLabelSet::generated(labels), right: self.d.clone(), f, g }
    }

    pub fn to_bicomodule(&self) -> Bicomodule {
        self.to_span().to_bicomodule()
    }
}

impl BridgeDiagram {
    pub fn new(
        d: FinLabelSet,
        e: FinLabelSet,
        b: FinLabelSet,
        c: FinLabelSet,
        f: Vec<usize>,
        g: Vec<usize>,
        h: Vec<usize>,
    ) -> Result<Self> {
        check_function("f", &f, &e, &d)?;
        check_function("g", &g, &e, &b)?;
        check_function("h", &h, &b, &c)?;
        Ok(BridgeDiagram { d, e, b, c, f, g, h })
    }

    /// `E[b] = g⁻¹(b)`, in `E` order.
    pub fn fiber(&self, b: usize) -> Vec<usize> {
        (0..self.e.len()).filter(|&e| self.g[e] == b).collect()
    }

    /// Carrier `Σ_{b} y^{E[b]}`: positions over `c` are `h⁻¹(c)`, and the
    /// pattern at `b` puts each `e ∈ E[b]` over `f(e)`.
    pub fn to_bicomodule(&self) -> Bicomodule {
        let (cc, dd) = (discrete_of(&self.c), discrete_of(&self.d));
        let mut positions = Vec::new();
        let mut patterns = Vec::new();
        for c in 0..self.c.len() {
            let bs: Vec<usize> = (0..self.b.len()).filter(|&b| self.h[b] == c).collect();
            positions.push(FinLabelSet::generated(bs.iter().map(|&b| self.b.get(b))));
            patterns.push(
                bs.iter()
                    .map(|&b| {
                        let fib = self.fiber(b);
                        let rows = (0..self.d.len())
                            .map(|x| FinLabelSet::generated(fib.iter().filter(|&&e| self.f[e] == x).map(|&e| self.e.get(e))))
                            .collect();
                        Copresheaf::discrete(&dd, rows).expect("sets over a discrete category")
                    })
                    .collect(),
            );
        }
        Bicomodule::discrete_left(cc, dd, positions, patterns).expect("bridge bicomodule")
    }

    /// Positions become `B`, pattern elements become `E`.
    pub fn from_bicomodule(m: &Bicomodule) -> Result<BridgeDiagram> {
        require_discrete(m)?;
        let (mut bs, mut es) = (Vec::new(), Vec::new());
        let (mut f, mut g, mut h) = (Vec::new(), Vec::new(), Vec::new());
        for c in 0..m.left.num_objects() {
            for (j, label) in m.positions(c).iter().enumerate() {
                let b = bs.len();
                bs.push((m.left.object_label(c).to_string(), label.to_string()));
                h.push(c);
                let p = m.pattern(c, j);
                for (x, k) in p.elements() {
                    es.push((bs[b].1.clone(), p.rows(x).get(k).to_string()));
                    f.push(x);
                    g.push(b);
                }
            }
        }
        Ok(BridgeDiagram {
            d: m.right.objects().clone(),
            e: unique_or_tagged(&es),
            b: unique_or_tagged(&bs),
            c: m.left.objects().clone(),
            f,
            g,
            h,
        })
    }

    /// `Σ_h Π_g Δ_f X` computed directly on sets over `D`. An element over
    /// `c` is some `b ∈ h⁻¹(c)` with a choice of `X_{f(e)}` for every
    /// `e ∈ E[b]`; it is labeled `b[...]`, listing the choices by object of
    /// `D` and then in `E` order.
    pub fn sigma_pi_delta(&self, x: &[FinLabelSet], cap: usize) -> Result<Vec<FinLabelSet>> {
        let mut out = Vec::with_capacity(self.c.len());
        let mut total = 0usize;
        for c in 0..self.c.len() {
            let mut labels = Vec::new();
            for b in (0..self.b.len()).filter(|&b| self.h[b] == c) {
                let mut fib = self.fiber(b);
                fib.sort_by_key(|&e| self.f[e]);
                for choice in Odometer::new(fib.iter().map(|&e| x[self.f[e]].len()).collect()) {
                    total += 1;
                    if total > cap {
                        return Err(Error::blowup("elements of Σ Π Δ", cap));
                    }
                    let picks = fib.iter().zip(&choice).map(|(&e, &k)| x[self.f[e]].get(k));
                    labels.push(format!("{}{}", self.b.get(b), list_label(picks)));
                }
            }
            out.push(FinLabelSet::generated(labels));
        }
        Ok(out)
    }
}

/// A span `C <- S -> C` with a monoid structure for span composition.
#[derive(Clone, Debug)]
pub struct SpanMonad {
    pub span: Span,
    /// `η : C -> S`.
    pub unit: Vec<usize>,
    /// Dense `μ(x, y)` table for `g(x) = f(y)`, indexed `x * n + y`.
    mult: Vec<u32>,
}

const NO_PRODUCT: u32 = u32::MAX;

/// `C <-cod- Mor(c) -dom-> C`, with identities as unit and `μ(x, y) = y ; x`.
pub fn category_as_span_monad(c: &FinCategory) -> SpanMonad {
    let n = c.num_morphisms();
    let span = Span {
        left: c.objects().clone(),
        apex: FinLabelSet::generated((0..n).map(|f| c.name(f))),
        right: c.objects().clone(),
        f: (0..n).map(|f| c.cod(f)).collect(),
        g: (0..n).map(|f| c.dom(f)).collect(),
    };
    SpanMonad::new(span, c.identities().to_vec(), |x, y| c.try_compose(y, x))
}

impl SpanMonad {
    /// `mu` is consulted on every pair with `g(x) = f(y)`.
    pub fn new(span: Span, unit: Vec<usize>, mut mu: impl FnMut(usize, usize) -> Option<usize>) -> SpanMonad {
        let n = span.apex.len();
        let mut mult = vec![NO_PRODUCT; n * n];
        let fibers: Vec<Vec<usize>> = (0..span.left.len()).map(|a| span.fiber(a)).collect();
        for x in 0..n {
            if let Some(fib) = fibers.get(span.g[x]) {
                for &y in fib {
                    if let Some(z) = mu(x, y) {
                        mult[x * n + y] = z as u32;
                    }
                }
            }
        }
        SpanMonad { span, unit, mult }
    }

    pub fn mu(&self, x: usize, y: usize) -> Option<usize> {
        let v = self.mult[x * self.span.apex.len() + y];
        (v != NO_PRODUCT).then_some(v as usize)
    }

    pub fn check_laws(&self) -> Result<()> {
        let s = &self.span;
        let name = |x: usize| s.apex.get(x).to_string();
        if s.left != s.right {
            return Err(Error::mismatch("span monad", "not an endo-span"));
        }
        for (a, &e) in self.unit.iter().enumerate() {
            if s.f[e] != a || s.g[e] != a {
                return Err(Error::law("unit typing", s.left.get(a), name(e)));
            }
        }
        let mu = |x: usize, y: usize| self.mu(x, y);
        let fibers: Vec<Vec<usize>> = (0..s.left.len()).map(|a| s.fiber(a)).collect();
        for x in 0..s.apex.len() {
            for &y in &fibers[s.g[x]] {
                let pair = format!("({},{})", name(x), name(y));
                let xy = mu(x, y).ok_or_else(|| Error::law("multiplication total", pair.clone(), "missing"))?;
                if s.f[xy] != s.f[x] || s.g[xy] != s.g[y] {
                    return Err(Error::law("multiplication typing", pair, name(xy)));
                }
            }
            if mu(self.unit[s.f[x]], x) != Some(x) {
                return Err(Error::law("left unit", name(x), "μ(η, x) differs"));
            }
            if mu(x, self.unit[s.g[x]]) != Some(x) {
                return Err(Error::law("right unit", name(x), "μ(x, η) differs"));
            }
        }
        for x in 0..s.apex.len() {
            for &y in &fibers[s.g[x]] {
                let xy = mu(x, y).unwrap();
                for &z in &fibers[s.g[y]] {
                    if mu(xy, z) != mu(x, mu(y, z).unwrap()) {
                        return Err(Error::law("associativity", format!("({},{},{})", name(x), name(y), name(z)), "μ differs"));
                    }
                }
            }
        }
        Ok(())
    }

    /// The category whose morphisms `g(x) -> f(x)` are the apex elements.
    pub fn to_category(&self) -> Result<FinCategory> {
        let s = &self.span;
        let morphisms = (0..s.apex.len()).map(|x| Morphism { name: s.apex.get(x).to_string(), dom: s.g[x], cod: s.f[x] }).collect();
        FinCategory::new(s.left.clone(), morphisms, self.unit.clone(), |p, q| self.mu(q, p))
    }
}

/// The opposite of `c` read off the comonoid structure dual to its span
/// monad: morphisms out of `a` are the variables of the dual pattern at `a`,
/// with counit `η(a)` and comultiplication `(x, y) ↦ μ(x, y)`.
pub fn opposite_via_dual(c: &FinCategory) -> Result<FinCategory> {
    let monad = category_as_span_monad(c);
    let q = dual_span(&monad.span);
    let apex = &monad.span.apex;
    let mut morphisms = Vec::new();
    let mut index: HashMap<&str, usize> = HashMap::new();
    for (a, vars) in q.patterns.iter().enumerate() {
        for (x, b) in vars {
            index.insert(x.as_str(), morphisms.len());
            morphisms.push(Morphism { name: x.clone(), dom: a, cod: *b });
        }
    }
    let by_id: Vec<usize> = (0..apex.len()).map(|x| index[apex.get(x)]).collect();
    let to_apex: Vec<usize> = {
        let mut v = vec![0; by_id.len()];
        for (x, &k) in by_id.iter().enumerate() {
            v[k] = x;
        }
        v
    };
    let identities = monad.unit.iter().map(|&e| by_id[e]).collect();
    FinCategory::new(q.left.clone(), morphisms, identities, |p, r| monad.mu(to_apex[p], to_apex[r]).map(|z| by_id[z]))
}

/// The terminal span `W` with a 2-cell `W ◁_B X ⇒ Y`.
#[derive(Clone, Debug)]
pub struct LeftClosure {
    pub span: Span,
    /// `(w, x) ↦ y` for `g_W(w) = f_X(x)`.
    pub eval: HashMap<(usize, usize), usize>,
}

/// For `X : B -> C` and `Y : A -> C`, the span `A <- W -> B` whose elements
/// over `(a, b)` are the maps `X_b -> Y_a` over `C`, computed as
/// `dual([dual Y / dual X])`.
pub fn span_left_closure(x: &Span, y: &Span, cap: usize) -> Result<LeftClosure> {
    if x.right != y.right {
        return Err(Error::mismatch("left closure", "spans end at different sets"));
    }
    let p = dual_span(y).to_bicomodule();
    let q = dual_span(x).to_bicomodule();
    let (cocl, parts) = Bicomodule::coclosure_parts(&p, &q, cap)?;
    let w = dual_conjunctive(&Conjunctive::from_bicomodule(&cocl)?);
    let mut eval = HashMap::new();
    let mut k = 0;
    for a in 0..y.left.len() {
        let pa = p.pattern(a, 0);
        for b in 0..x.left.len() {
            let qb = q.pattern(b, 0);
            for (_, hom) in &parts[a][0][b] {
                for xe in x.fiber(b) {
                    let cobj = x.g[xe];
                    let i = qb.rows(cobj).index_of(x.apex.get(xe)).expect("variable of the dual");
                    let ylabel = pa.rows(cobj).get(hom.components[cobj][i]);
                    eval.insert((k, xe), y.apex.index_of(ylabel).expect("variable of the dual"));
                }
                k += 1;
            }
        }
    }
    debug_assert_eq!(k, w.apex.len());
    Ok(LeftClosure { span: w, eval })
}

impl LeftClosure {
    /// For a competitor `V : A -> B` with a 2-cell `theta : V ◁ X ⇒ Y`, the
    /// number of `w` through which each `v` factors.
    pub fn factorizations(&self, x: &Span, v: &Span, theta: &HashMap<(usize, usize), usize>) -> Vec<usize> {
        let w = &self.span;
        (0..v.apex.len())
            .map(|ve| {
                (0..w.apex.len())
                    .filter(|&we| w.f[we] == v.f[ve] && w.g[we] == v.g[ve])
                    .filter(|&we| x.fiber(v.g[ve]).into_iter().all(|xe| self.eval[&(we, xe)] == theta[&(ve, xe)]))
                    .count()
            })
            .collect()
    }
}

/// Every span `A <- V -> B` with at most `max_apex` apex elements, one per
/// isomorphism class. Apex labels are `v0, v1, ...`.
pub fn spans_up_to_iso(a: &FinLabelSet, b: &FinLabelSet, max_apex: usize) -> Vec<Span> {
    let cells = a.len() * b.len();
    let mut out = Vec::new();
    let mut word: Vec<usize> = Vec::new();
    fn go(cells: usize, max: usize, word: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(word.clone());
        if word.len() == max {
            return;
        }
        let start = word.last().copied().unwrap_or(0);
        for k in start..cells {
            word.push(k);
            go(cells, max, word, out);
            word.pop();
        }
    }
    let mut words = Vec::new();
    go(cells, max_apex, &mut word, &mut words);
    for w in words {
        let apex = FinLabelSet::generated((0..w.len()).map(|i| format!("v{i}")));
        let f = w.iter().map(|&k| k / b.len()).collect();
        let g = w.iter().map(|&k| k % b.len()).collect();
        out.push(Span { left: a.clone(), apex, right: b.clone(), f, g });
    }
    out
}

/// Every 2-cell `V ◁_B X ⇒ Y`, as maps `(v, x) ↦ y` over `A` and `C`.
pub fn two_cells(v: &Span, x: &Span, y: &Span, cap: usize) -> Result<Vec<HashMap<(usize, usize), usize>>> {
    let mut slots = Vec::new();
    let mut options = Vec::new();
    for ve in 0..v.apex.len() {
        for xe in x.fiber(v.g[ve]) {
            slots.push((ve, xe));
            options.push((0..y.apex.len()).filter(|&ye| y.f[ye] == v.f[ve] && y.g[ye] == x.g[xe]).collect::<Vec<_>>());
        }
    }
    let mut out = Vec::new();
    for choice in Odometer::new(options.iter().map(|o| o.len()).collect()) {
        if out.len() == cap {
            return Err(Error::blowup("2-cells", cap));
        }
        out.push(slots.iter().zip(&choice).enumerate().map(|(i, (&slot, &k))| (slot, options[i][k])).collect());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::FinLabelSet as L;

    fn set(xs: &[&str]) -> L {
        L::new(xs.iter().copied()).unwrap()
    }

    fn sample() -> Span {
        Span::new(set(&["c1", "c2"]), set(&["m1", "m2", "m3"]), set(&["d1", "d2"]), vec![1, 0, 1], vec![0, 0, 1]).unwrap()
    }

    #[test]
    fn double_dual_is_identity() {
        let s = sample();
        assert_eq!(dual_conjunctive(&dual_span(&s)).canonical(), s.canonical());
        let q = dual_span(&s);
        assert_eq!(dual_span(&dual_conjunctive(&q)), q);
        let m = s.to_bicomodule();
        let back = Span::from_bicomodule(&dual(&dual(&m).unwrap()).unwrap()).unwrap();
        assert_eq!(back.canonical(), s.canonical());
    }

    #[test]
    fn mixed_shapes_are_rejected() {
        let q = Conjunctive::new(set(&["a"]), set(&["b"]), vec![vec![("x".into(), 0), ("y".into(), 0)]]).unwrap();
        let mut m = dual_conjunctive(&q).to_bicomodule();
        assert!(dual(&m).is_ok());
        let two = Conjunctive::new(set(&["a"]), set(&["b"]), vec![vec![]]).unwrap();
        m = Bicomodule::discrete_left(
            m.left.clone(),
            m.right.clone(),
            vec![set(&["p", "q"])],
            vec![vec![q.to_bicomodule().pattern(0, 0).clone(), two.to_bicomodule().pattern(0, 0).clone()]],
        )
        .unwrap();
        assert!(matches!(dual(&m), Err(Error::NotDualizable(_))));
    }

    #[test]
    fn transposes_agree() {
        let s = sample();
        let (r1, r2) = transpose_routes(&s);
        assert_eq!(r1.canonical(), s.transpose().canonical());
        assert_eq!(r2.canonical(), s.transpose().canonical());
        let id = Span::identity(&set(&["a", "b"]));
        assert_eq!(transpose(&id).unwrap(), id);
    }

    #[test]
    fn adjoint_round_trip() {
        let s = sample();
        assert_eq!(left_adjoint(&right_adjoint(&s)).canonical(), s.canonical());
    }

    #[test]
    fn raw_local_hom_matches_dual() {
        let s = sample();
        let m = s.to_bicomodule();
        assert!(dual_raw(&m, 1000).unwrap().find_iso(&dual(&m).unwrap()).is_some());
        let c = dual(&m).unwrap();
        assert!(dual_raw(&c, 1000).unwrap().find_iso(&m).is_some());
    }

    #[test]
    fn left_closure_along_identity() {
        let y = sample();
        let x = Span::identity(&y.right);
        let w = span_left_closure(&x, &y, 1000).unwrap();
        assert!(w.span.is_iso(&y));
    }
}

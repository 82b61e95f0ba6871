//! Schemas whose objects carry commutative monoids, instances with
//! attribute values, and aggregation of those values along the fibers of
//! the instance's maps.
//!
//! Aggregation is deliberately not offered along instance morphisms: a map
//! of instances does not induce a map of aggregates, since collapsing two
//! rows changes every fold that sees both.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use rand::Rng as _;

use crate::category::FinCategory;
use crate::copresheaf::Copresheaf;
use crate::error::{Error, Result};
use crate::finitary::{classify_finitary, FinSkeleton};
use crate::label::{FinLabelSet, Odometer};
use crate::random::Rng;

/// A finite multiset, stored as sorted label-count pairs with no zero counts.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Multiset(BTreeMap<String, usize>);

impl Multiset {
    pub fn singleton(label: impl Into<String>) -> Self {
        let mut m = BTreeMap::new();
        m.insert(label.into(), 1);
        Multiset(m)
    }

    pub fn from_counts<I: IntoIterator<Item = (String, usize)>>(counts: I) -> Self {
        let mut m = Multiset::default();
        for (l, n) in counts {
            m.add(&l, n);
        }
        m
    }

    pub fn add(&mut self, label: &str, n: usize) {
        if n > 0 {
            *self.0.entry(label.to_string()).or_default() += n;
        }
    }

    pub fn union(&mut self, other: &Multiset) {
        for (l, &n) in &other.0 {
            self.add(l, n);
        }
    }

    pub fn len(&self) -> usize {
        self.0.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count(&self, label: &str) -> usize {
        self.0.get(label).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> + '_ {
        self.0.iter().map(|(l, &n)| (l.as_str(), n))
    }
}

impl fmt::Display for Multiset {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(l, &n)| if n == 1 { l.clone() } else { format!("{l}:{n}") }).collect();
        write!(out, "{{{}}}", parts.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Int(BigInt),
    /// The unit of `max-with-bottom`.
    Bottom,
    /// The unit of `min-with-top`.
    Top,
    Bag(Multiset),
    /// The only element of the trivial monoid.
    Star,
    /// An element of a table monoid, by index.
    Elem(usize),
}

impl Value {
    pub fn int(n: i64) -> Value {
        Value::Int(BigInt::from(n))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MonoidKind {
    IntSum,
    IntProduct,
    MaxWithBottom,
    MinWithTop,
    /// Multisets whose elements are drawn from the given labels.
    Multiset(FinLabelSet),
    Trivial,
    Table {
        elements: FinLabelSet,
        op: Vec<Vec<usize>>,
        unit: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommMonoid {
    kind: MonoidKind,
}

impl CommMonoid {
    pub fn int_sum() -> Self {
        CommMonoid { kind: MonoidKind::IntSum }
    }

    pub fn int_product() -> Self {
        CommMonoid { kind: MonoidKind::IntProduct }
    }

    pub fn max_with_bottom() -> Self {
        CommMonoid { kind: MonoidKind::MaxWithBottom }
    }

    pub fn min_with_top() -> Self {
        CommMonoid { kind: MonoidKind::MinWithTop }
    }

    pub fn multiset(over: FinLabelSet) -> Self {
        CommMonoid { kind: MonoidKind::Multiset(over) }
    }

    pub fn trivial() -> Self {
        CommMonoid { kind: MonoidKind::Trivial }
    }

    /// A monoid given by its multiplication table; the laws are checked
    /// exhaustively.
    pub fn table(elements: FinLabelSet, op: Vec<Vec<usize>>, unit: usize) -> Result<Self> {
        let m = CommMonoid { kind: MonoidKind::Table { elements, op, unit } };
        m.check_laws()?;
        Ok(m)
    }

    pub fn kind(&self) -> &MonoidKind {
        &self.kind
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            MonoidKind::IntSum => "int-sum",
            MonoidKind::IntProduct => "int-product",
            MonoidKind::MaxWithBottom => "max-with-bottom",
            MonoidKind::MinWithTop => "min-with-top",
            MonoidKind::Multiset(_) => "multiset",
            MonoidKind::Trivial => "trivial",
            MonoidKind::Table { .. } => "table",
        }
    }

    /// Checks every law of a table monoid exhaustively. The builtin kinds are lawful by construction.
    pub fn check_laws(&self) -> Result<()> {
        let MonoidKind::Table { elements, op, unit } = &self.kind else { return Ok(()) };
        let n = elements.len();
        if *unit >= n || op.len() != n || op.iter().any(|row| row.len() != n || row.iter().any(|&v| v >= n)) {
            return Err(Error::WrongShape("monoid table is not an n×n table over its elements".into()));
        }
        let l = |i: usize| elements.get(i);
        for a in 0..n {
            if op[*unit][a] != a || op[a][*unit] != a {
                return Err(Error::law("monoid unit", format!("{}·{}", l(*unit), l(a)), l(op[*unit][a])));
            }
            for b in 0..n {
                if op[a][b] != op[b][a] {
                    return Err(Error::law("commutativity", format!("{}·{}", l(a), l(b)), format!("{} vs {}", l(op[a][b]), l(op[b][a]))));
                }
                for c in 0..n {
                    if op[op[a][b]][c] != op[a][op[b][c]] {
                        return Err(Error::law("associativity", format!("({}·{})·{}", l(a), l(b), l(c)), "sides differ"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn unit(&self) -> Value {
        match &self.kind {
            MonoidKind::IntSum => Value::Int(BigInt::from(0)),
            MonoidKind::IntProduct => Value::Int(BigInt::from(1)),
            MonoidKind::MaxWithBottom => Value::Bottom,
            MonoidKind::MinWithTop => Value::Top,
            MonoidKind::Multiset(_) => Value::Bag(Multiset::default()),
            MonoidKind::Trivial => Value::Star,
            MonoidKind::Table { unit, .. } => Value::Elem(*unit),
        }
    }

    pub fn contains(&self, v: &Value) -> bool {
        match (&self.kind, v) {
            (MonoidKind::IntSum | MonoidKind::IntProduct, Value::Int(_)) => true,
            (MonoidKind::MaxWithBottom, Value::Int(_) | Value::Bottom) => true,
            (MonoidKind::MinWithTop, Value::Int(_) | Value::Top) => true,
            (MonoidKind::Multiset(over), Value::Bag(m)) => m.iter().all(|(l, _)| over.contains(l)),
            (MonoidKind::Trivial, Value::Star) => true,
            (MonoidKind::Table { elements, .. }, Value::Elem(i)) => *i < elements.len(),
            _ => false,
        }
    }

    /// `Err` with a readable description when `v` is not an element.
    pub fn check_value(&self, v: &Value, location: impl Into<String>) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::mismatch(location, format!("{} is not an element of {}", self.show(v), self.name())))
        }
    }

    /// The unbiased fold `⊛` of a finite multiset of elements. Table monoids
    /// fold over the sorted elements; laws make the order irrelevant.
    pub fn fold<'a, I: IntoIterator<Item = &'a Value>>(&self, values: I) -> Value {
        match &self.kind {
            MonoidKind::IntSum => Value::Int(values.into_iter().map(as_int).sum()),
            MonoidKind::IntProduct => Value::Int(values.into_iter().map(as_int).product()),
            MonoidKind::MaxWithBottom => values.into_iter().filter(|v| **v != Value::Bottom).max().cloned().unwrap_or(Value::Bottom),
            MonoidKind::MinWithTop => values.into_iter().filter(|v| **v != Value::Top).min().cloned().unwrap_or(Value::Top),
            MonoidKind::Multiset(_) => {
                let mut acc = Multiset::default();
                for v in values {
                    if let Value::Bag(m) = v {
                        acc.union(m);
                    }
                }
                Value::Bag(acc)
            }
            MonoidKind::Trivial => Value::Star,
            MonoidKind::Table { op, unit, .. } => {
                let mut elems: Vec<usize> = values.into_iter().map(|v| if let Value::Elem(i) = v { *i } else { *unit }).collect();
                elems.sort_unstable();
                Value::Elem(elems.into_iter().fold(*unit, |acc, e| op[acc][e]))
            }
        }
    }

    /// `a · b`.
    pub fn combine(&self, a: &Value, b: &Value) -> Value {
        self.fold([a, b])
    }

    /// Human-readable form of an element.
    pub fn show(&self, v: &Value) -> String {
        match (v, &self.kind) {
            (Value::Elem(i), MonoidKind::Table { elements, .. }) if *i < elements.len() => elements.get(*i).to_string(),
            _ => v.to_string(),
        }
    }

    /// A random element, small enough for exhaustive checks.
    pub fn random_value(&self, rng: &mut Rng) -> Value {
        match &self.kind {
            MonoidKind::IntSum => Value::int(rng.gen_range(-5..=20)),
            MonoidKind::IntProduct => Value::int(rng.gen_range(-2..=3)),
            MonoidKind::MaxWithBottom | MonoidKind::MinWithTop if rng.gen_bool(0.1) => self.unit(),
            MonoidKind::MaxWithBottom | MonoidKind::MinWithTop => Value::int(rng.gen_range(-10..=10)),
            MonoidKind::Multiset(over) if over.is_empty() => self.unit(),
            MonoidKind::Multiset(over) => {
                let mut m = Multiset::default();
                for _ in 0..rng.gen_range(0..=2) {
                    m.add(over.get(rng.gen_range(0..over.len())), 1);
                }
                Value::Bag(m)
            }
            MonoidKind::Trivial => Value::Star,
            MonoidKind::Table { elements, .. } => Value::Elem(rng.gen_range(0..elements.len())),
        }
    }

    /// Every element, for finite carriers.
    pub fn elements(&self) -> Option<Vec<Value>> {
        match &self.kind {
            MonoidKind::Trivial => Some(vec![Value::Star]),
            MonoidKind::Table { elements, .. } => Some((0..elements.len()).map(Value::Elem).collect()),
            _ => None,
        }
    }
}

fn as_int(v: &Value) -> BigInt {
    match v {
        Value::Int(n) => n.clone(),
        _ => BigInt::from(0),
    }
}

impl fmt::Display for Value {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(out, "{n}"),
            Value::Bottom => write!(out, "bottom"),
            Value::Top => write!(out, "top"),
            Value::Bag(m) => write!(out, "{m}"),
            Value::Star => write!(out, "*"),
            Value::Elem(i) => write!(out, "#{i}"),
        }
    }
}

/// A category with a commutative monoid on every object.
#[derive(Clone, Debug, PartialEq)]
pub struct Schema {
    pub category: Arc<FinCategory>,
    pub monoids: Vec<CommMonoid>,
}

impl Schema {
    pub fn new(category: Arc<FinCategory>, monoids: Vec<CommMonoid>) -> Result<Self> {
        if monoids.len() != category.num_objects() {
            return Err(Error::mismatch("schema", "every object needs a monoid"));
        }
        for m in &monoids {
            m.check_laws()?;
        }
        Ok(Schema { category, monoids })
    }
}

/// A copresheaf on the schema's category with an attribute value for every
/// row.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub schema: Arc<Schema>,
    pub data: Copresheaf,
    /// `attributes[a][x] = α_a(x)`.
    pub attributes: Vec<Vec<Value>>,
}

impl Instance {
    pub fn new(schema: Arc<Schema>, data: Copresheaf, attributes: Vec<Vec<Value>>) -> Result<Self> {
        if *data.base != *schema.category {
            return Err(Error::mismatch("instance", "data lives over a different category"));
        }
        data.validate()?;
        let c = &schema.category;
        if attributes.len() != c.num_objects() {
            return Err(Error::mismatch("instance", "attributes for every object are required"));
        }
        for a in 0..c.num_objects() {
            if attributes[a].len() != data.rows(a).len() {
                return Err(Error::mismatch(format!("attributes.{}", c.object_label(a)), "not one value per row"));
            }
            for (x, v) in attributes[a].iter().enumerate() {
                schema.monoids[a].check_value(v, format!("attributes.{}.{}", c.object_label(a), data.rows(a).get(x)))?;
            }
        }
        Ok(Instance { schema, data, attributes })
    }

    /// A random instance on `schema` with at most `max_rows` rows per table.
    pub fn random(rng: &mut Rng, schema: &Arc<Schema>, max_rows: usize) -> Instance {
        let data = crate::random::random_copresheaf(rng, &schema.category, max_rows);
        let attributes = (0..schema.category.num_objects())
            .map(|a| (0..data.rows(a).len()).map(|_| schema.monoids[a].random_value(rng)).collect())
            .collect();
        Instance { schema: schema.clone(), data, attributes }
    }
}

/// `(⊛α)_f : X_{a'} -> M_a` for `f : a -> a'`: every row of `X_{a'}` gets the
/// fold of the attributes of its fiber under `X_f`.
pub fn aggregate_along(inst: &Instance, f: usize) -> Vec<Value> {
    let c = &inst.schema.category;
    let (a, a2) = (c.dom(f), c.cod(f));
    let mut fibers: Vec<Vec<&Value>> = vec![Vec::new(); inst.data.rows(a2).len()];
    for (e, v) in inst.attributes[a].iter().enumerate() {
        fibers[inst.data.act(f, e)].push(v);
    }
    fibers.into_iter().map(|fib| inst.schema.monoids[a].fold(fib)).collect()
}

/// A value of `(Π_C M)_j = Π_{f : i -> j} M_i`, or of an iterate of `Π_C`:
/// a leaf is an element of some `M_i`, a node is a family indexed by the
/// morphisms into its object, in `into(j)` order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    Leaf(Value),
    Node { object: usize, components: Vec<Family> },
}

impl Family {
    fn component(&self, c: &FinCategory, f: usize) -> &Family {
        match self {
            Family::Node { object, components } => {
                let k = c.into(*object).iter().position(|&g| g == f).expect("morphism into the family's object");
                &components[k]
            }
            Family::Leaf(_) => panic!("a leaf has no components"),
        }
    }

    /// `ε_j`: the component at the identity.
    pub fn epsilon(&self, c: &FinCategory) -> Family {
        match self {
            Family::Node { object, .. } => self.component(c, c.identity(*object)).clone(),
            Family::Leaf(_) => self.clone(),
        }
    }

    /// `δ_j`: the component at `g : i' -> j` is the family over `f : i -> i'`
    /// whose entry is this family's component at `f ; g`.
    pub fn delta(&self, c: &FinCategory) -> Family {
        let Family::Node { object, .. } = self else { return self.clone() };
        let components = c
            .into(*object)
            .iter()
            .map(|&g| Family::Node {
                object: c.dom(g),
                components: c.into(c.dom(g)).iter().map(|&f| self.component(c, c.compose(f, g)).clone()).collect(),
            })
            .collect();
        Family::Node { object: *object, components }
    }

    /// `Π_C φ`: applies `phi` to every component.
    pub fn map(&self, c: &FinCategory, phi: &dyn Fn(&Family) -> Family) -> Family {
        match self {
            Family::Node { object, components } => {
                debug_assert_eq!(components.len(), c.into(*object).len());
                Family::Node { object: *object, components: components.iter().map(phi).collect() }
            }
            Family::Leaf(_) => phi(self),
        }
    }
}

/// `⊛α : X -> Π_C M`: for `x ∈ X_j` the family `f ↦ (⊛α)_f(x)`.
pub fn aggregate_all(inst: &Instance) -> Vec<Vec<Family>> {
    let c: &FinCategory = &inst.schema.category;
    let along: Vec<Vec<Value>> = (0..c.num_morphisms()).map(|f| aggregate_along(inst, f)).collect();
    (0..c.num_objects())
        .map(|j| {
            (0..inst.data.rows(j).len())
                .map(|x| Family::Node { object: j, components: c.into(j).iter().map(|&f| Family::Leaf(along[f][x].clone())).collect() })
                .collect()
        })
        .collect()
}

/// `(⊛α)_{id} = α`.
pub fn check_epsilon_law(inst: &Instance) -> Result<()> {
    let c = &inst.schema.category;
    for a in 0..c.num_objects() {
        let got = aggregate_along(inst, c.identity(a));
        if let Some(x) = (0..got.len()).find(|&x| got[x] != inst.attributes[a][x]) {
            let m = &inst.schema.monoids[a];
            return Err(Error::law(
                "aggregation counit",
                format!("{} row {}", c.object_label(a), inst.data.rows(a).get(x)),
                format!("{} vs {}", m.show(&got[x]), m.show(&inst.attributes[a][x])),
            ));
        }
    }
    Ok(())
}

/// `(⊛α)_{f;g}(d) = ⊛ { (⊛α)_f(e) : X_g(e) = d }`.
pub fn check_delta_law(inst: &Instance, f: usize, g: usize) -> Result<()> {
    let c = &inst.schema.category;
    let direct = aggregate_along(inst, c.compose(f, g));
    let step = aggregate_along(inst, f);
    let m = &inst.schema.monoids[c.dom(f)];
    let b = c.cod(f);
    let mut fibers: Vec<Vec<&Value>> = vec![Vec::new(); inst.data.rows(c.cod(g)).len()];
    for (e, v) in step.iter().enumerate() {
        fibers[inst.data.act(g, e)].push(v);
    }
    debug_assert_eq!(step.len(), inst.data.rows(b).len());
    for (d, fib) in fibers.into_iter().enumerate() {
        let twice = m.fold(fib);
        if twice != direct[d] {
            return Err(Error::law(
                "aggregation comultiplication",
                format!("{};{} at row {}", c.name(f), c.name(g), inst.data.rows(c.cod(g)).get(d)),
                format!("{} vs {}", m.show(&direct[d]), m.show(&twice)),
            ));
        }
    }
    Ok(())
}

/// Checks both laws on every composable pair.
pub fn check_coherence(inst: &Instance) -> Result<()> {
    check_epsilon_law(inst)?;
    let c = &inst.schema.category;
    for f in 0..c.num_morphisms() {
        for &g in c.out(c.cod(f)) {
            check_delta_law(inst, f, g)?;
        }
    }
    Ok(())
}

/// `⊛α ⨟ δ = ⊛(⊛α)` on families: the `(g, f)` entry of `δ(⊛α(x))` must be
/// the fold, over the `X_g`-fiber of `x`, of the `f` components of `⊛α`.
pub fn check_family_delta(inst: &Instance) -> Result<()> {
    let c: &FinCategory = &inst.schema.category;
    let fams = aggregate_all(inst);
    for j in 0..c.num_objects() {
        for (x, fam) in fams[j].iter().enumerate() {
            let d = fam.delta(c);
            for &g in c.into(j) {
                let i2 = c.dom(g);
                let fiber: Vec<usize> = (0..inst.data.rows(i2).len()).filter(|&e| inst.data.act(g, e) == x).collect();
                for &f in c.into(i2) {
                    let m = &inst.schema.monoids[c.dom(f)];
                    let leaves: Vec<&Value> = fiber
                        .iter()
                        .map(|&e| match fams[i2][e].component(c, f) {
                            Family::Leaf(v) => v,
                            Family::Node { .. } => unreachable!("aggregates are one level deep"),
                        })
                        .collect();
                    let expected = Family::Leaf(m.fold(leaves));
                    if *d.component(c, g).component(c, f) != expected {
                        return Err(Error::law(
                            "aggregate of aggregates",
                            format!("{} row {} at ({}, {})", c.object_label(j), inst.data.rows(j).get(x), c.name(g), c.name(f)),
                            "δ entry differs from the refolded aggregate",
                        ));
                    }
                }
            }
        }
    }
    Ok(())
}

/// The comonad laws of `Π_C M` on `samples` random families per object.
pub fn pi_comonad_check(schema: &Schema, rng: &mut Rng, samples: usize) -> Result<()> {
    let c: &FinCategory = &schema.category;
    for j in 0..c.num_objects() {
        for _ in 0..samples {
            let v = Family::Node {
                object: j,
                components: c.into(j).iter().map(|&f| Family::Leaf(schema.monoids[c.dom(f)].random_value(rng))).collect(),
            };
            let d = v.delta(c);
            if d.epsilon(c) != v {
                return Err(Error::law("left counit", c.object_label(j), format!("{v:?}")));
            }
            if d.map(c, &|w| w.epsilon(c)) != v {
                return Err(Error::law("right counit", c.object_label(j), format!("{v:?}")));
            }
            if d.delta(c) != d.map(c, &|w| w.delta(c)) {
                return Err(Error::law("coassociativity", c.object_label(j), format!("{v:?}")));
            }
        }
    }
    Ok(())
}

/// The fibers of `X_f` as multisets of row labels of `X_{dom f}`.
pub fn group_by(data: &Copresheaf, f: usize) -> Vec<Multiset> {
    let c = data.base.clone();
    let monoids = (0..c.num_objects()).map(|a| CommMonoid::multiset(data.rows(a).clone())).collect();
    let schema = Arc::new(Schema { category: c.clone(), monoids });
    let attributes = (0..c.num_objects()).map(|a| data.rows(a).iter().map(|l| Value::Bag(Multiset::singleton(l))).collect()).collect();
    let inst = Instance { schema, data: data.clone(), attributes };
    aggregate_along(&inst, f)
        .into_iter()
        .map(|v| match v {
            Value::Bag(m) => m,
            _ => unreachable!("multiset monoid folds to multisets"),
        })
        .collect()
}

/// `M` as a module over finite sets: a function `ord I -> ord J` sends a
/// tuple in `M^I` to the tuple of fiberwise folds in `M^J`.
pub fn fold_along(m: &CommMonoid, function: &[usize], cod: usize, tuple: &[Value]) -> Vec<Value> {
    let mut fibers: Vec<Vec<&Value>> = vec![Vec::new(); cod];
    for (i, v) in tuple.iter().enumerate() {
        fibers[function[i]].push(v);
    }
    fibers.into_iter().map(|fib| m.fold(fib)).collect()
}

/// The module structure of `m` over the skeleton of finite sets.
pub struct FinModule<'a> {
    pub monoid: &'a CommMonoid,
    pub skeleton: &'a FinSkeleton,
}

pub fn monoid_as_fin_module<'a>(m: &'a CommMonoid, skeleton: &'a FinSkeleton) -> FinModule<'a> {
    FinModule { monoid: m, skeleton }
}

impl FinModule<'_> {
    /// The action of a skeleton morphism on a tuple of its domain's length.
    pub fn act(&self, f: usize, tuple: &[Value]) -> Result<Vec<Value>> {
        let c = &self.skeleton.category;
        if tuple.len() > self.skeleton.k {
            return Err(Error::RowTooLarge { object: "tuple".into(), rows: tuple.len(), bound: self.skeleton.k });
        }
        if tuple.len() != c.dom(f) {
            return Err(Error::mismatch(c.name(f), "tuple length differs from the domain"));
        }
        Ok(fold_along(self.monoid, self.skeleton.function(f), c.cod(f), tuple))
    }

    /// Identities act trivially and composites act by composing, on every
    /// tuple over `values`.
    pub fn check_functorial(&self, values: &[Value]) -> Result<()> {
        let c = &self.skeleton.category;
        for m in 0..c.num_objects() {
            for choice in Odometer::new(vec![values.len(); m]) {
                let tuple: Vec<Value> = choice.iter().map(|&k| values[k].clone()).collect();
                let show = || format!("[{}]", tuple.iter().map(|v| self.monoid.show(v)).collect::<Vec<_>>().join(","));
                if self.act(c.identity(m), &tuple)? != tuple {
                    return Err(Error::law("identity acts trivially", c.name(c.identity(m)), show()));
                }
                for &f in c.out(m) {
                    let once = self.act(f, &tuple)?;
                    for &g in c.out(c.cod(f)) {
                        if self.act(c.compose(f, g), &tuple)? != self.act(g, &once)? {
                            return Err(Error::law("action of a composite", format!("{};{}", c.name(f), c.name(g)), show()));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// `(⊛α)_f` recomputed through the classifying functor of the data and the
/// module structure of `M_{dom f}`.
pub fn aggregate_via_module(inst: &Instance, f: usize, skeleton: &FinSkeleton) -> Result<Vec<Value>> {
    let c = &inst.schema.category;
    let cl = classify_finitary(&inst.data, skeleton.k)?;
    let functor = cl.to_functor(c, skeleton)?;
    let module = monoid_as_fin_module(&inst.schema.monoids[c.dom(f)], skeleton);
    module.act(functor.on_morphisms[f], &inst.attributes[c.dom(f)])
}

/// A schema whose objects carry any number of monoid tags: the span
/// `c(1) <- P -> T` assigns to each occurrence `p` over an object one of the
/// monoids `tags`.
#[derive(Clone, Debug)]
pub struct TaggedSchema {
    pub category: Arc<FinCategory>,
    pub tags: Vec<CommMonoid>,
    pub occurrences: crate::span::Span,
}

#[derive(Clone, Debug)]
pub struct TaggedInstance {
    pub schema: Arc<TaggedSchema>,
    pub data: Copresheaf,
    /// `attributes[p][x]` for `x` a row over the object of `p`.
    pub attributes: Vec<Vec<Value>>,
}

impl TaggedInstance {
    pub fn new(schema: Arc<TaggedSchema>, data: Copresheaf, attributes: Vec<Vec<Value>>) -> Result<Self> {
        let occ = &schema.occurrences;
        if occ.left.len() != schema.category.num_objects() || occ.right.len() != schema.tags.len() {
            return Err(Error::mismatch("tag span", "feet do not match the objects and tags"));
        }
        if attributes.len() != occ.apex.len() {
            return Err(Error::mismatch("tagged instance", "one attribute column per occurrence is required"));
        }
        for (p, col) in attributes.iter().enumerate() {
            let a = occ.f[p];
            if col.len() != data.rows(a).len() {
                return Err(Error::mismatch(format!("occurrence {}", occ.apex.get(p)), "not one value per row"));
            }
            for v in col {
                schema.tags[occ.g[p]].check_value(v, format!("occurrence {}", occ.apex.get(p)))?;
            }
        }
        Ok(TaggedInstance { schema, data, attributes })
    }

    /// The instance seeing only occurrence `p`; other objects get the
    /// trivial monoid.
    pub fn project(&self, p: usize) -> Instance {
        let occ = &self.schema.occurrences;
        let c = &self.schema.category;
        let monoids =
            (0..c.num_objects()).map(|a| if a == occ.f[p] { self.schema.tags[occ.g[p]].clone() } else { CommMonoid::trivial() }).collect();
        let attributes = (0..c.num_objects())
            .map(|a| if a == occ.f[p] { self.attributes[p].clone() } else { vec![Value::Star; self.data.rows(a).len()] })
            .collect();
        Instance { schema: Arc::new(Schema { category: c.clone(), monoids }), data: self.data.clone(), attributes }
    }
}

/// One aggregate per occurrence over `dom f`, in occurrence order.
pub fn aggregate_generalized(inst: &TaggedInstance, f: usize) -> Vec<(usize, Vec<Value>)> {
    let a = inst.schema.category.dom(f);
    inst.schema.occurrences.fiber(a).into_iter().map(|p| (p, aggregate_along(&inst.project(p), f))).collect()
}

/// The employee/department/college schema with salaries under `int-sum`:
/// `w : employee -> department`, `p : department -> college`. Department
/// `d3` has no employees.
pub fn salary_example() -> Instance {
    let objects = FinLabelSet::new(["employee", "department", "college"]).expect("labels");
    let morphisms = vec![
        crate::category::Morphism { name: "id_employee".into(), dom: 0, cod: 0 },
        crate::category::Morphism { name: "id_department".into(), dom: 1, cod: 1 },
        crate::category::Morphism { name: "id_college".into(), dom: 2, cod: 2 },
        crate::category::Morphism { name: "w".into(), dom: 0, cod: 1 },
        crate::category::Morphism { name: "p".into(), dom: 1, cod: 2 },
        crate::category::Morphism { name: "w;p".into(), dom: 0, cod: 2 },
    ];
    let c = Arc::new(
        FinCategory::new(objects, morphisms, vec![0, 1, 2], |f, g| match (f, g) {
            (f, g) if f < 3 => Some(g),
            (f, g) if g < 3 => Some(f),
            (3, 4) => Some(5),
            _ => None,
        })
        .expect("salary schema"),
    );
    let rows = vec![
        FinLabelSet::new(["e1", "e2", "e3", "e4"]).expect("labels"),
        FinLabelSet::new(["d1", "d2", "d3"]).expect("labels"),
        FinLabelSet::new(["c1", "c2"]).expect("labels"),
    ];
    let w = vec![0, 0, 1, 1];
    let p = vec![0, 1, 1];
    let wp: Vec<usize> = w.iter().map(|&d| p[d]).collect();
    let action = vec![vec![0, 1, 2, 3], vec![0, 1, 2], vec![0, 1], w, p, wp];
    let data = Copresheaf::new(c.clone(), rows, action).expect("salary data");
    let schema = Arc::new(Schema::new(c, vec![CommMonoid::int_sum(), CommMonoid::int_sum(), CommMonoid::int_sum()]).expect("schema"));
    let attributes = vec![[10, 20, 5, 7].iter().map(|&n| Value::int(n)).collect(), vec![Value::int(0); 3], vec![Value::int(0); 2]];
    Instance::new(schema, data, attributes).expect("salary instance")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn salary_totals() {
        let inst = salary_example();
        let c = &inst.schema.category;
        let w = c.find_morphism("w").unwrap();
        let wp = c.find_morphism("w;p").unwrap();
        assert_eq!(aggregate_along(&inst, w), vec![Value::int(30), Value::int(12), Value::int(0)]);
        assert_eq!(aggregate_along(&inst, wp), vec![Value::int(30), Value::int(12)]);
        check_coherence(&inst).unwrap();
    }

    #[test]
    fn folds() {
        let mx = CommMonoid::max_with_bottom();
        assert_eq!(mx.fold([]), Value::Bottom);
        assert_eq!(mx.fold([&Value::int(3), &Value::Bottom, &Value::int(-1)]), Value::int(3));
        let mn = CommMonoid::min_with_top();
        assert_eq!(mn.fold([&Value::int(3), &Value::int(-1)]), Value::int(-1));
        let s = CommMonoid::int_product();
        assert_eq!(s.fold([]), Value::int(1));
        assert_eq!(s.fold([&Value::int(4)]), Value::int(4));
    }

    #[test]
    fn table_laws_are_checked() {
        let l = FinLabelSet::new(["0", "1"]).unwrap();
        assert!(CommMonoid::table(l.clone(), vec![vec![0, 1], vec![1, 0]], 0).is_ok());
        let bad = CommMonoid::table(l.clone(), vec![vec![0, 1], vec![0, 0]], 0);
        assert!(matches!(bad, Err(Error::LawViolation { .. })));
        assert!(CommMonoid::table(l, vec![vec![0, 1], vec![1, 1]], 1).is_err());
    }

    #[test]
    fn group_by_partitions() {
        let inst = salary_example();
        let c = &inst.schema.category;
        let w = c.find_morphism("w").unwrap();
        let groups = group_by(&inst.data, w);
        assert_eq!(groups.iter().map(|m| m.len()).collect::<Vec<_>>(), vec![2, 2, 0]);
        assert_eq!(groups[0].to_string(), "{e1, e2}");
    }
}

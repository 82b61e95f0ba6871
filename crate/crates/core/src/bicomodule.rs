//! Bicomodules `c ⊲-- m --⊲ d`, stored as functors from `c` to duc-queries
//! over `d`: each object `a` has positions `m_a(1)`, each position `j` has a
//! pattern `m[j]` (a `d`-copresheaf), and each morphism `f : a -> a'` moves
//! positions forward while mapping patterns backward, `m[f_! j] -> m[j]`.

use std::collections::HashMap;
use std::sync::Arc;

use crate::category::FinCategory;
use crate::copresheaf::{self, push_places, Copresheaf, CopresheafHom};
use crate::error::{Error, Result};
use crate::functor::Cofunctor;
use crate::label::{list_label, tuple_label, FinLabelSet, Odometer};
use crate::poly::Poly;

#[derive(Clone, Debug, PartialEq)]
pub struct MorphismAction {
    /// `f_!` on positions.
    pub positions: Vec<usize>,
    /// For each position `j` over `dom f`, the pattern map `m[f_! j] -> m[j]`.
    pub patterns: Vec<CopresheafHom>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Bicomodule {
    pub left: Arc<FinCategory>,
    pub right: Arc<FinCategory>,
    positions: Vec<FinLabelSet>,
    patterns: Vec<Vec<Copresheaf>>,
    action: Vec<MorphismAction>,
}

impl Bicomodule {
    pub fn new(
        left: Arc<FinCategory>,
        right: Arc<FinCategory>,
        positions: Vec<FinLabelSet>,
        patterns: Vec<Vec<Copresheaf>>,
        action: Vec<MorphismAction>,
    ) -> Result<Self> {
        let m = Bicomodule { left, right, positions, patterns, action };
        m.validate()?;
        Ok(m)
    }

    /// A bicomodule out of a left category whose every morphism is an
    /// identity, so only positions and patterns are needed.
    pub fn discrete_left(
        left: Arc<FinCategory>,
        right: Arc<FinCategory>,
        positions: Vec<FinLabelSet>,
        patterns: Vec<Vec<Copresheaf>>,
    ) -> Result<Self> {
        if !left.is_discrete() {
            return Err(Error::WrongShape("left category is not discrete".into()));
        }
        let action = (0..left.num_morphisms())
            .map(|f| {
                let a = left.dom(f);
                MorphismAction {
                    positions: (0..positions[a].len()).collect(),
                    patterns: patterns[a].iter().map(CopresheafHom::identity).collect(),
                }
            })
            .collect();
        Bicomodule::new(left, right, positions, patterns, action)
    }

    pub fn validate(&self) -> Result<()> {
        let (c, d) = (&self.left, &self.right);
        if self.positions.len() != c.num_objects() || self.patterns.len() != c.num_objects() || self.action.len() != c.num_morphisms() {
            return Err(Error::WrongShape("bicomodule data does not match its left category".into()));
        }
        for a in 0..c.num_objects() {
            if self.patterns[a].len() != self.positions[a].len() {
                return Err(Error::WrongShape(format!("patterns at {} do not match its positions", c.object_label(a))));
            }
            for (j, p) in self.patterns[a].iter().enumerate() {
                if *p.base != **d {
                    return Err(Error::mismatch(self.describe(a, j), "pattern lives over the wrong category"));
                }
                p.validate()?;
            }
        }
        for f in 0..c.num_morphisms() {
            let (a, a2) = (c.dom(f), c.cod(f));
            let act = &self.action[f];
            if act.positions.len() != self.positions[a].len() || act.patterns.len() != self.positions[a].len() {
                return Err(Error::WrongShape(format!("action of {} does not cover the positions", c.name(f))));
            }
            for j in 0..self.positions[a].len() {
                let j2 = act.positions[j];
                if j2 >= self.positions[a2].len() {
                    return Err(Error::mismatch(c.name(f), "position image out of range"));
                }
                let h = &act.patterns[j];
                let (src, tgt) = (&self.patterns[a2][j2], &self.patterns[a][j]);
                let shaped = h.components.len() == d.num_objects()
                    && (0..d.num_objects())
                        .all(|b| h.components[b].len() == src.rows(b).len() && h.components[b].iter().all(|&y| y < tgt.rows(b).len()));
                if !shaped || !h.is_natural(src, tgt) {
                    return Err(Error::law(
                        "pattern maps are natural",
                        format!("{} at {}", c.name(f), self.describe(a, j)),
                        "not a map of patterns",
                    ));
                }
            }
        }
        for a in 0..c.num_objects() {
            let act = &self.action[c.identity(a)];
            for j in 0..self.positions[a].len() {
                if act.positions[j] != j || act.patterns[j] != CopresheafHom::identity(&self.patterns[a][j]) {
                    return Err(Error::law("identities act trivially", self.describe(a, j), "identity moves a position or pattern"));
                }
            }
        }
        for f in 0..c.num_morphisms() {
            for &g in c.out(c.cod(f)) {
                let fg = c.compose(f, g);
                let (af, ag, afg) = (&self.action[f], &self.action[g], &self.action[fg]);
                for j in 0..self.positions[c.dom(f)].len() {
                    let j2 = af.positions[j];
                    let law = format!("{};{} at {}", c.name(f), c.name(g), self.describe(c.dom(f), j));
                    if afg.positions[j] != ag.positions[j2] {
                        return Err(Error::law("positions move functorially", law, "position images differ"));
                    }
                    if afg.patterns[j] != ag.patterns[j2].then(&af.patterns[j]) {
                        return Err(Error::law("patterns move functorially", law, "pattern maps differ"));
                    }
                }
            }
        }
        Ok(())
    }

    fn describe(&self, a: usize, j: usize) -> String {
        format!("position {} over {}", self.positions[a].get(j), self.left.object_label(a))
    }

    pub fn positions(&self, a: usize) -> &FinLabelSet {
        &self.positions[a]
    }

    pub fn pattern(&self, a: usize, j: usize) -> &Copresheaf {
        &self.patterns[a][j]
    }

    pub fn action(&self, f: usize) -> &MorphismAction {
        &self.action[f]
    }

    pub fn num_positions(&self) -> usize {
        self.positions.iter().map(|p| p.len()).sum()
    }

    /// The identity bicomodule on `c`: one position per object, whose
    /// pattern is the representable `c(a, -)`.
    pub fn identity(c: &Arc<FinCategory>) -> Self {
        let positions = (0..c.num_objects()).map(|a| FinLabelSet::generated([c.object_label(a)])).collect();
        let patterns: Vec<Vec<Copresheaf>> = (0..c.num_objects()).map(|a| vec![Copresheaf::representable(c, a)]).collect();
        let action = (0..c.num_morphisms())
            .map(|f| {
                let (a, a2) = (c.dom(f), c.cod(f));
                let src = &patterns[a2][0];
                let tgt = &patterns[a][0];
                let components = (0..c.num_objects())
                    .map(|b| {
                        (0..src.rows(b).len())
                            .map(|k| {
                                let g = c.find_morphism(src.rows(b).get(k)).expect("representable rows are morphisms");
                                tgt.rows(b).index_of(c.name(c.compose(f, g))).expect("composite lies in the hom-set")
                            })
                            .collect()
                    })
                    .collect();
                MorphismAction { positions: vec![0], patterns: vec![CopresheafHom { components }] }
            })
            .collect();
        Bicomodule { left: c.clone(), right: c.clone(), positions, patterns, action }
    }

    /// A polynomial as a bicomodule between terminal categories.
    pub fn from_poly(p: &Poly) -> Self {
        let y = Arc::new(FinCategory::terminal());
        let patterns = vec![(0..p.num_positions())
            .map(|i| Copresheaf::discrete(&y, vec![p.directions(i).clone()]).expect("sets over a point"))
            .collect()];
        Bicomodule::discrete_left(y.clone(), y, vec![p.positions().clone()], patterns).expect("polynomial bicomodule")
    }

    /// The underlying polynomial: all positions, with pattern elements as directions.
    pub fn carrier(&self) -> Poly {
        let single = self.left.num_objects() == 1;
        let mut labels = Vec::new();
        let mut dirs = Vec::new();
        for a in 0..self.left.num_objects() {
            for (j, label) in self.positions[a].iter().enumerate() {
                labels.push(if single { label.to_string() } else { tuple_label(&[self.left.object_label(a), label]) });
                let p = &self.patterns[a][j];
                dirs.push(FinLabelSet::generated((0..self.right.num_objects()).flat_map(|b| {
                    p.rows(b).iter().map(move |x| {
                        if self.right.num_objects() == 1 {
                            x.to_string()
                        } else {
                            tuple_label(&[self.right.object_label(b), x])
                        }
                    })
                })));
            }
        }
        Poly::new(FinLabelSet::generated(labels), dirs).expect("carrier")
    }

    /// The positions copresheaf `m(1)` on the left category.
    pub fn positions_copresheaf(&self) -> Copresheaf {
        let action = self.action.iter().map(|a| a.positions.clone()).collect();
        Copresheaf::new_unchecked(self.left.clone(), self.positions.clone(), action).expect("positions copresheaf")
    }

    /// A copresheaf on `c` as a bicomodule `c ⊲-- X --⊲ 0`.
    pub fn from_copresheaf(x: &Copresheaf) -> Self {
        let zero = Arc::new(FinCategory::empty());
        let c = &x.base;
        let patterns = (0..c.num_objects()).map(|a| vec![Copresheaf::empty(&zero); x.rows(a).len()]).collect();
        let action = (0..c.num_morphisms())
            .map(|f| MorphismAction {
                positions: x.action(f).to_vec(),
                patterns: vec![CopresheafHom { components: Vec::new() }; x.rows(c.dom(f)).len()],
            })
            .collect();
        Bicomodule { left: c.clone(), right: zero, positions: x.all_rows().to_vec(), patterns, action }
    }

    /// Reads back a bicomodule into the empty category as a copresheaf.
    pub fn to_copresheaf(&self) -> Result<Copresheaf> {
        if self.right.num_objects() != 0 {
            return Err(Error::WrongShape("right category is not empty".into()));
        }
        Ok(self.positions_copresheaf())
    }

    /// The prafunctor `d-Set -> c-Set`: `m(X)_a = Σ_{j ∈ m_a(1)} d-Set(m[j], X)`.
    pub fn apply(&self, x: &Copresheaf, cap: usize) -> Result<Copresheaf> {
        let c = &self.left;
        let mut rows = Vec::with_capacity(c.num_objects());
        let mut index: Vec<HashMap<(usize, CopresheafHom), usize>> = Vec::with_capacity(c.num_objects());
        let mut entries: Vec<Vec<(usize, CopresheafHom)>> = Vec::with_capacity(c.num_objects());
        let mut total = 0usize;
        for a in 0..c.num_objects() {
            let mut labels = Vec::new();
            let mut idx = HashMap::new();
            let mut list = Vec::new();
            for (j, p) in self.patterns[a].iter().enumerate() {
                for h in copresheaf::homs(p, x, cap.saturating_sub(total))? {
                    total += 1;
                    labels.push(format!("{}{}", self.positions[a].get(j), h.label(x)));
                    idx.insert((j, h.clone()), list.len());
                    list.push((j, h));
                }
            }
            if total > cap {
                return Err(Error::blowup("rows of m(X)", cap));
            }
            rows.push(FinLabelSet::generated(labels));
            index.push(idx);
            entries.push(list);
        }
        let action = (0..c.num_morphisms())
            .map(|f| {
                let act = &self.action[f];
                entries[c.dom(f)].iter().map(|(j, h)| index[c.cod(f)][&(act.positions[*j], act.patterns[*j].then(h))]).collect()
            })
            .collect();
        Copresheaf::new_unchecked(c.clone(), rows, action)
    }

    /// The composite `m ◁_d n`, a bicomodule `(c, e)`.
    pub fn compose(&self, n: &Bicomodule, cap: usize) -> Result<Bicomodule> {
        if *self.right != *n.left {
            return Err(Error::mismatch("bicomodule composite", "middle categories differ"));
        }
        let (c, d, e) = (&self.left, &self.right, &n.right);
        let n1 = n.positions_copresheaf();
        struct Colim {
            /// offset of the block for each flat element of m[i]
            block: Vec<usize>,
            /// (e-object, class) for each pair (x, y)
            class: Vec<(usize, usize)>,
        }
        let mut all: Vec<Vec<(usize, CopresheafHom, Colim)>> = Vec::with_capacity(c.num_objects());
        let mut patterns: Vec<Vec<Copresheaf>> = Vec::with_capacity(c.num_objects());
        let mut labels: Vec<Vec<String>> = Vec::with_capacity(c.num_objects());
        let mut count = 0usize;
        for a in 0..c.num_objects() {
            let mut here = Vec::new();
            let mut pats = Vec::new();
            let mut labs = Vec::new();
            for (i, mi) in self.patterns[a].iter().enumerate() {
                for phi in copresheaf::homs(mi, &n1, cap.saturating_sub(count))? {
                    count += 1;
                    if count > cap {
                        return Err(Error::blowup("positions of a composite", cap));
                    }
                    let elems = mi.elements();
                    let mut flat_of = vec![Vec::new(); d.num_objects()];
                    for (k, &(b, _)) in elems.iter().enumerate() {
                        flat_of[b].push(k);
                    }
                    let mut block = Vec::with_capacity(elems.len());
                    let mut pairs: Vec<(usize, usize, usize)> = Vec::new(); // (flat x, e-object, e-row)
                    for (k, &(b, x)) in elems.iter().enumerate() {
                        block.push(pairs.len());
                        let pat = &n.patterns[b][phi.components[b][x]];
                        for (o, r) in pat.elements() {
                            pairs.push((k, o, r));
                        }
                    }
                    let mut uf = UnionFind::new(pairs.len());
                    let pair_index = |k: usize, o: usize, r: usize, pat: &Copresheaf| -> usize {
                        block[k] + pat.all_rows()[..o].iter().map(|s| s.len()).sum::<usize>() + r
                    };
                    for (k, &(b, x)) in elems.iter().enumerate() {
                        let pat = &n.patterns[b][phi.components[b][x]];
                        for &g in d.out(b) {
                            let b2 = d.cod(g);
                            let x2 = mi.act(g, x);
                            let k2 = flat_of[b2][x2];
                            let pat2 = &n.patterns[b2][phi.components[b2][x2]];
                            let pm = &n.action[g].patterns[phi.components[b][x]];
                            for (o, r) in pat2.elements() {
                                uf.union(pair_index(k2, o, r, pat2), pair_index(k, o, pm.components[o][r], pat));
                            }
                        }
                    }
                    let mut class = vec![(0, 0); pairs.len()];
                    let mut reps: Vec<Vec<usize>> = vec![Vec::new(); e.num_objects()];
                    let mut root_class: HashMap<usize, usize> = HashMap::new();
                    for (t, &(_, o, _)) in pairs.iter().enumerate() {
                        let root = uf.find(t);
                        let cl = *root_class.entry(root).or_insert_with(|| {
                            reps[o].push(t);
                            reps[o].len() - 1
                        });
                        class[t] = (o, cl);
                    }
                    let rows = (0..e.num_objects())
                        .map(|o| {
                            FinLabelSet::generated(reps[o].iter().map(|&t| {
                                let (k, _, r) = pairs[t];
                                let (b, x) = elems[k];
                                let pat = &n.patterns[b][phi.components[b][x]];
                                tuple_label(&[mi.rows(b).get(x), pat.rows(pairs[t].1).get(r)])
                            }))
                        })
                        .collect();
                    let action = (0..e.num_morphisms())
                        .map(|h| {
                            reps[e.dom(h)]
                                .iter()
                                .map(|&t| {
                                    let (k, _, r) = pairs[t];
                                    let (b, x) = elems[k];
                                    let pat = &n.patterns[b][phi.components[b][x]];
                                    class[pair_index(k, e.cod(h), pat.act(h, r), pat)].1
                                })
                                .collect()
                        })
                        .collect();
                    pats.push(Copresheaf::new_unchecked(e.clone(), rows, action)?);
                    labs.push(tuple_label(&[self.positions[a].get(i).to_string(), phi.label(&n1)]));
                    here.push((i, phi, Colim { block, class }));
                }
            }
            all.push(here);
            patterns.push(pats);
            labels.push(labs);
        }
        let lookup: Vec<HashMap<(usize, &CopresheafHom), usize>> =
            all.iter().map(|here| here.iter().enumerate().map(|(k, (i, phi, _))| ((*i, phi), k)).collect()).collect();
        let mut action = Vec::with_capacity(c.num_morphisms());
        for f in 0..c.num_morphisms() {
            let (a, a2) = (c.dom(f), c.cod(f));
            let act = &self.action[f];
            let mut positions = Vec::new();
            let mut pmaps = Vec::new();
            for (i, phi, colim) in &all[a] {
                let pm = &act.patterns[*i];
                let i2 = act.positions[*i];
                let phi2 = pm.then(phi);
                let k2 = lookup[a2][&(i2, &phi2)];
                positions.push(k2);
                // class of (x', y) in the target composite goes to class of (pm x', y)
                let colim2 = &all[a2][k2].2;
                let src_pat = &patterns[a2][k2];
                let mi2 = &self.patterns[a2][i2];
                let mi = &self.patterns[a][*i];
                let mut comps: Vec<Vec<usize>> = (0..e.num_objects()).map(|o| vec![usize::MAX; src_pat.rows(o).len()]).collect();
                let elems2 = mi2.elements();
                let mut flat = vec![Vec::new(); d.num_objects()];
                for (k, &(b, _)) in mi.elements().iter().enumerate() {
                    flat[b].push(k);
                }
                for (k2x, &(b, x2)) in elems2.iter().enumerate() {
                    let x = pm.components[b][x2];
                    let pat = &n.patterns[b][phi2.components[b][x2]];
                    let (t2, t) = (colim2.block[k2x], colim.block[flat[b][x]]);
                    for off in 0..pat.num_elements() {
                        let (o2, cl2) = colim2.class[t2 + off];
                        let (_, cl) = colim.class[t + off];
                        comps[o2][cl2] = cl;
                    }
                }
                pmaps.push(CopresheafHom { components: comps });
            }
            action.push(MorphismAction { positions, patterns: pmaps });
        }
        let positions = labels.into_iter().map(FinLabelSet::generated).collect();
        Ok(Bicomodule { left: c.clone(), right: e.clone(), positions, patterns, action })
    }

    /// Extends along cofunctors `α : c ↛ c'` and `β : d ↛ d'` on the same carrier.
    pub fn extend(&self, alpha: &Cofunctor, beta: &Cofunctor) -> Result<Bicomodule> {
        if *alpha.source != *self.left || *beta.source != *self.right {
            return Err(Error::mismatch("extension", "cofunctors do not start at the bicomodule's categories"));
        }
        let (c2, d2) = (&alpha.target, &beta.target);
        let mut owners: Vec<Vec<(usize, usize)>> = vec![Vec::new(); c2.num_objects()];
        let mut where_: Vec<Vec<usize>> = vec![Vec::new(); self.left.num_objects()];
        for a in 0..self.left.num_objects() {
            let a2 = alpha.on_objects[a];
            for j in 0..self.positions[a].len() {
                where_[a].push(owners[a2].len());
                owners[a2].push((a, j));
            }
        }
        let pushed: Vec<Vec<Copresheaf>> = self.patterns.iter().map(|ps| ps.iter().map(|p| p.push_cofunctor(beta)).collect()).collect();
        let positions = owners.iter().map(|own| FinLabelSet::generated(own.iter().map(|&(a, j)| self.positions[a].get(j)))).collect();
        let patterns = owners.iter().map(|own| own.iter().map(|&(a, j)| pushed[a][j].clone()).collect()).collect();
        let action = (0..c2.num_morphisms())
            .map(|f2| {
                let mut positions = Vec::new();
                let mut pmaps = Vec::new();
                for &(a, j) in &owners[c2.dom(f2)] {
                    let f = alpha.lift(a, f2);
                    let act = &self.action[f];
                    let j2 = act.positions[j];
                    positions.push(where_[self.left.cod(f)][j2]);
                    let src = &self.patterns[self.left.cod(f)][j2];
                    let tgt = &self.patterns[a][j];
                    pmaps.push(push_hom(&act.patterns[j], src, tgt, beta));
                }
                MorphismAction { positions, patterns: pmaps }
            })
            .collect();
        Ok(Bicomodule { left: c2.clone(), right: d2.clone(), positions, patterns, action })
    }

    /// Pointwise product of patterns, `(m ⊗ n)[i, j] = m[i] × n[j]`.
    pub fn local_tensor(&self, q: &Bicomodule) -> Result<Bicomodule> {
        if *self.left != *q.left || *self.right != *q.right {
            return Err(Error::mismatch("local tensor", "bicomodules have different endpoints"));
        }
        let (c, d) = (&self.left, &self.right);
        let positions = (0..c.num_objects())
            .map(|a| {
                FinLabelSet::generated(self.positions[a].iter().flat_map(|i| q.positions[a].iter().map(move |j| tuple_label(&[i, j]))))
            })
            .collect();
        let patterns = (0..c.num_objects())
            .map(|a| self.patterns[a].iter().flat_map(|pi| q.patterns[a].iter().map(move |qj| pi.product(qj))).collect())
            .collect();
        let action = (0..c.num_morphisms())
            .map(|f| {
                let (a, a2) = (c.dom(f), c.cod(f));
                let (ap, aq) = (&self.action[f], &q.action[f]);
                let nq2 = q.positions[a2].len();
                let mut positions = Vec::new();
                let mut pmaps = Vec::new();
                for i in 0..self.positions[a].len() {
                    for j in 0..q.positions[a].len() {
                        let (i2, j2) = (ap.positions[i], aq.positions[j]);
                        positions.push(i2 * nq2 + j2);
                        let comps = (0..d.num_objects())
                            .map(|b| {
                                let n_src = q.patterns[a2][j2].rows(b).len();
                                let n_tgt = q.patterns[a][j].rows(b).len();
                                (0..self.patterns[a2][i2].rows(b).len() * n_src)
                                    .map(|k| ap.patterns[i].components[b][k / n_src] * n_tgt + aq.patterns[j].components[b][k % n_src])
                                    .collect()
                            })
                            .collect();
                        pmaps.push(CopresheafHom { components: comps });
                    }
                }
                MorphismAction { positions, patterns: pmaps }
            })
            .collect();
        Ok(Bicomodule { left: c.clone(), right: d.clone(), positions, patterns, action })
    }

    /// The unit `I = c(1) y^{d(1)}` for the local tensor.
    pub fn local_unit(c: &Arc<FinCategory>, d: &Arc<FinCategory>) -> Bicomodule {
        let t = Copresheaf::terminal(d);
        let positions = vec![FinLabelSet::generated(["*"]); c.num_objects()];
        let patterns = vec![vec![t.clone()]; c.num_objects()];
        let action =
            (0..c.num_morphisms()).map(|_| MorphismAction { positions: vec![0], patterns: vec![CopresheafHom::identity(&t)] }).collect();
        Bicomodule { left: c.clone(), right: d.clone(), positions, patterns, action }
    }

    /// `[q, r]` for a discrete left category: positions over `a` are the maps
    /// of duc-queries `q_a -> r_a`, with pattern `Σ_j r[φ j]`.
    pub fn local_hom_discrete(q: &Bicomodule, r: &Bicomodule, cap: usize) -> Result<Bicomodule> {
        if !q.left.is_discrete() {
            return Err(Error::WrongShape("local hom is only provided for a discrete left category".into()));
        }
        if *q.left != *r.left || *q.right != *r.right {
            return Err(Error::mismatch("local hom", "bicomodules have different endpoints"));
        }
        let (c, d) = (&q.left, &q.right);
        let mut positions = Vec::new();
        let mut patterns = Vec::new();
        let mut total = 0usize;
        for a in 0..c.num_objects() {
            let options: Vec<Vec<(usize, CopresheafHom)>> = q.patterns[a]
                .iter()
                .map(|qj| {
                    let mut opts = Vec::new();
                    for (k, rk) in r.patterns[a].iter().enumerate() {
                        for h in copresheaf::homs(rk, qj, cap)? {
                            opts.push((k, h));
                        }
                    }
                    Ok(opts)
                })
                .collect::<Result<_>>()?;
            let count = options.iter().try_fold(1usize, |acc, o| acc.checked_mul(o.len()));
            match count {
                Some(n) if total + n <= cap => total += n,
                _ => return Err(Error::blowup("positions of a local hom", cap)),
            }
            let mut labs = Vec::new();
            let mut pats = Vec::new();
            for choice in Odometer::new(options.iter().map(|o| o.len()).collect()) {
                let parts: Vec<String> = choice
                    .iter()
                    .enumerate()
                    .map(|(j, &t)| {
                        let (k, h) = &options[j][t];
                        format!("{}>{}{}", q.positions[a].get(j), r.positions[a].get(*k), h.label(&q.patterns[a][j]))
                    })
                    .collect();
                labs.push(format!("<{}>", parts.join(";")));
                let summands: Vec<&Copresheaf> = choice.iter().enumerate().map(|(j, &t)| &r.patterns[a][options[j][t].0]).collect();
                pats.push(Copresheaf::coproduct(d, &summands));
            }
            positions.push(FinLabelSet::generated(labs));
            patterns.push(pats);
        }
        Bicomodule::discrete_left(c.clone(), d.clone(), positions, patterns)
    }

    /// The coclosure `[p / q]` of `p : (c, e)` by `q : (d, e)`, a bicomodule
    /// `(c, d)` whose pattern at `i` is `Σ_{j ∈ q(1)} e-Set(q[j], p[i])`.
    pub fn coclosure(p: &Bicomodule, q: &Bicomodule, cap: usize) -> Result<Bicomodule> {
        Bicomodule::coclosure_parts(p, q, cap).map(|(m, _)| m)
    }

    /// [`coclosure`](Self::coclosure) together with, for every pattern
    /// element, the pair `(j, w : q[j] -> p[i])` it stands for, indexed as
    /// `[a][i][b][row]`.
    #[allow(clippy::type_complexity)]
    pub fn coclosure_parts(p: &Bicomodule, q: &Bicomodule, cap: usize) -> Result<(Bicomodule, Vec<Vec<Vec<Vec<(usize, CopresheafHom)>>>>)> {
        if *p.right != *q.right {
            return Err(Error::mismatch("coclosure", "right categories differ"));
        }
        let (c, d) = (&p.left, &q.left);
        let mut total = 0usize;
        let mut patterns = Vec::with_capacity(c.num_objects());
        let mut elements: Vec<Vec<Vec<Vec<(usize, CopresheafHom)>>>> = Vec::new();
        let mut lookups: Vec<Vec<HashMap<(usize, usize, CopresheafHom), usize>>> = Vec::new();
        for a in 0..c.num_objects() {
            let mut pats = Vec::new();
            let mut elems_a = Vec::new();
            let mut looks = Vec::new();
            for pi in &p.patterns[a] {
                let mut by_obj: Vec<Vec<(usize, CopresheafHom)>> = vec![Vec::new(); d.num_objects()];
                let mut look = HashMap::new();
                for b in 0..d.num_objects() {
                    for (j, qj) in q.patterns[b].iter().enumerate() {
                        for w in copresheaf::homs(qj, pi, cap.saturating_sub(total))? {
                            total += 1;
                            look.insert((b, j, w.clone()), by_obj[b].len());
                            by_obj[b].push((j, w));
                        }
                    }
                }
                if total > cap {
                    return Err(Error::blowup("elements of a coclosure", cap));
                }
                let rows = (0..d.num_objects())
                    .map(|b| FinLabelSet::generated(by_obj[b].iter().map(|(j, w)| format!("{}{}", q.positions[b].get(*j), w.label(pi)))))
                    .collect();
                let action = (0..d.num_morphisms())
                    .map(|g| {
                        let b2 = d.cod(g);
                        by_obj[d.dom(g)]
                            .iter()
                            .map(|(j, w)| {
                                let qa = &q.action[g];
                                look[&(b2, qa.positions[*j], qa.patterns[*j].then(w))]
                            })
                            .collect()
                    })
                    .collect();
                pats.push(Copresheaf::new_unchecked(d.clone(), rows, action)?);
                elems_a.push(by_obj);
                looks.push(look);
            }
            patterns.push(pats);
            elements.push(elems_a);
            lookups.push(looks);
        }
        let action = (0..c.num_morphisms())
            .map(|f| {
                let (a, a2) = (c.dom(f), c.cod(f));
                let pa = &p.action[f];
                let pmaps = (0..p.positions[a].len())
                    .map(|i| {
                        let i2 = pa.positions[i];
                        let comps = (0..d.num_objects())
                            .map(|b| elements[a2][i2][b].iter().map(|(j, w)| lookups[a][i][&(b, *j, w.then(&pa.patterns[i]))]).collect())
                            .collect();
                        CopresheafHom { components: comps }
                    })
                    .collect();
                MorphismAction { positions: pa.positions.clone(), patterns: pmaps }
            })
            .collect();
        let m = Bicomodule { left: c.clone(), right: d.clone(), positions: p.positions.clone(), patterns, action };
        Ok((m, elements))
    }

    /// Number of bicomodule maps `self -> r` for a discrete left category:
    /// `Π_a Π_i Σ_k |d-Set(r[k], self[i])|`.
    pub fn hom_count_discrete(&self, r: &Bicomodule, cap: usize) -> Result<u128> {
        if !self.left.is_discrete() {
            return Err(Error::WrongShape("map counting needs a discrete left category".into()));
        }
        let mut total: u128 = 1;
        for a in 0..self.left.num_objects() {
            for pi in &self.patterns[a] {
                let mut s: u128 = 0;
                for rk in &r.patterns[a] {
                    s += copresheaf::count_homs(rk, pi, cap)? as u128;
                }
                total = total.checked_mul(s).ok_or_else(|| Error::blowup("bicomodule maps", cap))?;
            }
        }
        Ok(total)
    }

    /// Some isomorphism `self ≅ other`: a natural bijection of positions and
    /// compatible pattern isomorphisms. Returns the position bijection.
    pub fn find_iso(&self, other: &Bicomodule) -> Option<Vec<Vec<usize>>> {
        if *self.left != *other.left || *self.right != *other.right {
            return None;
        }
        let c = &self.left;
        if (0..c.num_objects()).any(|a| self.positions[a].len() != other.positions[a].len()) {
            return None;
        }
        let flat: Vec<(usize, usize)> = (0..c.num_objects()).flat_map(|a| (0..self.positions[a].len()).map(move |j| (a, j))).collect();
        let mut sigma: Vec<Vec<Option<(usize, CopresheafHom)>>> =
            (0..c.num_objects()).map(|a| vec![None; self.positions[a].len()]).collect();
        let mut used: Vec<Vec<bool>> = (0..c.num_objects()).map(|a| vec![false; other.positions[a].len()]).collect();
        if self.iso_search(other, &flat, 0, &mut sigma, &mut used) {
            Some(sigma.iter().map(|s| s.iter().map(|o| o.as_ref().unwrap().0).collect()).collect())
        } else {
            None
        }
    }

    fn iso_search(
        &self,
        other: &Bicomodule,
        flat: &[(usize, usize)],
        k: usize,
        sigma: &mut Vec<Vec<Option<(usize, CopresheafHom)>>>,
        used: &mut Vec<Vec<bool>>,
    ) -> bool {
        if k == flat.len() {
            return true;
        }
        let (a, j) = flat[k];
        for k2 in 0..other.positions[a].len() {
            if used[a][k2] {
                continue;
            }
            let Some(isos) = all_isos(&other.patterns[a][k2], &self.patterns[a][j], self.left.is_discrete()) else { continue };
            for psi in isos {
                sigma[a][j] = Some((k2, psi));
                if self.iso_consistent(other, a, j, sigma) {
                    used[a][k2] = true;
                    if self.iso_search(other, flat, k + 1, sigma, used) {
                        return true;
                    }
                    used[a][k2] = false;
                }
            }
            sigma[a][j] = None;
        }
        false
    }

    /// Checks every morphism touching the freshly assigned position.
    fn iso_consistent(&self, other: &Bicomodule, a: usize, j: usize, sigma: &[Vec<Option<(usize, CopresheafHom)>>]) -> bool {
        let c = &self.left;
        let check = |f: usize, jj: usize| -> bool {
            let (s, t) = (c.dom(f), c.cod(f));
            let (Some((k, psi)), Some((k2, psi2))) = (&sigma[s][jj], &sigma[t][self.action[f].positions[jj]]) else {
                return true;
            };
            if other.action[f].positions[*k] != *k2 {
                return false;
            }
            // m2[σ f_! j] -> m[f_! j] -> m[j] must equal m2[f_! σ j] -> m2[σ j] -> m[j]
            psi2.then(&self.action[f].patterns[jj]) == other.action[f].patterns[*k].then(psi)
        };
        for f in 0..c.num_morphisms() {
            if c.dom(f) == a && !check(f, j) {
                return false;
            }
            if c.cod(f) == a {
                for jj in 0..self.positions[c.dom(f)].len() {
                    if self.action[f].positions[jj] == j && !check(f, jj) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// The pattern isomorphisms worth trying: any single one when the left
/// category has no morphisms to respect, otherwise all of them.
fn all_isos(p: &Copresheaf, x: &Copresheaf, left_discrete: bool) -> Option<Vec<CopresheafHom>> {
    let first = copresheaf::find_iso(p, x)?;
    if left_discrete {
        return Some(vec![first]);
    }
    copresheaf::isos(p, x, 100_000).ok()
}

/// Transports a pattern map along `β`; elements keep their identity.
fn push_hom(h: &CopresheafHom, src: &Copresheaf, tgt: &Copresheaf, beta: &Cofunctor) -> CopresheafHom {
    let (_, src_owner) = push_places(src.all_rows(), beta);
    let (tgt_place, _) = push_places(tgt.all_rows(), beta);
    CopresheafHom { components: src_owner.iter().map(|own| own.iter().map(|&(b, x)| tgt_place[b][h.components[b][x]]).collect()).collect() }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// `[j1,j2,...]`-style label of a list of position labels.
pub fn positions_label(m: &Bicomodule, a: usize, js: &[usize]) -> String {
    list_label(js.iter().map(|&j| m.positions[a].get(j)))
}

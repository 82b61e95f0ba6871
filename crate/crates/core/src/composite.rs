//! Maps into iterated substitution products `p_1 ◁ ... ◁ p_n` that never
//! materialize the product itself.
//!
//! A position of `p_1 ◁ ... ◁ p_n` is a tree: a position of `p_1` whose
//! directions each carry a position of `p_2 ◁ ... ◁ p_n`. A direction is a
//! path of length `n` through such a tree. Because trees flatten nested
//! products, the associator is the identity in this representation.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::poly::{Poly, PolyMap, SubstLayout};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Tree {
    Leaf,
    Node(usize, Vec<Tree>),
}

impl Tree {
    pub fn paths(&self) -> Vec<Vec<usize>> {
        match self {
            Tree::Leaf => vec![Vec::new()],
            Tree::Node(_, children) => {
                let mut out = Vec::new();
                for (d, c) in children.iter().enumerate() {
                    for mut p in c.paths() {
                        p.insert(0, d);
                        out.push(p);
                    }
                }
                out
            }
        }
    }

    /// The root position of the subtree reached after following `prefix`.
    fn node_at(&self, prefix: &[usize]) -> usize {
        let mut t = self;
        for &d in prefix {
            match t {
                Tree::Node(_, cs) => t = &cs[d],
                Tree::Leaf => panic!("path too long"),
            }
        }
        match t {
            Tree::Node(i, _) => *i,
            Tree::Leaf => panic!("path too long"),
        }
    }

    fn label(&self, levels: &[Arc<Poly>]) -> String {
        match self {
            Tree::Leaf => String::new(),
            Tree::Node(i, cs) => {
                let p = &levels[0];
                if cs.iter().all(|c| *c == Tree::Leaf) {
                    p.positions().get(*i).to_string()
                } else {
                    let inner: Vec<String> = cs.iter().map(|c| c.label(&levels[1..])).collect();
                    format!("{}[{}]", p.positions().get(*i), inner.join(","))
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Component {
    pub tree: Tree,
    pub back: HashMap<Vec<usize>, usize>,
}

/// A map `source -> levels[0] ◁ ... ◁ levels[n-1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct CompositeMap {
    pub source: Arc<Poly>,
    pub levels: Vec<Arc<Poly>>,
    pub components: Vec<Component>,
}

impl CompositeMap {
    pub fn from_map(f: &PolyMap) -> Self {
        let components = (0..f.source.num_positions())
            .map(|i| {
                let j = f.on_positions[i];
                let tree = Tree::Node(j, vec![Tree::Leaf; f.target.arity(j)]);
                let back = f.on_directions[i].iter().enumerate().map(|(e, &d)| (vec![e], d)).collect();
                Component { tree, back }
            })
            .collect();
        CompositeMap { source: f.source.clone(), levels: vec![f.target.clone()], components }
    }

    /// Reads a map into a materialized `p ◁ q`.
    pub fn from_substitute_map(f: &PolyMap, p: &Arc<Poly>, q: &Arc<Poly>, cap: usize) -> Result<Self> {
        let layout = SubstLayout::new(p, q, cap)?;
        if layout.total != f.target.num_positions() {
            return Err(Error::mismatch("composite map", "target is not p ◁ q"));
        }
        let components = (0..f.source.num_positions())
            .map(|k| {
                let (i, js) = layout.decode(f.on_positions[k], p);
                let children = js.iter().map(|&j| Tree::Node(j, vec![Tree::Leaf; q.arity(j)])).collect();
                let mut back = HashMap::new();
                for (d, &j) in js.iter().enumerate() {
                    for e in 0..q.arity(j) {
                        back.insert(vec![d, e], f.on_directions[k][SubstLayout::direction(q, &js, d, e)]);
                    }
                }
                Component { tree: Tree::Node(i, children), back }
            })
            .collect();
        Ok(CompositeMap { source: f.source.clone(), levels: vec![p.clone(), q.clone()], components })
    }

    /// Whiskers `sigma : levels[level] -> M` into this map, replacing that
    /// level by the levels of `M`.
    pub fn substitute_at(&self, level: usize, sigma: &CompositeMap) -> Result<CompositeMap> {
        if *sigma.source != *self.levels[level] {
            return Err(Error::mismatch("whiskering", "map source does not match the level it replaces"));
        }
        let m = sigma.levels.len();
        let components = self
            .components
            .iter()
            .map(|c| {
                let tree = rewrite(&c.tree, 0, level, sigma);
                let mut back = HashMap::new();
                for path in tree.paths() {
                    let prefix = &path[..level];
                    let i = c.tree.node_at(prefix);
                    let pi = &path[level..level + m];
                    let d = sigma.components[i].back[pi];
                    let mut old = prefix.to_vec();
                    old.push(d);
                    old.extend_from_slice(&path[level + m..]);
                    back.insert(path, c.back[&old]);
                }
                Component { tree, back }
            })
            .collect();
        let mut levels = self.levels[..level].to_vec();
        levels.extend(sigma.levels.iter().cloned());
        levels.extend(self.levels[level + 1..].iter().cloned());
        Ok(CompositeMap { source: self.source.clone(), levels, components })
    }

    /// Postcomposes an ordinary map at one level.
    pub fn map_at(&self, level: usize, f: &PolyMap) -> Result<CompositeMap> {
        self.substitute_at(level, &CompositeMap::from_map(f))
    }

    /// Drops a level that is the identity polynomial `y`.
    pub fn remove_unit_level(&self, level: usize) -> Result<CompositeMap> {
        let y = &self.levels[level];
        if y.num_positions() != 1 || y.arity(0) != 1 {
            return Err(Error::mismatch("unitor", "level is not y"));
        }
        let components = self
            .components
            .iter()
            .map(|c| {
                let tree = collapse(&c.tree, 0, level);
                let back = c
                    .back
                    .iter()
                    .map(|(p, &d)| {
                        let mut q = p.clone();
                        q.remove(level);
                        (q, d)
                    })
                    .collect();
                Component { tree, back }
            })
            .collect();
        let mut levels = self.levels.clone();
        levels.remove(level);
        Ok(CompositeMap { source: self.source.clone(), levels, components })
    }

    /// `f ; self` for an ordinary map `f` into this map's source.
    pub fn precompose(&self, f: &PolyMap) -> Result<CompositeMap> {
        if *f.target != *self.source {
            return Err(Error::mismatch("precomposition", "target does not match"));
        }
        let components = (0..f.source.num_positions())
            .map(|k| {
                let c = &self.components[f.on_positions[k]];
                let back = c.back.iter().map(|(p, &d)| (p.clone(), f.on_directions[k][d])).collect();
                Component { tree: c.tree.clone(), back }
            })
            .collect();
        Ok(CompositeMap { source: f.source.clone(), levels: self.levels.clone(), components })
    }

    /// Describes the first position where two maps disagree.
    pub fn first_difference(&self, other: &CompositeMap) -> Option<String> {
        if self.levels.len() != other.levels.len() {
            return Some("different numbers of levels".into());
        }
        for (k, (a, b)) in self.components.iter().zip(&other.components).enumerate() {
            let at = self.source.positions().get(k);
            if a.tree != b.tree {
                return Some(format!("position {at}: {} vs {}", a.tree.label(&self.levels), b.tree.label(&other.levels)));
            }
            let mut paths: Vec<&Vec<usize>> = a.back.keys().collect();
            paths.sort();
            for p in paths {
                let (x, y) = (a.back[p], b.back[p]);
                if x != y {
                    let dirs = self.source.directions(k);
                    return Some(format!("position {at}, path {p:?}: direction {} vs {}", dirs.get(x), dirs.get(y)));
                }
            }
        }
        None
    }
}

fn rewrite(t: &Tree, depth: usize, level: usize, sigma: &CompositeMap) -> Tree {
    match t {
        Tree::Leaf => Tree::Leaf,
        Tree::Node(i, children) if depth < level => Tree::Node(*i, children.iter().map(|c| rewrite(c, depth + 1, level, sigma)).collect()),
        Tree::Node(i, children) => {
            let comp = &sigma.components[*i];
            graft(&comp.tree, &mut Vec::new(), &comp.back, children)
        }
    }
}

fn graft(t: &Tree, path: &mut Vec<usize>, back: &HashMap<Vec<usize>, usize>, children: &[Tree]) -> Tree {
    match t {
        Tree::Leaf => children[back[path.as_slice()]].clone(),
        Tree::Node(i, cs) => {
            let mut out = Vec::with_capacity(cs.len());
            for (d, c) in cs.iter().enumerate() {
                path.push(d);
                out.push(graft(c, path, back, children));
                path.pop();
            }
            Tree::Node(*i, out)
        }
    }
}

fn collapse(t: &Tree, depth: usize, level: usize) -> Tree {
    match t {
        Tree::Leaf => Tree::Leaf,
        Tree::Node(_, cs) if depth == level => collapse(&cs[0], depth + 1, level),
        Tree::Node(i, cs) => Tree::Node(*i, cs.iter().map(|c| collapse(c, depth + 1, level)).collect()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{enumerate_maps, parse::parse_poly, substitute_maps, DEFAULT_CAP};

    #[test]
    fn whiskering_agrees_with_materialized_substitution() {
        let p = Arc::new(parse_poly("y^2 + 1").unwrap());
        let q = Arc::new(parse_poly("y + 1").unwrap());
        let q2 = Arc::new(parse_poly("2y").unwrap());
        let pq = Arc::new(p.substitute(&q, DEFAULT_CAP).unwrap());
        let r = Arc::new(parse_poly("y^3 + y").unwrap());
        let gs = enumerate_maps(&q, &q2, DEFAULT_CAP).unwrap();
        for f in enumerate_maps(&r, &pq, DEFAULT_CAP).unwrap().iter().step_by(7) {
            for g in &gs {
                let lazy = CompositeMap::from_substitute_map(f, &p, &q, DEFAULT_CAP).unwrap().map_at(1, g).unwrap();
                let whisker = substitute_maps(&PolyMap::identity(&p), g, DEFAULT_CAP).unwrap();
                let strict = f.then(&whisker).unwrap();
                let expect = CompositeMap::from_substitute_map(&strict, &p, &q2, DEFAULT_CAP).unwrap();
                assert_eq!(lazy.first_difference(&expect), None);
            }
        }
    }
}

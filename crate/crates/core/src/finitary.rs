//! The truncated list polynomial `u_K`, the skeleton of finite sets it
//! generates, and the classification of finitary copresheaves by functors
//! into that skeleton.

use std::collections::HashMap;
use std::sync::Arc;

use crate::category::FinCategory;
use crate::comonoid::full_internal_subcategory;
use crate::copresheaf::Copresheaf;
use crate::error::{Error, Result};
use crate::functor::CatFunctor;
use crate::label::{list_label, FinLabelSet};
use crate::poly::Poly;
use crate::span::{category_as_span_monad, opposite_via_dual, SpanMonad};

pub const DEFAULT_FIN_K: usize = 8;

/// Largest composition table (entries, not morphisms) the skeleton is
/// allowed to allocate. `K = 4` needs about 250 thousand entries and
/// `K = 5` over 32 million.
pub const MAX_SKELETON_TABLE: usize = 1_000_000;

/// `u_K = Σ_{N ≤ K} y^{ord N}`, positions `"0".."K"`, directions `"1".."N"`.
pub fn u_k(k: usize) -> Poly {
    let positions = FinLabelSet::generated((0..=k).map(|n| n.to_string()));
    Poly::new(positions, (0..=k).map(FinLabelSet::ordinal).collect()).expect("u_K")
}

/// Number of morphisms of the skeleton: `Σ_{M, N ≤ K} N^M`.
pub fn skeleton_size(k: usize) -> Option<usize> {
    let mut total = 0usize;
    for m in 0..=k {
        for n in 0..=k {
            total = total.checked_add(n.checked_pow(m as u32)?)?;
        }
    }
    Some(total)
}

/// Objects `0..K`; morphisms `M -> N` are the functions `ord M -> ord N`,
/// named `M->N:[images]`.
#[derive(Clone, Debug)]
pub struct FinSkeleton {
    pub k: usize,
    pub category: Arc<FinCategory>,
    /// The category again as a monoid in spans, for law checks.
    pub monad: SpanMonad,
    functions: Vec<Vec<usize>>,
    index: HashMap<(usize, usize, Vec<usize>), usize>,
}

/// Renames `(i,i',[images])` in the full internal subcategory of `u_K` to the
/// name of the opposite morphism `i'->i:[images]`.
pub fn skeleton_name(internal: &str) -> String {
    let inner = internal.strip_prefix('(').and_then(|s| s.strip_suffix(')')).unwrap_or(internal);
    let mut parts = inner.splitn(3, ',');
    match (parts.next(), parts.next(), parts.next()) {
        (Some(i), Some(i2), Some(images)) => format!("{i2}->{i}:{images}"),
        _ => internal.to_string(),
    }
}

/// Builds the skeleton as the opposite, taken through the dual of its span
/// monad, of the full internal subcategory of `u_K`.
pub fn skeleton_fin(k: usize) -> Result<FinSkeleton> {
    let size = skeleton_size(k).filter(|&n| n.checked_mul(n).is_some_and(|t| t <= MAX_SKELETON_TABLE));
    let Some(n) = size else {
        return Err(Error::blowup(format!("Fin skeleton at K = {k}"), MAX_SKELETON_TABLE));
    };
    let internal = full_internal_subcategory(&u_k(k), n)?;
    let category = Arc::new(opposite_via_dual(&internal)?.renamed(&skeleton_name)?);
    let mut functions = Vec::with_capacity(n);
    let mut index = HashMap::with_capacity(n);
    for f in 0..category.num_morphisms() {
        let images = parse_images(category.name(f))?;
        index.insert((category.dom(f), category.cod(f), images.clone()), f);
        functions.push(images);
    }
    let monad = category_as_span_monad(&category);
    Ok(FinSkeleton { k, category, monad, functions, index })
}

fn parse_images(name: &str) -> Result<Vec<usize>> {
    let list = name.split_once(':').map(|(_, l)| l).unwrap_or("");
    let inner = list.strip_prefix('[').and_then(|s| s.strip_suffix(']')).ok_or_else(|| Error::parse(name, "not a skeleton morphism"))?;
    if inner.is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(',')
        .map(|d| d.parse::<usize>().ok().and_then(|v| v.checked_sub(1)).ok_or_else(|| Error::parse(name, "bad image")))
        .collect()
}

impl FinSkeleton {
    /// The function `ord M -> ord N` of a morphism, zero-based.
    pub fn function(&self, f: usize) -> &[usize] {
        &self.functions[f]
    }

    pub fn morphism(&self, m: usize, n: usize, images: &[usize]) -> Option<usize> {
        self.index.get(&(m, n, images.to_vec())).copied()
    }

    /// `hom(M, N)`.
    pub fn hom(&self, m: usize, n: usize) -> Vec<usize> {
        self.category.hom(m, n)
    }

    /// The generic family `N ↦ ord N` on the skeleton.
    pub fn generic_family(&self) -> Copresheaf {
        let c = self.category.clone();
        let rows = (0..=self.k).map(FinLabelSet::ordinal).collect();
        Copresheaf::new_unchecked(c, rows, self.functions.clone()).expect("generic family")
    }

    /// Checks composition against composing the underlying functions.
    pub fn check_functions(&self) -> Result<()> {
        let c = &self.category;
        for f in 0..c.num_morphisms() {
            if self.functions[f].len() != c.dom(f) || self.functions[f].iter().any(|&v| v >= c.cod(f)) {
                return Err(Error::law("morphisms are functions", c.name(f), "bad shape"));
            }
            for &g in c.out(c.cod(f)) {
                let composed: Vec<usize> = self.functions[f].iter().map(|&x| self.functions[g][x]).collect();
                if self.functions[c.compose(f, g)] != composed {
                    return Err(Error::law("composition of functions", format!("{};{}", c.name(f), c.name(g)), c.name(c.compose(f, g))));
                }
            }
        }
        Ok(())
    }
}

/// `⌜X⌝`: the size of every table, and for every morphism its action in the
/// stored row order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub k: usize,
    pub sizes: Vec<usize>,
    pub tables: Vec<Vec<usize>>,
}

pub fn classify_finitary(x: &Copresheaf, k: usize) -> Result<Classification> {
    let c = &x.base;
    for a in 0..c.num_objects() {
        if x.rows(a).len() > k {
            return Err(Error::RowTooLarge { object: c.object_label(a).to_string(), rows: x.rows(a).len(), bound: k });
        }
    }
    Ok(Classification {
        k,
        sizes: (0..c.num_objects()).map(|a| x.rows(a).len()).collect(),
        tables: (0..c.num_morphisms()).map(|f| x.action(f).to_vec()).collect(),
    })
}

impl Classification {
    /// Identities go to identity functions and composites to composites.
    pub fn check_functorial(&self, c: &FinCategory) -> Result<()> {
        for a in 0..c.num_objects() {
            let id = &self.tables[c.identity(a)];
            if *id != (0..self.sizes[a]).collect::<Vec<_>>() {
                return Err(Error::law("identity", c.object_label(a), list_label(id.iter().map(|v| v.to_string()))));
            }
        }
        for f in 0..c.num_morphisms() {
            for &g in c.out(c.cod(f)) {
                let composed: Vec<usize> = self.tables[f].iter().map(|&v| self.tables[g][v]).collect();
                if self.tables[c.compose(f, g)] != composed {
                    return Err(Error::law("composition", format!("{};{}", c.name(f), c.name(g)), "tables disagree"));
                }
            }
        }
        Ok(())
    }

    /// The functor `c -> Fin_K`.
    pub fn to_functor(&self, c: &Arc<FinCategory>, skeleton: &FinSkeleton) -> Result<CatFunctor> {
        if self.sizes.iter().any(|&n| n > skeleton.k) {
            return Err(Error::mismatch("classifying functor", "skeleton is too small"));
        }
        let on_morphisms = (0..c.num_morphisms())
            .map(|f| {
                skeleton
                    .morphism(self.sizes[c.dom(f)], self.sizes[c.cod(f)], &self.tables[f])
                    .ok_or_else(|| Error::mismatch(c.name(f), "no such function in the skeleton"))
            })
            .collect::<Result<Vec<_>>>()?;
        let f = CatFunctor::new(c.clone(), skeleton.category.clone(), self.sizes.clone(), on_morphisms)?;
        Ok(f)
    }

    /// Pulls back the generic family: rows `"1".."N"` acted on by the tables.
    pub fn reconstruct(&self, c: &Arc<FinCategory>) -> Result<Copresheaf> {
        Copresheaf::new(c.clone(), self.sizes.iter().map(|&n| FinLabelSet::ordinal(n)).collect(), self.tables.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hom_sizes() {
        let s = skeleton_fin(3).unwrap();
        assert_eq!(s.hom(2, 3).len(), 9);
        for n in 0..=3 {
            assert_eq!(s.hom(0, n).len(), 1);
            if n > 0 {
                assert!(s.hom(n, 0).is_empty());
            }
        }
        s.check_functions().unwrap();
        assert_eq!(s.category.num_morphisms(), skeleton_size(3).unwrap());
    }

    #[test]
    fn names_translate() {
        assert_eq!(skeleton_name("(3,2,[1,3])"), "2->3:[1,3]");
        assert_eq!(parse_images("2->3:[1,3]").unwrap(), vec![0, 2]);
        assert_eq!(parse_images("0->3:[]").unwrap(), Vec::<usize>::new());
    }

    #[test]
    fn large_k_fails_loudly() {
        assert!(matches!(skeleton_fin(5), Err(Error::SizeBlowup { .. })));
    }
}

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};

/// An ordered finite set of distinct string labels.
///
/// Order is part of the value: it fixes enumeration order everywhere else.
#[derive(Clone, Default)]
pub struct FinLabelSet {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl FinLabelSet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut set = FinLabelSet::default();
        for l in labels {
            let l = l.into();
            if set.index.contains_key(&l) {
                return Err(Error::parse("label set", format!("duplicate label `{l}`")));
            }
            set.push_unchecked(l);
        }
        Ok(set)
    }

    /// Builds a set from generated labels, suffixing `#k` onto any repeats so
    /// the result is always distinct.
    pub fn generated<I, S>(labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut set = FinLabelSet::default();
        for l in labels {
            let mut l = l.into();
            if set.index.contains_key(&l) {
                let base = l.clone();
                let mut k = 1;
                while set.index.contains_key(&l) {
                    l = format!("{base}#{k}");
                    k += 1;
                }
            }
            set.push_unchecked(l);
        }
        set
    }

    /// The ordinal `{1, ..., n}`.
    pub fn ordinal(n: usize) -> Self {
        FinLabelSet::generated((1..=n).map(|i| i.to_string()))
    }

    fn push_unchecked(&mut self, l: String) {
        self.index.insert(l.clone(), self.labels.len());
        self.labels.push(l);
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.index.contains_key(label)
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> + '_ {
        self.labels.iter().map(|s| s.as_str())
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

impl PartialEq for FinLabelSet {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels
    }
}

impl Eq for FinLabelSet {}

impl Hash for FinLabelSet {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.labels.hash(state)
    }
}

impl fmt::Debug for FinLabelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.labels.iter()).finish()
    }
}

/// All functions `{0..dom} -> {0..cod}` as image vectors, in lexicographic
/// order with the first argument varying slowest.
pub fn functions(dom: usize, cod: usize) -> Odometer {
    Odometer::new(vec![cod; dom])
}

/// Mixed-radix odometer over `prod radices[k]`, first coordinate slowest.
#[derive(Debug, Clone)]
pub struct Odometer {
    current: Option<Vec<usize>>,
    radices: Vec<usize>,
}

impl Odometer {
    pub fn new(radices: Vec<usize>) -> Self {
        let current = if radices.contains(&0) { None } else { Some(vec![0; radices.len()]) };
        Odometer { current, radices }
    }
}

impl Iterator for Odometer {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let cur = self.current.as_mut().unwrap();
        let mut k = cur.len();
        loop {
            if k == 0 {
                self.current = None;
                break;
            }
            k -= 1;
            cur[k] += 1;
            if cur[k] < self.radices[k] {
                break;
            }
            cur[k] = 0;
        }
        Some(out)
    }
}

/// `(a,b,...)`
pub fn tuple_label<S: AsRef<str>>(parts: &[S]) -> String {
    let inner: Vec<&str> = parts.iter().map(|s| s.as_ref()).collect();
    format!("({})", inner.join(","))
}

/// `[a,b,...]`
pub fn list_label<I, S>(parts: I) -> String
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let inner: Vec<String> = parts.into_iter().map(|s| s.as_ref().to_string()).collect();
    format!("[{}]", inner.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn functions_count_is_power() {
        assert_eq!(functions(3, 2).count(), 8);
        assert_eq!(functions(0, 0).count(), 1);
        assert_eq!(functions(2, 0).count(), 0);
        assert_eq!(functions(0, 5).count(), 1);
        let all: Vec<_> = functions(2, 2).collect();
        assert_eq!(all, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn odometer_mixed() {
        assert_eq!(Odometer::new(vec![2, 3]).count(), 6);
        assert_eq!(Odometer::new(vec![]).count(), 1);
        assert_eq!(Odometer::new(vec![2, 0]).count(), 0);
    }

    #[test]
    fn generated_dedupes() {
        let s = FinLabelSet::generated(["a", "a", "b", "a"]);
        assert_eq!(s.labels(), &["a", "a#1", "b", "a#2"]);
        assert!(FinLabelSet::new(["x", "x"]).is_err());
        assert_eq!(FinLabelSet::ordinal(3).labels(), &["1", "2", "3"]);
    }
}

use std::fmt;

use super::code::{code_cmp, encode, encode_node, parse_forest, structure};
use super::{Forest, ForestError};
use crate::util::{combinations, for_each_map};

/// A forest with one marked node and a trailing block of detached roots.
///
/// The detached roots are always the last `detached().len()` entries of
/// the base forest's root order. While the mark is active, grafting skips
/// the marked node; a released mark is only remembered so that roots can
/// still be grafted onto it explicitly.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MarkedForest {
    base: Forest,
    mark: usize,
    detached: usize,
    active: bool,
}

impl MarkedForest {
    pub fn new(base: Forest, mark: usize, detached: usize, active: bool) -> Result<Self, ForestError> {
        if mark >= base.len() {
            return Err(ForestError::NodeOutOfRange(mark));
        }
        if detached > base.num_roots() {
            return Err(ForestError::Invalid("more detached roots than roots".into()));
        }
        Ok(MarkedForest {
            base,
            mark,
            detached,
            active,
        })
    }

    /// Cuts every edge pointing to `v` and marks `v`. The former
    /// predecessors become roots appended in canonical-encoding order.
    pub fn detach_at(f: &Forest, v: usize) -> Result<Self, ForestError> {
        if v >= f.len() {
            return Err(ForestError::NodeOutOfRange(v));
        }
        let preds = f.preds(v);
        let mut base = f.clone();
        for &u in &preds {
            base.succ[u] = None;
        }
        let s = structure(&base);
        let mut keyed: Vec<(String, usize)> = preds
            .iter()
            .map(|&u| (encode_node(&base, &s, u, Some(v)), u))
            .collect();
        keyed.sort_by(|a, b| code_cmp(&a.0, &b.0));
        base.roots.extend(keyed.iter().map(|(_, u)| *u));
        Ok(MarkedForest {
            base,
            mark: v,
            detached: preds.len(),
            active: true,
        })
    }

    pub fn base(&self) -> &Forest {
        &self.base
    }

    pub fn mark(&self) -> usize {
        self.mark
    }

    pub fn is_active(&self) -> bool {
        self.active
    }

    pub fn detached(&self) -> &[usize] {
        let r = &self.base.roots;
        &r[r.len() - self.detached..]
    }

    /// Nodes available as grafting targets.
    pub fn targets(&self) -> Vec<usize> {
        (0..self.base.len())
            .filter(|&u| !self.active || u != self.mark)
            .collect()
    }

    /// Grafts the detached root `r` onto `u`.
    pub fn graft(&self, r: usize, u: usize) -> Result<Self, ForestError> {
        if !self.detached().contains(&r) {
            return Err(ForestError::NotARoot(r));
        }
        Ok(MarkedForest {
            base: self.base.graft(r, u)?,
            mark: self.mark,
            detached: self.detached - 1,
            active: self.active,
        })
    }

    fn graft_many(&self, pairs: &[(usize, usize)]) -> Self {
        let mut base = self.base.clone();
        for &(r, u) in pairs {
            base.succ[r] = Some(u);
        }
        base.roots.retain(|r| !pairs.iter().any(|&(x, _)| x == *r));
        MarkedForest {
            base,
            mark: self.mark,
            detached: self.detached - pairs.len(),
            active: self.active,
        }
    }

    /// Terms of D^q: every q-subset of detached roots grafted onto every
    /// combination of targets.
    pub fn derivative(&self, q: usize) -> Vec<MarkedForest> {
        let det = self.detached().to_vec();
        let targets = self.targets();
        let mut out = Vec::new();
        for subset in combinations(det.len(), q) {
            for_each_map(q, targets.len(), |img| {
                let pairs: Vec<(usize, usize)> = subset
                    .iter()
                    .zip(img)
                    .map(|(&i, &t)| (det[i], targets[t]))
                    .collect();
                out.push(self.graft_many(&pairs));
            });
        }
        out
    }

    /// Terms of D^{k→v}: every k-subset of detached roots grafted onto the
    /// marked node.
    pub fn derivative_to_mark(&self, k: usize) -> Vec<MarkedForest> {
        let det = self.detached().to_vec();
        combinations(det.len(), k)
            .into_iter()
            .map(|subset| {
                let pairs: Vec<(usize, usize)> = subset.iter().map(|&i| (det[i], self.mark)).collect();
                self.graft_many(&pairs)
            })
            .collect()
    }

    /// Grafts every detached root back onto the marked node.
    pub fn graft_all_to_mark(&self) -> Self {
        self.derivative_to_mark(self.detached).pop().expect("one subset")
    }

    /// Keeps the mark position and detached roots but lets grafts reach the
    /// marked node.
    pub fn release(&self) -> Self {
        MarkedForest {
            active: false,
            ..self.clone()
        }
    }

    /// Forgets the mark; remaining detached roots stay as trailing roots.
    pub fn unmark(&self) -> Forest {
        self.base.clone()
    }

    pub fn encode(&self) -> String {
        encode(&self.base, Some(self.mark))
    }

    pub fn canonicalize(&self) -> Self {
        let (base, mark) = parse_forest(&self.encode(), true).expect("encoder output parses");
        MarkedForest {
            base,
            mark: mark.expect("mark survives encoding"),
            detached: self.detached,
            active: self.active,
        }
    }
}

impl fmt::Display for MarkedForest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let state = if self.active { "" } else { " released" };
        write!(f, "{} | {}{}", self.encode(), self.detached, state)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detach_self_loop() {
        let f = Forest::parse("<b>").unwrap();
        let m = MarkedForest::detach_at(&f, 0).unwrap();
        assert_eq!(m.encode(), "b*");
        assert_eq!(m.detached(), &[0]);
        assert!(m.derivative(1).is_empty());
        assert_eq!(m.graft_all_to_mark().unmark().to_string(), "<b>");
    }

    #[test]
    fn detach_cherry() {
        let f = Forest::parse("b[b,b]").unwrap();
        let m = MarkedForest::detach_at(&f, 0).unwrap();
        assert_eq!(m.encode(), "b* b b");
        assert_eq!(m.detached(), &[1, 2]);
        assert_eq!(m.targets(), vec![1, 2]);
        assert_eq!(m.derivative(1).len(), 4);
        assert_eq!(m.derivative(2).len(), 4);
        assert_eq!(m.release().derivative(2).len(), 9);
        assert_eq!(m.graft_all_to_mark().unmark().to_string(), "b[b,b]");
    }

    #[test]
    fn detached_order_is_canonical() {
        let f = Forest::parse("b[b[b],b]").unwrap();
        let m = MarkedForest::detach_at(&f, 0).unwrap();
        assert_eq!(m.encode(), "b* b b[b]");
        assert_eq!(m.canonicalize().encode(), "b* b b[b]");
    }
}

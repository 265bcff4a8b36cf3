//! Aromatic forests: functional graphs with ordered roots and labelled
//! covertices.
//!
//! Edges point from a node to its successor (child to parent). A node with
//! no successor is a root; roots are kept in an explicit order. Every
//! connected component is either a rooted tree or an aroma, i.e. a rootless
//! component carrying exactly one directed cycle.

mod code;
mod generate;
mod marked;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

pub use code::{code_cmp, Code};
pub use generate::{generate, rooted_trees};
pub use marked::MarkedForest;

pub(crate) use code::structure;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ForestError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("covertex label {0} used more than once")]
    DuplicateLabel(u32),
    #[error("covertex labels must be exactly 1..{0}")]
    LabelsNotContiguous(u32),
    #[error("invalid forest: {0}")]
    Invalid(String),
    #[error("node {0} is not a root")]
    NotARoot(usize),
    #[error("node {0} is not a vertex")]
    NotAVertex(usize),
    #[error("node {0} out of range")]
    NodeOutOfRange(usize),
    #[error("covertex label {0} is not present")]
    MissingLabel(u32),
    #[error("covertex label {0} is already in use")]
    LabelCollision(u32),
    #[error("invalid arguments: {0}")]
    InvalidArguments(String),
}

/// Kind of a node: a plain vertex or a covertex carrying a label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Vertex,
    Covertex(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Forest {
    pub(crate) kinds: Vec<Kind>,
    pub(crate) succ: Vec<Option<usize>>,
    pub(crate) roots: Vec<usize>,
}

impl Forest {
    pub fn new(
        kinds: Vec<Kind>,
        succ: Vec<Option<usize>>,
        roots: Vec<usize>,
    ) -> Result<Self, ForestError> {
        let n = kinds.len();
        if succ.len() != n {
            return Err(ForestError::Invalid("kinds and successors differ in length".into()));
        }
        if let Some(&s) = succ.iter().flatten().find(|&&s| s >= n) {
            return Err(ForestError::NodeOutOfRange(s));
        }
        let mut is_root = vec![false; n];
        for &r in &roots {
            if r >= n {
                return Err(ForestError::NodeOutOfRange(r));
            }
            if succ[r].is_some() {
                return Err(ForestError::NotARoot(r));
            }
            if is_root[r] {
                return Err(ForestError::Invalid(format!("root {r} listed twice")));
            }
            is_root[r] = true;
        }
        if let Some(v) = (0..n).find(|&v| succ[v].is_none() && !is_root[v]) {
            return Err(ForestError::Invalid(format!("node {v} has no successor but is not a listed root")));
        }
        let mut labels: Vec<u32> = kinds
            .iter()
            .filter_map(|k| match k {
                Kind::Covertex(l) => Some(*l),
                Kind::Vertex => None,
            })
            .collect();
        labels.sort_unstable();
        for w in labels.windows(2) {
            if w[0] == w[1] {
                return Err(ForestError::DuplicateLabel(w[0]));
            }
        }
        let p = labels.len() as u32;
        if labels.iter().enumerate().any(|(i, &l)| l != i as u32 + 1) {
            return Err(ForestError::LabelsNotContiguous(p));
        }
        Ok(Forest { kinds, succ, roots })
    }

    /// The empty forest, unit of juxtaposition.
    pub fn empty() -> Self {
        Forest {
            kinds: Vec::new(),
            succ: Vec::new(),
            roots: Vec::new(),
        }
    }

    /// Parses the textual grammar. Node indices follow the order of
    /// appearance in the text.
    pub fn parse(text: &str) -> Result<Self, ForestError> {
        code::parse_forest(text, false).map(|(f, _)| f)
    }

    pub fn code(&self) -> Code {
        Code(code::encode(self, None))
    }

    /// Unique representative of the isomorphism class, with nodes numbered
    /// in the preorder of the canonical encoding.
    pub fn canonicalize(&self) -> Forest {
        self.code().forest()
    }

    /// Number of nodes N.
    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn num_roots(&self) -> usize {
        self.roots.len()
    }

    pub fn num_covertices(&self) -> usize {
        self.kinds.iter().filter(|k| matches!(k, Kind::Covertex(_))).count()
    }

    pub fn kind(&self, v: usize) -> Kind {
        self.kinds[v]
    }

    pub fn succ(&self, v: usize) -> Option<usize> {
        self.succ[v]
    }

    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    /// Predecessors Π(v), including v itself when v carries a 1-loop.
    pub fn preds(&self, v: usize) -> Vec<usize> {
        (0..self.len()).filter(|&u| self.succ[u] == Some(v)).collect()
    }

    pub fn vertices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.kinds[v] == Kind::Vertex).collect()
    }

    pub fn covertex(&self, label: u32) -> Option<usize> {
        self.kinds.iter().position(|&k| k == Kind::Covertex(label))
    }

    /// Nodes whose successor is themselves.
    pub fn one_loops(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.succ[v] == Some(v)).collect()
    }

    pub fn has_one_loop(&self) -> bool {
        (0..self.len()).any(|v| self.succ[v] == Some(v))
    }

    /// Number of aromas (rootless components).
    pub fn num_aromas(&self) -> usize {
        structure(self).cycles.len()
    }

    /// Graft root `r` onto node `u`: adds the edge r → u.
    pub fn graft(&self, r: usize, u: usize) -> Result<Forest, ForestError> {
        if u >= self.len() {
            return Err(ForestError::NodeOutOfRange(u));
        }
        let pos = self
            .roots
            .iter()
            .position(|&x| x == r)
            .ok_or(ForestError::NotARoot(r))?;
        let mut out = self.clone();
        out.succ[r] = Some(u);
        out.roots.remove(pos);
        Ok(out)
    }

    /// Cuts the edge leaving `v`, turning it into a root appended last.
    pub fn cut(&self, v: usize) -> Result<Forest, ForestError> {
        if v >= self.len() {
            return Err(ForestError::NodeOutOfRange(v));
        }
        if self.succ[v].is_none() {
            return Err(ForestError::Invalid(format!("node {v} is already a root")));
        }
        let mut out = self.clone();
        out.succ[v] = None;
        out.roots.push(v);
        Ok(out)
    }

    /// Points the edge leaving the non-root `v` at `u` instead.
    pub fn redirect(&self, v: usize, u: usize) -> Result<Forest, ForestError> {
        if v >= self.len() || u >= self.len() {
            return Err(ForestError::NodeOutOfRange(v.max(u)));
        }
        if self.succ[v].is_none() {
            return Err(ForestError::Invalid(format!("node {v} is a root")));
        }
        let mut out = self.clone();
        out.succ[v] = Some(u);
        Ok(out)
    }

    /// Replaces vertex `v` by a covertex labelled `label`.
    pub fn replace_vertex(&self, v: usize, label: u32) -> Result<Forest, ForestError> {
        if v >= self.len() {
            return Err(ForestError::NodeOutOfRange(v));
        }
        if self.kinds[v] != Kind::Vertex {
            return Err(ForestError::NotAVertex(v));
        }
        if self.covertex(label).is_some() {
            return Err(ForestError::LabelCollision(label));
        }
        let mut out = self.clone();
        out.kinds[v] = Kind::Covertex(label);
        Ok(out)
    }

    /// Replaces the covertex labelled `label` by a vertex.
    pub fn replace_covertex(&self, label: u32) -> Result<Forest, ForestError> {
        let v = self.covertex(label).ok_or(ForestError::MissingLabel(label))?;
        let mut out = self.clone();
        out.kinds[v] = Kind::Vertex;
        Ok(out)
    }

    /// Reorders roots: the i-th root of the result is `roots[perm[i]]`.
    pub fn permute_roots(&self, perm: &[usize]) -> Forest {
        let mut out = self.clone();
        out.roots = perm.iter().map(|&i| self.roots[i]).collect();
        out
    }

    /// Relabels covertices: label k becomes `map[k - 1]`.
    pub fn relabel_covertices(&self, map: &[u32]) -> Forest {
        let mut out = self.clone();
        for k in out.kinds.iter_mut() {
            if let Kind::Covertex(l) = k {
                *l = map[*l as usize - 1];
            }
        }
        out
    }

    /// Disjoint union; the roots of `other` follow those of `self` and its
    /// covertex labels are shifted past those of `self`.
    pub fn juxtapose(&self, other: &Forest) -> Forest {
        let off = self.len();
        let shift = self.num_covertices() as u32;
        let mut out = self.clone();
        out.kinds.extend(other.kinds.iter().map(|k| match k {
            Kind::Vertex => Kind::Vertex,
            Kind::Covertex(l) => Kind::Covertex(l + shift),
        }));
        out.succ.extend(other.succ.iter().map(|s| s.map(|x| x + off)));
        out.roots.extend(other.roots.iter().map(|r| r + off));
        out
    }

    /// Order of the automorphism group fixing root numbering and labels.
    pub fn symmetry_order(&self) -> BigUint {
        let s = structure(self);
        let mut total = BigUint::one();
        let mut aroma_codes = Vec::new();
        for cyc in &s.cycles {
            let parts: Vec<(String, BigUint)> = cyc.iter().map(|&v| sym_node(self, &s, v)).collect();
            let k = parts.len();
            let rotations = (0..k)
                .filter(|&r| (0..k).all(|i| parts[(r + i) % k].0 == parts[i].0))
                .count();
            for (_, a) in &parts {
                total *= a;
            }
            total *= BigUint::from(rotations);
            aroma_codes.push(code::encode_cycle(self, &s, cyc, None).0);
        }
        total *= multiplicity_factorials(aroma_codes);
        for &r in &self.roots {
            total *= sym_node(self, &s, r).1;
        }
        total
    }
}

fn factorial(m: usize) -> BigUint {
    (1..=m).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

fn multiplicity_factorials(mut codes: Vec<String>) -> BigUint {
    codes.sort();
    let mut total = BigUint::one();
    let mut i = 0;
    while i < codes.len() {
        let j = (i..codes.len()).find(|&j| codes[j] != codes[i]).unwrap_or(codes.len());
        total *= factorial(j - i);
        i = j;
    }
    total
}

fn sym_node(f: &Forest, s: &code::Structure, v: usize) -> (String, BigUint) {
    let mut total = BigUint::one();
    let mut codes = Vec::new();
    for &c in s.preds[v].iter().filter(|&&c| !s.on_cycle[c]) {
        let (cc, a) = sym_node(f, s, c);
        total *= a;
        codes.push(cc);
    }
    total *= multiplicity_factorials(codes);
    (code::encode_node(f, s, v, None), total)
}

/// Parses a forest carrying exactly one `*` mark.
pub fn parse_marked(text: &str) -> Result<(Forest, usize), ForestError> {
    let (f, mark) = code::parse_forest(text, true)?;
    let mark = mark.ok_or(ForestError::Syntax {
        pos: 0,
        msg: "expected a marked node".into(),
    })?;
    Ok((f, mark))
}

/// The chain tree b[b[...]] with `n` nodes.
pub fn bamboo(n: usize) -> Result<Forest, ForestError> {
    if n < 1 {
        return Err(ForestError::InvalidArguments("bamboo needs at least one node".into()));
    }
    let succ = (0..n).map(|i| if i == 0 { None } else { Some(i - 1) }).collect();
    Forest::new(vec![Kind::Vertex; n], succ, vec![0])
}

impl fmt::Display for Forest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code().as_str())
    }
}

impl FromStr for Forest {
    type Err = ForestError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Forest::parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn canon(s: &str) -> String {
        Forest::parse(s).unwrap().to_string()
    }

    #[test]
    fn parse_small() {
        let f = Forest::parse("<b> b[o1]").unwrap();
        assert_eq!(f.len(), 3);
        assert_eq!(f.num_roots(), 1);
        assert_eq!(f.num_covertices(), 1);
        assert_eq!(f.one_loops(), vec![0]);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(Forest::parse("b["), Err(ForestError::Syntax { .. })));
        assert!(matches!(Forest::parse("o1 o1"), Err(ForestError::DuplicateLabel(1))));
        assert!(matches!(Forest::parse("o2"), Err(ForestError::LabelsNotContiguous(1))));
        assert!(Forest::parse("").is_err());
        assert!(Forest::parse("bb").is_err());
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(canon("b[b[b],b]"), canon("b[b,b[b]]"));
        assert_eq!(canon("<b[b],b>"), canon("<b,b[b]>"));
        assert_eq!(canon("b <b>"), "<b> b");
        assert_eq!(canon("<b[b]> <b>"), "<b[b]> <b>");
        assert_eq!(canon("<b,b> <b[b]>"), "<b[b]> <b,b>");
        assert_eq!(canon("1"), "1");
    }

    #[test]
    fn symmetry() {
        let s = |x: &str| Forest::parse(x).unwrap().symmetry_order();
        assert_eq!(s("b"), BigUint::from(1u32));
        assert_eq!(s("<b,b>"), BigUint::from(2u32));
        assert_eq!(s("b[b,b]"), BigUint::from(2u32));
        assert_eq!(s("<b> <b> b"), BigUint::from(2u32));
        assert_eq!(s("<b[b,b],b[b,b]>"), BigUint::from(8u32));
    }

    #[test]
    fn grafting() {
        let f = Forest::parse("b").unwrap();
        assert_eq!(f.graft(0, 0).unwrap().to_string(), "<b>");
        let f = Forest::parse("b[b]").unwrap();
        assert_eq!(f.graft(0, 1).unwrap().to_string(), "<b,b>");
        let f = Forest::parse("<b> b").unwrap();
        assert_eq!(f.graft(1, 0).unwrap().to_string(), "<b[b]>");
        assert_eq!(f.graft(0, 1), Err(ForestError::NotARoot(0)));
    }

    #[test]
    fn replacing() {
        let f = Forest::parse("b").unwrap();
        assert_eq!(f.replace_vertex(0, 1).unwrap().to_string(), "o1");
        let g = Forest::parse("<b[o1]>").unwrap();
        assert_eq!(g.replace_covertex(1).unwrap().to_string(), "<b[b]>");
        assert_eq!(g.replace_covertex(2), Err(ForestError::MissingLabel(2)));
        assert_eq!(g.replace_vertex(0, 1), Err(ForestError::LabelCollision(1)));
    }

    #[test]
    fn bamboos() {
        assert_eq!(bamboo(1).unwrap().to_string(), "b");
        assert_eq!(bamboo(2).unwrap().to_string(), "b[b]");
        assert_eq!(bamboo(3).unwrap().to_string(), "b[b[b]]");
        assert!(bamboo(0).is_err());
    }

    #[test]
    fn juxtaposition_shifts_labels() {
        let f = Forest::parse("o1").unwrap();
        let g = Forest::parse("b[o1]").unwrap();
        assert_eq!(f.juxtapose(&g).to_string(), "o1 b[o2]");
    }
}

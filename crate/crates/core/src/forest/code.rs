//! Canonical text encoding of forests and the grammar parser.
//!
//! The encoding doubles as the canonical form: two forests are isomorphic
//! (preserving root order and covertex labels) iff their codes are equal.

use std::cmp::Ordering;
use std::fmt;

use super::{Forest, ForestError, Kind};

/// Canonical encoding of a forest, ordered by [`code_cmp`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Code(pub(crate) String);

impl Code {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }

    /// Order N, number of roots n and number of covertices p, read off
    /// the encoding without parsing.
    pub fn grade(&self) -> (usize, usize, usize) {
        if self.0 == "1" {
            return (0, 0, 0);
        }
        let bytes = self.0.as_bytes();
        let vertices = bytes.iter().filter(|&&c| c == b'b').count();
        let covertices = bytes.iter().filter(|&&c| c == b'o').count();
        let roots = self.0.split(' ').filter(|c| !c.starts_with('<')).count();
        (vertices + covertices, roots, covertices)
    }

    pub fn has_one_loop(&self) -> bool {
        self.forest().has_one_loop()
    }

    /// Parses the code back into its canonical forest.
    pub fn forest(&self) -> Forest {
        parse_forest(&self.0, false)
            .map(|(f, _)| f)
            .expect("codes are produced by the encoder")
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Ord for Code {
    fn cmp(&self, other: &Self) -> Ordering {
        code_cmp(&self.0, &other.0)
    }
}

impl PartialOrd for Code {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn rank(c: u8) -> u8 {
    match c {
        b'b' => 1,
        b'o' => 2,
        b'0'..=b'9' => 3 + (c - b'0'),
        b'*' => 13,
        b'[' => 14,
        b',' => 15,
        b']' => 16,
        b'<' => 17,
        b'>' => 18,
        b' ' => 19,
        _ => 20 + c,
    }
}

/// Total order on encodings: vertices before covertices, nested trees
/// before cycles, and shorter prefixes first.
pub fn code_cmp(a: &str, b: &str) -> Ordering {
    a.bytes().map(rank).cmp(b.bytes().map(rank))
}

pub(crate) struct Structure {
    pub preds: Vec<Vec<usize>>,
    pub on_cycle: Vec<bool>,
    /// Each cycle listed in successor order.
    pub cycles: Vec<Vec<usize>>,
}

pub(crate) fn structure(f: &Forest) -> Structure {
    let n = f.len();
    let mut preds = vec![Vec::new(); n];
    for v in 0..n {
        if let Some(s) = f.succ[v] {
            preds[s].push(v);
        }
    }
    // 0 = unvisited, 1 = on current path, 2 = done
    let mut state = vec![0u8; n];
    let mut on_cycle = vec![false; n];
    let mut cycles = Vec::new();
    for start in 0..n {
        if state[start] != 0 {
            continue;
        }
        let mut path = Vec::new();
        let mut v = start;
        loop {
            if state[v] == 1 {
                let pos = path.iter().position(|&x| x == v).unwrap();
                let cyc: Vec<usize> = path[pos..].to_vec();
                for &c in &cyc {
                    on_cycle[c] = true;
                }
                cycles.push(cyc);
                break;
            }
            if state[v] == 2 {
                break;
            }
            state[v] = 1;
            path.push(v);
            match f.succ[v] {
                Some(s) => v = s,
                None => break,
            }
        }
        for &p in &path {
            state[p] = 2;
        }
    }
    Structure {
        preds,
        on_cycle,
        cycles,
    }
}

fn label(kind: Kind) -> String {
    match kind {
        Kind::Vertex => "b".to_string(),
        Kind::Covertex(k) => format!("o{k}"),
    }
}

pub(crate) fn encode_node(f: &Forest, s: &Structure, v: usize, mark: Option<usize>) -> String {
    let mut out = label(f.kinds[v]);
    if mark == Some(v) {
        out.push('*');
    }
    let mut children: Vec<String> = s.preds[v]
        .iter()
        .filter(|&&c| !s.on_cycle[c])
        .map(|&c| encode_node(f, s, c, mark))
        .collect();
    if !children.is_empty() {
        children.sort_by(|a, b| code_cmp(a, b));
        out.push('[');
        out.push_str(&children.join(","));
        out.push(']');
    }
    out
}

pub(crate) fn encode_cycle(
    f: &Forest,
    s: &Structure,
    cycle: &[usize],
    mark: Option<usize>,
) -> (String, Vec<String>) {
    let parts: Vec<String> = cycle.iter().map(|&v| encode_node(f, s, v, mark)).collect();
    let k = parts.len();
    let best = (0..k)
        .map(|r| {
            let rotated: Vec<&str> = (0..k).map(|i| parts[(r + i) % k].as_str()).collect();
            format!("<{}>", rotated.join(","))
        })
        .min_by(|a, b| code_cmp(a, b))
        .unwrap();
    (best, parts)
}

pub(crate) fn encode(f: &Forest, mark: Option<usize>) -> String {
    if f.is_empty() {
        return "1".to_string();
    }
    let s = structure(f);
    let mut aromas: Vec<String> = s
        .cycles
        .iter()
        .map(|c| encode_cycle(f, &s, c, mark).0)
        .collect();
    aromas.sort_by(|a, b| code_cmp(a, b));
    let trees = f.roots.iter().map(|&r| encode_node(f, &s, r, mark));
    aromas.into_iter().chain(trees).collect::<Vec<_>>().join(" ")
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    allow_mark: bool,
    kinds: Vec<Kind>,
    succ: Vec<Option<usize>>,
    roots: Vec<usize>,
    mark: Option<usize>,
}

impl Parser<'_> {
    fn err(&self, msg: impl Into<String>) -> ForestError {
        ForestError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn node(&mut self) -> Result<usize, ForestError> {
        let kind = match self.peek() {
            Some(b'b') => {
                self.pos += 1;
                Kind::Vertex
            }
            Some(b'o') => {
                self.pos += 1;
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    self.pos += 1;
                }
                if start == self.pos {
                    return Err(self.err("expected covertex label"));
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let k: u32 = text.parse().map_err(|_| self.err("bad covertex label"))?;
                if k == 0 {
                    return Err(self.err("covertex labels start at 1"));
                }
                Kind::Covertex(k)
            }
            _ => return Err(self.err("expected 'b' or 'o<label>'")),
        };
        let id = self.kinds.len();
        self.kinds.push(kind);
        self.succ.push(None);
        if self.peek() == Some(b'*') {
            if !self.allow_mark || self.mark.is_some() {
                return Err(self.err("unexpected mark"));
            }
            self.pos += 1;
            self.mark = Some(id);
        }
        if self.peek() == Some(b'[') {
            self.pos += 1;
            loop {
                self.skip_ws();
                let child = self.node()?;
                self.succ[child] = Some(id);
                self.skip_ws();
                match self.peek() {
                    Some(b',') => self.pos += 1,
                    Some(b']') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.err("expected ',' or ']'")),
                }
            }
        }
        Ok(id)
    }

    fn component(&mut self) -> Result<(), ForestError> {
        if self.peek() == Some(b'<') {
            self.pos += 1;
            let mut cycle = Vec::new();
            loop {
                self.skip_ws();
                cycle.push(self.node()?);
                self.skip_ws();
                match self.peek() {
                    Some(b',') => self.pos += 1,
                    Some(b'>') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.err("expected ',' or '>'")),
                }
            }
            for (i, &v) in cycle.iter().enumerate() {
                self.succ[v] = Some(cycle[(i + 1) % cycle.len()]);
            }
        } else {
            let r = self.node()?;
            self.roots.push(r);
        }
        Ok(())
    }
}

/// Parses the forest grammar, optionally accepting one `*` mark.
pub(crate) fn parse_forest(
    text: &str,
    allow_mark: bool,
) -> Result<(Forest, Option<usize>), ForestError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        allow_mark,
        kinds: Vec::new(),
        succ: Vec::new(),
        roots: Vec::new(),
        mark: None,
    };
    p.skip_ws();
    if p.peek() == Some(b'1') {
        p.pos += 1;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("trailing input after empty forest"));
        }
        return Ok((Forest::empty(), None));
    }
    if p.pos == p.src.len() {
        return Err(p.err("empty input"));
    }
    while p.pos < p.src.len() {
        p.component()?;
        let before = p.pos;
        p.skip_ws();
        if p.pos < p.src.len() && p.pos == before {
            return Err(p.err("expected whitespace between components"));
        }
    }
    let forest = Forest::new(p.kinds, p.succ, p.roots)?;
    Ok((forest, p.mark))
}

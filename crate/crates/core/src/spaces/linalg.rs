//! Exact sparse linear algebra over the rationals.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{format_coeff, parse_coeff, Q};

/// Sparse vector, index → nonzero value.
pub type SparseVec = BTreeMap<usize, Q>;

type IntRow = BTreeMap<usize, BigInt>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("the linear system has no solution")]
    Inconsistent,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("bad matrix data: {0}")]
    Format(String),
}

/// Row-major sparse matrix with exact rational entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<SparseVec>,
}

#[derive(Serialize, Deserialize)]
struct MatrixRecord {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, String)>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, data: vec![SparseVec::new(); rows] }
    }

    pub fn from_rows(cols: usize, rows: Vec<SparseVec>) -> Self {
        let mut m = SparseMatrix::zeros(rows.len(), cols);
        for (i, r) in rows.into_iter().enumerate() {
            for (j, v) in r {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn from_columns(rows: usize, columns: &[SparseVec]) -> Self {
        let mut m = SparseMatrix::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            for (&i, v) in c {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn from_dense(rows: &[Vec<Q>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = SparseMatrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            for (j, v) in r.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(|r| r.len()).sum()
    }

    pub fn get(&self, i: usize, j: usize) -> Q {
        self.data[i].get(&j).cloned().unwrap_or_else(Q::zero)
    }

    pub fn set(&mut self, i: usize, j: usize, v: Q) {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of range");
        if v.is_zero() {
            self.data[i].remove(&j);
        } else {
            self.data[i].insert(j, v);
        }
    }

    pub fn row(&self, i: usize) -> &SparseVec {
        &self.data[i]
    }

    pub fn column(&self, j: usize) -> SparseVec {
        self.data
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r.get(&j).map(|v| (i, v.clone())))
            .collect()
    }

    pub fn columns(&self) -> Vec<SparseVec> {
        let mut out = vec![SparseVec::new(); self.cols];
        for (i, r) in self.data.iter().enumerate() {
            for (&j, v) in r {
                out[j].insert(i, v.clone());
            }
        }
        out
    }

    pub fn transpose(&self) -> SparseMatrix {
        SparseMatrix { rows: self.cols, cols: self.rows, data: self.columns() }
    }

    pub fn mul_vec(&self, x: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (i, r) in self.data.iter().enumerate() {
            let mut acc = Q::zero();
            for (j, v) in r {
                if let Some(xj) = x.get(j) {
                    acc += v * xj;
                }
            }
            if !acc.is_zero() {
                out.insert(i, acc);
            }
        }
        out
    }

    pub fn mul(&self, other: &SparseMatrix) -> Result<SparseMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = SparseMatrix::zeros(self.rows, other.cols);
        for (i, r) in self.data.iter().enumerate() {
            let mut acc = SparseVec::new();
            for (k, a) in r {
                for (j, b) in &other.data[*k] {
                    add_into(&mut acc, *j, a * b);
                }
            }
            out.data[i] = acc;
        }
        Ok(out)
    }

    pub fn rank(&self) -> usize {
        Echelon::build(self.data.iter().map(to_int_row), false).pivots.len()
    }

    /// Basis of the null space {x : Ax = 0}.
    pub fn kernel(&self) -> Vec<SparseVec> {
        let e = Echelon::build(self.data.iter().map(to_int_row), true);
        let leads: BTreeMap<usize, &IntRow> = e.pivots.iter().map(|r| (lead(r), r)).collect();
        let mut out = Vec::new();
        for free in (0..self.cols).filter(|j| !leads.contains_key(j)) {
            let mut x = SparseVec::new();
            x.insert(free, Q::one());
            for (&c, r) in &leads {
                if let Some(v) = r.get(&free) {
                    x.insert(c, -Q::new(v.clone(), r[&c].clone()));
                }
            }
            out.push(x);
        }
        out
    }

    /// A particular solution of Ax = b with free variables set to zero.
    pub fn solve(&self, b: &SparseVec) -> Result<SparseVec, LinalgError> {
        if b.keys().any(|&i| i >= self.rows) {
            return Err(LinalgError::Dimension("right-hand side longer than the row count".into()));
        }
        let aug = self.cols;
        let rows = self.data.iter().enumerate().map(|(i, r)| {
            let mut r = r.clone();
            if let Some(v) = b.get(&i) {
                r.insert(aug, v.clone());
            }
            to_int_row(&r)
        });
        let e = Echelon::build(rows, true);
        let mut x = SparseVec::new();
        for r in &e.pivots {
            let c = lead(r);
            if c == aug {
                return Err(LinalgError::Inconsistent);
            }
            if let Some(v) = r.get(&aug) {
                x.insert(c, Q::new(v.clone(), r[&c].clone()));
            }
        }
        Ok(x)
    }

    /// Sparse triplets `row,col,value`, one per line after a header.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("row,col,value\n");
        for (i, r) in self.data.iter().enumerate() {
            for (j, v) in r {
                s.push_str(&format!("{i},{j},{}\n", format_coeff(v)));
            }
        }
        s
    }

    pub fn to_json(&self) -> String {
        let rec = MatrixRecord {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .data
                .iter()
                .enumerate()
                .flat_map(|(i, r)| r.iter().map(move |(&j, v)| (i, j, format_coeff(v))))
                .collect(),
        };
        serde_json::to_string(&rec).expect("serialisable")
    }

    pub fn from_json(text: &str) -> Result<Self, LinalgError> {
        let rec: MatrixRecord = serde_json::from_str(text).map_err(|e| LinalgError::Format(e.to_string()))?;
        let mut m = SparseMatrix::zeros(rec.rows, rec.cols);
        for (i, j, v) in rec.entries {
            if i >= rec.rows || j >= rec.cols {
                return Err(LinalgError::Format(format!("entry ({i}, {j}) out of range")));
            }
            let v = parse_coeff(&v).map_err(|e| LinalgError::Format(e.to_string()))?;
            m.set(i, j, v);
        }
        Ok(m)
    }
}

fn add_into(acc: &mut SparseVec, j: usize, v: Q) {
    let e = acc.entry(j).or_insert_with(Q::zero);
    *e += v;
    if e.is_zero() {
        acc.remove(&j);
    }
}

/// Rank of a family of sparse vectors.
pub fn rank_of(vectors: &[SparseVec]) -> usize {
    Echelon::build(vectors.iter().map(to_int_row), false).pivots.len()
}

/// Incremental span test: keeps an echelon form of the vectors pushed so far.
#[derive(Default)]
pub struct SpanTracker {
    e: Echelon,
}

impl SpanTracker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.e.pivots.len()
    }

    /// Adds `v`; returns whether the rank grew.
    pub fn push(&mut self, v: &SparseVec) -> bool {
        self.e.insert(to_int_row(v))
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.e.reduce(to_int_row(v)).is_empty()
    }
}

fn to_int_row(r: &SparseVec) -> IntRow {
    let mut den = BigInt::one();
    for v in r.values() {
        den = den.lcm(v.denom());
    }
    let mut out: IntRow = r.iter().map(|(&j, v)| (j, v.numer() * (&den / v.denom()))).collect();
    normalise(&mut out);
    out
}

fn lead(r: &IntRow) -> usize {
    *r.keys().next().expect("nonzero row")
}

fn normalise(r: &mut IntRow) {
    let mut g = BigInt::zero();
    for v in r.values() {
        g = g.gcd(v);
        if g.is_one() {
            break;
        }
    }
    let neg = r.values().next().is_some_and(|v| v.is_negative());
    if g.is_zero() {
        return;
    }
    if neg {
        g = -g;
    }
    if !g.is_one() {
        for v in r.values_mut() {
            *v /= &g;
        }
    }
}

/// a·x − b·y, gcd-normalised.
fn combine(x: &IntRow, a: &BigInt, y: &IntRow, b: &BigInt) -> IntRow {
    let mut out = IntRow::new();
    let mut xi = x.iter().peekable();
    let mut yi = y.iter().peekable();
    loop {
        let (j, v) = match (xi.peek(), yi.peek()) {
            (None, None) => break,
            (Some(&(&j, v)), None) => {
                xi.next();
                (j, a * v)
            }
            (None, Some(&(&j, w))) => {
                yi.next();
                (j, -(b * w))
            }
            (Some(&(&j, v)), Some(&(&k, w))) => {
                if j < k {
                    xi.next();
                    (j, a * v)
                } else if k < j {
                    yi.next();
                    (k, -(b * w))
                } else {
                    xi.next();
                    yi.next();
                    (j, a * v - b * w)
                }
            }
        };
        if !v.is_zero() {
            out.insert(j, v);
        }
    }
    normalise(&mut out);
    out
}

/// Fraction-free echelon form; pivots have distinct leading columns.
#[derive(Default)]
struct Echelon {
    pivots: Vec<IntRow>,
    by_lead: BTreeMap<usize, usize>,
}

impl Echelon {
    fn build(rows: impl Iterator<Item = IntRow>, reduced: bool) -> Self {
        let mut e = Echelon::default();
        for r in rows {
            e.insert(r);
        }
        if reduced {
            e.back_substitute();
        }
        e
    }

    fn reduce(&self, mut r: IntRow) -> IntRow {
        let mut from = 0;
        while let Some((&c, _)) = r.range(from..).next() {
            match self.by_lead.get(&c) {
                Some(&k) => {
                    let p = &self.pivots[k];
                    let a = p[&c].clone();
                    let b = r[&c].clone();
                    let g = a.gcd(&b);
                    r = combine(&r, &(&a / &g), p, &(&b / &g));
                    from = c + 1;
                }
                None => from = c + 1,
            }
        }
        r
    }

    fn insert(&mut self, r: IntRow) -> bool {
        let mut r = r;
        while let Some(&c) = r.keys().next() {
            match self.by_lead.get(&c) {
                Some(&k) => {
                    let p = &self.pivots[k];
                    let a = p[&c].clone();
                    let b = r[&c].clone();
                    let g = a.gcd(&b);
                    r = combine(&r, &(&a / &g), p, &(&b / &g));
                }
                None => {
                    self.by_lead.insert(c, self.pivots.len());
                    self.pivots.push(r);
                    return true;
                }
            }
        }
        false
    }

    /// Clears every pivot column above and below its pivot.
    fn back_substitute(&mut self) {
        let order: Vec<(usize, usize)> = self.by_lead.iter().rev().map(|(&c, &k)| (c, k)).collect();
        for &(c, k) in &order {
            let p = self.pivots[k].clone();
            for i in 0..self.pivots.len() {
                if i == k {
                    continue;
                }
                if let Some(b) = self.pivots[i].get(&c).cloned() {
                    let a = p[&c].clone();
                    let g = a.gcd(&b);
                    self.pivots[i] = combine(&self.pivots[i], &(&a / &g), &p, &(&b / &g));
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{q, qi};

    #[test]
    fn rank_small() {
        let m = SparseMatrix::from_dense(&[vec![qi(1), qi(1)], vec![qi(1), qi(1)]]);
        assert_eq!(m.rank(), 1);
        let k = m.kernel();
        assert_eq!(k.len(), 1);
        assert!(m.mul_vec(&k[0]).is_empty());
    }

    #[test]
    fn solve_and_inconsistency() {
        let m = SparseMatrix::from_dense(&[
            vec![qi(2), qi(1), qi(0)],
            vec![qi(0), q(1, 2), qi(3)],
            vec![qi(2), qi(2), qi(6)],
        ]);
        let b: SparseVec = [(0, qi(1)), (1, qi(2)), (2, qi(5))].into_iter().collect();
        let x = m.solve(&b).unwrap();
        assert_eq!(m.mul_vec(&x), b);
        let bad: SparseVec = [(0, qi(1))].into_iter().collect();
        assert_eq!(m.solve(&bad), Err(LinalgError::Inconsistent));
    }

    #[test]
    fn json_roundtrip() {
        let m = SparseMatrix::from_dense(&[vec![q(-1, 3), qi(0)], vec![qi(0), qi(4)]]);
        assert_eq!(SparseMatrix::from_json(&m.to_json()).unwrap(), m);
        assert!(m.to_csv().contains("0,0,-1/3"));
        assert_eq!(m.transpose().transpose(), m);
    }
}

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::AlgebraError;
use crate::forest::{code_cmp, Code, Forest, MarkedForest};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Finite linear combination with exact rational coefficients. Zero
/// coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Combo<K: Ord> {
    terms: BTreeMap<K, Q>,
}

impl<K: Ord> Default for Combo<K> {
    fn default() -> Self {
        Combo {
            terms: BTreeMap::new(),
        }
    }
}

impl<K: Ord + Clone> Combo<K> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(key: K, coeff: Q) -> Self {
        let mut c = Self::zero();
        c.add_term(key, coeff);
        c
    }

    pub fn add_term(&mut self, key: K, coeff: Q) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
        }
    }

    pub fn coeff(&self, key: &K) -> Q {
        self.terms.get(key).cloned().unwrap_or_else(Q::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &Q)> {
        self.terms.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.terms.keys()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, s: &Q) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        Combo {
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * s)).collect(),
        }
    }

    pub fn add_scaled(&mut self, other: &Self, s: &Q) {
        for (k, v) in &other.terms {
            self.add_term(k.clone(), v * s);
        }
    }

    pub fn filter<F: Fn(&K) -> bool>(&self, keep: F) -> Self {
        Combo {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    /// Extends a map on keys linearly.
    pub fn map_linear<K2: Ord + Clone, F: Fn(&K) -> Combo<K2>>(&self, f: F) -> Combo<K2> {
        let mut out = Combo::zero();
        for (k, v) in &self.terms {
            out.add_scaled(&f(k), v);
        }
        out
    }
}

impl<K: Ord + Clone> FromIterator<(K, Q)> for Combo<K> {
    fn from_iter<T: IntoIterator<Item = (K, Q)>>(iter: T) -> Self {
        let mut c = Self::zero();
        for (k, v) in iter {
            c.add_term(k, v);
        }
        c
    }
}

impl<K: Ord + Clone> AddAssign<&Combo<K>> for Combo<K> {
    fn add_assign(&mut self, rhs: &Combo<K>) {
        self.add_scaled(rhs, &Q::one());
    }
}

impl<K: Ord + Clone> SubAssign<&Combo<K>> for Combo<K> {
    fn sub_assign(&mut self, rhs: &Combo<K>) {
        self.add_scaled(rhs, &-Q::one());
    }
}

impl<K: Ord + Clone> Add<&Combo<K>> for &Combo<K> {
    type Output = Combo<K>;
    fn add(self, rhs: &Combo<K>) -> Combo<K> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<K: Ord + Clone> Sub<&Combo<K>> for &Combo<K> {
    type Output = Combo<K>;
    fn sub(self, rhs: &Combo<K>) -> Combo<K> {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<K: Ord + Clone> Add for Combo<K> {
    type Output = Combo<K>;
    fn add(mut self, rhs: Combo<K>) -> Combo<K> {
        self += &rhs;
        self
    }
}

impl<K: Ord + Clone> Sub for Combo<K> {
    type Output = Combo<K>;
    fn sub(mut self, rhs: Combo<K>) -> Combo<K> {
        self -= &rhs;
        self
    }
}

impl<K: Ord + Clone> Neg for &Combo<K> {
    type Output = Combo<K>;
    fn neg(self) -> Combo<K> {
        self.scale(&-Q::one())
    }
}

impl<K: Ord + Clone> Neg for Combo<K> {
    type Output = Combo<K>;
    fn neg(self) -> Combo<K> {
        self.scale(&-Q::one())
    }
}

/// Linear combination of canonical forests.
pub type FormCombo = Combo<Code>;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct TermRecord {
    pub forest: String,
    pub coeff: String,
}

pub fn parse_coeff(text: &str) -> Result<Q, AlgebraError> {
    let t = text.trim();
    let bad = || AlgebraError::Parse(format!("bad coefficient '{t}'"));
    match t.split_once('/') {
        Some((a, b)) => {
            let n: BigInt = a.trim().parse().map_err(|_| bad())?;
            let d: BigInt = b.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => Ok(Q::from_integer(t.parse().map_err(|_| bad())?)),
    }
}

pub fn format_coeff(c: &Q) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl FormCombo {
    pub fn from_forest(f: &Forest) -> Self {
        Self::single(f.code(), Q::one())
    }

    /// Parses `coeff * forest + coeff * forest ...`; a term without `*` has
    /// coefficient 1 and `0` is the zero combination.
    pub fn parse(text: &str) -> Result<Self, AlgebraError> {
        let t = text.trim();
        if t == "0" {
            return Ok(Self::zero());
        }
        let mut out = Self::zero();
        for term in t.split('+') {
            let term = term.trim();
            let (coeff, forest) = match term.split_once('*') {
                Some((c, f)) => (parse_coeff(c)?, f.trim()),
                None => (Q::one(), term),
            };
            let f = Forest::parse(forest)?;
            out.add_term(f.code(), coeff);
        }
        Ok(out)
    }

    /// Common (n, p) of all terms, or `None` for the zero combination.
    pub fn grade(&self) -> Result<Option<(usize, usize)>, AlgebraError> {
        let mut grade = None;
        for k in self.keys() {
            let (_, n, p) = k.grade();
            match grade {
                None => grade = Some((n, p)),
                Some(g) if g != (n, p) => return Err(AlgebraError::MixedGrades),
                _ => {}
            }
        }
        Ok(grade)
    }

    /// Splits into homogeneous pieces by order N.
    pub fn by_order(&self) -> BTreeMap<usize, FormCombo> {
        let mut out: BTreeMap<usize, FormCombo> = BTreeMap::new();
        for (k, v) in self.iter() {
            out.entry(k.grade().0).or_default().add_term(k.clone(), v.clone());
        }
        out
    }

    pub fn to_records(&self) -> Vec<TermRecord> {
        self.iter()
            .map(|(k, v)| TermRecord {
                forest: k.to_string(),
                coeff: format_coeff(v),
            })
            .collect()
    }

    pub fn from_records(records: &[TermRecord]) -> Result<Self, AlgebraError> {
        let mut out = Self::zero();
        for r in records {
            out.add_term(Forest::parse(&r.forest)?.code(), parse_coeff(&r.coeff)?);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_records()).expect("records serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, AlgebraError> {
        let records: Vec<TermRecord> =
            serde_json::from_str(text).map_err(|e| AlgebraError::Parse(e.to_string()))?;
        Self::from_records(&records)
    }
}

impl fmt::Display for FormCombo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .iter()
            .map(|(k, v)| format!("{} * {}", format_coeff(v), k))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Sort key of a canonical marked forest.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MarkedKey {
    code: String,
    detached: usize,
    active: bool,
}

impl MarkedKey {
    pub fn new(m: &MarkedForest) -> Self {
        MarkedKey {
            code: m.encode(),
            detached: m.detached().len(),
            active: m.is_active(),
        }
    }

    pub fn marked(&self) -> MarkedForest {
        let (base, mark) = crate::forest::parse_marked(&self.code).expect("marked codes parse");
        MarkedForest::new(base, mark, self.detached, self.active).expect("key is consistent")
    }

    pub fn code(&self) -> &str {
        &self.code
    }
}

impl Ord for MarkedKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        code_cmp(&self.code, &other.code)
            .then(self.detached.cmp(&other.detached))
            .then(self.active.cmp(&other.active))
    }
}

impl PartialOrd for MarkedKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Linear combination of canonical marked forests.
pub type MarkedCombo = Combo<MarkedKey>;

impl fmt::Display for MarkedCombo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .iter()
            .map(|(k, v)| format!("{} * {} | {}", format_coeff(v), k.code, k.detached))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

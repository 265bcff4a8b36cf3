//! Elementary differentials of scalar-free forms (p = 0) on polynomial
//! vector fields, evaluated exactly.

mod poly;

use std::collections::HashMap;

use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use poly::Poly;

use crate::algebra::{d_h, AlgebraError, FormCombo, Q};
use crate::forest::Forest;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("polynomial parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Domain(String),
}

/// Polynomial vector field f = (f^1, …, f^d) on R^d.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyVectorField {
    d: usize,
    components: Vec<Poly>,
}

#[derive(Serialize, Deserialize)]
struct FieldSpec {
    d: usize,
    components: Vec<String>,
}

impl PolyVectorField {
    pub fn new(components: Vec<Poly>) -> Result<Self, EvalError> {
        let d = components.len();
        if d == 0 {
            return Err(EvalError::Domain("a vector field needs at least one component".into()));
        }
        if components.iter().any(|c| c.nvars() != d) {
            return Err(EvalError::Domain(format!("every component must be a polynomial in x1..x{d}")));
        }
        Ok(PolyVectorField { d, components })
    }

    pub fn parse(components: &[&str]) -> Result<Self, EvalError> {
        let d = components.len();
        Self::new(components.iter().map(|c| Poly::parse(c, d)).collect::<Result<_, _>>()?)
    }

    /// Reads `{"d": 2, "components": ["-x2", "x1"]}`.
    pub fn from_json(text: &str) -> Result<Self, EvalError> {
        let spec: FieldSpec = serde_json::from_str(text).map_err(|e| EvalError::Parse(e.to_string()))?;
        if spec.components.len() != spec.d {
            return Err(EvalError::Domain(format!(
                "expected {} components, found {}",
                spec.d,
                spec.components.len()
            )));
        }
        Self::new(spec.components.iter().map(|c| Poly::parse(c, spec.d)).collect::<Result<_, _>>()?)
    }

    pub fn to_json(&self) -> String {
        let spec = FieldSpec { d: self.d, components: self.components.iter().map(|c| c.to_string()).collect() };
        serde_json::to_string(&spec).expect("serialisable")
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn component(&self, i: usize) -> &Poly {
        &self.components[i]
    }

    /// Div f = Σ_i ∂_i f^i.
    pub fn divergence(&self) -> Poly {
        let mut acc = Poly::zero(self.d);
        for (i, c) in self.components.iter().enumerate() {
            acc = acc.add(&c.deriv(i));
        }
        acc
    }
}

/// Tensor of polynomials indexed by (i_1, …, i_n) ∈ {0..d}^n, stored
/// with i_1 most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyTensor {
    rank: usize,
    d: usize,
    comps: Vec<Poly>,
}

impl PolyTensor {
    pub fn zero(rank: usize, d: usize) -> Self {
        PolyTensor { rank, d, comps: vec![Poly::zero(d); d.pow(rank as u32)] }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn get(&self, idx: &[usize]) -> &Poly {
        &self.comps[self.flat(idx)]
    }

    pub fn components(&self) -> &[Poly] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    fn flat(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.d + i)
    }

    fn add_scaled(&mut self, o: &PolyTensor, c: &Q) {
        for (a, b) in self.comps.iter_mut().zip(&o.comps) {
            *a = a.add(&b.scale(c));
        }
    }
}

/// Σ_i ∂_i t_i for a rank-1 tensor.
pub fn divergence(t: &PolyTensor) -> Result<Poly, EvalError> {
    if t.rank != 1 {
        return Err(EvalError::Domain(format!("divergence needs a rank 1 tensor, got rank {}", t.rank)));
    }
    let mut acc = Poly::zero(t.d);
    for (i, c) in t.comps.iter().enumerate() {
        acc = acc.add(&c.deriv(i));
    }
    Ok(acc)
}

struct Derivatives<'a> {
    f: &'a PolyVectorField,
    cache: HashMap<(usize, Vec<usize>), Poly>,
}

impl Derivatives<'_> {
    /// ∂_{idx} f^i with idx sorted.
    fn get(&mut self, i: usize, mut idx: Vec<usize>) -> &Poly {
        idx.sort_unstable();
        let f = self.f;
        self.cache.entry((i, idx)).or_insert_with_key(|(i, idx)| {
            let mut p = f.components[*i].clone();
            for &j in idx {
                p = p.deriv(j);
            }
            p
        })
    }
}

fn forest_value(g: &Forest, ders: &mut Derivatives<'_>) -> PolyTensor {
    let d = ders.f.d;
    let n = g.len();
    let roots = g.roots().to_vec();
    let mut out = PolyTensor::zero(roots.len(), d);
    let preds: Vec<Vec<usize>> = (0..n).map(|v| g.preds(v)).collect();
    let mut idx = vec![0usize; n];
    let total = d.pow(n as u32);
    for code in 0..total {
        let mut c = code;
        for slot in idx.iter_mut() {
            *slot = c % d;
            c /= d;
        }
        let mut value = Poly::constant(d, Q::one());
        for v in 0..n {
            let factor = ders.get(idx[v], preds[v].iter().map(|&w| idx[w]).collect());
            if factor.is_zero() {
                value = Poly::zero(d);
                break;
            }
            value = value.mul(factor);
        }
        if value.is_zero() {
            continue;
        }
        let root_idx: Vec<usize> = roots.iter().map(|&r| idx[r]).collect();
        let k = out.flat(&root_idx);
        out.comps[k] = out.comps[k].add(&value);
    }
    out
}

/// F(c)(f): each vertex v contributes ∂_{i_w : w → v} f^{i_v}; root
/// indices stay free, the others are summed.
pub fn elementary_differential(c: &FormCombo, f: &PolyVectorField) -> Result<PolyTensor, EvalError> {
    let rank = match c.grade()? {
        None => return Ok(PolyTensor::zero(0, f.d)),
        Some((_, p)) if p > 0 => {
            return Err(EvalError::Domain("elementary differentials are evaluated for p = 0 only".into()))
        }
        Some((n, _)) => n,
    };
    let mut ders = Derivatives { f, cache: HashMap::new() };
    let mut out = PolyTensor::zero(rank, f.d);
    for (k, v) in c.iter() {
        out.add_scaled(&forest_value(&k.forest(), &mut ders), v);
    }
    Ok(out)
}

/// Checks Div F(γ)(f) = F(d_H γ)(f) exactly.
pub fn check_dh_identity(gamma: &FormCombo, f: &PolyVectorField) -> Result<bool, EvalError> {
    match gamma.grade()? {
        Some((1, 0)) | None => {}
        _ => return Err(EvalError::Domain("the identity is checked on Ω_1 with p = 0".into())),
    }
    let lhs = divergence(&elementary_differential(gamma, f)?.with_rank(1))?;
    let image = if gamma.is_zero() { FormCombo::zero() } else { d_h(gamma)? };
    let rhs = elementary_differential(&image, f)?;
    Ok(rhs.comps.first().map_or(lhs.is_zero(), |r| *r == lhs))
}

impl PolyTensor {
    fn with_rank(self, rank: usize) -> PolyTensor {
        if self.rank == rank {
            self
        } else {
            PolyTensor::zero(rank, self.d)
        }
    }
}

fn monomials(d: usize, max_deg: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..d {
        let mut next = Vec::new();
        for e in &out {
            let used: u32 = e.iter().sum();
            for k in 0..=(max_deg - used) {
                let mut f = e.clone();
                f.push(k);
                next.push(f);
            }
        }
        out = next;
    }
    out
}

fn random_poly(rng: &mut ChaCha8Rng, d: usize, deg: u32) -> Poly {
    let mut p = Poly::zero(d);
    for e in monomials(d, deg) {
        let c: i64 = rng.gen_range(-3..=3);
        p.add_term(e, Q::from_integer(c.into()));
    }
    p
}

/// Random field with integer coefficients in [−3, 3] and degree ≤ deg.
pub fn random_field(d: usize, deg: u32, seed: u64) -> Result<PolyVectorField, EvalError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PolyVectorField::new((0..d).map(|_| random_poly(&mut rng, d, deg)).collect())
}

/// f^i = Σ_j ∂_j A^{ij} for the antisymmetric matrix with entries `upper`
/// A^{ij}, i < j, listed row by row.
pub fn divfree_from_potential(d: usize, upper: &[Poly]) -> Result<PolyVectorField, EvalError> {
    if d < 2 {
        return Err(EvalError::Domain("divergence-free fields need d ≥ 2".into()));
    }
    if upper.len() != d * (d - 1) / 2 {
        return Err(EvalError::Domain(format!("expected {} potential entries", d * (d - 1) / 2)));
    }
    let mut a = vec![vec![Poly::zero(d); d]; d];
    let mut it = upper.iter();
    for i in 0..d {
        for j in i + 1..d {
            let p = it.next().expect("counted").clone();
            a[j][i] = p.scale(&-Q::one());
            a[i][j] = p;
        }
    }
    let comps = (0..d)
        .map(|i| (0..d).fold(Poly::zero(d), |acc, j| acc.add(&a[i][j].deriv(j))))
        .collect();
    PolyVectorField::new(comps)
}

/// Random divergence-free field of degree ≤ deg from a random
/// antisymmetric potential of degree deg + 1.
pub fn random_divfree_field(d: usize, deg: u32, seed: u64) -> Result<PolyVectorField, EvalError> {
    if d < 2 {
        return Err(EvalError::Domain("divergence-free fields need d ≥ 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let upper: Vec<Poly> = (0..d * (d - 1) / 2).map(|_| random_poly(&mut rng, d, deg + 1)).collect();
    let f = divfree_from_potential(d, &upper)?;
    debug_assert!(f.divergence().is_zero());
    Ok(f)
}

/// For `trials` random quadratic fields on R^3 (divergence-free when
/// `divfree`), checks F(d_H c)(f) = 0. Trial t uses seed `seed + t`.
pub fn check_solenoidal_numeric(c: &FormCombo, divfree: bool, trials: usize, seed: u64) -> Result<bool, EvalError> {
    match c.grade()? {
        Some((1, 0)) => {}
        None => return Ok(true),
        _ => return Err(EvalError::Domain("solenoidal checks need n = 1, p = 0".into())),
    }
    let image = d_h(c)?;
    crate::util::init_thread_pool();
    let results: Vec<Result<bool, EvalError>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let f = if divfree { random_divfree_field(3, 2, seed + t)? } else { random_field(3, 2, seed + t)? };
            Ok(elementary_differential(&image, &f)?.is_zero())
        })
        .collect();
    let mut ok = true;
    for r in results {
        ok &= r?;
    }
    Ok(ok)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fc(s: &str) -> FormCombo {
        FormCombo::parse(s).unwrap()
    }

    #[test]
    fn small_differentials() {
        let f = PolyVectorField::parse(&["x1^2 + x2", "x1*x2"]).unwrap();
        let div = elementary_differential(&fc("<b>"), &f).unwrap();
        assert_eq!(div.rank(), 0);
        assert_eq!(div.components()[0], f.divergence());
        let t = elementary_differential(&fc("b[b]"), &f).unwrap();
        for i in 0..2 {
            let mut expect = Poly::zero(2);
            for j in 0..2 {
                expect = expect.add(&f.component(i).deriv(j).mul(f.component(j)));
            }
            assert_eq!(t.get(&[i]), &expect);
        }
        assert!(elementary_differential(&FormCombo::zero(), &f).unwrap().is_zero());
        assert!(elementary_differential(&fc("o1"), &f).is_err());
    }

    #[test]
    fn divergences() {
        let rot = PolyVectorField::parse(&["-x2", "x1"]).unwrap();
        assert!(rot.divergence().is_zero());
        let sq = PolyVectorField::parse(&["x1^2", "0"]).unwrap();
        assert_eq!(sq.divergence(), Poly::parse("2*x1", 2).unwrap());
        let b = elementary_differential(&fc("b"), &sq).unwrap();
        assert_eq!(divergence(&b).unwrap(), sq.divergence());
    }

    #[test]
    fn potentials() {
        let a = Poly::parse("x1*x2", 2).unwrap();
        let f = divfree_from_potential(2, &[a]).unwrap();
        assert_eq!(f, PolyVectorField::parse(&["x1", "-x2"]).unwrap());
        let g = random_divfree_field(3, 2, 7).unwrap();
        assert!(g.divergence().is_zero());
        assert_eq!(g, random_divfree_field(3, 2, 7).unwrap());
        assert!(random_divfree_field(1, 2, 0).is_err());
        let json = g.to_json();
        assert_eq!(PolyVectorField::from_json(&json).unwrap(), g);
    }

    #[test]
    fn dh_identity_and_solenoidal() {
        let f = random_field(3, 2, 1).unwrap();
        assert!(check_dh_identity(&fc("b[b]"), &f).unwrap());
        assert!(check_dh_identity(&fc("<b> b"), &f).unwrap());
        let psi3 = fc("<b,b> b + <b[b]> b + -1 * <b> b[b] + -1 * b[b,b]");
        assert!(check_solenoidal_numeric(&psi3, false, 2, 0).unwrap());
        let tilde = fc("<b,b> b + -1 * b[b,b]");
        assert!(check_solenoidal_numeric(&tilde, true, 2, 0).unwrap());
        assert!(!check_solenoidal_numeric(&tilde, false, 2, 0).unwrap());
        assert!(!check_solenoidal_numeric(&fc("b[b]"), false, 1, 0).unwrap());
    }
}

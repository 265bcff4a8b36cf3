//! Bases of Ω_{n,p}^N made of wedge orbit representatives.

use std::collections::HashMap;

use num_traits::{One, Zero};
use serde::Serialize;

use super::linalg::SparseVec;
use crate::algebra::{wedge_forest, FormCombo, TermRecord, Q};
use crate::forest::{generate, Code, Forest};
use crate::util::permutations;

/// Basis of Ω_{n,p}^N (or of its 1-loop-free quotient): one canonical
/// forest per orbit of root and covertex-label permutations whose wedge
/// does not vanish.
#[derive(Debug, Clone)]
pub struct SpaceBasis {
    pub order: usize,
    pub roots: usize,
    pub covertices: usize,
    pub divfree: bool,
    reps: Vec<Forest>,
    codes: Vec<Code>,
    /// Every forest of a basis orbit → (representative, sign); `None` for
    /// orbits with vanishing wedge.
    index: HashMap<Code, Option<(usize, bool)>>,
}

#[derive(Serialize)]
struct BasisRecord<'a> {
    order: usize,
    roots: usize,
    covertices: usize,
    divfree: bool,
    elements: Vec<Vec<TermRecord>>,
    representatives: Vec<&'a str>,
}

impl SpaceBasis {
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn representatives(&self) -> &[Forest] {
        &self.reps
    }

    pub fn code(&self, i: usize) -> &Code {
        &self.codes[i]
    }

    pub fn position(&self, code: &Code) -> Option<usize> {
        self.index.get(code).copied().flatten().filter(|&(_, odd)| !odd).map(|(i, _)| i)
    }

    /// The basis element ∧γ_i.
    pub fn element(&self, i: usize) -> FormCombo {
        wedge_forest(&self.reps[i])
    }

    /// Σ x_i ∧γ_i.
    pub fn combo(&self, x: &SparseVec) -> FormCombo {
        let mut out = FormCombo::zero();
        for (&i, v) in x {
            out.add_scaled(&self.element(i), v);
        }
        out
    }

    /// Σ x_i γ_i without the wedge; used for dual vectors and n ≤ 1, p = 0.
    pub fn raw_combo(&self, x: &SparseVec) -> FormCombo {
        let mut out = FormCombo::zero();
        for (&i, v) in x {
            out.add_term(self.codes[i].clone(), v.clone());
        }
        out
    }

    /// Coordinates of ∧c. In divfree mode, forests with a 1-loop are zero.
    ///
    /// Panics on a forest of another grade.
    pub fn reduce(&self, c: &FormCombo) -> SparseVec {
        let mut out = SparseVec::new();
        for (k, v) in c.iter() {
            match self.index.get(k) {
                Some(Some((i, odd))) => {
                    let e = out.entry(*i).or_insert_with(Q::zero);
                    if *odd {
                        *e -= v;
                    } else {
                        *e += v;
                    }
                }
                Some(None) => {}
                None => {
                    let (n, r, p) = k.grade();
                    let grade_ok = n == self.order && r == self.roots && p == self.covertices;
                    assert!(grade_ok && self.divfree && k.has_one_loop(), "{k} is not in this space");
                }
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    pub fn to_json(&self) -> String {
        let rec = BasisRecord {
            order: self.order,
            roots: self.roots,
            covertices: self.covertices,
            divfree: self.divfree,
            elements: (0..self.len()).map(|i| self.element(i).to_records()).collect(),
            representatives: self.codes.iter().map(|c| c.as_str()).collect(),
        };
        serde_json::to_string_pretty(&rec).expect("serialisable")
    }
}

/// Basis of Ω_{n,p}^N; empty when the grade admits no forest.
pub fn basis(order: usize, roots: usize, covertices: usize, divfree: bool) -> SpaceBasis {
    let forests = if roots > order || covertices > order {
        Vec::new()
    } else {
        generate(order, roots, covertices, divfree).expect("valid grade")
    };
    let root_perms = permutations(roots);
    let label_perms = permutations(covertices);
    let mut index: HashMap<Code, Option<(usize, bool)>> = HashMap::new();
    let mut reps = Vec::new();
    let mut codes = Vec::new();
    for f in forests {
        let code = f.code();
        if index.contains_key(&code) {
            continue;
        }
        let mut orbit: HashMap<Code, bool> = HashMap::new();
        let mut vanishes = false;
        for (sigma, odd_s) in &root_perms {
            let g = f.permute_roots(sigma);
            for (tau, odd_t) in &label_perms {
                let map: Vec<u32> = tau.iter().map(|&t| t as u32 + 1).collect();
                let h = g.relabel_covertices(&map).code();
                let odd = odd_s ^ odd_t;
                match orbit.get(&h) {
                    Some(&o) if o != odd => vanishes = true,
                    Some(_) => {}
                    None => {
                        orbit.insert(h, odd);
                    }
                }
            }
        }
        if vanishes {
            for h in orbit.into_keys() {
                index.insert(h, None);
            }
        } else {
            let i = reps.len();
            for (h, odd) in orbit {
                index.insert(h, Some((i, odd)));
            }
            reps.push(f);
            codes.push(code);
        }
    }
    SpaceBasis { order, roots, covertices, divfree, reps, codes, index }
}

/// Pairing of a dual combination with a combination, coefficientwise.
pub fn pairing(dual: &FormCombo, c: &FormCombo) -> Q {
    let mut acc = Q::zero();
    for (k, v) in dual.iter() {
        let w = c.coeff(k);
        if !w.is_zero() {
            acc += v * w;
        }
    }
    acc
}

pub(crate) fn unit(i: usize) -> SparseVec {
    [(i, Q::one())].into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert!(basis(2, 2, 0, false).is_empty());
        assert_eq!(basis(3, 1, 0, false).len(), 6);
        let b = basis(1, 1, 0, true);
        assert_eq!(b.len(), 1);
        assert_eq!(b.code(0).as_str(), "b");
        assert_eq!(basis(3, 2, 0, false).len(), 1);
    }

    #[test]
    fn reduce_signs() {
        let b = basis(3, 2, 0, false);
        let x = FormCombo::parse("b b[b] + 2 * b[b] b").unwrap();
        let y = b.reduce(&x);
        assert_eq!(y.len(), 1);
        let back = b.combo(&y);
        assert_eq!(back, crate::algebra::wedge(&x).unwrap());
    }
}

//! Solenoidal forms: generators, an explicit basis, bamboo coefficients
//! and volume-preservation certificates.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use super::divergence::self_looped_scalars;
use super::{basis, matrix_dh, SpacesError};
use crate::algebra::{d_h, drop_one_loops, format_coeff, FormCombo, Q};
use crate::forest::{bamboo, code_cmp, Code, Forest};

/// d_H ∧γ over the basis of Ω_2^N (modulo 1-loops in divfree mode). These
/// span Ker d_H on Ω_1^N but need not be independent. In divfree mode at
/// N = 1, where Ω̃_2 vanishes, the kernel is spanned by "b" itself.
pub fn solenoidal_generators(order: usize, divfree: bool) -> Vec<FormCombo> {
    if divfree && order == 1 {
        return vec![FormCombo::parse("b").expect("literal")];
    }
    let b = basis(order, 2, 0, divfree);
    (0..b.len())
        .filter_map(|i| {
            let mut g = d_h(&b.element(i)).expect("two roots");
            if divfree {
                g = drop_one_loops(&g);
            }
            (!g.is_zero()).then_some(g)
        })
        .collect()
}

fn tree_code(f: &Forest) -> String {
    let code = f.code().into_string();
    code.rsplit(' ').next().expect("nonempty").to_string()
}

/// Explicit basis of Ψ^N. For each self-looped scalar whose distinct
/// self-looped components are φ(t_1), …, φ(t_k) with t_1 < … < t_k, take
/// d_H ∧(rest · t_1 t_l) for l = 2..k, where rest is the scalar with one
/// copy of φ(t_1) and of φ(t_l) removed.
pub fn solenoidal_basis(order: usize) -> Vec<FormCombo> {
    let mut out = Vec::new();
    for alpha in self_looped_scalars(order) {
        let mut by_tree: BTreeMap<String, usize> = BTreeMap::new();
        for v in alpha.one_loops() {
            let t = tree_code(&alpha.cut(v).expect("1-loop"));
            by_tree.entry(t).or_insert(v);
        }
        let mut trees: Vec<(String, usize)> = by_tree.into_iter().collect();
        trees.sort_by(|a, b| code_cmp(&a.0, &b.0));
        let Some(&(_, first)) = trees.first() else { continue };
        for &(_, v) in &trees[1..] {
            let g = alpha.cut(first).and_then(|g| g.cut(v)).expect("1-loops");
            let w = crate::algebra::wedge_forest(&g);
            out.push(d_h(&w).expect("two roots"));
        }
    }
    out
}

/// Coefficient of the bamboo tree of each order up to the largest order
/// present in `c`.
pub fn bamboo_check(c: &FormCombo) -> Result<BTreeMap<usize, Q>, SpacesError> {
    match c.grade()? {
        Some((1, 0)) | None => {}
        Some((n, p)) => {
            return Err(SpacesError::Precondition(format!("bamboo check needs n = 1, p = 0, got n = {n}, p = {p}")))
        }
    }
    let top = c.keys().map(|k| k.grade().0).max().unwrap_or(0);
    Ok((1..=top)
        .map(|k| (k, c.coeff(&bamboo(k).expect("k ≥ 1").code())))
        .collect())
}

/// η_k per order with Σ b(τ)/σ(τ) τ = d_H η_k at every order k ≥ 2.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VpCertificate {
    pub eta: BTreeMap<usize, FormCombo>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum VpReason {
    /// The bamboo tree of this order has a nonzero coefficient.
    Bamboo,
    /// The order-k part is not solenoidal.
    NotSolenoidal,
}

/// First order where no η exists, with a dual witness: the functional
/// d_H*φ* pairs to a nonzero value with the modified field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VpFailure {
    pub order: usize,
    pub reason: VpReason,
    pub scalar: Code,
    pub functional: FormCombo,
    pub pairing: Q,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VpOutcome {
    Certified(VpCertificate),
    Infeasible(VpFailure),
}

impl VpOutcome {
    pub fn is_certified(&self) -> bool {
        matches!(self, VpOutcome::Certified(_))
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            VpOutcome::Certified(c) => serde_json::json!({
                "certified": true,
                "eta": c.eta.iter().map(|(k, e)| (k.to_string(), serde_json::to_value(e.to_records()).unwrap()))
                    .collect::<serde_json::Map<_, _>>(),
            }),
            VpOutcome::Infeasible(f) => serde_json::json!({
                "certified": false,
                "order": f.order,
                "reason": f.reason,
                "scalar": f.scalar.as_str(),
                "functional": f.functional.to_records(),
                "pairing": format_coeff(&f.pairing),
            }),
        }
    }
}

/// Solves, order by order up to `max_order`, for η with
/// B(b) = b + d_H η, where B(b) = Σ b(τ)/σ(τ) τ. The bamboo coefficients
/// are checked first since they can never be matched.
pub fn vp_certificate(b: &FormCombo, max_order: usize, divfree: bool) -> Result<VpOutcome, SpacesError> {
    let one = FormCombo::parse("b").expect("literal");
    let unit = one.keys().next().expect("one term").clone();
    if b.coeff(&unit) != Q::one() {
        return Err(SpacesError::Precondition("the coefficient of b must be 1".into()));
    }
    if let Some(k) = b.keys().find(|k| { let (_, n, p) = k.grade(); n != 1 || p != 0 }) {
        return Err(SpacesError::Precondition(format!("{k} is not an aromatic tree")));
    }
    let pieces = b.by_order();
    let mut cert = VpCertificate::default();
    for order in 2..=max_order {
        let raw = pieces.get(&order).cloned().unwrap_or_else(FormCombo::zero);
        let mut x = FormCombo::zero();
        for (k, v) in raw.iter() {
            let sigma = Q::from_integer(k.forest().symmetry_order().into());
            x.add_term(k.clone(), v / sigma);
        }
        let bam = bamboo(order).expect("order ≥ 1").code();
        let space = basis(order, 1, 0, divfree);
        let xv = space.reduce(&x);
        let bamboo_bad = !raw.coeff(&bam).is_zero();
        let solved = if bamboo_bad { None } else { matrix_dh(order, 2, 0, divfree).matrix.solve(&xv).ok() };
        match solved {
            Some(y) => {
                let eta = basis(order, 2, 0, divfree).combo(&y);
                cert.eta.insert(order, eta);
            }
            None => {
                let reason = if bamboo_bad { VpReason::Bamboo } else { VpReason::NotSolenoidal };
                let d = matrix_dh(order, 1, 0, divfree);
                let dx = d.matrix.mul_vec(&xv);
                let (&row, value) = dx.iter().next().ok_or_else(|| {
                    SpacesError::Precondition(format!("order {order} is solenoidal but not exact"))
                })?;
                return Ok(VpOutcome::Infeasible(VpFailure {
                    order,
                    reason,
                    scalar: d.target.code(row).clone(),
                    functional: d.source.raw_combo(d.matrix.row(row)),
                    pairing: value.clone(),
                }));
            }
        }
    }
    Ok(VpOutcome::Certified(cert))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{kernel_dim_dh, rank_of};

    fn fc(s: &str) -> FormCombo {
        FormCombo::parse(s).unwrap()
    }

    #[test]
    fn generators_order_three() {
        let g = solenoidal_generators(3, false);
        let b = basis(3, 1, 0, false);
        let target = fc("<b,b> b + <b[b]> b + -1 * <b> b[b] + -1 * b[b,b]");
        let mut rows: Vec<_> = g.iter().map(|c| b.reduce(c)).collect();
        assert_eq!(rank_of(&rows), 1);
        rows.push(b.reduce(&target));
        assert_eq!(rank_of(&rows), 1);
        let gt = solenoidal_generators(3, true);
        assert_eq!(gt.len(), 1);
        let doubled = gt[0].scale(&Q::from_integer(2.into()));
        let listed = fc("<b,b> b + -1 * b[b,b]");
        assert!(doubled == listed || doubled == -listed);
    }

    #[test]
    fn basis_sizes() {
        for (n, size) in [(1, 0), (2, 0), (3, 1), (4, 3), (5, 11)] {
            let s = solenoidal_basis(n);
            assert_eq!(s.len(), size);
            let b = basis(n, 1, 0, false);
            let rows: Vec<_> = s.iter().map(|c| b.reduce(c)).collect();
            assert_eq!(rank_of(&rows), size);
            assert_eq!(kernel_dim_dh(n, 1, 0, false), size);
            for c in &s {
                assert!(d_h(c).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn bamboo_values() {
        let m = bamboo_check(&fc("b")).unwrap();
        assert_eq!(m.into_iter().collect::<Vec<_>>(), vec![(1, Q::one())]);
        let g = d_h(&crate::algebra::wedge(&fc("b b[b]")).unwrap()).unwrap();
        assert!(bamboo_check(&g).unwrap().values().all(|v| v.is_zero()));
    }

    #[test]
    fn certificates() {
        let VpOutcome::Certified(c) = vp_certificate(&fc("b"), 4, false).unwrap() else { panic!() };
        assert!(c.eta.values().all(|e| e.is_zero()));
        let VpOutcome::Infeasible(f) = vp_certificate(&fc("b + b[b]"), 4, false).unwrap() else { panic!() };
        assert_eq!((f.order, f.reason), (2, VpReason::Bamboo));
        assert!(!f.pairing.is_zero());
        assert!(vp_certificate(&fc("2 * b"), 3, false).is_err());

        let alpha = Q::new(3.into(), 2.into());
        let eta = crate::algebra::wedge(&fc("b b[b]")).unwrap().scale(&alpha);
        let field = d_h(&eta).unwrap();
        let mut b = fc("b");
        for (k, v) in field.iter() {
            b.add_term(k.clone(), v * Q::from_integer(k.forest().symmetry_order().into()));
        }
        let VpOutcome::Certified(c) = vp_certificate(&b, 3, false).unwrap() else { panic!() };
        assert_eq!(c.eta[&3], eta);
    }
}

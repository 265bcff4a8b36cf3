//! Scalar divergences: the redirection map ρ, a basis of Im d_H, its
//! annihilator, and a basis of Im d_H*.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::{matrix_dh, SpacesError};
use crate::algebra::{graft_last, FormCombo, Q};
use crate::forest::{generate, Code, Forest};
use crate::util::combinations;

/// Scalars of order N carrying at least one 1-loop, in code order.
pub fn self_looped_scalars(order: usize) -> Vec<Forest> {
    scalars(order).into_iter().filter(|f| f.has_one_loop()).collect()
}

/// Scalars of order N without 1-loops, in code order.
pub fn non_self_looped_scalars(order: usize) -> Vec<Forest> {
    scalars(order).into_iter().filter(|f| !f.has_one_loop()).collect()
}

fn scalars(order: usize) -> Vec<Forest> {
    if order == 0 {
        return Vec::new();
    }
    generate(order, 0, 0, false).expect("valid grade")
}

fn sign(k: usize) -> Q {
    if k % 2 == 0 {
        Q::one()
    } else {
        -Q::one()
    }
}

/// Sum over all simultaneous redirections of the 1-loops of `alpha` to
/// other nodes, with multiplicity.
pub fn redirect_rho(alpha: &Forest) -> Result<FormCombo, SpacesError> {
    let loops = alpha.one_loops();
    if loops.is_empty() {
        return Err(SpacesError::Precondition(format!("{alpha} has no 1-loop")));
    }
    let n = alpha.len();
    let mut out = FormCombo::zero();
    if n < 2 {
        return Ok(out);
    }
    let mut choice = vec![0usize; loops.len()];
    loop {
        let mut g = alpha.clone();
        for (&v, &c) in loops.iter().zip(&choice) {
            let u = if c >= v { c + 1 } else { c };
            g = g.redirect(v, u).expect("node in range");
        }
        out.add_term(g.code(), Q::one());
        let mut i = 0;
        loop {
            if i == choice.len() {
                return Ok(out);
            }
            choice[i] += 1;
            if choice[i] < n - 1 {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// (α, α + (−1)^{k−1} ρ(α)) for every self-looped scalar α with k 1-loops.
pub fn divergence_basis(order: usize) -> Vec<(Forest, FormCombo)> {
    self_looped_scalars(order)
        .into_iter()
        .map(|a| {
            let k = a.one_loops().len();
            let mut c = FormCombo::from_forest(&a);
            c.add_scaled(&redirect_rho(&a).expect("self-looped"), &sign(k - 1));
            (a, c)
        })
        .collect()
}

/// Functionals on Ω_0^N, one per non-self-looped scalar β:
/// β* − Σ_α (−1)^{k(α)−1} ρ(α)_β α*. Together they cut out Im d_H.
pub fn annihilator_div_basis(order: usize) -> Vec<FormCombo> {
    let mut columns: BTreeMap<Code, FormCombo> = non_self_looped_scalars(order)
        .iter()
        .map(|b| (b.code(), FormCombo::from_forest(b)))
        .collect();
    for a in self_looped_scalars(order) {
        let s = -sign(a.one_loops().len() - 1);
        for (beta, m) in redirect_rho(&a).expect("self-looped").iter() {
            if let Some(pi) = columns.get_mut(beta) {
                pi.add_term(a.code(), &s * m);
            }
        }
    }
    columns.into_values().collect()
}

/// Edge-subset reading: Σ_{Ê} (−1)^{|Ê|} m(β, Ê) (β \ Ê)*, where β \ Ê turns
/// the edges Ê into 1-loops and m counts the redirections giving back β.
/// At N = 2 this gives −2 on <b[b]>, where the annihilator needs −1.
pub fn annihilator_literal(beta: &Forest) -> Result<FormCombo, SpacesError> {
    if beta.num_roots() != 0 || beta.num_covertices() != 0 || beta.has_one_loop() {
        return Err(SpacesError::Precondition(format!("{beta} is not a non-self-looped scalar")));
    }
    let target = beta.code();
    let n = beta.len();
    let mut out = FormCombo::from_forest(beta);
    for k in 1..=n {
        for edges in combinations(n, k) {
            let mut g = beta.clone();
            for &v in &edges {
                g = g.redirect(v, v).expect("node in range");
            }
            let m = redirect_rho(&g)?.coeff(&target);
            if !m.is_zero() {
                out.add_term(g.code(), sign(k) * m);
            }
        }
    }
    Ok(out)
}

/// d_H* φ* for every self-looped scalar φ, as functionals on Ω_1^N, built
/// from the edges of φ: Σ_e (m1/m2) (φ\e)*.
pub fn image_dual_basis(order: usize) -> Vec<FormCombo> {
    self_looped_scalars(order)
        .iter()
        .map(|phi| {
            let target = phi.code();
            let cuts: Vec<Code> = (0..phi.len()).map(|v| phi.cut(v).expect("scalar edge").code()).collect();
            let mut out = FormCombo::zero();
            for gamma in &cuts {
                let m1 = graft_last(&gamma.forest()).coeff(&target);
                let m2 = cuts.iter().filter(|c| *c == gamma).count();
                out.add_term(gamma.clone(), m1 / Q::from_integer(m2.into()));
            }
            out
        })
        .collect()
}

/// The same functionals read off the rows of the d_H matrix.
pub fn image_dual_from_matrix(order: usize) -> Vec<FormCombo> {
    let m = matrix_dh(order, 1, 0, false);
    let t = m.matrix.clone();
    (0..m.target.len())
        .filter(|&i| m.target.representatives()[i].has_one_loop())
        .map(|i| m.source.raw_combo(t.row(i)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::pairing;

    fn f(s: &str) -> Forest {
        Forest::parse(s).unwrap()
    }

    fn fc(s: &str) -> FormCombo {
        FormCombo::parse(s).unwrap()
    }

    #[test]
    fn rho_examples() {
        assert_eq!(redirect_rho(&f("<b> <b>")).unwrap(), fc("<b,b>"));
        assert!(redirect_rho(&f("<b>")).unwrap().is_zero());
        assert_eq!(redirect_rho(&f("<b[b]>")).unwrap(), fc("<b,b>"));
        assert!(redirect_rho(&f("<b,b>")).is_err());
    }

    #[test]
    fn divergences_small() {
        let d: BTreeMap<String, FormCombo> =
            divergence_basis(2).into_iter().map(|(a, c)| (a.to_string(), c)).collect();
        assert_eq!(d["<b> <b>"], fc("<b> <b> + -1 * <b,b>"));
        assert_eq!(d["<b[b]>"], fc("<b[b]> + <b,b>"));
        assert_eq!(divergence_basis(1)[0].1, fc("<b>"));
    }

    #[test]
    fn annihilators_small() {
        let a = annihilator_div_basis(2);
        assert_eq!(a, vec![fc("<b,b> + -1 * <b[b]> + <b> <b>")]);
        assert_eq!(pairing(&a[0], &fc("<b[b]> + <b,b>")), Q::zero());
        assert_eq!(annihilator_div_basis(3).len(), 2);
        let lit = annihilator_literal(&f("<b,b>")).unwrap();
        assert_eq!(lit, fc("<b,b> + -2 * <b[b]> + <b> <b>"));
    }

    #[test]
    fn image_dual_agrees_with_transpose() {
        for n in 1..=4 {
            assert_eq!(image_dual_basis(n), image_dual_from_matrix(n));
        }
    }
}

//! Homotopy operators of the aromatic bicomplex.
//!
//! Every operator is available as a plain function and, behind the
//! [`Homotopy`] trait, through a [`HomotopyRegistry`] keyed by name.

mod registry;

use num_traits::{One, Zero};
use thiserror::Error;

pub use registry::{Homotopy, HomotopyRegistry};

use crate::algebra::{
    covertex_to_vertex, d_h, drop_one_loops, euler_e, euler_e_at, euler_eq, euler_eq_at, euler_estar,
    graft_last, graft_trailing, interior_euler, linear, open_loop, wedge, AlgebraError, FormCombo,
    NodeSelector, Q,
};
use crate::forest::Forest;
use crate::util::binomial;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomotopyError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("input contains a 1-loop: {0}")]
    HasOneLoop(String),
    #[error("precondition fails: E^{0} of the input is nonzero")]
    EulerNonzero(usize),
    #[error("{0}")]
    Domain(String),
}

fn grade(c: &FormCombo) -> Result<Option<(usize, usize)>, HomotopyError> {
    Ok(c.grade()?)
}

fn order_of(f: &Forest) -> Q {
    Q::from_integer(f.len().into())
}

/// Vertical homotopy h_V γ = (p/|γ|) γ_{◯p→•}.
pub fn h_v(c: &FormCombo) -> Result<FormCombo, HomotopyError> {
    if let Some((_, p)) = grade(c)? {
        if p == 0 {
            return Err(HomotopyError::Domain("h_V needs p ≥ 1".into()));
        }
    }
    Ok(wedge(&linear(c, covertex_to_vertex))?)
}

/// D^q E^{q+1}_v summed over the nodes chosen by `nodes`, weighted per q.
fn graded_sum<W, S>(f: &Forest, weight: W, nodes: S) -> FormCombo
where
    W: Fn(usize, usize) -> Q,
    S: Fn(&Forest) -> Vec<usize>,
{
    let g = FormCombo::from_forest(f);
    let mut out = FormCombo::zero();
    for v in nodes(f) {
        for q in 0..f.len() {
            let w = weight(q, v);
            if w.is_zero() {
                continue;
            }
            let e = euler_eq_at(&g, q + 1, NodeSelector::Node(v)).expect("node exists");
            if e.is_zero() {
                continue;
            }
            out.add_scaled(&graft_trailing(&e, q + 1, q), &w);
        }
    }
    out
}

/// Horizontal homotopy h_H γ = 1/|γ| Σ_q (n+1)/(q+n+1) ∧ D^q E^{q+1} γ.
pub fn h_h(c: &FormCombo) -> Result<FormCombo, HomotopyError> {
    grade(c)?;
    let raw = linear(c, |f| {
        let n = f.num_roots();
        let inv = order_of(f).recip();
        graded_sum(
            f,
            |q, _| &inv * Q::new((n + 1).into(), (q + n + 1).into()),
            |f| (0..f.len()).collect(),
        )
    });
    Ok(wedge(&raw)?)
}

/// Residual (d_H h_H + h_V E°)γ − γ on scalars; zero when the variational
/// homotopy identity holds.
pub fn variational_identity_check(c: &FormCombo) -> Result<FormCombo, HomotopyError> {
    let lhs = &d_h(&h_h(c)?)? + &h_v(&euler_estar(c)?)?;
    Ok(&lhs - c)
}

fn reject_one_loops(c: &FormCombo) -> Result<(), HomotopyError> {
    match c.keys().find(|k| k.forest().has_one_loop()) {
        Some(k) => Err(HomotopyError::HasOneLoop(k.to_string())),
        None => Ok(()),
    }
}

/// Divergence-free homotopy h̃_H, taken modulo 1-loops.
pub fn h_h_tilde(c: &FormCombo) -> Result<FormCombo, HomotopyError> {
    grade(c)?;
    reject_one_loops(c)?;
    let raw = linear(c, |f| {
        let n = f.num_roots();
        let inv = order_of(f).recip();
        let roots = f.roots().to_vec();
        graded_sum(
            f,
            |q, v| {
                let not_root = usize::from(!roots.contains(&v));
                &inv * Q::new((n + 1).into(), (q + n + not_root).into())
            },
            |f| (0..f.len()).collect(),
        )
    });
    Ok(drop_one_loops(&wedge(&raw)?))
}

/// Remainder R γ = E_r γ / |γ| for one-rooted forms (zero otherwise).
pub fn remainder(c: &FormCombo) -> Result<FormCombo, HomotopyError> {
    reject_one_loops(c)?;
    match grade(c)? {
        Some((1, _)) => {
            let e = euler_e_at(c, NodeSelector::LastRoot)?;
            Ok(drop_one_loops(&crate::algebra::scale_by_order(&e, true)))
        }
        _ => Ok(FormCombo::zero()),
    }
}

/// Pair (h̃_H c, R c).
pub fn h_h_divfree(c: &FormCombo) -> Result<(FormCombo, FormCombo), HomotopyError> {
    Ok((h_h_tilde(c)?, remainder(c)?))
}

/// Residual (d_H h̃_H + h̃_H d_H)c − (c − R c) modulo 1-loops.
pub fn divfree_identity_residual(c: &FormCombo) -> Result<FormCombo, HomotopyError> {
    let (h, r) = h_h_divfree(c)?;
    let mut lhs = if h.is_zero() { FormCombo::zero() } else { drop_one_loops(&d_h(&h)?) };
    if matches!(grade(c)?, Some((n, _)) if n >= 1) {
        lhs += &h_h_tilde(&drop_one_loops(&d_h(c)?))?;
    }
    Ok(&(&lhs - c) + &r)
}

fn per_order<F>(c: &FormCombo, f: F) -> Result<FormCombo, HomotopyError>
where
    F: Fn(usize, &FormCombo) -> Result<FormCombo, HomotopyError>,
{
    let mut out = FormCombo::zero();
    for (n, piece) in c.by_order() {
        out += &f(n, &piece)?;
    }
    Ok(out)
}

/// Modified operator h̃¹_H c = h̃_H(1 + E/(N−1)) c, for N > 1.
pub fn h_h_divfree_first(c: &FormCombo) -> Result<FormCombo, HomotopyError> {
    reject_one_loops(c)?;
    per_order(c, |n, piece| {
        if n <= 1 {
            return Err(HomotopyError::Domain("the modified operators need N > 1".into()));
        }
        let s = Q::new(One::one(), (n - 1).into());
        let mut arg = piece.clone();
        arg.add_scaled(&drop_one_loops(&euler_e(piece)), &s);
        h_h_tilde(&arg)
    })
}

/// Modified operator h̃²_H c = h̃_H(1 + E_r/(N−1)) c on one-rooted forms, N > 1.
pub fn h_h_divfree_second(c: &FormCombo) -> Result<FormCombo, HomotopyError> {
    reject_one_loops(c)?;
    if !matches!(grade(c)?, Some((1, _)) | None) {
        return Err(HomotopyError::Domain("h̃²_H acts on one-rooted forms".into()));
    }
    per_order(c, |n, piece| {
        if n <= 1 {
            return Err(HomotopyError::Domain("the modified operators need N > 1".into()));
        }
        let s = Q::new(One::one(), (n - 1).into());
        let mut arg = piece.clone();
        arg.add_scaled(&drop_one_loops(&euler_e_at(piece, NodeSelector::LastRoot)?), &s);
        h_h_tilde(&arg)
    })
}

/// The pair (h̃¹_H c, h̃²_H c) for one-rooted c.
pub fn h_h_divfree_simple(c: &FormCombo) -> Result<(FormCombo, FormCombo), HomotopyError> {
    Ok((h_h_divfree_first(c)?, h_h_divfree_second(c)?))
}

/// Residual (d_H h̃²_H + h̃¹_H d_H)c − c modulo 1-loops, for c ∈ Ω̃_1^N, N > 1.
pub fn divfree_simple_residual(c: &FormCombo) -> Result<FormCombo, HomotopyError> {
    if !matches!(grade(c)?, Some((1, _)) | None) {
        return Err(HomotopyError::Domain("the simpler identity concerns one-rooted forms".into()));
    }
    let second = h_h_divfree_second(c)?;
    let dc = drop_one_loops(&d_h(c)?);
    let mut lhs = if second.is_zero() { FormCombo::zero() } else { drop_one_loops(&d_h(&second)?) };
    if !dc.is_zero() {
        lhs += &h_h_divfree_first(&dc)?;
    }
    Ok(&lhs - c)
}

/// Augmented horizontal homotopy 𝔥_H = ∧ Σ_{q≥1} (1/q) D^{q−1} E^q_{◯p}.
pub fn aug_h_h(c: &FormCombo) -> Result<FormCombo, HomotopyError> {
    match grade(c)? {
        Some((_, 0)) => return Err(HomotopyError::Domain("𝔥_H needs p ≥ 1".into())),
        None => return Ok(FormCombo::zero()),
        _ => {}
    }
    let raw = linear(c, |f| {
        let p = f.num_covertices() as u32;
        let o = f.covertex(p).expect("covertex p");
        graded_sum(f, |q, _| Q::new(One::one(), (q + 1).into()), |_| vec![o])
    });
    Ok(wedge(&raw)?)
}

/// Augmented vertical homotopy 𝔥_V = I ∘ h_V.
pub fn aug_h_v(c: &FormCombo) -> Result<FormCombo, HomotopyError> {
    let h = h_v(c)?;
    if h.is_zero() {
        return Ok(h);
    }
    if matches!(grade(&h)?, Some((_, 0))) {
        return Err(HomotopyError::Domain("𝔥_V needs p ≥ 2 so that I applies".into()));
    }
    Ok(interior_euler(&h)?)
}

/// Order in which the integration-by-parts loop visits 1-loops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PickOrder {
    /// Smallest term, then smallest node.
    #[default]
    First,
    /// Largest term, then largest node.
    Last,
}

/// Integration-by-parts homotopy; returns (ĥ_H c, final ĉ).
pub fn ibp_homotopy_with(c: &FormCombo, order: PickOrder) -> Result<(FormCombo, FormCombo), HomotopyError> {
    if let Some((n, _)) = grade(c)? {
        if n != 0 {
            return Err(HomotopyError::Domain("ĥ_H acts on Ω_{0,p}".into()));
        }
    }
    let e = crate::algebra::scale_by_order(&euler_e(c), true);
    let mut rest = c - &e;
    let mut h = FormCombo::zero();
    loop {
        let pick = {
            let mut candidates = rest.iter().filter_map(|(k, a)| {
                let f = k.forest();
                let loops = f.one_loops();
                let v = match order {
                    PickOrder::First => loops.first().copied(),
                    PickOrder::Last => loops.last().copied(),
                }?;
                Some((f, v, a.clone()))
            });
            match order {
                PickOrder::First => candidates.next(),
                PickOrder::Last => candidates.last(),
            }
        };
        let Some((f, v, a)) = pick else { break };
        let theta = open_loop(&f, v);
        h.add_term(theta.code(), a.clone());
        rest.add_scaled(&graft_last(&theta), &-a);
    }
    Ok((wedge(&h)?, rest))
}

/// Integration-by-parts homotopy ĥ_H.
pub fn ibp_homotopy(c: &FormCombo) -> Result<FormCombo, HomotopyError> {
    Ok(ibp_homotopy_with(c, PickOrder::First)?.0)
}

/// h^{(n)} c = 1/|γ| Σ_{p≥n} C(p, n)^{-1} D^{p−n} E^p c; the n new roots
/// are the last ones, and D^n of the result recovers c.
pub fn nth_antiderivative(c: &FormCombo, n: usize) -> Result<FormCombo, HomotopyError> {
    grade(c)?;
    for p in 0..n {
        if !euler_eq(c, p).is_zero() {
            return Err(HomotopyError::EulerNonzero(p));
        }
    }
    Ok(linear(c, |f| {
        let g = FormCombo::from_forest(f);
        let inv = order_of(f).recip();
        let mut out = FormCombo::zero();
        for p in n..=f.len() {
            let e = euler_eq(&g, p);
            if e.is_zero() {
                continue;
            }
            let w = &inv / Q::from_integer(binomial(p, n));
            out.add_scaled(&graft_trailing(&e, p, p - n), &w);
        }
        out
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::d_v;

    fn fc(s: &str) -> FormCombo {
        FormCombo::parse(s).unwrap()
    }

    #[test]
    fn vertical() {
        assert_eq!(h_v(&fc("o1")).unwrap(), fc("b"));
        assert_eq!(h_v(&fc("<b[o1]>")).unwrap(), fc("1/2 * <b[b]>"));
        let g = wedge(&fc("b[o1,b]")).unwrap();
        let lhs = &d_v(&h_v(&g).unwrap()).unwrap() + &h_v(&d_v(&g).unwrap()).unwrap();
        assert_eq!(lhs, g);
    }

    #[test]
    fn horizontal_small() {
        assert_eq!(h_h(&fc("<b>")).unwrap(), fc("b"));
        assert!(h_h(&fc("<b[b]>")).unwrap().is_zero());
        assert_eq!(h_h(&fc("<b,b>")).unwrap(), fc("b[b]"));
        assert_eq!(h_h(&fc("<b> <b>")).unwrap(), fc("<b> b"));
        for s in ["<b,b>", "<b> <b>", "<b[b,b]>"] {
            assert!(variational_identity_check(&fc(s)).unwrap().is_zero(), "{s}");
        }
    }

    #[test]
    fn horizontal_identity_one_root() {
        let g = fc("b[b[b]]");
        let lhs = &d_h(&h_h(&g).unwrap()).unwrap() + &h_h(&d_h(&g).unwrap()).unwrap();
        assert_eq!(lhs, g);
    }

    #[test]
    fn ibp_small() {
        assert_eq!(ibp_homotopy(&fc("<b>")).unwrap(), fc("b"));
        assert!(ibp_homotopy(&fc("<b[b]>")).unwrap().is_zero());
        assert_eq!(ibp_homotopy(&fc("<b,b>")).unwrap(), fc("b[b]"));
        assert_eq!(ibp_homotopy(&fc("<b> <b> <b>")).unwrap(), fc("<b> <b> b"));
    }

    #[test]
    fn divfree_small() {
        let (h, r) = h_h_divfree(&fc("b")).unwrap();
        assert!(h.is_zero() || drop_one_loops(&d_h(&h).unwrap()).is_zero());
        assert_eq!(r, fc("b"));
        assert!(divfree_identity_residual(&fc("b")).unwrap().is_zero());
        assert!(h_h_divfree(&fc("<b> b")).is_err());
    }

    #[test]
    fn antiderivative() {
        assert_eq!(nth_antiderivative(&fc("<b>"), 1).unwrap(), fc("b"));
        assert_eq!(nth_antiderivative(&fc("<b,b>"), 1), Err(HomotopyError::EulerNonzero(0)));
        let c = fc("<b[b]> + <b,b>");
        let h = nth_antiderivative(&c, 1).unwrap();
        assert_eq!(graft_trailing(&h, 1, 1), c);
        assert!(nth_antiderivative(&FormCombo::zero(), 2).unwrap().is_zero());
    }
}

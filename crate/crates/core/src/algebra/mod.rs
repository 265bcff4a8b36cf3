//! Linear combinations of forests and the operators acting on them.

mod combo;
mod euler;

use num_traits::{One, Zero};
use thiserror::Error;

pub use combo::{format_coeff, parse_coeff, q, qi, Combo, FormCombo, MarkedCombo, MarkedKey, TermRecord, Q};
pub use euler::{
    delta_v, detach, euler_e, euler_e_at, euler_eq, euler_eq_at, euler_estar, forget, graft_trailing,
    interior_euler, marked_d, marked_d_to_mark, release, NodeSelector,
};

use crate::forest::{Forest, ForestError, Kind};
use crate::util::{factorial, permutations};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error(transparent)]
    Forest(#[from] ForestError),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("terms of different grades")]
    MixedGrades,
    #[error("wrong grade: {0}")]
    WrongGrade(String),
}

/// Applies a per-forest map linearly.
pub fn linear<F: Fn(&Forest) -> FormCombo>(c: &FormCombo, f: F) -> FormCombo {
    c.map_linear(|code| f(&code.forest()))
}

/// Antisymmetrisation of a single forest over roots and covertex labels.
pub fn wedge_forest(f: &Forest) -> FormCombo {
    let n = f.num_roots();
    let p = f.num_covertices();
    let norm = Q::new(One::one(), factorial(n) * factorial(p));
    let root_perms = permutations(n);
    let label_perms = permutations(p);
    let mut out = FormCombo::zero();
    for (sigma, odd_s) in &root_perms {
        let g = f.permute_roots(sigma);
        for (tau, odd_t) in &label_perms {
            let map: Vec<u32> = tau.iter().map(|&t| t as u32 + 1).collect();
            let h = g.relabel_covertices(&map);
            let c = if odd_s ^ odd_t { -norm.clone() } else { norm.clone() };
            out.add_term(h.code(), c);
        }
    }
    out
}

/// The wedge projection; requires homogeneous (n, p).
pub fn wedge(c: &FormCombo) -> Result<FormCombo, AlgebraError> {
    c.grade()?;
    Ok(linear(c, wedge_forest))
}

fn check_grade(c: &FormCombo, ok: impl Fn(usize, usize) -> bool, what: &str) -> Result<(), AlgebraError> {
    match c.grade()? {
        Some((n, p)) if !ok(n, p) => Err(AlgebraError::WrongGrade(format!("{what}, got n = {n}, p = {p}"))),
        _ => Ok(()),
    }
}

/// Grafts the last root onto every node, without the final projection.
pub fn graft_last(f: &Forest) -> FormCombo {
    let r = *f.roots().last().expect("at least one root");
    let mut out = FormCombo::zero();
    for u in 0..f.len() {
        out.add_term(f.graft(r, u).expect("last root").code(), Q::one());
    }
    out
}

/// Horizontal derivative d_H.
pub fn d_h(c: &FormCombo) -> Result<FormCombo, AlgebraError> {
    check_grade(c, |n, _| n >= 1, "d_H needs at least one root")?;
    wedge(&linear(c, graft_last))
}

/// Sum over vertices of the forest with that vertex turned into covertex p+1.
pub fn vertices_to_covertex(f: &Forest) -> FormCombo {
    let label = f.num_covertices() as u32 + 1;
    let mut out = FormCombo::zero();
    for v in f.vertices() {
        out.add_term(f.replace_vertex(v, label).expect("fresh label").code(), Q::one());
    }
    out
}

/// Vertical derivative d_V.
pub fn d_v(c: &FormCombo) -> Result<FormCombo, AlgebraError> {
    wedge(&linear(c, vertices_to_covertex))
}

/// Trace Ω_{1,1} → Ω_0: graft the root onto the covertex, then turn the
/// covertex into a vertex.
pub fn trace(c: &FormCombo) -> Result<FormCombo, AlgebraError> {
    check_grade(c, |n, p| n == 1 && p == 1, "trace needs one root and one covertex")?;
    Ok(linear(c, |f| {
        let o = f.covertex(1).expect("covertex 1");
        let g = f.graft(f.roots()[0], o).expect("root").replace_covertex(1).expect("covertex 1");
        FormCombo::from_forest(&g)
    }))
}

/// Quotient by forests containing a 1-loop.
pub fn drop_one_loops(c: &FormCombo) -> FormCombo {
    c.filter(|k| !k.forest().has_one_loop())
}

/// h_V building block: covertex p turned into a vertex, scaled by p/|γ|.
pub fn covertex_to_vertex(f: &Forest) -> FormCombo {
    let p = f.num_covertices();
    let g = f.replace_covertex(p as u32).expect("covertex p");
    FormCombo::single(g.code(), Q::new(p.into(), f.len().into()))
}

/// Removes the 1-loop at `v`, which becomes the last root.
pub fn open_loop(f: &Forest, v: usize) -> Forest {
    debug_assert_eq!(f.succ(v), Some(v));
    f.cut(v).expect("1-loop")
}

/// Number of vertices and covertices in each term, as a scaling weight.
pub fn scale_by_order(c: &FormCombo, inverse: bool) -> FormCombo {
    let mut out = FormCombo::zero();
    for (k, v) in c.iter() {
        let n = Q::from_integer(k.grade().0.into());
        if inverse && n.is_zero() {
            continue;
        }
        let s = if inverse { n.recip() } else { n };
        out.add_term(k.clone(), v * s);
    }
    out
}

pub fn is_vertex(f: &Forest, v: usize) -> bool {
    f.kind(v) == Kind::Vertex
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fc(s: &str) -> FormCombo {
        FormCombo::parse(s).unwrap()
    }

    #[test]
    fn combo_text_roundtrip() {
        let c = fc("1/2 * b b[b] + -1/2 * b[b] b");
        assert_eq!(c.to_string(), "-1/2 * b[b] b + 1/2 * b b[b]");
        assert_eq!(FormCombo::parse(&c.to_string()).unwrap(), c);
        assert_eq!(FormCombo::from_json(&c.to_json()).unwrap(), c);
        assert_eq!(fc("0").to_string(), "0");
        assert_eq!(fc("b + -1 * b"), FormCombo::zero());
    }

    #[test]
    fn wedge_examples() {
        assert!(wedge(&fc("b b")).unwrap().is_zero());
        assert_eq!(wedge(&fc("b b[b]")).unwrap(), fc("1/2 * b b[b] + -1/2 * b[b] b"));
        assert!(wedge(&fc("b + b b")).is_err());
        let w = wedge(&fc("o1[o2] b")).unwrap();
        assert_eq!(wedge(&w).unwrap(), w);
    }

    #[test]
    fn derivatives() {
        assert_eq!(d_h(&fc("b")).unwrap(), fc("<b>"));
        assert_eq!(d_h(&fc("b[b]")).unwrap(), fc("<b[b]> + <b,b>"));
        let g2 = wedge(&fc("b b[b]")).unwrap();
        assert_eq!(
            d_h(&g2).unwrap(),
            fc("1/2 * <b,b> b + 1/2 * <b[b]> b + -1/2 * <b> b[b] + -1/2 * b[b,b]")
        );
        assert!(d_h(&d_h(&g2).unwrap()).unwrap().is_zero());
        assert!(d_h(&fc("<b>")).is_err());
        assert_eq!(d_v(&fc("b")).unwrap(), fc("o1"));
        assert_eq!(d_v(&fc("<b>")).unwrap(), fc("<o1>"));
    }

    #[test]
    fn traces() {
        assert_eq!(trace(&fc("o1")).unwrap(), fc("<b>"));
        assert_eq!(trace(&fc("o1[b]")).unwrap(), fc("<b[b]>"));
        assert_eq!(trace(&fc("b[o1]")).unwrap(), fc("<b,b>"));
        let g = fc("b[b[b],b]");
        assert_eq!(trace(&d_v(&g).unwrap()).unwrap(), d_h(&g).unwrap());
    }

    #[test]
    fn one_loop_quotient() {
        assert!(drop_one_loops(&fc("<b> b")).is_zero());
        assert_eq!(drop_one_loops(&fc("<b,b> b + <b> b[b]")), fc("<b,b> b"));
    }
}

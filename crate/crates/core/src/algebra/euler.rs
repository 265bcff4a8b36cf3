//! Euler operators and the grafting calculus on marked forests.

use num_traits::One;

use super::combo::{FormCombo, MarkedCombo, MarkedKey, Q};
use super::{check_grade, linear, vertices_to_covertex, wedge, AlgebraError};
use crate::forest::{Forest, MarkedForest};

/// Chooses one node per forest.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeSelector {
    /// The last root r_n.
    LastRoot,
    /// The i-th root (0-based).
    Root(usize),
    /// The covertex with this label.
    Covertex(u32),
    /// A node index of the canonical forest.
    Node(usize),
}

impl NodeSelector {
    fn pick(self, f: &Forest) -> Option<usize> {
        match self {
            NodeSelector::LastRoot => f.roots().last().copied(),
            NodeSelector::Root(i) => f.roots().get(i).copied(),
            NodeSelector::Covertex(k) => f.covertex(k),
            NodeSelector::Node(v) => (v < f.len()).then_some(v),
        }
    }
}

fn sign(k: usize) -> Q {
    if k % 2 == 0 {
        Q::one()
    } else {
        -Q::one()
    }
}

/// E^q_v on a single forest; the q residual detached roots stay last.
pub(crate) fn euler_node(f: &Forest, v: usize, q: usize) -> FormCombo {
    let m = MarkedForest::detach_at(f, v).expect("node in range");
    let k = m.detached().len();
    let mut out = FormCombo::zero();
    if q > k {
        return out;
    }
    let s = sign(k - q);
    for t in m.derivative(k - q) {
        out.add_term(t.unmark().code(), s.clone());
    }
    out
}

fn selected(c: &FormCombo, sel: NodeSelector) -> Result<(), AlgebraError> {
    for k in c.keys() {
        if sel.pick(&k.forest()).is_none() {
            return Err(AlgebraError::WrongGrade(format!("selector {sel:?} finds no node in {k}")));
        }
    }
    Ok(())
}

/// E^q_v with v chosen per forest by `sel`.
pub fn euler_eq_at(c: &FormCombo, q: usize, sel: NodeSelector) -> Result<FormCombo, AlgebraError> {
    selected(c, sel)?;
    Ok(linear(c, |f| euler_node(f, sel.pick(f).unwrap(), q)))
}

/// E_v with v chosen per forest by `sel`.
pub fn euler_e_at(c: &FormCombo, sel: NodeSelector) -> Result<FormCombo, AlgebraError> {
    euler_eq_at(c, 0, sel)
}

/// Higher Euler operator E^q = Σ_v E^q_v.
pub fn euler_eq(c: &FormCombo, q: usize) -> FormCombo {
    linear(c, |f| {
        let mut out = FormCombo::zero();
        for v in 0..f.len() {
            out += &euler_node(f, v, q);
        }
        out
    })
}

/// Euler operator E = E^0.
pub fn euler_e(c: &FormCombo) -> FormCombo {
    euler_eq(c, 0)
}

/// Variational derivative E°: Ω_0 → Ω_{0,1}.
pub fn euler_estar(c: &FormCombo) -> Result<FormCombo, AlgebraError> {
    check_grade(c, |n, p| n == 0 && p == 0, "E° acts on scalars")?;
    Ok(linear(c, |f| {
        let mut out = FormCombo::zero();
        for v in f.vertices() {
            let g = f.replace_vertex(v, 1).expect("no covertices");
            out += &euler_node(&g, v, 0);
        }
        out
    }))
}

/// Interior Euler operator I = ∧E_{◯p}.
pub fn interior_euler(c: &FormCombo) -> Result<FormCombo, AlgebraError> {
    check_grade(c, |_, p| p >= 1, "I needs at least one covertex")?;
    wedge(&linear(c, |f| {
        let p = f.num_covertices() as u32;
        euler_node(f, f.covertex(p).unwrap(), 0)
    }))
}

/// δ_V = I ∘ d_V.
pub fn delta_v(c: &FormCombo) -> Result<FormCombo, AlgebraError> {
    interior_euler(&wedge(&linear(c, vertices_to_covertex))?)
}

/// D^q where the last `residual` roots of every forest are the detached
/// set and every node is a target.
pub fn graft_trailing(c: &FormCombo, residual: usize, q: usize) -> FormCombo {
    linear(c, |f| {
        let mut out = FormCombo::zero();
        if residual == 0 {
            if q == 0 {
                out.add_term(f.code(), Q::one());
            }
            return out;
        }
        let m = MarkedForest::new(f.clone(), 0, residual, false).expect("residual roots exist");
        for t in m.derivative(q) {
            out.add_term(t.unmark().code(), Q::one());
        }
        out
    })
}

fn marked_linear<F: Fn(&MarkedForest) -> Vec<MarkedForest>>(c: &MarkedCombo, f: F) -> MarkedCombo {
    c.map_linear(|k| {
        let mut out = MarkedCombo::zero();
        for t in f(&k.marked()) {
            out.add_term(MarkedKey::new(&t.canonicalize()), Q::one());
        }
        out
    })
}

/// γ_{v⋄} for v chosen by `sel`.
pub fn detach(c: &FormCombo, sel: NodeSelector) -> Result<MarkedCombo, AlgebraError> {
    selected(c, sel)?;
    let mut out = MarkedCombo::zero();
    for (k, v) in c.iter() {
        let f = k.forest();
        let m = MarkedForest::detach_at(&f, sel.pick(&f).unwrap())?;
        out.add_term(MarkedKey::new(&m.canonicalize()), v.clone());
    }
    Ok(out)
}

/// D^q on marked forests.
pub fn marked_d(c: &MarkedCombo, q: usize) -> MarkedCombo {
    marked_linear(c, |m| m.derivative(q))
}

/// D^{k→v} onto the marked node.
pub fn marked_d_to_mark(c: &MarkedCombo, k: usize) -> MarkedCombo {
    marked_linear(c, |m| m.derivative_to_mark(k))
}

/// Releases the mark (the ⋄ map), keeping the node and detached set.
pub fn release(c: &MarkedCombo) -> MarkedCombo {
    marked_linear(c, |m| vec![m.release()])
}

/// Drops all marking information.
pub fn forget(c: &MarkedCombo) -> FormCombo {
    c.map_linear(|k| FormCombo::from_forest(&k.marked().unmark()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fc(s: &str) -> FormCombo {
        FormCombo::parse(s).unwrap()
    }

    #[test]
    fn estar_block() {
        assert!(euler_estar(&fc("<b>")).unwrap().is_zero());
        assert_eq!(euler_estar(&fc("<b[b]>")).unwrap(), fc("2 * <b[o1]>"));
        assert_eq!(euler_estar(&fc("<b,b>")).unwrap(), fc("-2 * <b[o1]>"));
        assert_eq!(euler_estar(&fc("<b> <b>")).unwrap(), fc("-2 * <b[o1]>"));
        assert!(euler_estar(&fc("b")).is_err());
    }

    #[test]
    fn euler_small() {
        assert!(euler_e(&fc("<b>")).is_zero());
        assert_eq!(euler_e(&fc("<b,b>")), fc("-2 * <b[b]>"));
        assert_eq!(euler_e(&fc("<b[b]>")), fc("2 * <b[b]>"));
        assert!(euler_eq(&fc("b[b]"), 3).is_zero());
    }

    #[test]
    fn decomposition_single() {
        for s in ["b[b,b]", "<b[b]> b", "<b,b[o1]>", "b[b[b]] b"] {
            let g = fc(s);
            let n = g.keys().next().unwrap().grade().0;
            let mut total = FormCombo::zero();
            for q in 0..=n {
                total += &graft_trailing(&euler_eq(&g, q), q, q);
            }
            assert_eq!(total, g.scale(&Q::from_integer(n.into())), "{s}");
        }
    }

    #[test]
    fn marked_roundtrip() {
        let g = fc("b[b,b[b]]");
        let m = detach(&g, NodeSelector::Root(0)).unwrap();
        let back = forget(&marked_d_to_mark(&m, 2));
        assert_eq!(back, g);
    }
}

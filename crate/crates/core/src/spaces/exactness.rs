//! Exactness of the rows and columns of the (augmented) bicomplex at a
//! fixed order.

use std::fmt;

use serde::Serialize;

use super::linalg::{SpanTracker, SparseMatrix, SparseVec};
use super::{basis, matrix_dh, matrix_dv, matrix_i, OperatorMatrix, SpaceBasis};
use crate::algebra::FormCombo;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Arrow {
    /// At Ω_{n,p}, n ≥ 1, between the incoming and outgoing d_H.
    Horizontal,
    /// At Ω_{n,p}, between the incoming and outgoing d_V.
    Vertical,
    /// At Ω_{0,p}, p ≥ 1: Ker I against Im d_H.
    Interior,
    /// The Euler–Lagrange complex Ω_0 → I_1 → I_2 → …; `covertices` is
    /// the position p (0 for Ω_0).
    EulerLagrange,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExactnessEntry {
    pub arrow: Arrow,
    pub roots: usize,
    pub covertices: usize,
    pub dim: usize,
    pub kernel: usize,
    pub image: usize,
    /// A kernel element outside the image, when there is a defect.
    #[serde(serialize_with = "serialize_witness")]
    pub witness: Option<FormCombo>,
}

fn serialize_witness<S: serde::Serializer>(w: &Option<FormCombo>, s: S) -> Result<S::Ok, S::Error> {
    match w {
        Some(c) => s.serialize_some(&c.to_string()),
        None => s.serialize_none(),
    }
}

impl ExactnessEntry {
    pub fn exact(&self) -> bool {
        self.kernel == self.image
    }

    /// dim Ker − dim Im; negative when the sequence is not even a complex,
    /// which happens on the augmented column in divfree mode.
    pub fn defect(&self) -> isize {
        self.kernel as isize - self.image as isize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExactnessReport {
    pub order: usize,
    pub divfree: bool,
    pub entries: Vec<ExactnessEntry>,
}

impl ExactnessReport {
    /// Whether every entry of the given kinds is exact.
    pub fn exact_on(&self, arrows: &[Arrow]) -> bool {
        self.entries.iter().filter(|e| arrows.contains(&e.arrow)).all(|e| e.exact())
    }

    /// Exactness of the plain bicomplex, horizontal and vertical.
    pub fn bicomplex_exact(&self) -> bool {
        self.exact_on(&[Arrow::Horizontal, Arrow::Vertical])
    }

    pub fn defects(&self) -> Vec<&ExactnessEntry> {
        self.entries.iter().filter(|e| !e.exact()).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("order,divfree,arrow,n,p,dim,kernel,image,exact,witness\n");
        for e in &self.entries {
            s.push_str(&format!(
                "{},{},{:?},{},{},{},{},{},{},\"{}\"\n",
                self.order,
                self.divfree,
                e.arrow,
                e.roots,
                e.covertices,
                e.dim,
                e.kernel,
                e.image,
                e.exact(),
                e.witness.as_ref().map(|w| w.to_string()).unwrap_or_default()
            ));
        }
        s
    }
}

impl fmt::Display for ExactnessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "order {}{}", self.order, if self.divfree { " (divergence-free)" } else { "" })?;
        for e in &self.entries {
            write!(
                f,
                "  {:<14} n={} p={}  dim {:>5}  ker {:>5}  im {:>5}  {}",
                format!("{:?}", e.arrow),
                e.roots,
                e.covertices,
                e.dim,
                e.kernel,
                e.image,
                if e.exact() { "exact" } else { "DEFECT" }
            )?;
            if let Some(w) = &e.witness {
                write!(f, "  witness {w}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn witness(space: &SpaceBasis, outgoing: Option<&SparseMatrix>, incoming: &[SparseVec]) -> Option<FormCombo> {
    let mut span = SpanTracker::new();
    for c in incoming {
        span.push(c);
    }
    let kernel = match outgoing {
        Some(m) => m.kernel(),
        None => (0..space.len()).map(super::basis::unit).collect(),
    };
    kernel.iter().find(|k| !span.contains(k)).map(|k| space.combo(k))
}

fn entry(
    arrow: Arrow,
    roots: usize,
    covertices: usize,
    space: &SpaceBasis,
    outgoing: Option<&SparseMatrix>,
    incoming: &[SparseVec],
) -> ExactnessEntry {
    let dim = space.len();
    let kernel = dim - outgoing.map_or(0, |m| m.rank());
    let image = super::rank_of(incoming);
    let witness = if kernel > image { witness(space, outgoing, incoming) } else { None };
    ExactnessEntry { arrow, roots, covertices, dim, kernel, image, witness }
}

/// Independent columns of an image, as vectors in the target basis.
fn image_basis(m: &OperatorMatrix) -> Vec<SparseVec> {
    let mut span = SpanTracker::new();
    m.columns().into_iter().filter(|c| span.push(c)).collect()
}

/// Compares dim Im(incoming) with dim Ker(outgoing) at every Ω_{n,p}^N,
/// n ≤ n_max, p ≤ p_max, plus the augmented column and the
/// Euler–Lagrange complex.
pub fn exactness_report(order: usize, n_max: usize, p_max: usize, divfree: bool) -> ExactnessReport {
    let n_top = n_max.min(order);
    let mut entries = Vec::new();
    let dh = |n: usize, p: usize| (n >= 1 && n <= order).then(|| matrix_dh(order, n, p, divfree));
    let dv = |n: usize, p: usize| matrix_dv(order, n, p, divfree);

    for p in 0..=p_max {
        let mut outgoing = dh(1, p);
        for n in 1..=n_top {
            let incoming = dh(n + 1, p);
            let out = outgoing.take().expect("n ≥ 1");
            let cols = incoming.as_ref().map(|m| m.columns()).unwrap_or_default();
            entries.push(entry(Arrow::Horizontal, n, p, &out.source, Some(&out.matrix), &cols));
            outgoing = incoming;
        }
    }
    for n in 0..=n_top {
        let mut prev: Option<OperatorMatrix> = None;
        for p in 0..=p_max {
            let out = dv(n, p);
            let cols = prev.as_ref().map(|m| m.columns()).unwrap_or_default();
            entries.push(entry(Arrow::Vertical, n, p, &out.source, Some(&out.matrix), &cols));
            prev = Some(out);
        }
    }
    for p in 1..=p_max {
        let i = matrix_i(order, p, divfree);
        let cols = dh(1, p).map(|m| m.columns()).unwrap_or_default();
        entries.push(entry(Arrow::Interior, 0, p, &i.source, Some(&i.matrix), &cols));
    }
    if p_max >= 1 {
        entries.extend(euler_lagrange(order, p_max, divfree));
    }
    ExactnessReport { order, divfree, entries }
}

fn euler_lagrange(order: usize, p_max: usize, divfree: bool) -> Vec<ExactnessEntry> {
    let mut out = Vec::new();
    let scalars = basis(order, 0, 0, divfree);
    // images[p]: a basis of I_p in Ω_{0,p} coordinates; images[0] spans Ω_0.
    let mut images: Vec<Vec<SparseVec>> = vec![(0..scalars.len()).map(super::basis::unit).collect()];
    let mut deltas: Vec<Vec<SparseVec>> = Vec::new();
    for p in 0..=p_max {
        if p >= 1 {
            images.push(image_basis(&matrix_i(order, p, divfree)));
        }
        let dvm = matrix_dv(order, 0, p, divfree).matrix;
        let im = matrix_i(order, p + 1, divfree).matrix;
        let delta = im.mul(&dvm).expect("conformable");
        deltas.push(images[p].iter().map(|v| delta.mul_vec(v)).collect());
    }
    let dh1 = dh_columns(order, divfree);
    for p in 0..=p_max {
        let dim = images[p].len();
        let kernel = dim - super::rank_of(&deltas[p]);
        let image = if p == 0 { super::rank_of(&dh1) } else { super::rank_of(&deltas[p - 1]) };
        out.push(ExactnessEntry {
            arrow: Arrow::EulerLagrange,
            roots: 0,
            covertices: p,
            dim,
            kernel,
            image,
            witness: None,
        });
    }
    out
}

fn dh_columns(order: usize, divfree: bool) -> Vec<SparseVec> {
    if order == 0 {
        return Vec::new();
    }
    matrix_dh(order, 1, 0, divfree).columns()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_three_standard_is_exact() {
        let r = exactness_report(3, 3, 1, false);
        assert!(r.bicomplex_exact(), "{r}");
    }

    #[test]
    fn order_one_divfree_defect() {
        let r = exactness_report(1, 1, 1, true);
        let d: Vec<_> = r.defects().into_iter().filter(|e| e.arrow == Arrow::Horizontal).collect();
        assert_eq!(d.len(), 2, "{r}");
        assert_eq!((d[0].roots, d[0].covertices, d[0].defect()), (1, 0, 1));
        assert_eq!(d[0].witness.as_ref().unwrap().to_string(), "1 * b");
        assert!(exactness_report(2, 2, 1, true).bicomplex_exact());
    }
}

//! Exact linear algebra on the bicomplex: bases, operator matrices,
//! kernels and images, and the bases of solenoidal forms and divergences.

mod basis;
mod divergence;
mod exactness;
pub mod linalg;
mod solenoidal;

use rayon::prelude::*;
use thiserror::Error;

pub use basis::{basis, pairing, SpaceBasis};
pub use divergence::{
    annihilator_div_basis, annihilator_literal, divergence_basis, image_dual_basis, image_dual_from_matrix,
    non_self_looped_scalars, redirect_rho, self_looped_scalars,
};
pub use exactness::{exactness_report, Arrow, ExactnessEntry, ExactnessReport};
pub use linalg::{rank_of, LinalgError, SpanTracker, SparseMatrix, SparseVec};
pub use solenoidal::{
    bamboo_check, solenoidal_basis, solenoidal_generators, vp_certificate, VpCertificate, VpFailure, VpOutcome,
    VpReason,
};

use crate::algebra::{euler_e_at, graft_last, vertices_to_covertex, AlgebraError, FormCombo, NodeSelector, Q};
use crate::forest::Forest;
use crate::util::{factorial, init_thread_pool, permutations};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpacesError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("precondition fails: {0}")]
    Precondition(String),
}

/// Matrix of a linear map between two bases; column j is the image of
/// source element j.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub source: SpaceBasis,
    pub target: SpaceBasis,
    pub matrix: SparseMatrix,
}

impl OperatorMatrix {
    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    pub fn kernel_dim(&self) -> usize {
        self.source.len() - self.rank()
    }

    /// Kernel basis as forms in the source space.
    pub fn kernel(&self) -> Vec<FormCombo> {
        self.matrix.kernel().iter().map(|x| self.source.combo(x)).collect()
    }

    /// Images of the source basis in target coordinates.
    pub fn columns(&self) -> Vec<SparseVec> {
        self.matrix.columns()
    }
}

fn assemble<F>(source: SpaceBasis, target: SpaceBasis, image: F) -> OperatorMatrix
where
    F: Fn(&Forest) -> FormCombo + Sync,
{
    init_thread_pool();
    let columns: Vec<SparseVec> = source.representatives().par_iter().map(|f| target.reduce(&image(f))).collect();
    let matrix = SparseMatrix::from_columns(target.len(), &columns);
    OperatorMatrix { source, target, matrix }
}

fn root_antisymmetrised<F: Fn(&Forest) -> FormCombo>(f: &Forest, op: F) -> FormCombo {
    let n = f.num_roots();
    let norm = Q::new(1.into(), factorial(n));
    let mut out = FormCombo::zero();
    for (sigma, odd) in permutations(n) {
        let s = if odd { -norm.clone() } else { norm.clone() };
        out.add_scaled(&op(&f.permute_roots(&sigma)), &s);
    }
    out
}

/// Matrix of d_H: Ω_{n,p}^N → Ω_{n−1,p}^N; requires n ≥ 1.
pub fn matrix_dh(order: usize, roots: usize, covertices: usize, divfree: bool) -> OperatorMatrix {
    assert!(roots >= 1, "d_H needs at least one root");
    assemble(
        basis(order, roots, covertices, divfree),
        basis(order, roots - 1, covertices, divfree),
        |f| root_antisymmetrised(f, graft_last),
    )
}

/// Matrix of d_V: Ω_{n,p}^N → Ω_{n,p+1}^N.
pub fn matrix_dv(order: usize, roots: usize, covertices: usize, divfree: bool) -> OperatorMatrix {
    assemble(
        basis(order, roots, covertices, divfree),
        basis(order, roots, covertices + 1, divfree),
        vertices_to_covertex,
    )
}

/// Matrix of the interior Euler operator on Ω_{0,p}^N, p ≥ 1.
pub fn matrix_i(order: usize, covertices: usize, divfree: bool) -> OperatorMatrix {
    assert!(covertices >= 1, "I needs at least one covertex");
    let p = covertices;
    let norm = Q::new(1.into(), factorial(p));
    let perms = permutations(p);
    assemble(basis(order, 0, p, divfree), basis(order, 0, p, divfree), |f| {
        let mut out = FormCombo::zero();
        for (tau, odd) in &perms {
            let map: Vec<u32> = tau.iter().map(|&t| t as u32 + 1).collect();
            let g = FormCombo::from_forest(&f.relabel_covertices(&map));
            let e = euler_e_at(&g, NodeSelector::Covertex(p as u32)).expect("covertex p");
            let s = if *odd { -norm.clone() } else { norm.clone() };
            out.add_scaled(&e, &s);
        }
        out
    })
}

/// dim Ker(d_H|Ω_{n,p}^N).
pub fn kernel_dim_dh(order: usize, roots: usize, covertices: usize, divfree: bool) -> usize {
    matrix_dh(order, roots, covertices, divfree).kernel_dim()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_ranks() {
        assert_eq!(matrix_dh(2, 1, 0, false).rank(), 2);
        assert_eq!(matrix_dh(1, 1, 0, false).rank(), 1);
        assert_eq!(kernel_dim_dh(3, 1, 0, false), 1);
        assert_eq!(kernel_dim_dh(4, 1, 0, false), 3);
        assert_eq!(kernel_dim_dh(5, 1, 0, true), 7);
    }

    #[test]
    fn matrix_matches_operator() {
        let m = matrix_dh(4, 2, 0, false);
        for j in 0..m.source.len() {
            let image = crate::algebra::d_h(&m.source.element(j)).unwrap();
            assert_eq!(m.target.combo(&m.matrix.column(j)), image);
        }
        let v = matrix_dv(3, 1, 1, false);
        for j in 0..v.source.len() {
            let image = crate::algebra::d_v(&v.source.element(j)).unwrap();
            assert_eq!(v.target.combo(&v.matrix.column(j)), image);
        }
        let i = matrix_i(3, 2, false);
        for j in 0..i.source.len() {
            let image = crate::algebra::interior_euler(&i.source.element(j)).unwrap();
            assert_eq!(i.target.combo(&i.matrix.column(j)), image);
        }
    }
}

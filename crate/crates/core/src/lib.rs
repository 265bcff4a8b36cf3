//! Aromatic forests, aromatic forms and the divergence calculus on them.

pub mod acceptance;
pub mod algebra;
pub mod evaldiff;
pub mod forest;
pub mod genfun;
pub mod homotopy;
pub mod spaces;
pub mod util;

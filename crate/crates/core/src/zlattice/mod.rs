//! Exact integer linear algebra over Z.

pub mod lattice;
pub mod matrix;
pub mod normal;
pub mod reduce;
pub mod sparse;
pub mod vector;
pub mod wedge;

pub use lattice::Lattice;
pub use matrix::IntMatrix;
pub use normal::{hnf_with_transform, snf_with_transform, HnfDecomposition, SnfDecomposition};
pub use reduce::{reduce_basis, reduce_lattice, ReducedBasis};
pub use vector::AbVec;
pub use wedge::{wedge, wedge_change_basis, wedge_mod_subgroup, Wedge};

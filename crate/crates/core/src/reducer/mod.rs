//! Reduction of an orientable quadratic equation to finitely many abelian
//! problems: choose `w̄`, then a lattice `L`, then solve in `Λ²(L / Q)`.

pub mod lenum;
pub mod reduced;
pub mod system;
pub mod wbar;

use thiserror::Error;

pub use lenum::{b19_bound, enumerate_l, enumerate_l_bounded, find_seeds, LCandidates, LCaps};
pub use reduced::{build_reduced, ReducedProblem};
pub use system::{build_system, repair_wbar, ReductionSystem};
pub use wbar::{enumerate_wbars, l1_ball, wbar_count, wbar_radius, WbarTuple};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReduceError {
    #[error("coefficient images sum to {0:?}, not zero")]
    AbelianObstruction(Vec<i64>),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

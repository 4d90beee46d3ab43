pub mod cli;
pub mod lifter;
pub mod mgroup;
pub mod qnormal;
pub mod reducer;
pub mod wedgesolve;
pub mod zlattice;

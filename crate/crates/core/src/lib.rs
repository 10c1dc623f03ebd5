//! Exact root-system computations on partial flag manifolds and their
//! invariant generalized complex structures.

pub mod catalog;
pub mod flagdecomp;
pub mod gcstruct;
pub mod invariance;
pub mod nijenhuis;
pub mod numeric;
pub mod reports;
pub mod rootsys;

pub use numeric::{GaussQ, Matrix, Q};
pub use rootsys::{build_root_system, Family, LieType, Root, RootId, RootSystem, SignConvention, SignedRoot};

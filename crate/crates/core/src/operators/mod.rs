//! Lattices, coin profiles and the walk operators built from them.

mod banded;
mod build;
mod coin;
pub mod config;
mod lattice;
mod sublattice;
mod symmetry;

pub use banded::BandedMatrix;
pub use build::{build_operator, Angle, CoinFamily, Step, WalkKind, WalkOperator, WalkSpec};
pub use coin::{CoinAngles, CoinProfile, Layout, SLOT_THETA1, SLOT_THETA2, SLOT_THETA2_SHIFTED};
pub use lattice::{Boundary, Lattice};
pub use sublattice::{sublattice_reorder, BlockForm, SublatticeSplit, BLOCK_RTOL};
pub use symmetry::{
    unitarity_residual, verify_symmetries, Relation, SymmetryOperator, SymmetryReport, SIGMA0, SIGMA1, SIGMA3,
    SYMMETRY_RTOL,
};

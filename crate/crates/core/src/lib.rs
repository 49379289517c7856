//! Non-unitary PT-symmetric quantum walks: operator construction, bulk
//! topology, finite-system spectra, perturbations and dynamics.

pub mod bulk;
pub mod dynamics;
pub mod error;
pub mod io;
pub mod operators;
pub mod perturbation;
pub mod spectrum;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use operators::{
    build_operator, Boundary, CoinAngles, CoinProfile, Lattice, Layout, WalkKind, WalkOperator, WalkSpec,
};

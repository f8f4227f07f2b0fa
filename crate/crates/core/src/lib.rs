//! Spectra of the Sierpiński-type self-affine measures `μ_{A,D}` with
//! `A = diag(3q1, 3q2)` and `D = {(0,0), (1,0), (0,1)}`.
//!
//! The crate builds candidate spectra from tree mappings, certifies their
//! orthogonality exactly, gathers numerical completeness evidence, and
//! estimates Beurling, entropy and Hausdorff dimensions.

pub mod adic;
pub mod construct;
pub mod dimension;
pub mod error;
pub mod fourier;
pub mod lattice;
pub mod pattern;
pub mod treemap;
pub mod verify;

pub use adic::{AdicPoint, Kick};
pub use error::{Error, Result};
pub use lattice::{Digit, LatticeVec, MatrixParams};

//! C0 interior penalty discretization of the clamped biharmonic problem on
//! triangular meshes, with polynomial-preserving Hessian recovery, a
//! recovery-based error estimator and the convergence/adaptivity studies
//! built on top of them.
//!
//! The pipeline is `mesh` -> `fem` -> `c0ip` -> `linalg` -> `recovery` ->
//! `adapt` / `bench`.

pub mod adapt;
pub mod bench;
pub mod c0ip;
pub mod error;
pub mod fem;
pub mod linalg;
pub mod mesh;
pub mod recovery;

pub use error::{Error, Result};

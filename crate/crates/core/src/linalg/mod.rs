//! Sparse symmetric matrices and SPD solvers.

mod solver;
mod sparse;

pub use solver::{
    accurate_residual, rounding_floor, spd_solve, DirectCholesky, JacobiPcg, LinearSolver, SolverRegistry, DEFAULT_TOL,
};
pub use sparse::{axpy, dot, matvec, norm2, SparseSymMatrix};

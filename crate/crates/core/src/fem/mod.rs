//! Continuous Lagrange finite element spaces.

mod basis;
mod function;
mod quadrature;
mod space;

pub use basis::{
    check_degree, eval_basis, to_cartesian, BaryEval, BasisEval, LagrangeBasis, Mat2, Vec2,
    REFERENCE_GRAD_LAMBDA, SUPPORTED_DEGREES,
};
pub use function::{FeFunction, Jet};
pub use quadrature::{gauss_legendre, quadrature_for, QuadratureKind, QuadratureRule, MAX_DEGREE};
pub use space::{ElementGeometry, FeSpace, NodeKind, TypeSignature};

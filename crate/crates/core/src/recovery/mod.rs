//! Polynomial preserving recovery of gradients and Hessians.
//!
//! At every node `z` a polynomial of degree `k + 1` is fitted in the least
//! squares sense to the nodal values on a patch around `z`; its gradient
//! at `z` is the recovered gradient. Applying the recovery to each
//! recovered gradient component gives the recovered Hessian.

mod patch;

pub use patch::{build_patch, fit_polynomial, monomial_exponents, PatchSeed, RecoveryOptions, RecoveryPatch, DEFAULT_CONDITION_CAP};

use crate::error::{Error, Result};
use crate::fem::{FeFunction, FeSpace, Mat2};
use rayon::prelude::*;
use std::io::Write;
use std::sync::Arc;

/// Recovered gradient at one node as a linear combination of the nodal
/// values at `samples`.
#[derive(Debug, Clone)]
pub struct NodeStencil {
    pub samples: Vec<usize>,
    pub wx: Vec<f64>,
    pub wy: Vec<f64>,
}

/// The gradient recovery operator of a space, stored as one stencil per
/// node so it can be applied repeatedly.
#[derive(Debug, Clone)]
pub struct GradientRecovery {
    space: Arc<FeSpace>,
    stencils: Vec<NodeStencil>,
    fallbacks: usize,
    max_condition: f64,
}

impl GradientRecovery {
    pub fn new(space: Arc<FeSpace>, options: RecoveryOptions) -> Result<Self> {
        let ctx = patch::PatchContext::new(&space);
        let built: Vec<(NodeStencil, bool, f64)> = (0..space.n_dofs())
            .into_par_iter()
            .map(|z| {
                let p = ctx.build(&space, z, options)?;
                let (wx, wy) = p.gradient_weights(&space)?;
                Ok((NodeStencil { samples: p.samples.clone(), wx, wy }, p.fell_back, p.condition))
            })
            .collect::<Result<_>>()?;
        let fallbacks = built.iter().filter(|b| b.1).count();
        let max_condition = built.iter().map(|b| b.2).fold(0.0, f64::max);
        Ok(Self { space, stencils: built.into_iter().map(|b| b.0).collect(), fallbacks, max_condition })
    }

    pub fn space(&self) -> &Arc<FeSpace> {
        &self.space
    }

    pub fn stencil(&self, z: usize) -> &NodeStencil {
        &self.stencils[z]
    }

    /// Nodes where same-type sampling could not be used.
    pub fn fallback_count(&self) -> usize {
        self.fallbacks
    }

    /// Largest normal-matrix condition number over all patches.
    pub fn max_condition(&self) -> f64 {
        self.max_condition
    }

    fn check(&self, u: &FeFunction) -> Result<()> {
        if !Arc::ptr_eq(u.space(), &self.space) && u.coeffs().len() != self.space.n_dofs() {
            return Err(Error::DimensionMismatch { expected: self.space.n_dofs(), got: u.coeffs().len() });
        }
        Ok(())
    }

    /// `(G^x u, G^y u)`.
    pub fn gradient(&self, u: &FeFunction) -> Result<(FeFunction, FeFunction)> {
        self.check(u)?;
        let c = u.coeffs();
        let (gx, gy): (Vec<f64>, Vec<f64>) = self
            .stencils
            .par_iter()
            .map(|s| {
                let gx: f64 = s.samples.iter().zip(&s.wx).map(|(&j, w)| w * c[j]).sum();
                let gy: f64 = s.samples.iter().zip(&s.wy).map(|(&j, w)| w * c[j]).sum();
                (gx, gy)
            })
            .unzip();
        Ok((FeFunction::new(self.space.clone(), gx)?, FeFunction::new(self.space.clone(), gy)?))
    }

    /// Recovered Hessian: the gradient recovery applied to each recovered
    /// gradient component. No symmetrisation is applied.
    pub fn hessian(&self, u: &FeFunction) -> Result<HessianField> {
        let (gx, gy) = self.gradient(u)?;
        let (xx, yx) = self.gradient(&gx)?;
        let (xy, yy) = self.gradient(&gy)?;
        Ok(HessianField { xx, xy, yx, yy })
    }
}

/// Recovered Hessian, each entry a function in the original space.
/// `xy` is `G^x (G^y u)` and `yx` is `G^y (G^x u)`.
#[derive(Debug, Clone)]
pub struct HessianField {
    pub xx: FeFunction,
    pub xy: FeFunction,
    pub yx: FeFunction,
    pub yy: FeFunction,
}

impl HessianField {
    /// Value on triangle `t` at barycentric point `bary`.
    pub fn value_on(&self, t: usize, bary: [f64; 3]) -> Mat2 {
        let e = self.xx.space().basis().eval_bary(bary);
        let v = |f: &FeFunction| -> f64 {
            f.space().elem_dofs(t).iter().zip(&e.values).map(|(&d, b)| f.coeffs()[d] * b).sum()
        };
        [[v(&self.xx), v(&self.xy)], [v(&self.yx), v(&self.yy)]]
    }

    /// Nodal value at DOF `z`.
    pub fn at_node(&self, z: usize) -> Mat2 {
        [[self.xx.coeffs()[z], self.xy.coeffs()[z]], [self.yx.coeffs()[z], self.yy.coeffs()[z]]]
    }

    /// Four consecutive coefficient blocks (xx, xy, yx, yy).
    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        for f in [&self.xx, &self.xy, &self.yx, &self.yy] {
            f.write(&mut w)?;
        }
        Ok(())
    }
}

pub fn recover_gradient(u: &FeFunction, same_type: bool) -> Result<(FeFunction, FeFunction)> {
    GradientRecovery::new(u.space().clone(), RecoveryOptions { same_type, ..Default::default() })?.gradient(u)
}

pub fn recover_hessian(u: &FeFunction, same_type: bool) -> Result<HessianField> {
    GradientRecovery::new(u.space().clone(), RecoveryOptions { same_type, ..Default::default() })?.hessian(u)
}

#[cfg(test)]
mod tests;

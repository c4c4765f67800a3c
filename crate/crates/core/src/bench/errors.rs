use super::exact::ExactSolution;
use super::split::InteriorSplit;
use crate::error::{Error, Result};
use crate::fem::{quadrature_for, FeFunction, Mat2, QuadratureKind};
use crate::recovery::HessianField;
use rayon::prelude::*;

/// Pointwise matrix norm used for the interior maximum error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PointNorm {
    Frobenius,
    /// Largest absolute entry.
    #[default]
    MaxEntry,
}

impl PointNorm {
    pub fn apply(self, m: &Mat2) -> f64 {
        match self {
            PointNorm::Frobenius => m.iter().flatten().map(|v| v * v).sum::<f64>().sqrt(),
            PointNorm::MaxEntry => m.iter().flatten().fold(0.0, |a, v| a.max(v.abs())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms {
    /// `(sum_T |D²u - D²u_h|²_{0,T})^{1/2}` over all triangles.
    pub he0: f64,
    /// `(sum_{T in Ω2} |D²u - H_h u_h|²_{0,T})^{1/2}`.
    pub hre0: f64,
    /// `max_{T in Ω2} |D²u - H_h u_h|_{∞,T}`.
    pub hre_inf: f64,
}

fn diff(a: &Mat2, b: &Mat2) -> Mat2 {
    [[a[0][0] - b[0][0], a[0][1] - b[0][1]], [a[1][0] - b[1][0], a[1][1] - b[1][1]]]
}

/// Error quantities of a discrete solution and its recovered Hessian.
/// `quad_degree` defaults to `2k + 4` when `None`.
pub fn error_norms(
    u_h: &FeFunction,
    hessian: &HessianField,
    exact: &ExactSolution,
    split: &InteriorSplit,
    point_norm: PointNorm,
    quad_degree: Option<usize>,
) -> Result<ErrorNorms> {
    let space = u_h.space();
    let nt = space.mesh().n_triangles();
    if split.omega2.len() != nt {
        return Err(Error::DimensionMismatch { expected: nt, got: split.omega2.len() });
    }
    let k = space.degree();
    let rule = quadrature_for(QuadratureKind::Element, quad_degree.unwrap_or(2 * k + 4))?;
    let evals: Vec<_> = rule.points.iter().map(|&b| space.basis().eval_bary(b)).collect();
    let nodes: Vec<[f64; 3]> = (0..space.n_local()).map(|i| space.basis().node_bary(i)).collect();

    let per_element: Vec<(f64, f64, f64)> = (0..nt)
        .into_par_iter()
        .map(|t| {
            let g = space.geometry(t);
            let (mut he, mut hre, mut inf) = (0.0, 0.0, 0.0_f64);
            for ((w, e), &b) in rule.weights.iter().zip(&evals).zip(&rule.points) {
                let x = g.point(b);
                let exact_h = (exact.hess)(x);
                let d = diff(&exact_h, &u_h.local_jet(t, e).hess);
                he += w * 2.0 * g.area * PointNorm::Frobenius.apply(&d).powi(2);
                if split.omega2[t] {
                    let r = diff(&exact_h, &hessian.value_on(t, b));
                    hre += w * 2.0 * g.area * PointNorm::Frobenius.apply(&r).powi(2);
                    inf = inf.max(point_norm.apply(&r));
                }
            }
            if split.omega2[t] {
                for &b in &nodes {
                    let r = diff(&(exact.hess)(g.point(b)), &hessian.value_on(t, b));
                    inf = inf.max(point_norm.apply(&r));
                }
            }
            (he, hre, inf)
        })
        .collect();

    Ok(ErrorNorms {
        he0: per_element.iter().map(|e| e.0).sum::<f64>().sqrt(),
        hre0: per_element.iter().map(|e| e.1).sum::<f64>().sqrt(),
        hre_inf: per_element.iter().map(|e| e.2).fold(0.0, f64::max),
    })
}

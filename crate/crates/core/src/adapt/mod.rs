//! Recovery-based error estimation and adaptive refinement.

mod marking;

pub use marking::{dorfler_mark, MarkingConvention};

use crate::bench::ExactSolution;
use crate::c0ip::{default_gamma, solve_clamped, AssembledSystem};
use crate::error::{Error, Result};
use crate::fem::{quadrature_for, FeFunction, FeSpace, Mat2, QuadratureKind};
use crate::linalg::{SolverRegistry, DEFAULT_TOL};
use crate::mesh::{refine_bisection, Triangulation};
use crate::recovery::{GradientRecovery, HessianField, RecoveryOptions};
use rayon::prelude::*;
use std::io::Write;
use std::sync::Arc;

/// Per-triangle estimator values.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorField {
    pub eta: Vec<f64>,
}

impl EstimatorField {
    pub fn total(&self) -> f64 {
        self.eta.iter().map(|e| e * e).sum::<f64>().sqrt()
    }
}

fn frob2_diff(a: &Mat2, b: &Mat2) -> f64 {
    (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| (a[i][j] - b[i][j]).powi(2)).sum()
}

/// `sum_q w_q |A(x_q) - D²u_h(x_q)|²` per triangle, for a matrix field `A`.
fn elementwise<F>(u_h: &FeFunction, degree: usize, field: F) -> Result<Vec<f64>>
where
    F: Fn(usize, [f64; 3], crate::mesh::Point2) -> Mat2 + Sync,
{
    let space = u_h.space();
    let rule = quadrature_for(QuadratureKind::Element, degree)?;
    let evals: Vec<_> = rule.points.iter().map(|&b| space.basis().eval_bary(b)).collect();
    Ok((0..space.mesh().n_triangles())
        .into_par_iter()
        .map(|t| {
            let g = space.geometry(t);
            rule.weights
                .iter()
                .zip(&evals)
                .zip(&rule.points)
                .map(|((w, e), &b)| w * 2.0 * g.area * frob2_diff(&field(t, b, g.point(b)), &u_h.local_jet(t, e).hess))
                .sum::<f64>()
        })
        .collect())
}

/// `η_T = |H_h u_h - D²u_h|_{0,T}` (Frobenius), integrated exactly with a
/// degree `2k` rule.
pub fn estimate(u_h: &FeFunction, hessian: &HessianField) -> Result<EstimatorField> {
    let k = u_h.space().degree();
    let sq = elementwise(u_h, 2 * k, |t, b, _| hessian.value_on(t, b))?;
    Ok(EstimatorField { eta: sq.into_iter().map(f64::sqrt).collect() })
}

/// Broken H² seminorm error `(sum_T |D²u - D²u_h|²_{0,T})^{1/2}`.
pub fn h2_error(u_h: &FeFunction, exact_hessian: impl Fn(crate::mesh::Point2) -> Mat2 + Sync) -> Result<f64> {
    let k = u_h.space().degree();
    Ok(elementwise(u_h, 2 * k + 4, |_, _, x| exact_hessian(x))?.iter().sum::<f64>().sqrt())
}

/// Effectivity index: estimated over true broken H² error.
pub fn effectivity(
    estimator: &EstimatorField,
    u_h: &FeFunction,
    exact_hessian: impl Fn(crate::mesh::Point2) -> Mat2 + Sync,
) -> Result<f64> {
    let err = h2_error(u_h, exact_hessian)?;
    if err == 0.0 {
        return Err(Error::UndefinedEffectivity);
    }
    Ok(estimator.total() / err)
}

/// Problem data for the adaptive loop. `f`, `g_d`, `g_n` are taken from
/// `data`; errors and effectivities are only reported when `exact_known`.
#[derive(Debug, Clone)]
pub struct AdaptiveProblem {
    pub initial_mesh: Triangulation,
    pub degree: usize,
    pub gamma: Option<f64>,
    pub data: ExactSolution,
    pub exact_known: bool,
}

#[derive(Debug, Clone)]
pub struct AdaptOptions {
    pub theta: f64,
    pub max_dofs: usize,
    pub convention: MarkingConvention,
    pub max_iterations: usize,
    pub solver: String,
    pub same_type: bool,
}

impl Default for AdaptOptions {
    fn default() -> Self {
        Self {
            theta: 0.5,
            max_dofs: 50_000,
            convention: MarkingConvention::default(),
            max_iterations: 200,
            solver: "direct".into(),
            same_type: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptRecord {
    pub iter: usize,
    pub dofs: usize,
    pub triangles: usize,
    pub eta_total: f64,
    pub h2_error: Option<f64>,
    pub kappa: Option<f64>,
}

/// State handed to the per-iteration callback.
pub struct IterationState<'a> {
    pub record: &'a AdaptRecord,
    pub solution: &'a FeFunction,
    pub system: &'a AssembledSystem,
    pub estimator: &'a EstimatorField,
    pub marked: &'a std::collections::BTreeSet<usize>,
}

fn dof_count(mesh: &Triangulation, k: usize) -> usize {
    mesh.n_vertices() + (k - 1) * mesh.n_edges() + (k - 1) * (k - 2) / 2 * mesh.n_triangles()
}

/// Solve, estimate, mark and refine until the next mesh would exceed
/// `max_dofs` (the initial mesh is always solved).
pub fn adaptive_loop(
    problem: &AdaptiveProblem,
    options: &AdaptOptions,
    mut on_iteration: impl FnMut(&IterationState) -> Result<()>,
) -> Result<Vec<AdaptRecord>> {
    if !(options.theta > 0.0 && options.theta <= 1.0) {
        return Err(Error::InvalidArgument(format!("theta must lie in (0, 1], got {}", options.theta)));
    }
    let k = problem.degree;
    let gamma = problem.gamma.unwrap_or_else(|| default_gamma(k));
    let solvers = SolverRegistry::default();
    let solver = solvers.get(&options.solver)?;
    let data = problem.data;
    let mut mesh = problem.initial_mesh.clone();
    let mut records = Vec::new();

    for iter in 0..options.max_iterations {
        let step = || -> Result<_> {
            let space = Arc::new(FeSpace::new(Arc::new(mesh.clone()), k)?);
            let (u_h, system) = solve_clamped(
                space.clone(),
                data.f,
                |p| data.g_d(p),
                |p, n| data.g_n(p, n),
                gamma,
                solver,
                DEFAULT_TOL,
            )?;
            let recovery = GradientRecovery::new(space, RecoveryOptions { same_type: options.same_type, ..Default::default() })?;
            let est = estimate(&u_h, &recovery.hessian(&u_h)?)?;
            let (h2, kappa) = if problem.exact_known {
                let e = h2_error(&u_h, data.hess)?;
                (Some(e), (e > 0.0).then(|| est.total() / e))
            } else {
                (None, None)
            };
            Ok((u_h, system, est, h2, kappa))
        };
        let (u_h, system, est, h2_error, kappa) = step().map_err(|e| e.context(format!("adaptive iteration {iter}")))?;
        let record = AdaptRecord {
            iter,
            dofs: u_h.coeffs().len(),
            triangles: mesh.n_triangles(),
            eta_total: est.total(),
            h2_error,
            kappa,
        };
        let marked = dorfler_mark(&est, options.theta, options.convention);
        on_iteration(&IterationState { record: &record, solution: &u_h, system: &system, estimator: &est, marked: &marked })?;
        records.push(record);
        if marked.is_empty() {
            break;
        }
        let next = refine_bisection(&mesh, &marked)?;
        if dof_count(&next, k) > options.max_dofs {
            break;
        }
        mesh = next;
    }
    Ok(records)
}

pub const ADAPT_HEADER: &str = "iter,dofs,eta_total,h2_error,kappa";

pub fn write_adapt_csv<W: Write>(mut w: W, records: &[AdaptRecord]) -> Result<()> {
    writeln!(w, "{ADAPT_HEADER}")?;
    let opt = |v: Option<f64>| v.map_or_else(String::new, |v| format!("{v:.6e}"));
    for r in records {
        writeln!(w, "{},{},{:.6e},{},{}", r.iter, r.dofs, r.eta_total, opt(r.h2_error), opt(r.kappa))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests;

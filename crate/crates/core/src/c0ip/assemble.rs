use super::trace::{edge_rule, edge_trace, EdgeTrace};
use crate::error::{Error, Result};
use crate::fem::{quadrature_for, to_cartesian, FeFunction, FeSpace, QuadratureKind, Vec2};
use crate::linalg::{LinearSolver, SparseSymMatrix};
use crate::mesh::Point2;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Penalty parameter used when none is given: `1.5 k^2`.
pub fn default_gamma(k: usize) -> f64 {
    1.5 * (k * k) as f64
}

/// Linear system of the discrete problem. After [`apply_clamped_bc`] the
/// constrained rows and columns are identity rows carrying the prescribed
/// values in `rhs`.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub space: Arc<FeSpace>,
    pub matrix: SparseSymMatrix,
    pub rhs: Vec<f64>,
    pub constrained: BTreeMap<usize, f64>,
    pub gamma: f64,
}

type Triplets = Vec<(usize, usize, f64)>;

fn element_block(space: &FeSpace, t: usize, rule: &crate::fem::QuadratureRule, evals: &[crate::fem::BaryEval]) -> Triplets {
    let g = space.geometry(t);
    let dofs = space.elem_dofs(t);
    let n = dofs.len();
    let mut local = vec![0.0; n * n];
    for (w, e) in rule.weights.iter().zip(evals) {
        let hs = to_cartesian(e, &g.grad_lambda).hessians;
        let scale = w * 2.0 * g.area;
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (&hs[i], &hs[j]);
                local[i * n + j] +=
                    scale * (a[0][0] * b[0][0] + a[0][1] * b[0][1] + a[1][0] * b[1][0] + a[1][1] * b[1][1]);
            }
        }
    }
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            out.push((dofs[i], dofs[j], local[i * n + j]));
        }
    }
    out
}

/// Per-point average and jump coefficients of the local basis functions
/// on an edge, together with the matching global DOFs.
pub(crate) fn edge_coefficients(space: &FeSpace, tr: &EdgeTrace) -> (Vec<usize>, Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let mut dofs = space.elem_dofs(tr.minus.triangle).to_vec();
    let nq = tr.minus.dn.len();
    let (mut avg, mut jump) = (vec![Vec::new(); nq], vec![Vec::new(); nq]);
    match &tr.plus {
        Some(plus) => {
            dofs.extend_from_slice(space.elem_dofs(plus.triangle));
            for q in 0..nq {
                avg[q] = tr.minus.dnn[q].iter().chain(&plus.dnn[q]).map(|v| 0.5 * v).collect();
                jump[q] = tr.minus.dn[q].iter().map(|v| -v).chain(plus.dn[q].iter().copied()).collect();
            }
        }
        None => {
            for q in 0..nq {
                avg[q] = tr.minus.dnn[q].clone();
                jump[q] = tr.minus.dn[q].iter().map(|v| -v).collect();
            }
        }
    }
    (dofs, avg, jump)
}

fn edge_block(space: &FeSpace, tr: &EdgeTrace, gamma: f64, weights: &[f64]) -> Triplets {
    let (dofs, avg, jump) = edge_coefficients(space, tr);
    let n = dofs.len();
    let h = tr.length;
    let mut local = vec![0.0; n * n];
    for (q, w) in weights.iter().enumerate() {
        let (a, c) = (&avg[q], &jump[q]);
        let scale = w * h;
        for i in 0..n {
            for j in 0..n {
                local[i * n + j] += scale * (a[j] * c[i] + c[j] * a[i] + gamma / h * c[j] * c[i]);
            }
        }
    }
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            out.push((dofs[i], dofs[j], local[i * n + j]));
        }
    }
    out
}

/// Matrix of the interior penalty form, `A[i][j] = B_h(phi_j, phi_i)`.
pub fn assemble_bilinear(space: &FeSpace, gamma: f64) -> Result<SparseSymMatrix> {
    assemble_bilinear_oriented(space, gamma, &[])
}

/// Same as [`assemble_bilinear`], but every interior edge `e` with
/// `flipped[e]` set is processed with its two triangles swapped and its
/// normal reversed. The result must not depend on `flipped`.
pub fn assemble_bilinear_oriented(space: &FeSpace, gamma: f64, flipped: &[bool]) -> Result<SparseSymMatrix> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidArgument(format!("penalty parameter must be positive, got {gamma}")));
    }
    let k = space.degree();
    let rule = quadrature_for(QuadratureKind::Element, 2 * k)?;
    let evals: Vec<_> = rule.points.iter().map(|&p| space.basis().eval_bary(p)).collect();
    let erule = edge_rule(space, 2 * k)?;
    let mesh = space.mesh();

    let elements: Vec<Triplets> =
        (0..mesh.n_triangles()).into_par_iter().map(|t| element_block(space, t, &rule, &evals)).collect();
    let edges: Vec<Triplets> = (0..mesh.n_edges())
        .into_par_iter()
        .map(|e| {
            let tr = edge_trace(space, e, flipped.get(e).copied().unwrap_or(false), &erule);
            edge_block(space, &tr, gamma, &erule.weights)
        })
        .collect();
    let triplets: Triplets = elements.into_iter().chain(edges).flatten().collect();
    SparseSymMatrix::from_triplets(space.n_dofs(), &triplets)
}

/// Load vector `b[i] = (f, phi_i)`.
pub fn assemble_load(space: &FeSpace, f: impl Fn(Point2) -> f64 + Sync) -> Result<Vec<f64>> {
    let k = space.degree();
    let rule = quadrature_for(QuadratureKind::Element, 2 * k + 2)?;
    let evals: Vec<_> = rule.points.iter().map(|&p| space.basis().eval_bary(p)).collect();
    let blocks: Vec<Vec<(usize, f64)>> = (0..space.mesh().n_triangles())
        .into_par_iter()
        .map(|t| {
            let g = space.geometry(t);
            let dofs = space.elem_dofs(t);
            let mut local = vec![0.0; dofs.len()];
            for ((w, e), &bary) in rule.weights.iter().zip(&evals).zip(&rule.points) {
                let x = g.point(bary);
                let fx = f(x);
                if !fx.is_finite() {
                    return Err(Error::NonFinite { value: fx, x: x.x, y: x.y });
                }
                for (l, v) in local.iter_mut().zip(&e.values) {
                    *l += w * 2.0 * g.area * fx * v;
                }
            }
            Ok(dofs.iter().copied().zip(local).collect())
        })
        .collect::<Result<_>>()?;
    let mut b = vec![0.0; space.n_dofs()];
    for (d, v) in blocks.into_iter().flatten() {
        b[d] += v;
    }
    Ok(b)
}

pub fn assemble_system(space: Arc<FeSpace>, f: impl Fn(Point2) -> f64 + Sync, gamma: f64) -> Result<AssembledSystem> {
    let matrix = assemble_bilinear(&space, gamma)?;
    let rhs = assemble_load(&space, f)?;
    Ok(AssembledSystem { space, matrix, rhs, constrained: BTreeMap::new(), gamma })
}

/// Imposes `u = g_d` strongly at the boundary nodes and `du/dn = g_n`
/// weakly through the boundary edge terms. `g_n` receives the point and
/// the outward unit normal.
pub fn apply_clamped_bc(
    system: AssembledSystem,
    g_d: impl Fn(Point2) -> f64,
    g_n: impl Fn(Point2, Vec2) -> f64,
) -> Result<AssembledSystem> {
    let AssembledSystem { space, matrix, mut rhs, gamma, .. } = system;
    let mesh = space.mesh();
    let erule = edge_rule(&space, 2 * space.degree())?;

    for e in (0..mesh.n_edges()).filter(|&e| mesh.edges()[e].is_boundary()) {
        let tr = edge_trace(&space, e, false, &erule);
        let g = space.geometry(tr.minus.triangle);
        let dofs = space.elem_dofs(tr.minus.triangle);
        for (q, w) in erule.weights.iter().enumerate() {
            let x = g.point(tr.minus.bary[q]);
            let gn = g_n(x, tr.normal);
            if !gn.is_finite() {
                return Err(Error::NonFinite { value: gn, x: x.x, y: x.y });
            }
            // {phi_nn} [g] + gamma/|E| [g] [phi_n] with [g] = -g_n, [phi_n] = -phi_n
            for (i, &d) in dofs.iter().enumerate() {
                rhs[d] += w * tr.length * (-gn * tr.minus.dnn[q][i] + gamma / tr.length * gn * tr.minus.dn[q][i]);
            }
        }
    }

    let mut constrained = BTreeMap::new();
    for d in space.boundary_dofs() {
        let p = space.node_coords()[d];
        let v = g_d(p);
        if !v.is_finite() {
            return Err(Error::NonFinite { value: v, x: p.x, y: p.y });
        }
        constrained.insert(d, v);
    }

    let n = space.n_dofs();
    let mut triplets = Vec::with_capacity(matrix.nnz());
    for i in 0..n {
        if let Some(&gi) = constrained.get(&i) {
            triplets.push((i, i, 1.0));
            rhs[i] = gi;
            continue;
        }
        for (j, v) in matrix.row(i) {
            match constrained.get(&j) {
                Some(&gj) => rhs[i] -= v * gj,
                None => triplets.push((i, j, v)),
            }
        }
    }
    let matrix = SparseSymMatrix::from_triplets(n, &triplets)?;
    Ok(AssembledSystem { space, matrix, rhs, constrained, gamma })
}

/// Assembles and solves the clamped problem `Δ²u = f`, `u = g_d`,
/// `du/dn = g_n` on the boundary.
pub fn solve_clamped(
    space: Arc<FeSpace>,
    f: impl Fn(Point2) -> f64 + Sync,
    g_d: impl Fn(Point2) -> f64,
    g_n: impl Fn(Point2, Vec2) -> f64,
    gamma: f64,
    solver: &dyn LinearSolver,
    tol: f64,
) -> Result<(FeFunction, AssembledSystem)> {
    let system = apply_clamped_bc(assemble_system(space.clone(), f, gamma)?, g_d, g_n)?;
    let x = solver.solve(&system.matrix, &system.rhs, tol)?;
    Ok((FeFunction::new(space, x)?, system))
}

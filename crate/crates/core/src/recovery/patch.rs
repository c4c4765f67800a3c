use crate::error::{Error, Result};
use crate::fem::{FeSpace, NodeKind};
use crate::mesh::Point2;
use nalgebra::{DMatrix, DVector};
use std::collections::BTreeSet;

/// Largest accepted condition number of the scaled normal matrix.
pub const DEFAULT_CONDITION_CAP: f64 = 1e8;

/// Extra rings tried for same-type sampling beyond the ring at which
/// all-node sampling first succeeds.
const SAME_TYPE_EXTRA_RINGS: usize = 3;

/// Initial element set of a patch before any growth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PatchSeed {
    /// Triangles containing the node.
    NodeElements,
    /// Union of the vertex patches of the simplex carrying the node; equal
    /// to `NodeElements` at vertices.
    #[default]
    CarrierVertices,
}

#[derive(Debug, Clone, Copy)]
pub struct RecoveryOptions {
    /// Sample only nodes of the same kind as the patch center.
    pub same_type: bool,
    pub condition_cap: f64,
    pub seed: PatchSeed,
}

impl Default for RecoveryOptions {
    fn default() -> Self {
        Self { same_type: false, condition_cap: DEFAULT_CONDITION_CAP, seed: PatchSeed::default() }
    }
}

/// Exponents `(a, b)` of the monomials `x^a y^b` of total degree at most
/// `d`, ordered by degree then by decreasing `a`.
pub fn monomial_exponents(d: usize) -> Vec<(usize, usize)> {
    (0..=d).flat_map(|s| (0..=s).rev().map(move |a| (a, s - a))).collect()
}

#[derive(Debug, Clone)]
pub struct RecoveryPatch {
    pub node: usize,
    /// Center of the sample bounding box; the fit uses coordinates
    /// `(x - origin) / local_scale`, which lie in `[-1, 1]^2`.
    pub origin: Point2,
    pub elements: Vec<usize>,
    pub samples: Vec<usize>,
    /// Half the larger side of the sample bounding box.
    pub local_scale: f64,
    /// Condition number of the normal matrix in scaled coordinates.
    pub condition: f64,
    /// Same-type sampling was requested but all nodes had to be used.
    pub fell_back: bool,
    pub fit_degree: usize,
}

impl RecoveryPatch {
    fn scaled(&self, p: &Point2) -> (f64, f64) {
        ((p.x - self.origin.x) / self.local_scale, (p.y - self.origin.y) / self.local_scale)
    }

    fn vandermonde(&self, space: &FeSpace) -> DMatrix<f64> {
        let exps = monomial_exponents(self.fit_degree);
        DMatrix::from_fn(self.samples.len(), exps.len(), |i, j| {
            let (x, y) = self.scaled(&space.node_coords()[self.samples[i]]);
            let (a, b) = exps[j];
            x.powi(a as i32) * y.powi(b as i32)
        })
    }

    /// Evaluates a fitted polynomial (coefficients from [`fit_polynomial`])
    /// at a physical point.
    pub fn eval_poly(&self, coeffs: &[f64], p: &Point2) -> f64 {
        let (x, y) = self.scaled(p);
        monomial_exponents(self.fit_degree)
            .iter()
            .zip(coeffs)
            .map(|(&(a, b), c)| c * x.powi(a as i32) * y.powi(b as i32))
            .sum()
    }

    /// Weights `w` with `sum_j w_j u(z_j)` equal to the gradient of the
    /// fitted polynomial at the patch node.
    pub(crate) fn gradient_weights(&self, space: &FeSpace) -> Result<(Vec<f64>, Vec<f64>)> {
        let (q, r) = thin_qr(self, space)?;
        let (x, y) = self.scaled(&space.node_coords()[self.node]);
        let pw = |v: f64, e: usize| if e == 0 { 0.0 } else { e as f64 * v.powi(e as i32 - 1) };
        let exps = monomial_exponents(self.fit_degree);
        let dx = DVector::from_iterator(exps.len(), exps.iter().map(|&(a, b)| pw(x, a) * y.powi(b as i32) / self.local_scale));
        let dy = DVector::from_iterator(exps.len(), exps.iter().map(|&(a, b)| x.powi(a as i32) * pw(y, b) / self.local_scale));
        // gradient = d^T R^-1 Q^T u, so the weights are Q R^-T d
        let rt = r.transpose();
        let weights = |d: &DVector<f64>| -> Result<Vec<f64>> {
            let t = rt.solve_lower_triangular(d).ok_or(Error::SingularFit(self.node))?;
            Ok((&q * t).iter().copied().collect())
        };
        Ok((weights(&dx)?, weights(&dy)?))
    }
}

fn thin_qr(patch: &RecoveryPatch, space: &FeSpace) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let qr = patch.vandermonde(space).qr();
    let r = qr.r();
    let dmax = r.diagonal().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if r.diagonal().iter().any(|v| v.abs() <= dmax * 1e-14) {
        return Err(Error::SingularFit(patch.node));
    }
    Ok((qr.q(), r))
}

fn condition_number(space: &FeSpace, patch: &RecoveryPatch) -> f64 {
    // V and R share their singular values; R is small and square
    let s = patch.vandermonde(space).qr().r().singular_values();
    let (smax, smin) = (s.max(), s.min());
    if smin <= 0.0 {
        f64::INFINITY
    } else {
        (smax / smin).powi(2)
    }
}

/// Least-squares fit of a degree `k + 1` polynomial to `values` (one per
/// sample), in the patch's scaled coordinates.
pub fn fit_polynomial(space: &FeSpace, patch: &RecoveryPatch, values: &[f64]) -> Result<Vec<f64>> {
    if values.len() != patch.samples.len() {
        return Err(Error::DimensionMismatch { expected: patch.samples.len(), got: values.len() });
    }
    let (q, r) = thin_qr(patch, space)?;
    let qtb = q.transpose() * DVector::from_column_slice(values);
    let c = r.solve_upper_triangular(&qtb).ok_or(Error::SingularFit(patch.node))?;
    Ok(c.iter().copied().collect())
}

pub(crate) struct PatchContext {
    vertex_triangles: Vec<Vec<usize>>,
}

impl PatchContext {
    pub(crate) fn new(space: &FeSpace) -> Self {
        Self { vertex_triangles: space.mesh().vertex_triangles() }
    }

    fn grow(&self, space: &FeSpace, elements: &BTreeSet<usize>) -> BTreeSet<usize> {
        let mut out = elements.clone();
        for &t in elements {
            for &v in &space.mesh().triangles()[t] {
                out.extend(&self.vertex_triangles[v]);
            }
        }
        out
    }

    fn make(space: &FeSpace, z: usize, elements: &BTreeSet<usize>, samples: Vec<usize>, fell_back: bool) -> RecoveryPatch {
        let pts = samples.iter().map(|&j| space.node_coords()[j]);
        let (lo, hi) = pts.fold(
            (Point2::new(f64::MAX, f64::MAX), Point2::new(f64::MIN, f64::MIN)),
            |(lo, hi), p| (Point2::new(lo.x.min(p.x), lo.y.min(p.y)), Point2::new(hi.x.max(p.x), hi.y.max(p.y))),
        );
        let local_scale = 0.5 * (hi.x - lo.x).max(hi.y - lo.y);
        let mut p = RecoveryPatch {
            node: z,
            origin: lo.midpoint(&hi),
            elements: elements.iter().copied().collect(),
            samples,
            local_scale,
            condition: f64::INFINITY,
            fell_back,
            fit_degree: space.degree() + 1,
        };
        if local_scale > 0.0 {
            p.condition = condition_number(space, &p);
        }
        p
    }

    pub(crate) fn build(&self, space: &FeSpace, z: usize, options: RecoveryOptions) -> Result<RecoveryPatch> {
        if z >= space.n_dofs() {
            return Err(Error::InvalidArgument(format!("node {z} out of range")));
        }
        let k = space.degree();
        let dim = (k + 2) * (k + 3) / 2;
        let nt = space.mesh().n_triangles();
        let kind = space.node_kind(z);
        let mut elements: BTreeSet<usize> = space.node_elements(z).iter().copied().collect();
        if options.seed == PatchSeed::CarrierVertices && !matches!(kind, NodeKind::Vertex) {
            let tris = space.mesh().triangles();
            let carrier: Vec<usize> = tris[*elements.first().expect("node without elements")]
                .iter()
                .copied()
                .filter(|v| elements.iter().all(|&t| tris[t].contains(v)))
                .collect();
            elements = carrier.iter().flat_map(|&v| self.vertex_triangles[v].iter().copied()).collect();
        }
        let mut all_ok: Option<RecoveryPatch> = None;
        let mut extra = 0;
        loop {
            let samples: Vec<usize> = elements
                .iter()
                .flat_map(|&t| space.elem_dofs(t).iter().copied())
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            if all_ok.is_none() && samples.len() >= dim {
                let p = Self::make(space, z, &elements, samples.clone(), false);
                if p.condition <= options.condition_cap {
                    if !options.same_type {
                        return Ok(p);
                    }
                    all_ok = Some(p);
                }
            }
            if options.same_type {
                let same: Vec<usize> = samples.into_iter().filter(|&j| space.node_kind(j) == kind).collect();
                if same.len() >= dim {
                    let p = Self::make(space, z, &elements, same, false);
                    if p.condition <= options.condition_cap {
                        return Ok(p);
                    }
                }
                if all_ok.is_some() {
                    extra += 1;
                    if extra > SAME_TYPE_EXTRA_RINGS {
                        break;
                    }
                }
            }
            if elements.len() == nt {
                break;
            }
            elements = self.grow(space, &elements);
        }
        match all_ok {
            Some(mut p) => {
                p.fell_back = true;
                Ok(p)
            }
            None => Err(Error::DegeneratePatch(z)),
        }
    }
}

/// Patch of node `z` with the default seed, grown by rings of vertex
/// neighbours until enough samples are available and the scaled normal
/// matrix is well conditioned.
pub fn build_patch(space: &FeSpace, z: usize, same_type: bool) -> Result<RecoveryPatch> {
    PatchContext::new(space).build(space, z, RecoveryOptions { same_type, ..Default::default() })
}

use super::sparse::{axpy, dot, matvec, norm2, SparseSymMatrix};
use crate::error::{Error, Result};
use faer::linalg::solvers::Solve;
use faer::sparse::linalg::LltError;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Col, Par, Side};
use std::collections::BTreeMap;

pub const DEFAULT_TOL: f64 = 1e-10;

/// A symmetric positive definite solver. Implementations must return `x`
/// with `|Ax - b| <= tol |b|` or an error.
pub trait LinearSolver: Send + Sync {
    fn name(&self) -> &'static str;
    fn solve(&self, a: &SparseSymMatrix, b: &[f64], tol: f64) -> Result<Vec<f64>>;
}

fn check_inputs(a: &SparseSymMatrix, b: &[f64], tol: f64) -> Result<()> {
    if b.len() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: b.len() });
    }
    if !(tol > 0.0 && tol <= 1e-6) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} outside (0, 1e-6]")));
    }
    Ok(())
}

fn residual(a: &SparseSymMatrix, x: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    let mut r = b.to_vec();
    axpy(-1.0, &matvec(a, x)?, &mut r)?;
    Ok(r)
}

/// `b - A x` with each row accumulated in doubled precision (error-free
/// products and compensated summation).
pub fn accurate_residual(a: &SparseSymMatrix, x: &[f64], b: &[f64]) -> Vec<f64> {
    (0..a.dim())
        .map(|i| {
            let (mut s, mut c) = (b[i], 0.0);
            for (j, v) in a.row(i) {
                let p = -v * x[j];
                let e = (-v).mul_add(x[j], -p);
                let t = s + p;
                c += if s.abs() >= p.abs() { (s - t) + p } else { (p - t) + s } + e;
                s = t;
            }
            s + c
        })
        .collect()
}

/// Size of the residual caused by rounding `x` and `b` to doubles,
/// `16 eps ||(|A||x| + |b|)||`. Below this no solver can do better.
pub fn rounding_floor(a: &SparseSymMatrix, x: &[f64], b: &[f64]) -> f64 {
    let abs: Vec<f64> = (0..a.dim())
        .map(|i| a.row(i).map(|(j, v)| (v * x[j]).abs()).sum::<f64>() + b[i].abs())
        .collect();
    16.0 * f64::EPSILON * norm2(&abs)
}

/// Accepts `x` when its residual meets `tol` or sits at the rounding floor.
/// Returns the relative residual on rejection.
fn accept(a: &SparseSymMatrix, x: &[f64], b: &[f64], tol: f64, b_norm: f64) -> std::result::Result<(), f64> {
    let r = norm2(&accurate_residual(a, x, b));
    if r <= tol * b_norm || r <= rounding_floor(a, x, b) {
        Ok(())
    } else {
        Err(r / b_norm)
    }
}

/// Sparse Cholesky with a fill-reducing ordering, followed by a few steps
/// of iterative refinement if the residual is not yet below `tol`.
#[derive(Debug, Clone, Copy, Default)]
pub struct DirectCholesky;

impl LinearSolver for DirectCholesky {
    fn name(&self) -> &'static str {
        "direct"
    }

    fn solve(&self, a: &SparseSymMatrix, b: &[f64], tol: f64) -> Result<Vec<f64>> {
        check_inputs(a, b, tol)?;
        let n = a.dim();
        let b_norm = norm2(b);
        if n == 0 || b_norm == 0.0 {
            return Ok(vec![0.0; n]);
        }
        faer::set_global_parallelism(Par::Seq);
        let triplets: Vec<Triplet<usize, usize, f64>> =
            a.lower_triplets().map(|(i, j, v)| Triplet::new(i, j, v)).collect();
        let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
            .map_err(|e| Error::InvalidArgument(format!("sparse matrix construction failed: {e:?}")))?;
        let llt = mat.sp_cholesky(Side::Lower).map_err(|e| match e {
            LltError::Numeric(faer::linalg::cholesky::llt::factor::LltError::NonPositivePivot { index }) => {
                Error::NotPositiveDefinite { pivot: index }
            }
            LltError::Generic(g) => Error::InvalidArgument(format!("factorization failed: {g:?}")),
        })?;
        let solve = |rhs: &[f64]| -> Vec<f64> {
            let mut col = Col::<f64>::from_fn(n, |i| rhs[i]);
            llt.solve_in_place(col.as_mut());
            (0..n).map(|i| col[i]).collect()
        };
        let mut x = solve(b);
        for _ in 0..3 {
            match accept(a, &x, b, tol, b_norm) {
                Ok(()) => return Ok(x),
                Err(rel) if !rel.is_finite() => break,
                Err(_) => axpy(1.0, &solve(&accurate_residual(a, &x, b)), &mut x)?,
            }
        }
        accept(a, &x, b, tol, b_norm)
            .map(|_| x)
            .map_err(|residual| Error::NoConvergence { iterations: 3, residual })
    }
}

/// Conjugate gradients with diagonal (Jacobi) preconditioning.
#[derive(Debug, Clone, Copy)]
pub struct JacobiPcg {
    pub max_iterations: usize,
}

impl Default for JacobiPcg {
    fn default() -> Self {
        Self { max_iterations: 200_000 }
    }
}

impl LinearSolver for JacobiPcg {
    fn name(&self) -> &'static str {
        "iterative"
    }

    fn solve(&self, a: &SparseSymMatrix, b: &[f64], tol: f64) -> Result<Vec<f64>> {
        check_inputs(a, b, tol)?;
        let n = a.dim();
        let b_norm = norm2(b);
        let mut x = vec![0.0; n];
        if n == 0 || b_norm == 0.0 {
            return Ok(x);
        }
        let diag = a.diagonal();
        if let Some(i) = diag.iter().position(|&d| d <= 0.0) {
            return Err(Error::NotPositiveDefinite { pivot: i });
        }
        let precond = |r: &[f64]| -> Vec<f64> { r.iter().zip(&diag).map(|(r, d)| r / d).collect() };
        let mut r = b.to_vec();
        let mut z = precond(&r);
        let mut p = z.clone();
        let mut rz = dot(&r, &z)?;
        for it in 0..self.max_iterations {
            let ap = matvec(a, &p)?;
            let pap = dot(&p, &ap)?;
            if pap <= 0.0 {
                return Err(Error::NotPositiveDefinite { pivot: it });
            }
            let alpha = rz / pap;
            axpy(alpha, &p, &mut x)?;
            axpy(-alpha, &ap, &mut r)?;
            if norm2(&r) <= tol * b_norm || (it % 20 == 19 && norm2(&r) <= rounding_floor(a, &x, b)) {
                // guard against drift of the recursive residual
                if accept(a, &x, b, tol, b_norm).is_ok() {
                    return Ok(x);
                }
                r = accurate_residual(a, &x, b);
            }
            z = precond(&r);
            let rz_new = dot(&r, &z)?;
            let beta = rz_new / rz;
            rz = rz_new;
            p.iter_mut().zip(&z).for_each(|(pi, zi)| *pi = zi + beta * *pi);
        }
        Err(Error::NoConvergence {
            iterations: self.max_iterations,
            residual: norm2(&residual(a, &x, b)?) / b_norm,
        })
    }
}

/// Named solver strategies.
pub struct SolverRegistry {
    solvers: BTreeMap<&'static str, Box<dyn LinearSolver>>,
}

impl SolverRegistry {
    pub fn empty() -> Self {
        Self { solvers: BTreeMap::new() }
    }

    pub fn register(&mut self, solver: Box<dyn LinearSolver>) {
        self.solvers.insert(solver.name(), solver);
    }

    pub fn get(&self, name: &str) -> Result<&dyn LinearSolver> {
        self.solvers.get(name).map(|s| s.as_ref()).ok_or_else(|| {
            let known: Vec<_> = self.names().collect();
            Error::InvalidArgument(format!("unknown solver '{name}' (known: {})", known.join(", ")))
        })
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.solvers.keys().copied()
    }
}

impl Default for SolverRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(DirectCholesky));
        r.register(Box::new(JacobiPcg::default()));
        r
    }
}

/// Solves `Ax = b` with the direct solver.
pub fn spd_solve(a: &SparseSymMatrix, b: &[f64], tol: f64) -> Result<Vec<f64>> {
    DirectCholesky.solve(a, b, tol)
}

//! Lagrange shape functions of degree k on triangles, expressed in
//! barycentric coordinates.

use crate::error::{Error, Result};

pub type Vec2 = [f64; 2];
pub type Mat2 = [[f64; 2]; 2];

pub const SUPPORTED_DEGREES: [usize; 3] = [2, 3, 4];

pub fn check_degree(k: usize) -> Result<()> {
    if SUPPORTED_DEGREES.contains(&k) {
        Ok(())
    } else {
        Err(Error::UnsupportedDegree(k))
    }
}

/// Silvester polynomial `prod_{m<i} (k x - m) / (m + 1)` with its first two
/// derivatives. It is 1 at `x = i/k` and vanishes at `0, 1/k, .., (i-1)/k`.
fn silvester(k: usize, i: usize, x: f64) -> [f64; 3] {
    let (mut p, mut dp, mut ddp) = (1.0, 0.0, 0.0);
    for m in 0..i {
        let scale = 1.0 / (m as f64 + 1.0);
        let f = (k as f64 * x - m as f64) * scale;
        let df = k as f64 * scale;
        ddp = ddp * f + 2.0 * dp * df;
        dp = dp * f + p * df;
        p *= f;
    }
    [p, dp, ddp]
}

/// Basis values and barycentric derivatives at one point.
#[derive(Debug, Clone)]
pub struct BaryEval {
    pub values: Vec<f64>,
    /// `d phi / d lambda_a`
    pub d1: Vec<[f64; 3]>,
    /// `d^2 phi / d lambda_a d lambda_b`
    pub d2: Vec<[[f64; 3]; 3]>,
}

/// Degree-k Lagrange element. Local node order: the three vertices, then
/// `k - 1` nodes on each edge (edge `i` is opposite vertex `i` and runs from
/// vertex `i+1` to vertex `i+2`), then interior nodes.
#[derive(Debug, Clone)]
pub struct LagrangeBasis {
    degree: usize,
    /// Barycentric lattice multi-index of each local node, summing to `k`.
    lattice: Vec<[usize; 3]>,
}

impl LagrangeBasis {
    pub fn new(k: usize) -> Result<Self> {
        check_degree(k)?;
        let mut lattice = Vec::with_capacity((k + 1) * (k + 2) / 2);
        for v in 0..3 {
            let mut idx = [0; 3];
            idx[v] = k;
            lattice.push(idx);
        }
        for e in 0..3 {
            let (a, b) = ((e + 1) % 3, (e + 2) % 3);
            for m in 1..k {
                let mut idx = [0; 3];
                idx[a] = k - m;
                idx[b] = m;
                lattice.push(idx);
            }
        }
        for i in 1..k {
            for j in 1..k - i {
                lattice.push([k - i - j, i, j]);
            }
        }
        Ok(Self { degree: k, lattice })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.lattice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lattice.is_empty()
    }

    pub fn lattice(&self) -> &[[usize; 3]] {
        &self.lattice
    }

    /// Barycentric coordinates of local node `i`.
    pub fn node_bary(&self, i: usize) -> [f64; 3] {
        let k = self.degree as f64;
        self.lattice[i].map(|a| a as f64 / k)
    }

    pub fn n_interior(&self) -> usize {
        let k = self.degree;
        (k - 1) * (k - 2) / 2
    }

    pub fn eval_bary(&self, bary: [f64; 3]) -> BaryEval {
        let k = self.degree;
        let n = self.len();
        let mut values = Vec::with_capacity(n);
        let mut d1 = Vec::with_capacity(n);
        let mut d2 = Vec::with_capacity(n);
        for idx in &self.lattice {
            let f = [0, 1, 2].map(|a| silvester(k, idx[a], bary[a]));
            values.push(f[0][0] * f[1][0] * f[2][0]);
            let mut g = [0.0; 3];
            let mut h = [[0.0; 3]; 3];
            for a in 0..3 {
                let (b, c) = ((a + 1) % 3, (a + 2) % 3);
                g[a] = f[a][1] * f[b][0] * f[c][0];
                h[a][a] = f[a][2] * f[b][0] * f[c][0];
                h[a][b] = f[a][1] * f[b][1] * f[c][0];
                h[b][a] = h[a][b];
            }
            d1.push(g);
            d2.push(h);
        }
        BaryEval { values, d1, d2 }
    }
}

/// Basis values with Cartesian derivatives.
#[derive(Debug, Clone)]
pub struct BasisEval {
    pub values: Vec<f64>,
    pub grads: Vec<Vec2>,
    pub hessians: Vec<Mat2>,
}

/// Chain rule from barycentric to Cartesian derivatives, given the
/// (constant) gradients of the barycentric coordinates.
pub fn to_cartesian(e: &BaryEval, grad_lambda: &[Vec2; 3]) -> BasisEval {
    let grads = e
        .d1
        .iter()
        .map(|g| {
            let mut out = [0.0; 2];
            for a in 0..3 {
                out[0] += g[a] * grad_lambda[a][0];
                out[1] += g[a] * grad_lambda[a][1];
            }
            out
        })
        .collect();
    let hessians = e
        .d2
        .iter()
        .map(|h| {
            let mut out = [[0.0; 2]; 2];
            for a in 0..3 {
                for b in 0..3 {
                    for (r, row) in out.iter_mut().enumerate() {
                        for (c, v) in row.iter_mut().enumerate() {
                            *v += h[a][b] * grad_lambda[a][r] * grad_lambda[b][c];
                        }
                    }
                }
            }
            out
        })
        .collect();
    BasisEval { values: e.values.clone(), grads, hessians }
}

/// Barycentric gradients on the reference triangle `(0,0), (1,0), (0,1)`.
pub const REFERENCE_GRAD_LAMBDA: [Vec2; 3] = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];

/// Values, gradients and Hessians of the degree-k basis on the reference
/// triangle at barycentric point `bary`.
pub fn eval_basis(k: usize, bary: [f64; 3]) -> Result<BasisEval> {
    let basis = LagrangeBasis::new(k)?;
    Ok(to_cartesian(&basis.eval_bary(bary), &REFERENCE_GRAD_LAMBDA))
}

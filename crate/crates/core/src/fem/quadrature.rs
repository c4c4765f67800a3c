//! Gauss quadrature on the reference triangle and on edges.
//!
//! Triangle rules are collapsed (Duffy) products of Gauss-Legendre rules:
//! every weight is positive and a rule built from `m` points per direction
//! integrates total degree `2m - 2` exactly.

use crate::error::{Error, Result};

/// Highest exactness degree served by [`quadrature_for`].
pub const MAX_DEGREE: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureKind {
    /// Reference triangle `(0,0), (1,0), (0,1)`; weights sum to 1/2.
    Element,
    /// Unit interval; weights sum to 1.
    Edge,
}

/// Points are barycentric triples. For element rules they refer to the
/// reference triangle vertices; for edge rules `[1 - t, t, 0]` refers to the
/// two edge endpoints.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub kind: QuadratureKind,
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub exactness_degree: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Edge parameter `t` of each point (edge rules).
    pub fn abscissae(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p[1])
    }
}

/// Gauss-Legendre nodes and weights on `[0, 1]`, `m >= 1`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1);
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        // Chebyshev-like initial guess, refined by Newton on P_m
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=m {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            // p1 = P_m(x), p0 = P_{m-1}(x)
            dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = 0.5 * (1.0 - x);
        nodes[m - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[m - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

/// A rule integrating polynomials up to `degree_needed` exactly.
pub fn quadrature_for(kind: QuadratureKind, degree_needed: usize) -> Result<QuadratureRule> {
    if degree_needed > MAX_DEGREE {
        return Err(Error::QuadratureDegree(degree_needed, MAX_DEGREE));
    }
    match kind {
        QuadratureKind::Edge => {
            let m = (degree_needed + 2) / 2;
            let (t, w) = gauss_legendre(m.max(1));
            Ok(QuadratureRule {
                kind,
                points: t.iter().map(|&t| [1.0 - t, t, 0.0]).collect(),
                weights: w,
                exactness_degree: 2 * m.max(1) - 1,
            })
        }
        QuadratureKind::Element => {
            // (x, y) = (s, (1 - s) t) with Jacobian (1 - s)
            let m = (degree_needed + 3) / 2;
            let (g, w) = gauss_legendre(m);
            let mut points = Vec::with_capacity(m * m);
            let mut weights = Vec::with_capacity(m * m);
            for (&s, &ws) in g.iter().zip(&w) {
                for (&t, &wt) in g.iter().zip(&w) {
                    let (x, y) = (s, (1.0 - s) * t);
                    points.push([1.0 - x - y, x, y]);
                    weights.push(ws * wt * (1.0 - s));
                }
            }
            Ok(QuadratureRule {
                kind,
                points,
                weights,
                exactness_degree: 2 * m - 2,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    #[test]
    fn lambda_squared_integral() {
        let q = quadrature_for(QuadratureKind::Element, 2).unwrap();
        let integral: f64 = q.points.iter().zip(&q.weights).map(|(p, w)| w * p[0] * p[0]).sum();
        assert!((integral - 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn edge_cubic() {
        let q = quadrature_for(QuadratureKind::Edge, 3).unwrap();
        let integral: f64 = q.abscissae().zip(&q.weights).map(|(t, w)| w * t.powi(3)).sum();
        assert!((integral - 0.25).abs() < 1e-14);
    }

    #[test]
    fn degree_eight_weights_sum_to_half() {
        let q = quadrature_for(QuadratureKind::Element, 8).unwrap();
        assert!((q.weights.iter().sum::<f64>() - 0.5).abs() < 1e-15);
        assert!(q.weights.iter().all(|&w| w > 0.0));
    }

    #[test]
    fn monomials_integrated_exactly() {
        // int_T x^a y^b = a! b! / (a + b + 2)!
        for d in 0..=16 {
            let q = quadrature_for(QuadratureKind::Element, d).unwrap();
            assert!(q.exactness_degree >= d);
            for a in 0..=d {
                for b in 0..=(d - a) {
                    let exact = factorial(a as u32) * factorial(b as u32) / factorial((a + b + 2) as u32);
                    let approx: f64 = q
                        .points
                        .iter()
                        .zip(&q.weights)
                        .map(|(p, w)| w * p[1].powi(a as i32) * p[2].powi(b as i32))
                        .sum();
                    assert!((approx - exact).abs() <= 1e-13 * exact, "d={d} a={a} b={b}");
                }
            }
            let e = quadrature_for(QuadratureKind::Edge, d).unwrap();
            assert!(e.weights.iter().all(|&w| w > 0.0));
            for a in 0..=d {
                let approx: f64 = e.abscissae().zip(&e.weights).map(|(t, w)| w * t.powi(a as i32)).sum();
                assert!((approx - 1.0 / (a as f64 + 1.0)).abs() < 1e-14, "edge d={d} a={a}");
            }
        }
    }

    #[test]
    fn out_of_range_degree() {
        assert!(matches!(
            quadrature_for(QuadratureKind::Element, MAX_DEGREE + 1),
            Err(Error::QuadratureDegree(_, _))
        ));
    }
}

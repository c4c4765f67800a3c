use super::trace::{edge_bary, edge_rule};
use crate::error::{Error, Result};
use crate::fem::{quadrature_for, FeFunction, FeSpace, Jet, QuadratureKind};
use crate::mesh::Point2;
use rayon::prelude::*;

/// A function with well-defined values and derivatives inside every
/// triangle, possibly discontinuous across edges.
pub trait PiecewiseField: Sync {
    /// Jet at the point `x` with barycentric coordinates `bary` in
    /// triangle `t`.
    fn jet(&self, t: usize, bary: [f64; 3], x: Point2) -> Jet;
}

impl PiecewiseField for FeFunction {
    fn jet(&self, t: usize, bary: [f64; 3], _x: Point2) -> Jet {
        self.jet_on(t, bary)
    }
}

/// A globally smooth function given by its jet.
pub struct SmoothField<F>(pub F);

impl<F: Fn(Point2) -> Jet + Sync> PiecewiseField for SmoothField<F> {
    fn jet(&self, _t: usize, _bary: [f64; 3], x: Point2) -> Jet {
        (self.0)(x)
    }
}

/// `a - b`.
pub struct Difference<'a, A: ?Sized, B: ?Sized>(pub &'a A, pub &'a B);

impl<A: PiecewiseField + ?Sized, B: PiecewiseField + ?Sized> PiecewiseField for Difference<'_, A, B> {
    fn jet(&self, t: usize, bary: [f64; 3], x: Point2) -> Jet {
        let (a, b) = (self.0.jet(t, bary, x), self.1.jet(t, bary, x));
        let mut d = Jet { value: a.value - b.value, ..Jet::default() };
        for r in 0..2 {
            d.grad[r] = a.grad[r] - b.grad[r];
            for c in 0..2 {
                d.hess[r][c] = a.hess[r][c] - b.hess[r][c];
            }
        }
        d
    }
}

/// Squared contributions to the mesh-dependent energy norm.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EnergyParts {
    /// `sum_T |D^2 v|^2_{0,T}`
    pub element: f64,
    /// `sum_E |E| |{v_nn}|^2_{0,E}`
    pub average: f64,
    /// `sum_E |E|^{-1} |[v_n]|^2_{0,E}`
    pub jump: f64,
}

impl EnergyParts {
    pub fn squared(&self) -> f64 {
        self.element + self.average + self.jump
    }

    pub fn norm(&self) -> f64 {
        self.squared().sqrt()
    }
}

fn frobenius2(h: &[[f64; 2]; 2]) -> f64 {
    h[0][0] * h[0][0] + h[0][1] * h[0][1] + h[1][0] * h[1][0] + h[1][1] * h[1][1]
}

/// Energy norm contributions restricted to the triangles flagged in
/// `region` (all triangles when `None`). An edge enters with weight equal
/// to the fraction of its adjacent triangles lying in the region, so the
/// parts of a partition add up to the whole.
pub fn energy_parts(space: &FeSpace, v: &(impl PiecewiseField + ?Sized), region: Option<&[bool]>) -> Result<EnergyParts> {
    let mesh = space.mesh();
    if let Some(r) = region {
        if r.len() != mesh.n_triangles() {
            return Err(Error::DimensionMismatch { expected: mesh.n_triangles(), got: r.len() });
        }
    }
    let inside = |t: usize| region.is_none_or(|r| r[t]);
    let degree = 2 * space.degree() + 4;
    let rule = quadrature_for(QuadratureKind::Element, degree)?;
    let erule = edge_rule(space, degree)?;

    let element: Vec<f64> = (0..mesh.n_triangles())
        .into_par_iter()
        .map(|t| {
            if !inside(t) {
                return 0.0;
            }
            let g = space.geometry(t);
            rule.points
                .iter()
                .zip(&rule.weights)
                .map(|(&b, w)| w * 2.0 * g.area * frobenius2(&v.jet(t, b, g.point(b)).hess))
                .sum()
        })
        .collect();

    let edges: Vec<(f64, f64)> = (0..mesh.n_edges())
        .into_par_iter()
        .map(|e| {
            let edge = &mesh.edges()[e];
            let sides: Vec<usize> = std::iter::once(edge.minus).chain(edge.plus).collect();
            let weight = sides.iter().filter(|&&t| inside(t)).count() as f64 / sides.len() as f64;
            if weight == 0.0 {
                return (0.0, 0.0);
            }
            let n = mesh.edge_normal(e);
            let h = mesh.edge_length(e);
            let traces: Vec<Vec<(f64, f64)>> = sides
                .iter()
                .map(|&t| {
                    let g = space.geometry(t);
                    edge_bary(space, t, edge.vertices[0], edge.vertices[1], &erule)
                        .into_iter()
                        .map(|b| {
                            let j = v.jet(t, b, g.point(b));
                            let dn = j.grad[0] * n[0] + j.grad[1] * n[1];
                            let dnn = j.hess[0][0] * n[0] * n[0] + 2.0 * j.hess[0][1] * n[0] * n[1] + j.hess[1][1] * n[1] * n[1];
                            (dn, dnn)
                        })
                        .collect()
                })
                .collect();
            let (mut avg, mut jump) = (0.0, 0.0);
            for (q, w) in erule.weights.iter().enumerate() {
                let (a, c) = match traces.as_slice() {
                    [m, p] => (0.5 * (m[q].1 + p[q].1), p[q].0 - m[q].0),
                    [m] => (m[q].1, -m[q].0),
                    _ => unreachable!("an edge has one or two triangles"),
                };
                avg += w * h * a * a;
                jump += w * h * c * c;
            }
            (weight * h * avg, weight * jump / h)
        })
        .collect();

    Ok(EnergyParts {
        element: element.iter().sum(),
        average: edges.iter().map(|e| e.0).sum(),
        jump: edges.iter().map(|e| e.1).sum(),
    })
}

/// Mesh-dependent energy norm over the whole domain.
pub fn energy_norm(space: &FeSpace, v: &(impl PiecewiseField + ?Sized)) -> Result<f64> {
    Ok(energy_parts(space, v, None)?.norm())
}

/// Energy seminorm restricted to a union of triangles.
pub fn seminorm_on_subdomain(space: &FeSpace, v: &(impl PiecewiseField + ?Sized), region: &[bool]) -> Result<f64> {
    Ok(energy_parts(space, v, Some(region))?.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_uniform, MeshPattern, Rect};
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn space(p: MeshPattern, n: usize, k: usize) -> Arc<FeSpace> {
        Arc::new(FeSpace::new(Arc::new(generate_uniform(p, n, Rect::UNIT).unwrap()), k).unwrap())
    }

    #[test]
    fn constants_have_zero_norm() {
        let s = space(MeshPattern::Chevron, 3, 3);
        let c = FeFunction::interpolate(s.clone(), |_| 2.5).unwrap();
        assert!(energy_norm(&s, &c).unwrap() < 1e-10);
    }

    #[test]
    fn linear_function_counts_boundary_edges() {
        // |dv/dn| = 1 on every boundary edge, nothing else survives
        for n in [1, 2] {
            let s = space(MeshPattern::Regular, n, 2);
            let v = FeFunction::interpolate(s.clone(), |p| p.x + p.y).unwrap();
            let parts = energy_parts(&s, &v, None).unwrap();
            assert!(parts.element.abs() < 1e-20 && parts.average.abs() < 1e-20);
            assert!((parts.jump - 4.0 * n as f64).abs() < 1e-11);
        }
    }

    #[test]
    fn x_squared_on_regular_mesh() {
        // element 4; boundary averages 8/n and jumps 4n; interior vertical
        // edges 4(n-1)/n; diagonals 2
        for n in [1, 2, 4] {
            let s = space(MeshPattern::Regular, n, 2);
            let v = FeFunction::interpolate(s.clone(), |p| p.x * p.x).unwrap();
            let parts = energy_parts(&s, &v, None).unwrap();
            let nf = n as f64;
            assert!((parts.element - 4.0).abs() < 1e-11);
            let expect = 4.0 + 8.0 / nf + 4.0 * nf + 4.0 * (nf - 1.0) / nf + 2.0;
            assert!((parts.squared() - expect).abs() < 1e-10, "n={n}: {} vs {expect}", parts.squared());
        }
    }

    #[test]
    fn subdomain_parts() {
        let s = space(MeshPattern::CrissCross, 4, 2);
        let v = FeFunction::interpolate(s.clone(), |p| (PI * p.x).sin().powi(2) * (PI * p.y).sin().powi(2)).unwrap();
        let all = energy_norm(&s, &v).unwrap();
        let nt = s.mesh().n_triangles();
        assert_eq!(seminorm_on_subdomain(&s, &v, &vec![true; nt]).unwrap(), all);
        assert_eq!(seminorm_on_subdomain(&s, &v, &vec![false; nt]).unwrap(), 0.0);
        let left: Vec<bool> = (0..nt).map(|t| s.mesh().centroid(t).x < 0.5).collect();
        let right: Vec<bool> = left.iter().map(|b| !b).collect();
        let l = seminorm_on_subdomain(&s, &v, &left).unwrap().powi(2);
        let r = seminorm_on_subdomain(&s, &v, &right).unwrap().powi(2);
        assert!((l - all * all / 2.0).abs() <= 1e-12 * all * all);
        assert!((r - all * all / 2.0).abs() <= 1e-12 * all * all);
    }

    #[test]
    fn difference_of_equal_fields_vanishes() {
        let s = space(MeshPattern::UnionJack, 2, 2);
        let v = FeFunction::interpolate(s.clone(), |p| p.x * p.y).unwrap();
        let exact = SmoothField(|p: Point2| Jet {
            value: p.x * p.y,
            grad: [p.y, p.x],
            hess: [[0.0, 1.0], [1.0, 0.0]],
        });
        assert!(energy_norm(&s, &Difference(&v, &exact)).unwrap() < 1e-10);
    }
}

use super::basis::{to_cartesian, BaryEval, Mat2, Vec2};
use super::space::FeSpace;
use crate::error::{Error, Result};
use crate::mesh::Point2;
use std::io::Write;
use std::sync::Arc;

/// Value, gradient and Hessian at one point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub grad: Vec2,
    pub hess: Mat2,
}

/// A finite element function: coefficients in the nodal basis of a space.
#[derive(Debug, Clone)]
pub struct FeFunction {
    space: Arc<FeSpace>,
    coeffs: Vec<f64>,
}

impl FeFunction {
    pub fn new(space: Arc<FeSpace>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != space.n_dofs() {
            return Err(Error::DimensionMismatch { expected: space.n_dofs(), got: coeffs.len() });
        }
        Ok(Self { space, coeffs })
    }

    pub fn zero(space: Arc<FeSpace>) -> Self {
        let n = space.n_dofs();
        Self { space, coeffs: vec![0.0; n] }
    }

    /// Nodal interpolant of `f`.
    pub fn interpolate(space: Arc<FeSpace>, f: impl Fn(Point2) -> f64) -> Result<Self> {
        let coeffs = space
            .node_coords()
            .iter()
            .map(|&p| {
                let v = f(p);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::NonFinite { value: v, x: p.x, y: p.y })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { space, coeffs })
    }

    pub fn space(&self) -> &Arc<FeSpace> {
        &self.space
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// Jet on triangle `t` given basis data at a point of `t`.
    pub fn local_jet(&self, t: usize, eval: &BaryEval) -> Jet {
        let b = to_cartesian(eval, &self.space.geometry(t).grad_lambda);
        let mut jet = Jet::default();
        for (i, &d) in self.space.elem_dofs(t).iter().enumerate() {
            let c = self.coeffs[d];
            jet.value += c * b.values[i];
            for r in 0..2 {
                jet.grad[r] += c * b.grads[i][r];
                for s in 0..2 {
                    jet.hess[r][s] += c * b.hessians[i][r][s];
                }
            }
        }
        jet
    }

    /// Jet on triangle `t` at barycentric point `bary`.
    pub fn jet_on(&self, t: usize, bary: [f64; 3]) -> Jet {
        self.local_jet(t, &self.space.basis().eval_bary(bary))
    }

    /// Jet at a physical point; on shared edges the triangle of smallest
    /// index is used.
    pub fn evaluate(&self, p: &Point2) -> Result<Jet> {
        let (t, bary) = self.space.locate(p)?;
        Ok(self.jet_on(t, bary))
    }

    /// Writes `dofs N` followed by one coefficient per line.
    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "dofs {}", self.coeffs.len())?;
        for c in &self.coeffs {
            writeln!(w, "{c:?}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_uniform, MeshPattern, Rect};

    fn space(k: usize) -> Arc<FeSpace> {
        let mesh = generate_uniform(MeshPattern::CrissCross, 3, Rect::UNIT).unwrap();
        Arc::new(FeSpace::new(Arc::new(mesh), k).unwrap())
    }

    #[test]
    fn interpolation_reproduces_polynomials() {
        for k in [2, 3, 4] {
            let s = space(k);
            let kk = k as i32;
            let f = FeFunction::interpolate(s, |p| p.x.powi(kk) + 2.0 * p.x * p.y.powi(kk - 1) - p.y).unwrap();
            for p in [Point2::new(0.31, 0.77), Point2::new(0.5, 0.5), Point2::new(0.9, 0.02)] {
                let j = f.evaluate(&p).unwrap();
                let kf = k as f64;
                let exact = p.x.powi(kk) + 2.0 * p.x * p.y.powi(kk - 1) - p.y;
                let gx = kf * p.x.powi(kk - 1) + 2.0 * p.y.powi(kk - 1);
                let gy = 2.0 * (kf - 1.0) * p.x * p.y.powi(kk - 2) - 1.0;
                let hxx = kf * (kf - 1.0) * p.x.powi(kk - 2);
                let hxy = 2.0 * (kf - 1.0) * p.y.powi(kk - 2);
                assert!((j.value - exact).abs() < 1e-12);
                assert!((j.grad[0] - gx).abs() < 1e-11 && (j.grad[1] - gy).abs() < 1e-11);
                assert!((j.hess[0][0] - hxx).abs() < 1e-9);
                assert!((j.hess[0][1] - hxy).abs() < 1e-9 && (j.hess[1][0] - hxy).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn non_finite_interpolation_is_an_error() {
        let r = FeFunction::interpolate(space(2), |p| 1.0 / (p.x - 0.5));
        assert!(matches!(r, Err(Error::NonFinite { .. })));
    }

    #[test]
    fn export_format() {
        let s = space(2);
        let f = FeFunction::zero(s.clone());
        let mut buf = Vec::new();
        f.write(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(&format!("dofs {}\n", s.n_dofs())));
        assert_eq!(text.lines().count(), s.n_dofs() + 1);
        assert!(FeFunction::new(s, vec![0.0; 3]).is_err());
    }
}

use crate::error::{Error, Result};
use crate::fem::{Jet, Mat2, Vec2};
use crate::mesh::Point2;
use std::f64::consts::PI;

/// A manufactured solution of `Δ²u = f` with its derivatives.
#[derive(Clone, Copy)]
pub struct ExactSolution {
    pub name: &'static str,
    pub u: fn(Point2) -> f64,
    pub grad: fn(Point2) -> Vec2,
    pub hess: fn(Point2) -> Mat2,
    pub f: fn(Point2) -> f64,
    /// Interior points, away from singularities, used by [`ExactSolution::verify`].
    pub probes: &'static [[f64; 2]],
}

impl std::fmt::Debug for ExactSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ExactSolution").field("name", &self.name).finish()
    }
}

impl ExactSolution {
    pub fn jet(&self, p: Point2) -> Jet {
        Jet { value: (self.u)(p), grad: (self.grad)(p), hess: (self.hess)(p) }
    }

    /// Dirichlet data `u`.
    pub fn g_d(&self, p: Point2) -> f64 {
        (self.u)(p)
    }

    /// Normal derivative data for the unit normal `n`.
    pub fn g_n(&self, p: Point2, n: Vec2) -> f64 {
        let g = (self.grad)(p);
        g[0] * n[0] + g[1] * n[1]
    }

    /// Checks `f`, `∇u` and `D²u` against finite differences of `u` at the
    /// probe points.
    pub fn verify(&self) -> Result<()> {
        let pts: Vec<Point2> = self.probes.iter().map(|&[x, y]| Point2::new(x, y)).collect();
        let scale = pts.iter().map(|&p| (self.f)(p).abs()).fold(1.0, f64::max);
        let fail = |what: &str, p: Point2, got: f64, want: f64| {
            Err(Error::InvalidArgument(format!(
                "exact solution '{}': {what} at ({}, {}) is {want}, finite differences give {got}",
                self.name, p.x, p.y
            )))
        };
        for &p in &pts {
            let f = (self.f)(p);
            let fd = [1e-2, 5e-3, 2e-3, 1e-3].map(|h| fd_biharmonic(self.u, p, h));
            if fd.iter().all(|v| (v - f).abs() > 1e-5 * scale) {
                return fail("f", p, fd[3], f);
            }
            let h = 1e-5;
            let d = |g: &dyn Fn(Point2) -> f64, e: [f64; 2]| {
                (g(Point2::new(p.x + h * e[0], p.y + h * e[1])) - g(Point2::new(p.x - h * e[0], p.y - h * e[1]))) / (2.0 * h)
            };
            let (g, hs) = ((self.grad)(p), (self.hess)(p));
            let checks = [
                ("u_x", d(&|q| (self.u)(q), [1.0, 0.0]), g[0]),
                ("u_y", d(&|q| (self.u)(q), [0.0, 1.0]), g[1]),
                ("u_xx", d(&|q| (self.grad)(q)[0], [1.0, 0.0]), hs[0][0]),
                ("u_xy", d(&|q| (self.grad)(q)[0], [0.0, 1.0]), hs[0][1]),
                ("u_yx", d(&|q| (self.grad)(q)[1], [1.0, 0.0]), hs[1][0]),
                ("u_yy", d(&|q| (self.grad)(q)[1], [0.0, 1.0]), hs[1][1]),
            ];
            for (what, got, want) in checks {
                if (got - want).abs() > 1e-6 * (1.0 + want.abs()) {
                    return fail(what, p, got, want);
                }
            }
        }
        Ok(())
    }
}

/// 13-point finite-difference biharmonic of `u` at `p` with step `h`.
pub fn fd_biharmonic(u: fn(Point2) -> f64, p: Point2, h: f64) -> f64 {
    let at = |i: f64, j: f64| u(Point2::new(p.x + i * h, p.y + j * h));
    (20.0 * at(0.0, 0.0) - 8.0 * (at(1.0, 0.0) + at(-1.0, 0.0) + at(0.0, 1.0) + at(0.0, -1.0))
        + 2.0 * (at(1.0, 1.0) + at(1.0, -1.0) + at(-1.0, 1.0) + at(-1.0, -1.0))
        + at(2.0, 0.0)
        + at(-2.0, 0.0)
        + at(0.0, 2.0)
        + at(0.0, -2.0))
        / h.powi(4)
}

/// `u = sin²(πx) sin²(πy)` on the unit square, clamped.
pub fn square_solution() -> ExactSolution {
    ExactSolution {
        name: "square",
        u: |p| ((PI * p.x).sin() * (PI * p.y).sin()).powi(2),
        grad: |p| {
            let (sx, sy) = ((PI * p.x).sin(), (PI * p.y).sin());
            [PI * (2.0 * PI * p.x).sin() * sy * sy, PI * sx * sx * (2.0 * PI * p.y).sin()]
        },
        hess: |p| {
            let (sx, sy) = ((PI * p.x).sin(), (PI * p.y).sin());
            let (s2x, s2y) = ((2.0 * PI * p.x).sin(), (2.0 * PI * p.y).sin());
            let (c2x, c2y) = ((2.0 * PI * p.x).cos(), (2.0 * PI * p.y).cos());
            let xy = PI * PI * s2x * s2y;
            [[2.0 * PI * PI * c2x * sy * sy, xy], [xy, 2.0 * PI * PI * sx * sx * c2y]]
        },
        f: |p| {
            let (a, b) = ((2.0 * PI * p.x).cos(), (2.0 * PI * p.y).cos());
            4.0 * PI.powi(4) * (4.0 * a * b - a - b)
        },
        probes: &[[0.5, 0.5], [0.25, 0.25], [0.3, 0.7], [0.2, 0.35], [0.81, 0.13], [0.6, 0.92], [0.47, 0.05], [0.9, 0.55]],
    }
}

/// Polar angle in `[0, 2π)`, so that the L-shaped domain's cut lies on the
/// removed quadrant.
fn angle(p: Point2) -> f64 {
    let t = p.y.atan2(p.x);
    if t < 0.0 {
        t + 2.0 * PI
    } else {
        t
    }
}

/// `u = r^{5/3} sin(5θ/3)` on `(-1,1)² \ [0,1)×(-1,0]`, biharmonic.
/// Derivatives are singular at the origin and evaluate to NaN there.
pub fn lshape_solution() -> ExactSolution {
    ExactSolution {
        name: "lshape",
        u: |p| {
            let r = p.x.hypot(p.y);
            if r == 0.0 {
                0.0
            } else {
                r.powf(5.0 / 3.0) * (5.0 / 3.0 * angle(p)).sin()
            }
        },
        grad: |p| {
            let r = p.x.hypot(p.y);
            if r == 0.0 {
                return [f64::NAN; 2];
            }
            // u = Im z^{5/3}: u_x = Im F', u_y = Re F'
            let (m, t) = (5.0 / 3.0 * r.powf(2.0 / 3.0), 2.0 / 3.0 * angle(p));
            [m * t.sin(), m * t.cos()]
        },
        hess: |p| {
            let r = p.x.hypot(p.y);
            if r == 0.0 {
                return [[f64::NAN; 2]; 2];
            }
            let (m, t) = (10.0 / 9.0 * r.powf(-1.0 / 3.0), -angle(p) / 3.0);
            let (xx, xy) = (m * t.sin(), m * t.cos());
            [[xx, xy], [xy, -xx]]
        },
        f: |_| 0.0,
        probes: &[[0.5, 0.5], [-0.3, -0.6], [-0.7, 0.1], [0.4, 0.9], [0.2, 0.35], [-0.5, -0.5], [-0.9, 0.8], [0.7, 0.05]],
    }
}

//! Bowyer-Watson incremental Delaunay triangulation.

use super::{orient2d, Point2, Triangulation, DUPLICATE_TOL};
use crate::error::{Error, Result};
use std::collections::HashMap;

/// Index standing for the vertex at infinity.
const GHOST: usize = usize::MAX;

/// A triangle of the working triangulation. Ghost triangles `[a, b, GHOST]`
/// close the convex hull; their "circumcircle" is the open half-plane to
/// the left of `a -> b`.
#[derive(Clone, Copy)]
struct Tri {
    v: [usize; 3],
    center: Point2,
    radius2: f64,
    alive: bool,
}

impl Tri {
    fn new(v: [usize; 3], pts: &[Point2]) -> Self {
        // rotate so a ghost vertex is always last
        let v = match v.iter().position(|&i| i == GHOST) {
            Some(0) => [v[1], v[2], v[0]],
            Some(1) => [v[2], v[0], v[1]],
            _ => v,
        };
        if v[2] == GHOST {
            return Self { v, center: Point2::default(), radius2: 0.0, alive: true };
        }
        let (a, b, c) = (pts[v[0]], pts[v[1]], pts[v[2]]);
        let (bx, by) = (b.x - a.x, b.y - a.y);
        let (cx, cy) = (c.x - a.x, c.y - a.y);
        let d = 2.0 * (bx * cy - by * cx);
        let b2 = bx * bx + by * by;
        let c2 = cx * cx + cy * cy;
        let ux = (cy * b2 - by * c2) / d;
        let uy = (bx * c2 - cx * b2) / d;
        Self {
            v,
            center: Point2::new(a.x + ux, a.y + uy),
            radius2: ux * ux + uy * uy,
            alive: true,
        }
    }

    /// Strict in-circle test; cocircular points are treated as outside so the
    /// earlier insertion wins.
    fn contains(&self, p: &Point2, pts: &[Point2]) -> bool {
        if self.v[2] == GHOST {
            let (a, b) = (pts[self.v[0]], pts[self.v[1]]);
            let side = orient2d(&a, &b, p);
            let scale = a.dist(&b).powi(2);
            if side > 1e-14 * scale {
                return true;
            }
            // on the hull line: inside only when strictly between a and b
            let t = ((p.x - a.x) * (b.x - a.x) + (p.y - a.y) * (b.y - a.y)) / scale;
            return side.abs() <= 1e-14 * scale && t > 0.0 && t < 1.0;
        }
        let dx = p.x - self.center.x;
        let dy = p.y - self.center.y;
        dx * dx + dy * dy < self.radius2 * (1.0 - 1e-12)
    }
}

/// Delaunay triangulation of the convex hull of `points`.
///
/// Points closer than [`DUPLICATE_TOL`] to an earlier point are merged; the
/// output vertex list keeps the first occurrence of each.
pub fn delaunay_triangulate(points: &[Point2]) -> Result<Triangulation> {
    if let Some(p) = points.iter().find(|p| !p.is_finite()) {
        return Err(Error::DegenerateGeometry(format!("non-finite input point {p:?}")));
    }
    let mut pts: Vec<Point2> = Vec::with_capacity(points.len());
    for p in points {
        if pts.iter().all(|q| q.dist(p) > DUPLICATE_TOL) {
            pts.push(*p);
        }
    }
    if pts.len() < 3 {
        return Err(Error::DegenerateGeometry(format!(
            "need at least 3 distinct points, got {}",
            pts.len()
        )));
    }

    let extent = pts.iter().map(|p| p.dist(&pts[0])).fold(0.0, f64::max);
    let (far, seed) = pts
        .iter()
        .enumerate()
        .map(|(i, p)| (orient2d(&pts[0], &pts[1], p).abs(), i))
        .fold((0.0, 0), |acc, x| if x.0 > acc.0 { x } else { acc });
    if far <= 1e-12 * extent * extent {
        return Err(Error::DegenerateGeometry("all input points are collinear".into()));
    }

    let first = if orient2d(&pts[0], &pts[1], &pts[seed]) > 0.0 {
        [0, 1, seed]
    } else {
        [0, seed, 1]
    };
    let mut tris = vec![Tri::new(first, &pts)];
    for k in 0..3 {
        tris.push(Tri::new([first[(k + 1) % 3], first[k], GHOST], &pts));
    }

    let mut boundary: HashMap<(usize, usize), ()> = HashMap::new();
    for i in (2..pts.len()).filter(|&i| i != seed) {
        let p = pts[i];
        boundary.clear();
        for t in tris.iter_mut().filter(|t| t.contains(&p, &pts)) {
            t.alive = false;
            for k in 0..3 {
                let (a, b) = (t.v[k], t.v[(k + 1) % 3]);
                // a cavity edge seen twice is interior to the cavity
                if boundary.remove(&(b, a)).is_none() {
                    boundary.insert((a, b), ());
                }
            }
        }
        if boundary.is_empty() {
            return Err(Error::DegenerateGeometry(format!("point {i} {p:?} could not be inserted")));
        }
        let mut cavity: Vec<(usize, usize)> = boundary.keys().copied().collect();
        cavity.sort_unstable();
        tris.retain(|t| t.alive);
        for (a, b) in cavity {
            tris.push(Tri::new([a, b, i], &pts));
        }
    }

    let triangles: Vec<[usize; 3]> = tris.into_iter().filter(|t| t.v[2] != GHOST).map(|t| t.v).collect();
    Triangulation::new(pts, triangles)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn square_corners() -> Vec<Point2> {
        vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ]
    }

    /// Brute force: no vertex lies strictly inside any circumcircle.
    pub(crate) fn assert_empty_circumcircles(m: &Triangulation) {
        for t in 0..m.n_triangles() {
            let [a, b, c] = m.triangle_points(t);
            for (v, p) in m.vertices().iter().enumerate() {
                if m.triangles()[t].contains(&v) {
                    continue;
                }
                // classical in-circle determinant, scaled by the triangle size
                let rows = [a, b, c].map(|q| {
                    let (dx, dy) = (q.x - p.x, q.y - p.y);
                    [dx, dy, dx * dx + dy * dy]
                });
                let det = rows[0][0] * (rows[1][1] * rows[2][2] - rows[2][1] * rows[1][2])
                    - rows[1][0] * (rows[0][1] * rows[2][2] - rows[2][1] * rows[0][2])
                    + rows[2][0] * (rows[0][1] * rows[1][2] - rows[1][1] * rows[0][2]);
                assert!(det <= 1e-10, "vertex {v} inside circumcircle of triangle {t}: {det}");
            }
        }
    }

    #[test]
    fn square_corners_give_two_triangles() {
        let m = delaunay_triangulate(&square_corners()).unwrap();
        assert_eq!(m.n_triangles(), 2);
        assert!((m.area() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn square_with_center_gives_four() {
        let mut pts = square_corners();
        pts.push(Point2::new(0.5, 0.5));
        let m = delaunay_triangulate(&pts).unwrap();
        assert_eq!(m.n_triangles(), 4);
        assert_empty_circumcircles(&m);
    }

    #[test]
    fn duplicates_merged_and_collinear_rejected() {
        let mut pts = square_corners();
        pts.push(Point2::new(1.0 + 1e-14, 1.0));
        assert_eq!(delaunay_triangulate(&pts).unwrap().n_vertices(), 4);
        let line: Vec<_> = (0..5).map(|i| Point2::new(i as f64, 2.0 * i as f64)).collect();
        assert!(matches!(delaunay_triangulate(&line), Err(Error::DegenerateGeometry(_))));
        assert!(delaunay_triangulate(&square_corners()[..2]).is_err());
    }

    #[test]
    fn random_clouds_are_delaunay() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let mut pts = square_corners();
            pts.extend((0..50).map(|_| Point2::new(rng.random::<f64>(), rng.random::<f64>())));
            let m = delaunay_triangulate(&pts).unwrap();
            m.validate(Some(1.0)).unwrap();
            assert_empty_circumcircles(&m);
        }
    }
}

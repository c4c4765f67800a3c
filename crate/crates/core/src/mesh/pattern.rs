//! Structured mesh families and the name-keyed registry used to select them.

use super::{delaunay_triangulate, refine_regular, Point2, Triangulation};
use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MeshPattern {
    Regular,
    Chevron,
    CrissCross,
    UnionJack,
    Equilateral,
    Delaunay,
}

impl MeshPattern {
    pub const ALL: [MeshPattern; 6] = [
        MeshPattern::Regular,
        MeshPattern::Chevron,
        MeshPattern::CrissCross,
        MeshPattern::UnionJack,
        MeshPattern::Equilateral,
        MeshPattern::Delaunay,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MeshPattern::Regular => "regular",
            MeshPattern::Chevron => "chevron",
            MeshPattern::CrissCross => "crisscross",
            MeshPattern::UnionJack => "unionjack",
            MeshPattern::Equilateral => "equilateral",
            MeshPattern::Delaunay => "delaunay",
        }
    }

    pub fn is_translation_invariant(self) -> bool {
        self != MeshPattern::Delaunay
    }
}

impl fmt::Display for MeshPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeshPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MeshPattern::ALL
            .into_iter()
            .find(|p| p.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::InvalidArgument(format!("unknown mesh pattern '{s}'")))
    }
}

/// Axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub const UNIT: Rect = Rect { x0: 0.0, y0: 0.0, x1: 1.0, y1: 1.0 };

    fn at(&self, s: f64, t: f64) -> Point2 {
        Point2::new(self.x0 + s * (self.x1 - self.x0), self.y0 + t * (self.y1 - self.y0))
    }

    pub fn area(&self) -> f64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }
}

/// A mesh family parameterised by a resolution `n` (cells per unit length).
pub trait PatternGenerator: Send + Sync {
    fn name(&self) -> &'static str;

    fn generate(&self, n: usize) -> Result<Triangulation>;
}

/// One of the five structured patterns on the unit square.
#[derive(Debug, Clone, Copy)]
pub struct UniformPattern(pub MeshPattern);

impl PatternGenerator for UniformPattern {
    fn name(&self) -> &'static str {
        self.0.name()
    }

    fn generate(&self, n: usize) -> Result<Triangulation> {
        generate_uniform(self.0, n, Rect::UNIT)
    }
}

/// Unstructured family: a fixed-seed Delaunay mesh of the unit square with
/// mesh size `1/base`, regularly refined until the requested resolution.
#[derive(Debug, Clone, Copy)]
pub struct DelaunayRefined {
    pub seed: u64,
    /// Boundary points per side of the initial mesh.
    pub base: usize,
    pub interior_points: usize,
}

impl Default for DelaunayRefined {
    fn default() -> Self {
        Self { seed: 20240611, base: 8, interior_points: 40 }
    }
}

impl DelaunayRefined {
    /// Initial point cloud: corners, equispaced boundary points and seeded
    /// interior points kept away from the boundary.
    pub fn points(&self) -> Vec<Point2> {
        let m = self.base;
        let h = 1.0 / m as f64;
        let mut pts = Vec::new();
        for i in 0..m {
            let s = i as f64 * h;
            pts.push(Point2::new(s, 0.0));
            pts.push(Point2::new(1.0, s));
            pts.push(Point2::new(1.0 - s, 1.0));
            pts.push(Point2::new(0.0, 1.0 - s));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let margin = 0.35 * h;
        while pts.len() < 4 * m + self.interior_points {
            let p = Point2::new(
                rng.random_range(margin..1.0 - margin),
                rng.random_range(margin..1.0 - margin),
            );
            if pts.iter().all(|q| q.dist(&p) > 0.5 * h) {
                pts.push(p);
            }
        }
        pts
    }

    pub fn initial_mesh(&self) -> Result<Triangulation> {
        Ok(delaunay_triangulate(&self.points())?.with_tag("delaunay"))
    }
}

impl PatternGenerator for DelaunayRefined {
    fn name(&self) -> &'static str {
        "delaunay"
    }

    /// `n` must be `base * 2^r`; the initial mesh is refined `r` times.
    fn generate(&self, n: usize) -> Result<Triangulation> {
        if n < self.base || n % self.base != 0 || !(n / self.base).is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "delaunay resolution must be {} times a power of two, got {n}",
                self.base
            )));
        }
        let mut mesh = self.initial_mesh()?;
        for _ in 0..(n / self.base).trailing_zeros() {
            mesh = refine_regular(&mesh)?;
        }
        Ok(mesh)
    }
}

/// Pattern generators keyed by name.
pub struct PatternRegistry {
    generators: BTreeMap<&'static str, Box<dyn PatternGenerator>>,
}

impl PatternRegistry {
    pub fn empty() -> Self {
        Self { generators: BTreeMap::new() }
    }

    pub fn register(&mut self, generator: Box<dyn PatternGenerator>) {
        self.generators.insert(generator.name(), generator);
    }

    pub fn get(&self, name: &str) -> Result<&dyn PatternGenerator> {
        self.generators
            .get(name)
            .map(|g| g.as_ref())
            .ok_or_else(|| Error::InvalidArgument(format!("no mesh pattern registered as '{name}'")))
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.generators.keys().copied()
    }
}

impl Default for PatternRegistry {
    fn default() -> Self {
        let mut registry = Self::empty();
        for p in MeshPattern::ALL.into_iter().filter(|p| p.is_translation_invariant()) {
            registry.register(Box::new(UniformPattern(p)));
        }
        registry.register(Box::new(DelaunayRefined::default()));
        registry
    }
}

/// Structured mesh of `rect` with `n x n` cells subdivided per `pattern`.
pub fn generate_uniform(pattern: MeshPattern, n: usize, rect: Rect) -> Result<Triangulation> {
    if n == 0 {
        return Err(Error::InvalidArgument("mesh resolution n must be positive".into()));
    }
    if !(rect.x1 > rect.x0 && rect.y1 > rect.y0) {
        return Err(Error::InvalidArgument(format!("empty rectangle {rect:?}")));
    }
    let mesh = match pattern {
        MeshPattern::Delaunay => {
            return Err(Error::InvalidArgument(
                "delaunay meshes are not generated from a uniform pattern".into(),
            ))
        }
        MeshPattern::Equilateral => equilateral(n, rect)?,
        MeshPattern::CrissCross => criss_cross(n, rect)?,
        _ => two_per_cell(n, rect, |i, j| match pattern {
            MeshPattern::Regular => true,
            MeshPattern::Chevron => i % 2 == 0,
            _ => (i + j) % 2 == 0,
        })?,
    };
    Ok(mesh.with_tag(pattern.name()))
}

fn grid_vertices(n: usize, rect: Rect) -> Vec<Point2> {
    let h = 1.0 / n as f64;
    (0..=n)
        .flat_map(|j| (0..=n).map(move |i| (i, j)))
        .map(|(i, j)| rect.at(i as f64 * h, j as f64 * h))
        .collect()
}

/// `forward(i, j)` selects the diagonal of cell `(i, j)`: lower-left to
/// upper-right when true, otherwise lower-right to upper-left.
fn two_per_cell(n: usize, rect: Rect, forward: impl Fn(usize, usize) -> bool) -> Result<Triangulation> {
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut tris = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            if forward(i, j) {
                tris.push([a, b, c]);
                tris.push([a, c, d]);
            } else {
                tris.push([a, b, d]);
                tris.push([b, c, d]);
            }
        }
    }
    Triangulation::new(grid_vertices(n, rect), tris)
}

fn criss_cross(n: usize, rect: Rect) -> Result<Triangulation> {
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut verts = grid_vertices(n, rect);
    let h = 1.0 / n as f64;
    let mut tris = Vec::with_capacity(4 * n * n);
    for j in 0..n {
        for i in 0..n {
            let m = verts.len();
            verts.push(rect.at((i as f64 + 0.5) * h, (j as f64 + 0.5) * h));
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            tris.extend([[a, b, m], [b, c, m], [c, d, m], [d, a, m]]);
        }
    }
    Triangulation::new(verts, tris)
}

/// Rows of isosceles triangles with alternating apex; odd vertex rows are
/// shifted by half a cell and closed off with boundary vertices.
fn equilateral(n: usize, rect: Rect) -> Result<Triangulation> {
    let h = 1.0 / n as f64;
    let mut verts = Vec::new();
    let mut rows: Vec<Vec<usize>> = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let t = j as f64 * h;
        let mut xs: Vec<f64> = if j % 2 == 0 {
            (0..=n).map(|i| i as f64 * h).collect()
        } else {
            let mut xs = vec![0.0];
            xs.extend((0..n).map(|i| (i as f64 + 0.5) * h));
            xs.push(1.0);
            xs
        };
        xs.dedup();
        rows.push(
            xs.into_iter()
                .map(|s| {
                    verts.push(rect.at(s, t));
                    verts.len() - 1
                })
                .collect(),
        );
    }
    let mut tris = Vec::new();
    for j in 0..n {
        let (lo, hi) = (&rows[j], &rows[j + 1]);
        let (mut a, mut b) = (0, 0);
        while a + 1 < lo.len() || b + 1 < hi.len() {
            let advance_low = if a + 1 >= lo.len() {
                false
            } else if b + 1 >= hi.len() {
                true
            } else {
                verts[lo[a + 1]].x <= verts[hi[b + 1]].x
            };
            if advance_low {
                tris.push([lo[a], lo[a + 1], hi[b]]);
                a += 1;
            } else {
                tris.push([lo[a], hi[b + 1], hi[b]]);
                b += 1;
            }
        }
    }
    Triangulation::new(verts, tris)
}

/// Regular-pattern mesh of `(-1,1)^2 \ (0,1)x(-1,0)` with cell size `1/n`.
pub fn generate_lshape(n: usize) -> Result<Triangulation> {
    if n == 0 {
        return Err(Error::InvalidArgument("mesh resolution n must be positive".into()));
    }
    let m = 2 * n;
    let h = 1.0 / n as f64;
    let coord = |i: usize| -1.0 + i as f64 * h;
    // cell (i, j) is kept unless it lies in the removed lower-right quadrant
    let keep = |i: usize, j: usize| !(i >= n && j < n);
    let mut index = vec![usize::MAX; (m + 1) * (m + 1)];
    let mut verts = Vec::new();
    for j in 0..=m {
        for i in 0..=m {
            let used = [(i, j), (i.wrapping_sub(1), j), (i, j.wrapping_sub(1)), (i.wrapping_sub(1), j.wrapping_sub(1))]
                .into_iter()
                .any(|(ci, cj)| ci < m && cj < m && keep(ci, cj));
            if used {
                index[j * (m + 1) + i] = verts.len();
                verts.push(Point2::new(coord(i), coord(j)));
            }
        }
    }
    let id = |i: usize, j: usize| index[j * (m + 1) + i];
    let mut tris = Vec::new();
    for j in 0..m {
        for i in 0..m {
            if keep(i, j) {
                let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
                tris.push([a, b, c]);
                tris.push([a, c, d]);
            }
        }
    }
    Ok(Triangulation::new(verts, tris)?.with_tag("lshape"))
}

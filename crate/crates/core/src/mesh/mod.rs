//! Conforming triangulations: construction, edge topology, pattern
//! generators, Delaunay triangulation and refinement.

mod delaunay;
mod io;
mod pattern;
mod refine;

pub use delaunay::delaunay_triangulate;
pub use io::{read_mesh, write_mesh};
pub use pattern::{
    generate_lshape, generate_uniform, DelaunayRefined, MeshPattern, PatternGenerator,
    PatternRegistry, Rect, UniformPattern,
};
pub use refine::{refine_bisection, refine_regular};

use crate::error::{Error, Result};
use std::collections::HashMap;

/// Absolute tolerance under which two vertices are considered identical.
pub const DUPLICATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dist(&self, other: &Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn midpoint(&self, other: &Point2) -> Point2 {
        Point2::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }

    /// Distance from `self` to the closed segment `[a, b]`.
    pub fn dist_to_segment(&self, a: &Point2, b: &Point2) -> f64 {
        let (dx, dy) = (b.x - a.x, b.y - a.y);
        let len2 = dx * dx + dy * dy;
        if len2 == 0.0 {
            return self.dist(a);
        }
        let t = (((self.x - a.x) * dx + (self.y - a.y) * dy) / len2).clamp(0.0, 1.0);
        self.dist(&Point2::new(a.x + t * dx, a.y + t * dy))
    }
}

/// Twice the signed area of `(a, b, c)`; positive when counter-clockwise.
pub fn orient2d(a: &Point2, b: &Point2, c: &Point2) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

/// A mesh edge with its adjacent triangles.
///
/// `vertices` is sorted ascending. `minus` is the adjacent triangle of
/// smaller index and `plus` the other one (absent on the boundary). The
/// edge normal points out of `minus`.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub vertices: [usize; 2],
    pub minus: usize,
    pub plus: Option<usize>,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.plus.is_none()
    }
}

/// Output of [`build_edge_topology`].
#[derive(Debug, Clone)]
pub struct EdgeTopology {
    pub edges: Vec<Edge>,
    /// `tri_edges[t][i]` is the edge opposite local vertex `i` of triangle `t`.
    pub tri_edges: Vec<[usize; 3]>,
}

/// Enumerates the edges of a triangle list. Edges are numbered in order of
/// first appearance while scanning triangles and their local edges.
pub fn build_edge_topology(n_vertices: usize, triangles: &[[usize; 3]]) -> Result<EdgeTopology> {
    let mut index: HashMap<(usize, usize), usize> = HashMap::with_capacity(triangles.len() * 2);
    let mut adjacent: Vec<Vec<usize>> = Vec::new();
    let mut keys: Vec<[usize; 2]> = Vec::new();
    let mut tri_edges = Vec::with_capacity(triangles.len());

    for (t, tri) in triangles.iter().enumerate() {
        let mut local = [0usize; 3];
        for i in 0..3 {
            let (a, b) = (tri[(i + 1) % 3], tri[(i + 2) % 3]);
            if a >= n_vertices || b >= n_vertices {
                return Err(Error::InvalidArgument(format!(
                    "triangle {t} references vertex outside 0..{n_vertices}"
                )));
            }
            let key = (a.min(b), a.max(b));
            let e = *index.entry(key).or_insert_with(|| {
                keys.push([key.0, key.1]);
                adjacent.push(Vec::with_capacity(2));
                keys.len() - 1
            });
            adjacent[e].push(t);
            local[i] = e;
        }
        tri_edges.push(local);
    }

    let mut edges = Vec::with_capacity(keys.len());
    for (vertices, adj) in keys.into_iter().zip(adjacent) {
        match adj.as_slice() {
            [t] => edges.push(Edge { vertices, minus: *t, plus: None }),
            [t0, t1] => edges.push(Edge {
                vertices,
                minus: (*t0).min(*t1),
                plus: Some((*t0).max(*t1)),
            }),
            _ => return Err(Error::Topology(vertices[0], vertices[1], adj.len())),
        }
    }
    Ok(EdgeTopology { edges, tri_edges })
}

/// A conforming triangulation with counter-clockwise triangles and
/// precomputed edge topology. Immutable after construction.
#[derive(Debug, Clone)]
pub struct Triangulation {
    vertices: Vec<Point2>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<Edge>,
    tri_edges: Vec<[usize; 3]>,
    pattern_tag: Option<String>,
    /// Triangles are stored with their bisection edge opposite local vertex 0.
    bisection_ordered: bool,
}

impl Triangulation {
    /// Validates orientation and conformity and builds the edge topology.
    pub fn new(vertices: Vec<Point2>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        if let Some(p) = vertices.iter().find(|p| !p.is_finite()) {
            return Err(Error::DegenerateGeometry(format!("non-finite vertex {p:?}")));
        }
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= vertices.len()) {
                return Err(Error::InvalidArgument(format!("triangle {t} has invalid vertex")));
            }
            let det = orient2d(&vertices[tri[0]], &vertices[tri[1]], &vertices[tri[2]]);
            if !(det > 0.0) {
                return Err(Error::DegenerateGeometry(format!(
                    "triangle {t} {tri:?} is not counter-clockwise (2*area = {det:e})"
                )));
            }
        }
        let topo = build_edge_topology(vertices.len(), &triangles)?;
        Ok(Self {
            vertices,
            triangles,
            edges: topo.edges,
            tri_edges: topo.tri_edges,
            pattern_tag: None,
            bisection_ordered: false,
        })
    }

    pub fn with_tag(mut self, tag: impl Into<String>) -> Self {
        self.pattern_tag = Some(tag.into());
        self
    }

    pub(crate) fn set_tag(&mut self, tag: Option<String>) {
        self.pattern_tag = tag;
    }

    pub(crate) fn set_bisection_ordered(&mut self, ordered: bool) {
        self.bisection_ordered = ordered;
    }

    pub(crate) fn bisection_ordered(&self) -> bool {
        self.bisection_ordered
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn tri_edges(&self) -> &[[usize; 3]] {
        &self.tri_edges
    }

    pub fn pattern_tag(&self) -> Option<&str> {
        self.pattern_tag.as_deref()
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn boundary_edge_flags(&self) -> Vec<bool> {
        self.edges.iter().map(Edge::is_boundary).collect()
    }

    pub fn triangle_points(&self, t: usize) -> [Point2; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_points(t);
        0.5 * orient2d(&a, &b, &c)
    }

    pub fn centroid(&self, t: usize) -> Point2 {
        let [a, b, c] = self.triangle_points(t);
        Point2::new((a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0)
    }

    pub fn area(&self) -> f64 {
        (0..self.n_triangles()).map(|t| self.triangle_area(t)).sum()
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let [a, b] = self.edges[e].vertices;
        self.vertices[a].dist(&self.vertices[b])
    }

    /// Unit normal of edge `e`, pointing out of its `minus` triangle. On the
    /// boundary this is the outward normal of the domain.
    pub fn edge_normal(&self, e: usize) -> [f64; 2] {
        let edge = &self.edges[e];
        let [a, b] = edge.vertices;
        let (pa, pb) = (self.vertices[a], self.vertices[b]);
        let len = pa.dist(&pb);
        let mut n = [(pb.y - pa.y) / len, -(pb.x - pa.x) / len];
        let opposite = self.triangles[edge.minus]
            .iter()
            .copied()
            .find(|&v| v != a && v != b)
            .expect("triangle has a vertex off the edge");
        let po = self.vertices[opposite];
        if n[0] * (po.x - pa.x) + n[1] * (po.y - pa.y) > 0.0 {
            n = [-n[0], -n[1]];
        }
        n
    }

    /// Largest edge length.
    pub fn max_edge_length(&self) -> f64 {
        (0..self.n_edges()).map(|e| self.edge_length(e)).fold(0.0, f64::max)
    }

    pub fn boundary_vertices(&self) -> Vec<bool> {
        let mut flags = vec![false; self.n_vertices()];
        for e in self.edges.iter().filter(|e| e.is_boundary()) {
            flags[e.vertices[0]] = true;
            flags[e.vertices[1]] = true;
        }
        flags
    }

    /// Distance from `p` to the polygonal boundary of the mesh.
    pub fn distance_to_boundary(&self, p: &Point2) -> f64 {
        self.edges
            .iter()
            .filter(|e| e.is_boundary())
            .map(|e| p.dist_to_segment(&self.vertices[e.vertices[0]], &self.vertices[e.vertices[1]]))
            .fold(f64::INFINITY, f64::min)
    }

    /// Triangles incident to each vertex, in ascending triangle order.
    pub fn vertex_triangles(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_vertices()];
        for (t, tri) in self.triangles.iter().enumerate() {
            for &v in tri {
                out[v].push(t);
            }
        }
        out
    }

    /// `V - E + T`; equals 1 for a simply connected domain.
    pub fn euler_characteristic(&self) -> i64 {
        self.n_vertices() as i64 - self.n_edges() as i64 + self.n_triangles() as i64
    }

    /// Checks orientation, edge manifoldness and (optionally) the covered area.
    pub fn validate(&self, expected_area: Option<f64>) -> Result<()> {
        for t in 0..self.n_triangles() {
            if !(self.triangle_area(t) > 0.0) {
                return Err(Error::DegenerateGeometry(format!("triangle {t} has non-positive area")));
            }
        }
        if let Some(area) = expected_area {
            let total = self.area();
            if (total - area).abs() > 1e-12 * area.abs().max(1.0) {
                return Err(Error::DegenerateGeometry(format!(
                    "mesh covers area {total}, expected {area}"
                )));
            }
        }
        Ok(())
    }
}

use super::basis::{LagrangeBasis, Vec2};
use crate::error::{Error, Result};
use crate::mesh::{Point2, Triangulation};
use std::sync::{Arc, OnceLock};

/// Affine data of one triangle.
#[derive(Debug, Clone, Copy)]
pub struct ElementGeometry {
    pub area: f64,
    pub grad_lambda: [Vec2; 3],
    pub vertices: [Point2; 3],
}

impl ElementGeometry {
    pub fn new(p: [Point2; 3]) -> Self {
        let det = (p[1].x - p[0].x) * (p[2].y - p[0].y) - (p[1].y - p[0].y) * (p[2].x - p[0].x);
        let grad_lambda = [0, 1, 2].map(|i| {
            let (a, b) = (p[(i + 1) % 3], p[(i + 2) % 3]);
            [(a.y - b.y) / det, (b.x - a.x) / det]
        });
        Self { area: 0.5 * det, grad_lambda, vertices: p }
    }

    pub fn point(&self, bary: [f64; 3]) -> Point2 {
        let v = &self.vertices;
        Point2::new(
            bary[0] * v[0].x + bary[1] * v[1].x + bary[2] * v[2].x,
            bary[0] * v[0].y + bary[1] * v[1].y + bary[2] * v[2].y,
        )
    }

    pub fn barycentric(&self, p: &Point2) -> [f64; 3] {
        let v0 = self.vertices[0];
        let l1 = self.grad_lambda[1][0] * (p.x - v0.x) + self.grad_lambda[1][1] * (p.y - v0.y);
        let l2 = self.grad_lambda[2][0] * (p.x - v0.x) + self.grad_lambda[2][1] * (p.y - v0.y);
        [1.0 - l1 - l2, l1, l2]
    }

    pub fn diameter(&self) -> f64 {
        let v = &self.vertices;
        v[0].dist(&v[1]).max(v[1].dist(&v[2])).max(v[2].dist(&v[0]))
    }
}

/// Quantised geometric fingerprint used to decide whether two nodes are of
/// the same type: offsets from the node to the vertices of the simplex that
/// carries it, sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeSignature(Vec<(i64, i64)>);

impl TypeSignature {
    fn new(node: Point2, corners: &[Point2]) -> Self {
        let q = |v: f64| (v * 1e9).round() as i64;
        let mut offsets: Vec<_> = corners.iter().map(|c| (q(c.x - node.x), q(c.y - node.y))).collect();
        offsets.sort_unstable();
        Self(offsets)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Vertex,
    /// Node inside an edge; the signature encodes the edge direction and
    /// the node's position along it.
    Edge(TypeSignature),
    /// Node in the interior of a triangle.
    Interior(TypeSignature),
}

/// Continuous degree-k Lagrange space over a triangulation.
///
/// Global numbering: vertices, then `k - 1` nodes per edge (by edge index,
/// ordered from the lower to the higher vertex index), then interior nodes
/// by triangle index.
#[derive(Debug)]
pub struct FeSpace {
    mesh: Arc<Triangulation>,
    basis: LagrangeBasis,
    node_coords: Vec<Point2>,
    elem_dofs: Vec<usize>,
    boundary: Vec<bool>,
    node_kind: Vec<NodeKind>,
    node_elements: Vec<Vec<usize>>,
    geometry: Vec<ElementGeometry>,
    locator: OnceLock<PointLocator>,
}

impl FeSpace {
    pub fn new(mesh: Arc<Triangulation>, k: usize) -> Result<Self> {
        let basis = LagrangeBasis::new(k)?;
        let (nv, ne, nt) = (mesh.n_vertices(), mesh.n_edges(), mesh.n_triangles());
        let ni = basis.n_interior();
        let n_dofs = nv + (k - 1) * ne + ni * nt;
        let nloc = basis.len();

        let geometry: Vec<ElementGeometry> =
            (0..nt).map(|t| ElementGeometry::new(mesh.triangle_points(t))).collect();

        let mut node_coords = vec![Point2::default(); n_dofs];
        let mut node_kind = vec![NodeKind::Vertex; n_dofs];
        node_coords[..nv].copy_from_slice(mesh.vertices());

        for (e, edge) in mesh.edges().iter().enumerate() {
            let (a, b) = (mesh.vertices()[edge.vertices[0]], mesh.vertices()[edge.vertices[1]]);
            for s in 0..k - 1 {
                let t = (s + 1) as f64 / k as f64;
                let p = Point2::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y));
                let dof = nv + e * (k - 1) + s;
                node_coords[dof] = p;
                node_kind[dof] = NodeKind::Edge(TypeSignature::new(p, &[a, b]));
            }
        }

        let mut elem_dofs = Vec::with_capacity(nt * nloc);
        for t in 0..nt {
            let tri = mesh.triangles()[t];
            let te = mesh.tri_edges()[t];
            let mut local = Vec::with_capacity(nloc);
            local.extend_from_slice(&tri);
            for le in 0..3 {
                let e = te[le];
                let from = tri[(le + 1) % 3];
                let forward = mesh.edges()[e].vertices[0] == from;
                for m in 1..k {
                    let s = if forward { m - 1 } else { k - 1 - m };
                    local.push(nv + e * (k - 1) + s);
                }
            }
            for i in 0..ni {
                let dof = nv + (k - 1) * ne + t * ni + i;
                let p = geometry[t].point(basis.node_bary(3 * k + i));
                node_coords[dof] = p;
                node_kind[dof] = NodeKind::Interior(TypeSignature::new(p, &geometry[t].vertices));
                local.push(dof);
            }
            elem_dofs.extend(local);
        }

        let mut boundary = vec![false; n_dofs];
        for (e, edge) in mesh.edges().iter().enumerate().filter(|(_, e)| e.is_boundary()) {
            boundary[edge.vertices[0]] = true;
            boundary[edge.vertices[1]] = true;
            for s in 0..k - 1 {
                boundary[nv + e * (k - 1) + s] = true;
            }
        }

        let mut node_elements = vec![Vec::new(); n_dofs];
        for t in 0..nt {
            for &d in &elem_dofs[t * nloc..(t + 1) * nloc] {
                node_elements[d].push(t);
            }
        }

        Ok(Self {
            mesh,
            basis,
            node_coords,
            elem_dofs,
            boundary,
            node_kind,
            node_elements,
            geometry,
            locator: OnceLock::new(),
        })
    }

    pub fn mesh(&self) -> &Triangulation {
        &self.mesh
    }

    pub fn mesh_arc(&self) -> &Arc<Triangulation> {
        &self.mesh
    }

    pub fn degree(&self) -> usize {
        self.basis.degree()
    }

    pub fn basis(&self) -> &LagrangeBasis {
        &self.basis
    }

    pub fn n_dofs(&self) -> usize {
        self.node_coords.len()
    }

    pub fn n_local(&self) -> usize {
        self.basis.len()
    }

    pub fn node_coords(&self) -> &[Point2] {
        &self.node_coords
    }

    pub fn node_kind(&self, dof: usize) -> &NodeKind {
        &self.node_kind[dof]
    }

    /// Global DOFs of triangle `t` in local basis order.
    pub fn elem_dofs(&self, t: usize) -> &[usize] {
        let n = self.n_local();
        &self.elem_dofs[t * n..(t + 1) * n]
    }

    pub fn is_boundary_dof(&self, dof: usize) -> bool {
        self.boundary[dof]
    }

    pub fn boundary_dofs(&self) -> Vec<usize> {
        (0..self.n_dofs()).filter(|&d| self.boundary[d]).collect()
    }

    /// Triangles whose closure contains the node.
    pub fn node_elements(&self, dof: usize) -> &[usize] {
        &self.node_elements[dof]
    }

    pub fn geometry(&self, t: usize) -> &ElementGeometry {
        &self.geometry[t]
    }

    /// Triangle containing `p` and the barycentric coordinates of `p` in it.
    /// Points on shared edges are attributed to the triangle of smaller index.
    pub fn locate(&self, p: &Point2) -> Result<(usize, [f64; 3])> {
        self.locator
            .get_or_init(|| PointLocator::new(&self.geometry))
            .locate(&self.geometry, p)
            .ok_or(Error::OutsideDomain(p.x, p.y))
    }
}

const LOCATE_TOL: f64 = 1e-12;
const BRUTE_FORCE_LIMIT: usize = 10_000;

/// Uniform-grid bucketing of triangle bounding boxes; falls back to a
/// linear scan for small meshes.
#[derive(Debug)]
struct PointLocator {
    origin: Point2,
    cell: f64,
    dims: (usize, usize),
    buckets: Vec<Vec<usize>>,
}

impl PointLocator {
    fn new(geometry: &[ElementGeometry]) -> Self {
        if geometry.len() < BRUTE_FORCE_LIMIT {
            return Self { origin: Point2::default(), cell: 0.0, dims: (0, 0), buckets: Vec::new() };
        }
        let (mut lo, mut hi) = (Point2::new(f64::MAX, f64::MAX), Point2::new(f64::MIN, f64::MIN));
        for g in geometry {
            for v in &g.vertices {
                lo = Point2::new(lo.x.min(v.x), lo.y.min(v.y));
                hi = Point2::new(hi.x.max(v.x), hi.y.max(v.y));
            }
        }
        let side = (geometry.len() as f64).sqrt().ceil() as usize;
        let cell = ((hi.x - lo.x).max(hi.y - lo.y) / side as f64).max(f64::MIN_POSITIVE);
        let dims = (
            ((hi.x - lo.x) / cell).floor() as usize + 1,
            ((hi.y - lo.y) / cell).floor() as usize + 1,
        );
        let mut buckets = vec![Vec::new(); dims.0 * dims.1];
        for (t, g) in geometry.iter().enumerate() {
            let xs = g.vertices.map(|v| v.x);
            let ys = g.vertices.map(|v| v.y);
            let fx = |x: f64| (((x - lo.x) / cell).floor().max(0.0) as usize).min(dims.0 - 1);
            let fy = |y: f64| (((y - lo.y) / cell).floor().max(0.0) as usize).min(dims.1 - 1);
            let (i0, i1) = (fx(xs.iter().cloned().fold(f64::MAX, f64::min) - LOCATE_TOL), fx(xs.iter().cloned().fold(f64::MIN, f64::max) + LOCATE_TOL));
            let (j0, j1) = (fy(ys.iter().cloned().fold(f64::MAX, f64::min) - LOCATE_TOL), fy(ys.iter().cloned().fold(f64::MIN, f64::max) + LOCATE_TOL));
            for j in j0..=j1 {
                for i in i0..=i1 {
                    buckets[j * dims.0 + i].push(t);
                }
            }
        }
        Self { origin: lo, cell, dims, buckets }
    }

    fn locate(&self, geometry: &[ElementGeometry], p: &Point2) -> Option<(usize, [f64; 3])> {
        let inside = |t: usize| {
            let b = geometry[t].barycentric(p);
            b.iter().all(|&l| l >= -LOCATE_TOL).then_some((t, b))
        };
        if self.buckets.is_empty() {
            return (0..geometry.len()).find_map(inside);
        }
        let i = ((p.x - self.origin.x) / self.cell).floor();
        let j = ((p.y - self.origin.y) / self.cell).floor();
        if i < 0.0 || j < 0.0 || i as usize >= self.dims.0 || j as usize >= self.dims.1 {
            return None;
        }
        // candidates are stored in ascending triangle order
        self.buckets[j as usize * self.dims.0 + i as usize].iter().copied().find_map(inside)
    }
}

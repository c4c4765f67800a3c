use crate::fem::FeSpace;
use crate::mesh::Triangulation;
use rayon::prelude::*;

/// Partition of the triangles into a boundary layer `omega1` and the
/// interior `omega2`.
#[derive(Debug, Clone)]
pub struct InteriorSplit {
    pub distance: f64,
    /// `near[d]`: DOF `d` lies within `distance` of the boundary.
    pub near: Vec<bool>,
    pub omega1: Vec<bool>,
    pub omega2: Vec<bool>,
}

impl InteriorSplit {
    pub fn omega2_count(&self) -> usize {
        self.omega2.iter().filter(|&&b| b).count()
    }
}

/// Distance to the boundary polygon formed by the boundary edges.
fn boundary_distances(mesh: &Triangulation, pts: &[crate::mesh::Point2]) -> Vec<f64> {
    pts.par_iter().map(|p| mesh.distance_to_boundary(p)).collect()
}

/// Triangles all of whose corners (or, with `by_nodes`, all of whose
/// Lagrange nodes) lie within `l` of the boundary form `omega1`; the rest
/// form `omega2`.
pub fn interior_split(space: &FeSpace, l: f64, by_nodes: bool) -> InteriorSplit {
    let mesh = space.mesh();
    let tol = l + 1e-12;
    let near: Vec<bool> = boundary_distances(mesh, space.node_coords()).into_iter().map(|d| d <= tol).collect();
    let omega1: Vec<bool> = (0..mesh.n_triangles())
        .map(|t| {
            if by_nodes {
                space.elem_dofs(t).iter().all(|&d| near[d])
            } else {
                // vertex DOFs coincide with mesh vertex indices
                mesh.triangles()[t].iter().all(|&v| near[v])
            }
        })
        .collect();
    let omega2 = omega1.iter().map(|b| !b).collect();
    InteriorSplit { distance: l, near, omega1, omega2 }
}

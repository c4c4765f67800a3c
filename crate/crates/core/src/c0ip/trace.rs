use crate::fem::{quadrature_for, to_cartesian, FeSpace, QuadratureKind, QuadratureRule, Vec2};
use crate::error::Result;

/// Normal derivatives of every local basis function of one adjacent
/// triangle at the edge quadrature points.
#[derive(Debug, Clone)]
pub struct SideTrace {
    pub triangle: usize,
    /// Barycentric coordinates of each edge quadrature point in `triangle`.
    pub bary: Vec<[f64; 3]>,
    /// `dn[q][i]`: first normal derivative of local basis `i` at point `q`.
    pub dn: Vec<Vec<f64>>,
    /// `dnn[q][i]`: second normal derivative.
    pub dnn: Vec<Vec<f64>>,
}

/// Basis traces on one edge. `minus` is always present, `plus` only on
/// interior edges; `normal` points from minus to plus (outward on the
/// boundary).
#[derive(Debug, Clone)]
pub struct EdgeTrace {
    pub edge: usize,
    pub length: f64,
    pub normal: Vec2,
    pub minus: SideTrace,
    pub plus: Option<SideTrace>,
}

pub(crate) fn edge_rule(space: &FeSpace, degree: usize) -> Result<QuadratureRule> {
    quadrature_for(QuadratureKind::Edge, degree.max(2 * space.degree()))
}

/// Barycentric coordinates in triangle `t` of the points `(1-s) a + s b`.
pub(crate) fn edge_bary(space: &FeSpace, t: usize, a: usize, b: usize, rule: &QuadratureRule) -> Vec<[f64; 3]> {
    let tri = space.mesh().triangles()[t];
    let la = tri.iter().position(|&v| v == a).expect("edge vertex in triangle");
    let lb = tri.iter().position(|&v| v == b).expect("edge vertex in triangle");
    rule.abscissae()
        .map(|s| {
            let mut bary = [0.0; 3];
            bary[la] = 1.0 - s;
            bary[lb] = s;
            bary
        })
        .collect()
}

fn side(space: &FeSpace, t: usize, a: usize, b: usize, n: Vec2, rule: &QuadratureRule) -> SideTrace {
    let bary = edge_bary(space, t, a, b, rule);
    let gl = &space.geometry(t).grad_lambda;
    let mut dn = Vec::with_capacity(bary.len());
    let mut dnn = Vec::with_capacity(bary.len());
    for &p in &bary {
        let e = to_cartesian(&space.basis().eval_bary(p), gl);
        dn.push(e.grads.iter().map(|g| g[0] * n[0] + g[1] * n[1]).collect());
        dnn.push(
            e.hessians
                .iter()
                .map(|h| h[0][0] * n[0] * n[0] + 2.0 * h[0][1] * n[0] * n[1] + h[1][1] * n[1] * n[1])
                .collect(),
        );
    }
    SideTrace { triangle: t, bary, dn, dnn }
}

/// Traces on edge `e`. With `flip` the roles of the two interior triangles
/// are exchanged and the normal reversed.
pub(crate) fn edge_trace(space: &FeSpace, e: usize, flip: bool, rule: &QuadratureRule) -> EdgeTrace {
    let mesh = space.mesh();
    let edge = &mesh.edges()[e];
    let [a, b] = edge.vertices;
    let mut normal = mesh.edge_normal(e);
    let (mut minus, mut plus) = (edge.minus, edge.plus);
    if flip {
        if let Some(p) = plus {
            plus = Some(minus);
            minus = p;
            normal = [-normal[0], -normal[1]];
        }
    }
    EdgeTrace {
        edge: e,
        length: mesh.edge_length(e),
        normal,
        minus: side(space, minus, a, b, normal, rule),
        plus: plus.map(|t| side(space, t, a, b, normal, rule)),
    }
}

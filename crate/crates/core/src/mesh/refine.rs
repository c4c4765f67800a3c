//! Uniform (red) refinement and newest-vertex bisection.

use super::{Point2, Triangulation};
use crate::error::Result;
use std::collections::{BTreeSet, HashMap};

/// Splits every triangle into four similar children through its edge
/// midpoints. Midpoints are appended in edge order.
pub fn refine_regular(mesh: &Triangulation) -> Result<Triangulation> {
    let mut verts = mesh.vertices().to_vec();
    let nv = verts.len();
    for e in mesh.edges() {
        verts.push(verts[e.vertices[0]].midpoint(&verts[e.vertices[1]]));
    }
    let mut tris = Vec::with_capacity(4 * mesh.n_triangles());
    for (tri, te) in mesh.triangles().iter().zip(mesh.tri_edges()) {
        let [a, b, c] = *tri;
        // te[i] is opposite local vertex i
        let (mbc, mca, mab) = (nv + te[0], nv + te[1], nv + te[2]);
        tris.extend([[a, mab, mca], [mab, b, mbc], [mca, mbc, c], [mab, mbc, mca]]);
    }
    let mut out = Triangulation::new(verts, tris)?;
    out.set_tag(mesh.pattern_tag().map(str::to_owned));
    Ok(out)
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// Rotates every triangle so its longest edge lies opposite local vertex 0.
fn order_for_bisection(mesh: &Triangulation) -> Vec<[usize; 3]> {
    let v = mesh.vertices();
    mesh.triangles()
        .iter()
        .map(|&[a, b, c]| {
            let len = |p: usize, q: usize| v[p].dist(&v[q]);
            let opp = [len(b, c), len(c, a), len(a, b)];
            let mut k = 0;
            for i in 1..3 {
                if opp[i] > opp[k] * (1.0 + 1e-12) {
                    k = i;
                }
            }
            let t = [a, b, c];
            [t[k], t[(k + 1) % 3], t[(k + 2) % 3]]
        })
        .collect()
}

/// Newest-vertex bisection of the `marked` triangles plus the closure needed
/// to keep the mesh conforming.
///
/// Each stored triangle `[apex, a, b]` is bisected along `(a, b)`, producing
/// `[m, apex, a]` and `[m, b, apex]`; the new vertex `m` becomes the apex of
/// both children. On the first call triangles are rotated so the
/// refinement edge is the longest edge.
pub fn refine_bisection(mesh: &Triangulation, marked: &BTreeSet<usize>) -> Result<Triangulation> {
    if marked.is_empty() {
        return Ok(mesh.clone());
    }
    let tris = if mesh.bisection_ordered() {
        mesh.triangles().to_vec()
    } else {
        order_for_bisection(mesh)
    };

    // edges to split: refinement edges of marked triangles, closed under
    // "a triangle with any split edge also splits its refinement edge"
    let mut split: BTreeSet<(usize, usize)> = marked
        .iter()
        .filter(|&&t| t < tris.len())
        .map(|&t| edge_key(tris[t][1], tris[t][2]))
        .collect();
    loop {
        let mut added = false;
        for t in &tris {
            let refinement = edge_key(t[1], t[2]);
            if split.contains(&refinement) {
                continue;
            }
            if split.contains(&edge_key(t[0], t[1])) || split.contains(&edge_key(t[2], t[0])) {
                split.insert(refinement);
                added = true;
            }
        }
        if !added {
            break;
        }
    }

    let mut verts: Vec<Point2> = mesh.vertices().to_vec();
    let mut midpoint: HashMap<(usize, usize), usize> = HashMap::with_capacity(split.len());
    for &(a, b) in &split {
        midpoint.insert((a, b), verts.len());
        verts.push(verts[a].midpoint(&verts[b]));
    }

    let mut out = Vec::with_capacity(tris.len() + 2 * split.len());
    let mut stack = Vec::new();
    for &t in &tris {
        stack.push(t);
        while let Some([apex, a, b]) = stack.pop() {
            match midpoint.get(&edge_key(a, b)) {
                Some(&m) => {
                    // push in reverse so the first child is emitted first
                    stack.push([m, b, apex]);
                    stack.push([m, apex, a]);
                }
                None => out.push([apex, a, b]),
            }
        }
    }

    let mut refined = Triangulation::new(verts, out)?;
    refined.set_tag(mesh.pattern_tag().map(str::to_owned));
    refined.set_bisection_ordered(true);
    Ok(refined)
}

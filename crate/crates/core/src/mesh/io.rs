//! Plain-text mesh format:
//!
//! ```text
//! vertices <V> triangles <T>
//! x y            (V lines)
//! i j k          (T lines, 0-based)
//! ```

use super::{Point2, Triangulation};
use crate::error::{Error, Result};
use std::io::{BufRead, Write};

pub fn write_mesh<W: Write>(mut w: W, mesh: &Triangulation) -> Result<()> {
    writeln!(w, "vertices {} triangles {}", mesh.n_vertices(), mesh.n_triangles())?;
    for p in mesh.vertices() {
        writeln!(w, "{:?} {:?}", p.x, p.y)?;
    }
    for [i, j, k] in mesh.triangles() {
        writeln!(w, "{i} {j} {k}")?;
    }
    Ok(())
}

pub fn read_mesh<R: BufRead>(r: R) -> Result<Triangulation> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty mesh file".into()))??;
    let words: Vec<&str> = header.split_whitespace().collect();
    let (nv, nt) = match words.as_slice() {
        ["vertices", v, "triangles", t] => (
            v.parse::<usize>().map_err(|e| Error::Parse(e.to_string()))?,
            t.parse::<usize>().map_err(|e| Error::Parse(e.to_string()))?,
        ),
        _ => return Err(Error::Parse(format!("bad mesh header '{header}'"))),
    };
    let mut next_fields = |what: &str| -> Result<Vec<String>> {
        let line = lines
            .next()
            .ok_or_else(|| Error::Parse(format!("unexpected end of file reading {what}")))??;
        Ok(line.split_whitespace().map(str::to_owned).collect())
    };
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let f = next_fields("vertices")?;
        let parse = |s: &String| s.parse::<f64>().map_err(|e| Error::Parse(format!("{s}: {e}")));
        match f.as_slice() {
            [x, y] => vertices.push(Point2::new(parse(x)?, parse(y)?)),
            _ => return Err(Error::Parse(format!("expected 'x y', got {f:?}"))),
        }
    }
    let mut triangles = Vec::with_capacity(nt);
    for _ in 0..nt {
        let f = next_fields("triangles")?;
        let parse = |s: &String| s.parse::<usize>().map_err(|e| Error::Parse(format!("{s}: {e}")));
        match f.as_slice() {
            [i, j, k] => triangles.push([parse(i)?, parse(j)?, parse(k)?]),
            _ => return Err(Error::Parse(format!("expected 'i j k', got {f:?}"))),
        }
    }
    Triangulation::new(vertices, triangles)
}

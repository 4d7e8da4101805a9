//! Plain-text mesh format.
//!
//! ```text
//! tetmesh 1
//! V <n>
//! x y z            (n lines)
//! T <m>
//! v0 v1 v2 v3 tag  (m lines)
//! ```
//!
//! Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;
use std::path::Path;

use super::{MeshError, TetMesh};
use crate::geometry::Point3;

fn format_err(line: usize, msg: impl Into<String>) -> MeshError {
    MeshError::Format {
        line,
        msg: msg.into(),
    }
}

pub fn parse_mesh(text: &str) -> Result<TetMesh, MeshError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let mut next = |what: &str| lines.next().ok_or_else(|| format_err(0, format!("unexpected end of file, expected {what}")));

    let (ln, header) = next("header")?;
    if header.split_whitespace().collect::<Vec<_>>() != ["tetmesh", "1"] {
        return Err(format_err(ln, "expected header `tetmesh 1`"));
    }

    let count = |ln: usize, line: &str, key: &str| -> Result<usize, MeshError> {
        let mut it = line.split_whitespace();
        if it.next() != Some(key) {
            return Err(format_err(ln, format!("expected `{key} <count>`")));
        }
        let n = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| format_err(ln, format!("bad count after `{key}`")))?;
        if it.next().is_some() {
            return Err(format_err(ln, "trailing tokens"));
        }
        Ok(n)
    };

    let (ln, line) = next("vertex count")?;
    let nv = count(ln, line, "V")?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, line) = next("vertex")?;
        let xs: Vec<f64> = line
            .split_whitespace()
            .map(|s| s.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| format_err(ln, e.to_string()))?;
        if xs.len() != 3 || xs.iter().any(|x| !x.is_finite()) {
            return Err(format_err(ln, "expected three finite coordinates"));
        }
        vertices.push(Point3::new(xs[0], xs[1], xs[2]));
    }

    let (ln, line) = next("element count")?;
    let nt = count(ln, line, "T")?;
    let mut tets = Vec::with_capacity(nt);
    let mut tags = Vec::with_capacity(nt);
    for _ in 0..nt {
        let (ln, line) = next("element")?;
        let xs: Vec<usize> = line
            .split_whitespace()
            .map(|s| s.parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|e| format_err(ln, e.to_string()))?;
        if xs.len() != 5 {
            return Err(format_err(ln, "expected four vertex indices and a tag"));
        }
        tets.push([xs[0], xs[1], xs[2], xs[3]]);
        tags.push(xs[4]);
    }
    if let Some((ln, _)) = lines.next() {
        return Err(format_err(ln, "trailing content after the element block"));
    }
    TetMesh::new(vertices, tets, tags)
}

pub fn format_mesh(mesh: &TetMesh) -> String {
    let mut s = String::new();
    writeln!(s, "tetmesh 1").unwrap();
    writeln!(s, "V {}", mesh.num_vertices()).unwrap();
    for x in mesh.vertices() {
        writeln!(s, "{:.17e} {:.17e} {:.17e}", x.x, x.y, x.z).unwrap();
    }
    writeln!(s, "T {}", mesh.num_tets()).unwrap();
    for (t, tag) in mesh.tets().iter().zip(mesh.tags()) {
        writeln!(s, "{} {} {} {} {}", t[0], t[1], t[2], t[3], tag).unwrap();
    }
    s
}

pub fn read_mesh(path: impl AsRef<Path>) -> crate::Result<TetMesh> {
    let text = std::fs::read_to_string(path)?;
    Ok(parse_mesh(&text)?)
}

pub fn write_mesh(path: impl AsRef<Path>, mesh: &TetMesh) -> crate::Result<()> {
    std::fs::write(path, format_mesh(mesh))?;
    Ok(())
}

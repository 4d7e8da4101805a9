//! Legacy ASCII VTK unstructured grids.

use std::fmt::Write as _;
use std::path::Path;

use crate::elements::{FeFunction, Space};
use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::mesh::TetMesh;

const VTK_TETRA: u32 = 10;

/// Grid with scalar cell data. The subdomain tag is always written as the
/// integer array `tag`; `cell_data` adds float arrays.
pub fn format_vtk(mesh: &TetMesh, cell_data: &[(&str, &[f64])]) -> Result<String> {
    for (name, values) in cell_data {
        if values.len() != mesh.num_tets() {
            return Err(Error::Precondition(format!(
                "cell array '{name}' has {} values for {} cells",
                values.len(),
                mesh.num_tets()
            )));
        }
        if name.contains(char::is_whitespace) || name.is_empty() {
            return Err(Error::Precondition(format!("invalid array name '{name}'")));
        }
    }
    let mut s = String::new();
    let nt = mesh.num_tets();
    // Writing into a String cannot fail.
    let _ = writeln!(s, "# vtk DataFile Version 3.0\nhcurl-afem\nASCII\nDATASET UNSTRUCTURED_GRID");
    let _ = writeln!(s, "POINTS {} double", mesh.num_vertices());
    for p in mesh.vertices() {
        let _ = writeln!(s, "{} {} {}", p.x, p.y, p.z);
    }
    let _ = writeln!(s, "CELLS {nt} {}", 5 * nt);
    for t in mesh.tets() {
        let _ = writeln!(s, "4 {} {} {} {}", t[0], t[1], t[2], t[3]);
    }
    let _ = writeln!(s, "CELL_TYPES {nt}");
    for _ in 0..nt {
        let _ = writeln!(s, "{VTK_TETRA}");
    }
    let _ = writeln!(s, "CELL_DATA {nt}\nSCALARS tag int 1\nLOOKUP_TABLE default");
    for &t in mesh.tags() {
        let _ = writeln!(s, "{t}");
    }
    for (name, values) in cell_data {
        let _ = writeln!(s, "SCALARS {name} double 1\nLOOKUP_TABLE default");
        for v in *values {
            let _ = writeln!(s, "{v}");
        }
    }
    Ok(s)
}

/// Write the mesh with its tags, the indicators `η_K` and, for an ND₀
/// solution, `|u_h|` at the centroid and `|curl u_h|` per cell.
pub fn export_vtk(path: impl AsRef<Path>, mesh: &TetMesh, eta_k: Option<&[f64]>, u_h: Option<&FeFunction>) -> Result<()> {
    let mut arrays: Vec<(&str, Vec<f64>)> = Vec::new();
    if let Some(eta) = eta_k {
        arrays.push(("eta_K", eta.to_vec()));
    }
    if let Some(u) = u_h {
        u.check(Space::Nd0, mesh)?;
        let c = [0.25; 4];
        arrays.push(("u_magnitude", (0..mesh.num_tets()).map(|k| u.eval(mesh, k, &c).norm()).collect()));
        arrays.push(("curl_u_magnitude", (0..mesh.num_tets()).map(|k| u.curl(mesh, k).norm()).collect()));
    }
    let refs: Vec<(&str, &[f64])> = arrays.iter().map(|(n, v)| (*n, v.as_slice())).collect();
    std::fs::write(path, format_vtk(mesh, &refs)?)?;
    Ok(())
}

/// Contents of a file written by [`format_vtk`].
#[derive(Debug, Clone, PartialEq)]
pub struct VtkData {
    pub points: Vec<Point3>,
    pub cells: Vec<[usize; 4]>,
    pub cell_types: Vec<u32>,
    /// Every cell array, including `tag`, in file order.
    pub cell_data: Vec<(String, Vec<f64>)>,
}

impl VtkData {
    pub fn cell_array(&self, name: &str) -> Option<&[f64]> {
        self.cell_data.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }
}

/// Reader for the subset of the legacy format produced by [`format_vtk`].
pub fn parse_vtk(text: &str) -> Result<VtkData> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let err = |line: usize, msg: &str| Error::Parse {
        line,
        msg: msg.to_string(),
    };
    let mut next = || lines.next().ok_or_else(|| err(0, "unexpected end of file"));
    let (ln, header) = next()?;
    if !header.starts_with("# vtk DataFile") {
        return Err(err(ln, "missing VTK header"));
    }
    next()?;
    let (ln, fmt) = next()?;
    if fmt != "ASCII" {
        return Err(err(ln, "only ASCII files are supported"));
    }
    let (ln, ds) = next()?;
    if ds != "DATASET UNSTRUCTURED_GRID" {
        return Err(err(ln, "expected an unstructured grid"));
    }
    let count = |ln: usize, line: &str, key: &str| -> Result<usize> {
        let mut it = line.split_whitespace();
        if it.next() != Some(key) {
            return Err(err(ln, &format!("expected {key}")));
        }
        it.next()
            .and_then(|n| n.parse().ok())
            .ok_or_else(|| err(ln, &format!("bad {key} count")))
    };
    let nums = |ln: usize, line: &str| -> Result<Vec<f64>> {
        line.split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| err(ln, &format!("bad number '{t}'"))))
            .collect()
    };

    let (ln, l) = next()?;
    let np = count(ln, l, "POINTS")?;
    let mut points = Vec::with_capacity(np);
    for _ in 0..np {
        let (ln, l) = next()?;
        let v = nums(ln, l)?;
        if v.len() != 3 {
            return Err(err(ln, "a point needs three coordinates"));
        }
        points.push(Point3::new(v[0], v[1], v[2]));
    }
    let (ln, l) = next()?;
    let nc = count(ln, l, "CELLS")?;
    let mut cells = Vec::with_capacity(nc);
    for _ in 0..nc {
        let (ln, l) = next()?;
        let v: Vec<usize> = l
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| err(ln, "bad cell index")))
            .collect::<Result<_>>()?;
        if v.len() != 5 || v[0] != 4 {
            return Err(err(ln, "only tetrahedral cells are supported"));
        }
        if v[1..].iter().any(|&i| i >= np) {
            return Err(err(ln, "cell index out of range"));
        }
        cells.push([v[1], v[2], v[3], v[4]]);
    }
    let (ln, l) = next()?;
    if count(ln, l, "CELL_TYPES")? != nc {
        return Err(err(ln, "cell type count mismatch"));
    }
    let mut cell_types = Vec::with_capacity(nc);
    for _ in 0..nc {
        let (ln, l) = next()?;
        cell_types.push(l.parse().map_err(|_| err(ln, "bad cell type"))?);
    }
    let mut cell_data = Vec::new();
    if let Ok((ln, l)) = next() {
        if count(ln, l, "CELL_DATA")? != nc {
            return Err(err(ln, "cell data count mismatch"));
        }
        while let Ok((ln, l)) = next() {
            if l.is_empty() {
                continue;
            }
            let parts: Vec<&str> = l.split_whitespace().collect();
            if parts.len() < 3 || parts[0] != "SCALARS" {
                return Err(err(ln, "expected SCALARS"));
            }
            let name = parts[1].to_string();
            let (ln, l) = next()?;
            if !l.starts_with("LOOKUP_TABLE") {
                return Err(err(ln, "expected LOOKUP_TABLE"));
            }
            let mut values = Vec::with_capacity(nc);
            for _ in 0..nc {
                let (ln, l) = next()?;
                values.push(l.parse().map_err(|_| err(ln, "bad cell value"))?);
            }
            cell_data.push((name, values));
        }
    }
    Ok(VtkData {
        points,
        cells,
        cell_types,
        cell_data,
    })
}

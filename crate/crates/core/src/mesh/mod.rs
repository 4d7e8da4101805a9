//! Conforming tetrahedral meshes with globally oriented edges and faces.
//!
//! Orientation conventions:
//! * edge `e = (a, b)` with `a < b` has unit tangent `t_e` pointing from `a` to `b`;
//! * face `F = (a, b, c)` with `a < b < c` has unit normal
//!   `n_F = (x_b - x_a) × (x_c - x_a) / |...|`;
//! * for an interior face, `K₋` is the element for which `n_F` is outward and
//!   `K₊` the one for which it is inward.
//!
//! Edges and faces are numbered in lexicographic order of their sorted vertex
//! tuples, which makes every derived numbering a pure function of the input.

mod generate;
mod io;
mod patches;
mod refine;

pub use generate::{box_mesh, edge_star, octant_star, single_tet};
pub use io::{format_mesh, parse_mesh, read_mesh, write_mesh};
pub use patches::{build_patches, PatchIndex, COEFFICIENT_TIE_TOL};
pub use refine::{bisect, uniform_refine, MAX_CLOSURE_GENERATIONS};

use thiserror::Error;

use crate::geometry::{
    signed_volume, triangle_area, Point3, TetGeometry, Vec3, EDGE_VERTICES, FACE_VERTICES,
};

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("mesh has no elements")]
    Empty,
    #[error("element {tet} references vertex {vertex}, but only {count} vertices exist")]
    IndexOutOfRange { tet: usize, vertex: usize, count: usize },
    #[error("element {0} repeats a vertex")]
    RepeatedVertex(usize),
    #[error("element {tet} is inverted or degenerate (signed volume {volume:e})")]
    InvertedTet { tet: usize, volume: f64 },
    #[error("elements {0} and {1} have the same vertex set")]
    DuplicateTet(usize, usize),
    #[error("face {face:?} is shared by more than two elements")]
    OverSharedFace { face: [usize; 3] },
    #[error("non-conforming mesh: vertex {vertex} lies on boundary face {face:?}")]
    HangingFace { face: [usize; 3], vertex: usize },
    #[error("non-conforming mesh: edge {edge:?} lies on an odd number of unmatched faces")]
    OpenSurface { edge: [usize; 2] },
    #[error("tag count {tags} does not match element count {tets}")]
    TagCount { tags: usize, tets: usize },
    #[error("refinement closure did not terminate within {0} generations")]
    RefinementDiverged(usize),
    #[error("marked element {0} does not exist")]
    MarkedOutOfRange(usize),
    #[error("mesh format error at line {line}: {msg}")]
    Format { line: usize, msg: String },
}

/// Elements on both sides of a face. Boundary faces have exactly one side set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FaceAdjacency {
    /// Element with `n_F` as outward normal.
    pub minus: Option<usize>,
    /// Element with `n_F` as inward normal.
    pub plus: Option<usize>,
}

impl FaceAdjacency {
    pub fn is_boundary(&self) -> bool {
        self.minus.is_none() || self.plus.is_none()
    }

    /// The single element of a boundary face, or `None` for an interior face.
    pub fn boundary_element(&self) -> Option<usize> {
        match (self.minus, self.plus) {
            (Some(k), None) | (None, Some(k)) => Some(k),
            _ => None,
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = usize> {
        self.minus.into_iter().chain(self.plus)
    }

    /// The neighbour of `k` across this face.
    pub fn other(&self, k: usize) -> Option<usize> {
        if self.minus == Some(k) {
            self.plus
        } else if self.plus == Some(k) {
            self.minus
        } else {
            None
        }
    }
}

/// Compressed adjacency lists.
#[derive(Debug, Clone, Default)]
pub struct Adjacency {
    offsets: Vec<usize>,
    items: Vec<usize>,
}

impl Adjacency {
    fn from_pairs(n: usize, pairs: impl Iterator<Item = (usize, usize)> + Clone) -> Self {
        let mut counts = vec![0usize; n + 1];
        for (k, _) in pairs.clone() {
            counts[k + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let mut fill = counts.clone();
        let mut items = vec![0; counts[n]];
        for (k, v) in pairs {
            items[fill[k]] = v;
            fill[k] += 1;
        }
        Self {
            offsets: counts,
            items,
        }
    }

    pub fn from_lists(lists: &[Vec<usize>]) -> Self {
        let mut offsets = Vec::with_capacity(lists.len() + 1);
        offsets.push(0);
        let mut items = Vec::with_capacity(lists.iter().map(Vec::len).sum());
        for l in lists {
            items.extend_from_slice(l);
            offsets.push(items.len());
        }
        Self { offsets, items }
    }

    pub fn get(&self, i: usize) -> &[usize] {
        &self.items[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn len(&self) -> usize {
        self.offsets.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone)]
pub struct TetMesh {
    vertices: Vec<Point3>,
    tets: Vec<[usize; 4]>,
    tags: Vec<usize>,
    geometry: Vec<TetGeometry>,

    edges: Vec<[usize; 2]>,
    edge_tangent: Vec<Vec3>,
    edge_length: Vec<f64>,
    faces: Vec<[usize; 3]>,
    face_normal: Vec<Vec3>,
    face_area: Vec<f64>,
    face_diameter: Vec<f64>,
    face_adjacency: Vec<FaceAdjacency>,

    tet_edges: Vec<[usize; 6]>,
    tet_edge_signs: Vec<[f64; 6]>,
    tet_faces: Vec<[usize; 4]>,
    tet_face_signs: Vec<[f64; 4]>,

    edge_tets: Adjacency,
    vertex_tets: Adjacency,
    face_edges: Vec<[usize; 3]>,
    boundary_edge: Vec<bool>,
    boundary_vertex: Vec<bool>,
}

impl TetMesh {
    /// Builds the mesh and all derived entities. Elements must be positively
    /// oriented: `det[x1 - x0, x2 - x0, x3 - x0] > 0`.
    pub fn new(vertices: Vec<Point3>, tets: Vec<[usize; 4]>, tags: Vec<usize>) -> Result<Self, MeshError> {
        if tets.is_empty() {
            return Err(MeshError::Empty);
        }
        if tags.len() != tets.len() {
            return Err(MeshError::TagCount {
                tags: tags.len(),
                tets: tets.len(),
            });
        }
        let nv = vertices.len();
        let mut geometry = Vec::with_capacity(tets.len());
        for (k, t) in tets.iter().enumerate() {
            for &v in t {
                if v >= nv {
                    return Err(MeshError::IndexOutOfRange {
                        tet: k,
                        vertex: v,
                        count: nv,
                    });
                }
            }
            let mut s = *t;
            s.sort_unstable();
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(MeshError::RepeatedVertex(k));
            }
            let x = t.map(|v| vertices[v]);
            match TetGeometry::new(x) {
                Some(g) => geometry.push(g),
                None => {
                    return Err(MeshError::InvertedTet {
                        tet: k,
                        volume: signed_volume(&x[0], &x[1], &x[2], &x[3]),
                    })
                }
            }
        }

        let mut sorted_tets: Vec<([usize; 4], usize)> = tets
            .iter()
            .enumerate()
            .map(|(k, t)| {
                let mut s = *t;
                s.sort_unstable();
                (s, k)
            })
            .collect();
        sorted_tets.sort_unstable();
        for w in sorted_tets.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(MeshError::DuplicateTet(w[0].1.min(w[1].1), w[0].1.max(w[1].1)));
            }
        }

        // Edges.
        let mut edge_keys: Vec<([usize; 2], usize)> = Vec::with_capacity(6 * tets.len());
        for (k, t) in tets.iter().enumerate() {
            for (le, [a, b]) in EDGE_VERTICES.iter().enumerate() {
                let (p, q) = (t[*a], t[*b]);
                edge_keys.push(([p.min(q), p.max(q)], 6 * k + le));
            }
        }
        edge_keys.sort_unstable();
        let mut edges: Vec<[usize; 2]> = Vec::new();
        let mut tet_edges = vec![[0usize; 6]; tets.len()];
        let mut tet_edge_signs = vec![[0f64; 6]; tets.len()];
        for (key, slot) in &edge_keys {
            if edges.last() != Some(key) {
                edges.push(*key);
            }
            let (k, le) = (slot / 6, slot % 6);
            tet_edges[k][le] = edges.len() - 1;
            let [a, b] = EDGE_VERTICES[le];
            tet_edge_signs[k][le] = if tets[k][a] < tets[k][b] { 1.0 } else { -1.0 };
        }
        let edge_length: Vec<f64> = edges
            .iter()
            .map(|[a, b]| (vertices[*b] - vertices[*a]).norm())
            .collect();
        let edge_tangent: Vec<Vec3> = edges
            .iter()
            .zip(&edge_length)
            .map(|([a, b], l)| (vertices[*b] - vertices[*a]) / *l)
            .collect();

        // Faces.
        let mut face_keys: Vec<([usize; 3], usize)> = Vec::with_capacity(4 * tets.len());
        for (k, t) in tets.iter().enumerate() {
            for (lf, fv) in FACE_VERTICES.iter().enumerate() {
                let mut key = fv.map(|i| t[i]);
                key.sort_unstable();
                face_keys.push((key, 4 * k + lf));
            }
        }
        face_keys.sort_unstable();
        let mut faces: Vec<[usize; 3]> = Vec::new();
        let mut face_adjacency: Vec<FaceAdjacency> = Vec::new();
        let mut face_normal: Vec<Vec3> = Vec::new();
        let mut face_area = Vec::new();
        let mut face_diameter = Vec::new();
        let mut tet_faces = vec![[0usize; 4]; tets.len()];
        let mut tet_face_signs = vec![[0f64; 4]; tets.len()];
        let mut share_count: Vec<u8> = Vec::new();
        for (key, slot) in &face_keys {
            if faces.last() != Some(key) {
                faces.push(*key);
                let [a, b, c] = key.map(|v| vertices[v]);
                let n = (b - a).cross(&(c - a));
                face_normal.push(n.normalize());
                face_area.push(triangle_area(&a, &b, &c));
                face_diameter.push((b - a).norm().max((c - a).norm()).max((c - b).norm()));
                face_adjacency.push(FaceAdjacency {
                    minus: None,
                    plus: None,
                });
                share_count.push(0);
            }
            let f = faces.len() - 1;
            share_count[f] += 1;
            if share_count[f] > 2 {
                return Err(MeshError::OverSharedFace { face: *key });
            }
            let (k, lf) = (slot / 4, slot % 4);
            tet_faces[k][lf] = f;
            let outward = geometry[k].outward_normal(lf);
            let sign = if outward.dot(&face_normal[f]) > 0.0 { 1.0 } else { -1.0 };
            tet_face_signs[k][lf] = sign;
            let adj = &mut face_adjacency[f];
            let slot = if sign > 0.0 { &mut adj.minus } else { &mut adj.plus };
            if slot.is_some() {
                // Both neighbours on the same side means overlapping elements.
                return Err(MeshError::OverSharedFace { face: *key });
            }
            *slot = Some(k);
        }

        let face_edges: Vec<[usize; 3]> = (0..faces.len()).map(|_| [0; 3]).collect();
        let mut mesh = TetMesh {
            vertices,
            tets,
            tags,
            geometry,
            edges,
            edge_tangent,
            edge_length,
            faces,
            face_normal,
            face_area,
            face_diameter,
            face_adjacency,
            tet_edges,
            tet_edge_signs,
            tet_faces,
            tet_face_signs,
            edge_tets: Adjacency::default(),
            vertex_tets: Adjacency::default(),
            face_edges,
            boundary_edge: Vec::new(),
            boundary_vertex: Vec::new(),
        };
        mesh.finish_topology()?;
        Ok(mesh)
    }

    fn finish_topology(&mut self) -> Result<(), MeshError> {
        let ne = self.edges.len();
        let nt = self.tets.len();
        let pairs = (0..nt).flat_map(|k| (0..6).map(move |le| (k, le)));
        let tet_edges = &self.tet_edges;
        self.edge_tets = Adjacency::from_pairs(ne, pairs.map(|(k, le)| (tet_edges[k][le], k)));
        let tets = &self.tets;
        let vpairs = (0..nt).flat_map(|k| (0..4).map(move |lv| (k, lv)));
        self.vertex_tets = Adjacency::from_pairs(self.vertices.len(), vpairs.map(|(k, lv)| (tets[k][lv], k)));

        for k in 0..nt {
            for lf in 0..4 {
                let f = self.tet_faces[k][lf];
                let le = crate::geometry::FACE_EDGES[lf];
                let mut es = le.map(|e| self.tet_edges[k][e]);
                es.sort_unstable();
                self.face_edges[f] = es;
            }
        }

        let mut boundary_face_count = vec![0u32; ne];
        let mut boundary_vertex = vec![false; self.vertices.len()];
        for (f, adj) in self.face_adjacency.iter().enumerate() {
            if adj.is_boundary() {
                for e in self.face_edges[f] {
                    boundary_face_count[e] += 1;
                }
                for v in self.faces[f] {
                    boundary_vertex[v] = true;
                }
            }
        }
        if let Some(e) = boundary_face_count.iter().position(|c| c % 2 == 1) {
            return Err(MeshError::OpenSurface { edge: self.edges[e] });
        }
        self.boundary_edge = boundary_face_count.iter().map(|&c| c > 0).collect();
        self.boundary_vertex = boundary_vertex;
        self.check_hanging_vertices()
    }

    /// A non-conforming refinement of a face leaves its single-sided parent
    /// with another boundary vertex in its closure. Looks for such vertices
    /// using a uniform grid over the boundary vertices.
    fn check_hanging_vertices(&self) -> Result<(), MeshError> {
        let boundary_faces: Vec<usize> = self.boundary_faces().collect();
        if boundary_faces.is_empty() {
            return Ok(());
        }
        let mut diam: Vec<f64> = boundary_faces.iter().map(|&f| self.face_diameter[f]).collect();
        diam.sort_unstable_by(f64::total_cmp);
        let cell = diam[diam.len() / 2];
        let key = |x: &Point3| {
            [
                (x.x / cell).floor() as i64,
                (x.y / cell).floor() as i64,
                (x.z / cell).floor() as i64,
            ]
        };
        let mut grid: std::collections::HashMap<[i64; 3], Vec<usize>> = std::collections::HashMap::new();
        for v in (0..self.vertices.len()).filter(|&v| self.boundary_vertex[v]) {
            grid.entry(key(&self.vertices[v])).or_default().push(v);
        }
        for &f in &boundary_faces {
            let [a, b, c] = self.faces[f];
            let (xa, xb, xc) = (self.vertices[a], self.vertices[b], self.vertices[c]);
            let tol = 1e-10 * self.face_diameter[f];
            let lo = key(&xa.inf(&xb).inf(&xc).add_scalar(-tol));
            let hi = key(&xa.sup(&xb).sup(&xc).add_scalar(tol));
            for i in lo[0]..=hi[0] {
                for j in lo[1]..=hi[1] {
                    for k in lo[2]..=hi[2] {
                        let Some(list) = grid.get(&[i, j, k]) else { continue };
                        for &v in list {
                            if v != a && v != b && v != c && point_in_triangle(&self.vertices[v], &xa, &xb, &xc, tol) {
                                return Err(MeshError::HangingFace { face: self.faces[f], vertex: v });
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }
    pub fn num_tets(&self) -> usize {
        self.tets.len()
    }
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }
    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }
    pub fn num_subdomains(&self) -> usize {
        self.tags.iter().max().map_or(0, |m| m + 1)
    }

    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }
    pub fn vertex(&self, v: usize) -> &Point3 {
        &self.vertices[v]
    }
    pub fn tets(&self) -> &[[usize; 4]] {
        &self.tets
    }
    pub fn tet(&self, k: usize) -> &[usize; 4] {
        &self.tets[k]
    }
    pub fn tags(&self) -> &[usize] {
        &self.tags
    }
    pub fn tag(&self, k: usize) -> usize {
        self.tags[k]
    }
    pub fn geometry(&self, k: usize) -> &TetGeometry {
        &self.geometry[k]
    }
    pub fn volume(&self, k: usize) -> f64 {
        self.geometry[k].volume
    }
    /// Element diameter `h_K`, the longest edge.
    pub fn h(&self, k: usize) -> f64 {
        self.geometry[k].diameter
    }
    pub fn total_volume(&self) -> f64 {
        self.geometry.iter().map(|g| g.volume).sum()
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }
    pub fn edge(&self, e: usize) -> [usize; 2] {
        self.edges[e]
    }
    pub fn edge_tangent(&self, e: usize) -> &Vec3 {
        &self.edge_tangent[e]
    }
    pub fn edge_length(&self, e: usize) -> f64 {
        self.edge_length[e]
    }
    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.boundary_edge[e]
    }
    pub fn edge_tets(&self, e: usize) -> &[usize] {
        self.edge_tets.get(e)
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }
    pub fn face(&self, f: usize) -> [usize; 3] {
        self.faces[f]
    }
    pub fn face_normal(&self, f: usize) -> &Vec3 {
        &self.face_normal[f]
    }
    pub fn face_area(&self, f: usize) -> f64 {
        self.face_area[f]
    }
    /// Face diameter `h_F`, the longest side.
    pub fn face_diameter(&self, f: usize) -> f64 {
        self.face_diameter[f]
    }
    pub fn face_adjacency(&self, f: usize) -> FaceAdjacency {
        self.face_adjacency[f]
    }
    pub fn is_boundary_face(&self, f: usize) -> bool {
        self.face_adjacency[f].is_boundary()
    }
    pub fn face_edges(&self, f: usize) -> [usize; 3] {
        self.face_edges[f]
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary_vertex[v]
    }
    pub fn vertex_tets(&self, v: usize) -> &[usize] {
        self.vertex_tets.get(v)
    }

    /// Global edges of element `k` in local order `(0,1),(0,2),(0,3),(1,2),(1,3),(2,3)`.
    pub fn tet_edges(&self, k: usize) -> &[usize; 6] {
        &self.tet_edges[k]
    }
    /// `+1` where the local edge direction agrees with the global tangent.
    pub fn tet_edge_signs(&self, k: usize) -> &[f64; 6] {
        &self.tet_edge_signs[k]
    }
    /// Global faces of element `k`; local face `i` is opposite local vertex `i`.
    pub fn tet_faces(&self, k: usize) -> &[usize; 4] {
        &self.tet_faces[k]
    }
    /// `+1` where the local outward normal agrees with the global normal.
    pub fn tet_face_signs(&self, k: usize) -> &[f64; 4] {
        &self.tet_face_signs[k]
    }

    /// Position of local vertex for global vertex `v` in element `k`.
    pub fn local_vertex(&self, k: usize, v: usize) -> Option<usize> {
        self.tets[k].iter().position(|&w| w == v)
    }

    /// Vertices of each boundary face, used by the boundary-contact tests.
    pub fn boundary_faces(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.faces.len()).filter(|&f| self.face_adjacency[f].is_boundary())
    }

    /// Normalized radius ratio `3 r_in / R_circ` of every element; `1` for a
    /// regular tetrahedron.
    pub fn shape_quality(&self) -> Vec<f64> {
        self.geometry.iter().map(radius_ratio).collect()
    }
}

fn point_in_triangle(p: &Point3, a: &Point3, b: &Point3, c: &Point3, tol: f64) -> bool {
    let n = (b - a).cross(&(c - a));
    let area2 = n.norm();
    if (p - a).dot(&n).abs() > tol * area2 {
        return false;
    }
    // Barycentric coordinates from signed sub-areas.
    let la = (c - b).cross(&(p - b)).dot(&n) / (area2 * area2);
    let lb = (a - c).cross(&(p - c)).dot(&n) / (area2 * area2);
    let lc = 1.0 - la - lb;
    let eps = 1e-10;
    la >= -eps && lb >= -eps && lc >= -eps
}

pub fn radius_ratio(g: &TetGeometry) -> f64 {
    let x = &g.vertices;
    let area: f64 = FACE_VERTICES
        .iter()
        .map(|[a, b, c]| triangle_area(&x[*a], &x[*b], &x[*c]))
        .sum();
    let inradius = 3.0 * g.volume / area;
    // Circumcentre c solves 2 (x_i - x_0)·c = |x_i|² - |x_0|².
    let m = nalgebra::Matrix3::from_rows(&[
        (x[1] - x[0]).transpose(),
        (x[2] - x[0]).transpose(),
        (x[3] - x[0]).transpose(),
    ]);
    let rhs = nalgebra::Vector3::new(
        0.5 * (x[1] - x[0]).norm_squared(),
        0.5 * (x[2] - x[0]).norm_squared(),
        0.5 * (x[3] - x[0]).norm_squared(),
    );
    let circumradius = m.lu().solve(&rhs).map_or(f64::INFINITY, |c| c.norm());
    (3.0 * inradius / circumradius).min(1.0)
}

#[cfg(test)]
mod tests;

//! Element, face and coefficient-weighted patches around edges, vertices,
//! faces and elements.

use super::{Adjacency, TetMesh};
use crate::elements::CoefficientField;

/// Relative tolerance for ties when selecting extremal-coefficient elements.
pub const COEFFICIENT_TIE_TOL: f64 = 1e-12;

/// Patch sets for one mesh and one coefficient field. Element and face sets
/// are sorted ascending.
///
/// * `ω_e`: elements containing edge `e` (see [`TetMesh::edge_tets`]);
/// * `ω̃_e`: elements of `ω_e` attaining the maximal `μ⁻¹`;
/// * `ω̂_e`: elements of `ω_e` attaining the minimal `μ⁻¹`;
/// * `ω_{e,F}`: faces containing `e` that are interior to `ω_e`;
/// * `ω̂_{e,F}`: faces of `ω_{e,F}` that belong to an element of `ω̂_e`;
/// * `ω_z`, `ω̃_z`: elements containing vertex `z`, and those with maximal `β`;
/// * `ω_{K,F}`, `ω_{K,e}`, `ω_{K,z}`: `K` together with the elements sharing a
///   face, an edge, or a vertex with it.
#[derive(Debug, Clone)]
pub struct PatchIndex {
    edge_max_mu_inv: Adjacency,
    edge_min_mu_inv: Adjacency,
    edge_faces: Adjacency,
    edge_selected_faces: Adjacency,
    vertex_max_beta: Adjacency,
    element_face_nbrs: Adjacency,
    element_edge_nbrs: Adjacency,
    element_vertex_nbrs: Adjacency,
}

fn extremal(set: &[usize], value: impl Fn(usize) -> f64, maximum: bool) -> Vec<usize> {
    let target = if maximum {
        set.iter().map(|&k| value(k)).fold(f64::NEG_INFINITY, f64::max)
    } else {
        set.iter().map(|&k| value(k)).fold(f64::INFINITY, f64::min)
    };
    let mut out: Vec<usize> = set
        .iter()
        .copied()
        .filter(|&k| (value(k) - target).abs() <= COEFFICIENT_TIE_TOL * target.abs())
        .collect();
    out.sort_unstable();
    out
}

fn union_sorted(lists: impl Iterator<Item = usize>) -> Vec<usize> {
    let mut v: Vec<usize> = lists.collect();
    v.sort_unstable();
    v.dedup();
    v
}

pub fn build_patches(mesh: &TetMesh, coeff: &CoefficientField) -> PatchIndex {
    let mu_inv = |k: usize| coeff.mu_inv(mesh.tag(k));
    let beta = |k: usize| coeff.beta(mesh.tag(k));

    let ne = mesh.num_edges();
    let mut max_mu = Vec::with_capacity(ne);
    let mut min_mu = Vec::with_capacity(ne);
    let mut faces_of_edge: Vec<Vec<usize>> = vec![Vec::new(); ne];
    for f in 0..mesh.num_faces() {
        if !mesh.is_boundary_face(f) {
            for e in mesh.face_edges(f) {
                faces_of_edge[e].push(f);
            }
        }
    }
    let mut selected = Vec::with_capacity(ne);
    for e in 0..ne {
        let omega = mesh.edge_tets(e);
        max_mu.push(extremal(omega, mu_inv, true));
        let hat = extremal(omega, mu_inv, false);
        let faces = &mut faces_of_edge[e];
        faces.sort_unstable();
        let sel: Vec<usize> = faces
            .iter()
            .copied()
            .filter(|&f| mesh.face_adjacency(f).elements().any(|k| hat.binary_search(&k).is_ok()))
            .collect();
        selected.push(sel);
        min_mu.push(hat);
    }

    let vertex_max_beta: Vec<Vec<usize>> = (0..mesh.num_vertices())
        .map(|z| extremal(mesh.vertex_tets(z), beta, true))
        .collect();

    let nt = mesh.num_tets();
    let mut face_nbrs = Vec::with_capacity(nt);
    let mut edge_nbrs = Vec::with_capacity(nt);
    let mut vertex_nbrs = Vec::with_capacity(nt);
    for k in 0..nt {
        face_nbrs.push(union_sorted(
            std::iter::once(k).chain(mesh.tet_faces(k).iter().flat_map(|&f| mesh.face_adjacency(f).elements())),
        ));
        edge_nbrs.push(union_sorted(
            mesh.tet_edges(k).iter().flat_map(|&e| mesh.edge_tets(e).iter().copied()),
        ));
        vertex_nbrs.push(union_sorted(
            mesh.tet(k).iter().flat_map(|&z| mesh.vertex_tets(z).iter().copied()),
        ));
    }

    PatchIndex {
        edge_max_mu_inv: Adjacency::from_lists(&max_mu),
        edge_min_mu_inv: Adjacency::from_lists(&min_mu),
        edge_faces: Adjacency::from_lists(&faces_of_edge),
        edge_selected_faces: Adjacency::from_lists(&selected),
        vertex_max_beta: Adjacency::from_lists(&vertex_max_beta),
        element_face_nbrs: Adjacency::from_lists(&face_nbrs),
        element_edge_nbrs: Adjacency::from_lists(&edge_nbrs),
        element_vertex_nbrs: Adjacency::from_lists(&vertex_nbrs),
    }
}

impl PatchIndex {
    /// `ω̃_e`
    pub fn edge_max_mu_inv(&self, e: usize) -> &[usize] {
        self.edge_max_mu_inv.get(e)
    }
    /// `ω̂_e`
    pub fn edge_min_mu_inv(&self, e: usize) -> &[usize] {
        self.edge_min_mu_inv.get(e)
    }
    /// `ω_{e,F}`
    pub fn edge_interior_faces(&self, e: usize) -> &[usize] {
        self.edge_faces.get(e)
    }
    /// `ω̂_{e,F}`
    pub fn edge_selected_faces(&self, e: usize) -> &[usize] {
        self.edge_selected_faces.get(e)
    }
    /// `ω̃_z`
    pub fn vertex_max_beta(&self, z: usize) -> &[usize] {
        self.vertex_max_beta.get(z)
    }
    /// `ω_{K,F}`
    pub fn element_face_neighbors(&self, k: usize) -> &[usize] {
        self.element_face_nbrs.get(k)
    }
    /// `ω_{K,e}`
    pub fn element_edge_neighbors(&self, k: usize) -> &[usize] {
        self.element_edge_nbrs.get(k)
    }
    /// `ω_{K,z}`
    pub fn element_vertex_neighbors(&self, k: usize) -> &[usize] {
        self.element_vertex_nbrs.get(k)
    }
    pub fn num_edges(&self) -> usize {
        self.edge_faces.len()
    }
}

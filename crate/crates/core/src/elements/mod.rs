//! Finite element spaces on a [`TetMesh`]: lowest-order Nédélec edge elements
//! (ND₀), linear Brezzi-Douglas-Marini face elements (BDM₁), and continuous
//! scalar and vector P1.
//!
//! Global degrees of freedom:
//! * ND₀: one per edge, the mean of `v·t_e` along `e`;
//! * BDM₁: three per face, `|F|⁻¹ ∫_F (v·n_F) λ_z dS` for the face vertices
//!   `z` in increasing global order, stored at `3 F + position(z)`;
//! * P1: one per vertex; P1-vector: three per vertex at `3 z + component`.

mod basis;
mod coefficients;
mod interpolate;
pub mod linear;

pub use basis::{bdm1_basis, bdm1_basis_div, nd0_basis, nd0_basis_curl};
pub use coefficients::CoefficientField;
pub use interpolate::{clement_interpolate, nedelec_interpolate, nedelec_interpolate_potential};
pub use linear::VertexValues;

use crate::error::{Error, Result};
use crate::geometry::{Vec3, EDGE_VERTICES, FACE_VERTICES};
use crate::mesh::TetMesh;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Space {
    Nd0,
    Bdm1,
    P1,
    P1Vec,
}

impl Space {
    pub fn name(self) -> &'static str {
        match self {
            Space::Nd0 => "ND0",
            Space::Bdm1 => "BDM1",
            Space::P1 => "P1",
            Space::P1Vec => "P1vec",
        }
    }

    pub fn dim(self, mesh: &TetMesh) -> usize {
        match self {
            Space::Nd0 => mesh.num_edges(),
            Space::Bdm1 => 3 * mesh.num_faces(),
            Space::P1 => mesh.num_vertices(),
            Space::P1Vec => 3 * mesh.num_vertices(),
        }
    }
}

/// Position of vertex `z` within the sorted vertex triple of face `f`.
pub fn face_vertex_slot(mesh: &TetMesh, f: usize, z: usize) -> Option<usize> {
    mesh.face(f).iter().position(|&w| w == z)
}

/// A finite element function: a space tag and its global coefficient vector.
#[derive(Debug, Clone, PartialEq)]
pub struct FeFunction {
    space: Space,
    values: Vec<f64>,
}

impl FeFunction {
    pub fn new(space: Space, mesh: &TetMesh, values: Vec<f64>) -> Result<Self> {
        let expected = space.dim(mesh);
        if values.len() != expected {
            return Err(Error::DofMismatch {
                space: space.name(),
                expected,
                got: values.len(),
            });
        }
        Ok(Self { space, values })
    }

    pub(crate) fn from_parts(space: Space, values: Vec<f64>) -> Self {
        Self { space, values }
    }

    pub fn zeros(space: Space, mesh: &TetMesh) -> Self {
        Self {
            space,
            values: vec![0.0; space.dim(mesh)],
        }
    }

    pub fn space(&self) -> Space {
        self.space
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Checks that this function belongs to `space` on `mesh`.
    pub fn check(&self, space: Space, mesh: &TetMesh) -> Result<()> {
        let expected = space.dim(mesh);
        if self.space != space || self.values.len() != expected {
            return Err(Error::DofMismatch {
                space: space.name(),
                expected,
                got: self.values.len(),
            });
        }
        Ok(())
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            space: self.space,
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    /// Vertex values of the (affine) restriction to element `k`. Defined for
    /// the vector spaces; scalar P1 values are placed in the x component.
    pub fn local(&self, mesh: &TetMesh, k: usize) -> VertexValues {
        match self.space {
            Space::Nd0 => nd0_local(mesh, k, &self.values),
            Space::Bdm1 => bdm1_local(mesh, k, &self.values),
            Space::P1 => mesh.tet(k).map(|z| Vec3::new(self.values[z], 0.0, 0.0)),
            Space::P1Vec => mesh
                .tet(k)
                .map(|z| Vec3::new(self.values[3 * z], self.values[3 * z + 1], self.values[3 * z + 2])),
        }
    }

    /// Value at barycentric coordinates `lambda` of element `k`.
    pub fn eval(&self, mesh: &TetMesh, k: usize, lambda: &[f64; 4]) -> Vec3 {
        linear::eval(&self.local(mesh, k), lambda)
    }

    /// Curl on element `k` (constant for every space here).
    pub fn curl(&self, mesh: &TetMesh, k: usize) -> Vec3 {
        linear::curl(mesh.geometry(k), &self.local(mesh, k))
    }

    /// Divergence on element `k` (constant for every space here).
    pub fn div(&self, mesh: &TetMesh, k: usize) -> f64 {
        match self.space {
            Space::Nd0 => 0.0,
            _ => linear::div(mesh.geometry(k), &self.local(mesh, k)),
        }
    }
}

/// Vertex values of `Σ_e u_e φ_e` on element `k`.
pub fn nd0_local(mesh: &TetMesh, k: usize, u: &[f64]) -> VertexValues {
    let g = mesh.geometry(k);
    let edges = mesh.tet_edges(k);
    let signs = mesh.tet_edge_signs(k);
    let mut out = [Vec3::zeros(); 4];
    for (le, [a, b]) in EDGE_VERTICES.iter().enumerate() {
        let e = edges[le];
        let c = signs[le] * u[e] * mesh.edge_length(e);
        // φ = |e|(λ_a ∇λ_b - λ_b ∇λ_a): at vertex a it is |e|∇λ_b, at b it is -|e|∇λ_a.
        out[*a] += g.grad_lambda[*b] * c;
        out[*b] -= g.grad_lambda[*a] * c;
    }
    out
}

/// Vertex values of `Σ u_{F,z} ψ_{F,z}` on element `k`.
pub fn bdm1_local(mesh: &TetMesh, k: usize, u: &[f64]) -> VertexValues {
    let g = mesh.geometry(k);
    let t = mesh.tet(k);
    let faces = mesh.tet_faces(k);
    let signs = mesh.tet_face_signs(k);
    let mut out = [Vec3::zeros(); 4];
    for i in 0..4 {
        let f = faces[i];
        let h = g.height(i);
        for &j in &FACE_VERTICES[i] {
            let slot = face_vertex_slot(mesh, f, t[j]).expect("face vertex");
            let c = signs[i] * u[3 * f + slot] / h;
            if c == 0.0 {
                continue;
            }
            for &m in &FACE_VERTICES[i] {
                let w = if m == j { 9.0 } else { -3.0 };
                out[m] += (g.vertices[m] - g.vertices[i]) * (w * c);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests;

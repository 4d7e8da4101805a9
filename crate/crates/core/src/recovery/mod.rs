//! Weighted local averaging recovery of the two constitutive quantities
//! `σ_h = μ⁻¹ curl u_h` (into ND₀) and `τ_h = β u_h` (into BDM₁).
//!
//! On an interior face the one-sided values are blended with weights
//! proportional to `μ^{-1/2}` of the opposite element (for `σ`) and `β^{1/2}`
//! of the opposite element (for `τ`). Boundary faces take the value of their
//! single element.

use rayon::prelude::*;

use crate::elements::{CoefficientField, FeFunction, Space};
use crate::error::Result;
use crate::geometry::Vec3;
use crate::mesh::{PatchIndex, TetMesh};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceWeights {
    pub gamma_minus: f64,
    pub gamma_plus: f64,
    pub kappa_minus: f64,
    pub kappa_plus: f64,
}

/// Averaging weights of face `f`. Boundary faces get `(0, 1, 0, 1)`.
pub fn face_weights(mesh: &TetMesh, coeff: &CoefficientField, f: usize) -> FaceWeights {
    let adj = mesh.face_adjacency(f);
    match (adj.minus, adj.plus) {
        (Some(km), Some(kp)) => {
            let (mm, mp) = (coeff.element_mu(mesh, km), coeff.element_mu(mesh, kp));
            let (bm, bp) = (coeff.element_beta(mesh, km), coeff.element_beta(mesh, kp));
            let gamma_minus = mp.powf(-0.5) / (mm.powf(-0.5) + mp.powf(-0.5));
            let kappa_minus = bp.sqrt() / (bm.sqrt() + bp.sqrt());
            FaceWeights {
                gamma_minus,
                gamma_plus: 1.0 - gamma_minus,
                kappa_minus,
                kappa_plus: 1.0 - kappa_minus,
            }
        }
        _ => FaceWeights {
            gamma_minus: 0.0,
            gamma_plus: 1.0,
            kappa_minus: 0.0,
            kappa_plus: 1.0,
        },
    }
}

/// `σ_h = μ⁻¹ curl u_h` on element `k`.
pub fn sigma_h(mesh: &TetMesh, coeff: &CoefficientField, u_h: &FeFunction, k: usize) -> Vec3 {
    u_h.curl(mesh, k) * coeff.element_mu_inv(mesh, k)
}

/// Values of `τ_h = β u_h` from element `k` at the (sorted) vertices of face `f`.
fn tau_trace(mesh: &TetMesh, coeff: &CoefficientField, u_h: &FeFunction, k: usize, f: usize) -> [Vec3; 3] {
    let local = u_h.local(mesh, k);
    let beta = coeff.element_beta(mesh, k);
    mesh.face(f).map(|z| local[mesh.local_vertex(k, z).expect("face vertex in element")] * beta)
}

/// Face averages `σ_{h,F}` (constant) and `τ_{h,F}` (affine, as values at the
/// sorted face vertices).
pub fn face_averages(mesh: &TetMesh, coeff: &CoefficientField, u_h: &FeFunction, f: usize) -> (Vec3, [Vec3; 3]) {
    let adj = mesh.face_adjacency(f);
    match (adj.minus, adj.plus) {
        (Some(km), Some(kp)) => {
            let w = face_weights(mesh, coeff, f);
            let sigma = sigma_h(mesh, coeff, u_h, km) * w.gamma_minus + sigma_h(mesh, coeff, u_h, kp) * w.gamma_plus;
            let tm = tau_trace(mesh, coeff, u_h, km, f);
            let tp = tau_trace(mesh, coeff, u_h, kp, f);
            let tau = std::array::from_fn(|i| tm[i] * w.kappa_minus + tp[i] * w.kappa_plus);
            (sigma, tau)
        }
        _ => {
            let k = adj.boundary_element().expect("face has an element");
            (sigma_h(mesh, coeff, u_h, k), tau_trace(mesh, coeff, u_h, k, f))
        }
    }
}

/// Recovered `σ*_h ∈ ND₀`: each edge coefficient is the area-weighted mean of
/// `σ_{h,F}·t_e` over the selected faces `ω̂_{e,F}`. When that set is empty
/// (an edge whose patch has no interior face), the volume-weighted mean of
/// `σ_{h,K}·t_e` over `ω̂_e` is used instead.
pub fn recover_sigma(
    mesh: &TetMesh,
    coeff: &CoefficientField,
    patches: &PatchIndex,
    u_h: &FeFunction,
) -> Result<FeFunction> {
    u_h.check(Space::Nd0, mesh)?;
    let sigma_k: Vec<Vec3> = (0..mesh.num_tets())
        .into_par_iter()
        .map(|k| sigma_h(mesh, coeff, u_h, k))
        .collect();
    let values = (0..mesh.num_edges())
        .into_par_iter()
        .map(|e| {
            let t = mesh.edge_tangent(e);
            let faces = patches.edge_selected_faces(e);
            if faces.is_empty() {
                let set = patches.edge_min_mu_inv(e);
                let vol: f64 = set.iter().map(|&k| mesh.volume(k)).sum();
                return set.iter().map(|&k| mesh.volume(k) * sigma_k[k].dot(t)).sum::<f64>() / vol;
            }
            let mut num = 0.0;
            let mut area = 0.0;
            for &f in faces {
                let adj = mesh.face_adjacency(f);
                let w = face_weights(mesh, coeff, f);
                let (km, kp) = (adj.minus.expect("interior"), adj.plus.expect("interior"));
                let s = sigma_k[km] * w.gamma_minus + sigma_k[kp] * w.gamma_plus;
                num += mesh.face_area(f) * s.dot(t);
                area += mesh.face_area(f);
            }
            num / area
        })
        .collect();
    FeFunction::new(Space::Nd0, mesh, values)
}

/// Recovered `τ*_h ∈ BDM₁` with DOFs `|F|⁻¹ ∫_F (τ_{h,F}·n_F) λ_z dS`,
/// evaluated exactly from the vertex values of the affine normal trace.
pub fn recover_tau(mesh: &TetMesh, coeff: &CoefficientField, u_h: &FeFunction) -> Result<FeFunction> {
    u_h.check(Space::Nd0, mesh)?;
    let per_face: Vec<[f64; 3]> = (0..mesh.num_faces())
        .into_par_iter()
        .map(|f| {
            let (_, tau) = face_averages(mesh, coeff, u_h, f);
            let n = mesh.face_normal(f);
            let a = tau.map(|v| v.dot(n));
            let s = a[0] + a[1] + a[2];
            // |F|⁻¹ ∫ λ_m λ_z = (1 + δ_mz)/12
            a.map(|az| (s + az) / 12.0)
        })
        .collect();
    let values = per_face.into_iter().flatten().collect();
    FeFunction::new(Space::Bdm1, mesh, values)
}

/// `σ*_h` and `τ*_h` recovered from the same `u_h`.
#[derive(Debug, Clone)]
pub struct RecoveredPair {
    pub sigma_star: FeFunction,
    pub tau_star: FeFunction,
}

pub fn recover(
    mesh: &TetMesh,
    coeff: &CoefficientField,
    patches: &PatchIndex,
    u_h: &FeFunction,
) -> Result<RecoveredPair> {
    Ok(RecoveredPair {
        sigma_star: recover_sigma(mesh, coeff, patches, u_h)?,
        tau_star: recover_tau(mesh, coeff, u_h)?,
    })
}

//! A posteriori error indicators: the recovery-based estimator, the weighted
//! residual estimator, the two ZZ-type averaging estimators, and the data
//! oscillation terms.
//!
//! Every discrete quantity involved is affine on each element, so the
//! field-mismatch terms are integrated in closed form; only terms that involve
//! the source `f` use quadrature.

use rayon::prelude::*;

use crate::assembly::{Source, DEFAULT_ORDER};
use crate::elements::{linear, CoefficientField, FeFunction, Space, VertexValues};
use crate::error::{Error, Result};
use crate::geometry::{TetGeometry, Vec3};
use crate::mesh::{PatchIndex, TetMesh};
use crate::quadrature::tet_rule;
use crate::recovery::{recover, sigma_h, RecoveredPair};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimatorKind {
    /// `η_K = (η_⊥² + η_0² + η_R²)^{1/2}`.
    Recovery,
    /// Recovery estimator without the residual term: `(η_⊥² + η_0²)^{1/2}`.
    RecoveryPure,
    Residual,
    Zz,
    ZzFlux,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 5] = [
        EstimatorKind::Recovery,
        EstimatorKind::RecoveryPure,
        EstimatorKind::Residual,
        EstimatorKind::Zz,
        EstimatorKind::ZzFlux,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::Recovery => "recovery",
            EstimatorKind::RecoveryPure => "recovery-pure",
            EstimatorKind::Residual => "residual",
            EstimatorKind::Zz => "zz",
            EstimatorKind::ZzFlux => "zz-flux",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim().to_ascii_lowercase().replace('_', "-");
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

impl std::fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Per-element estimator components.
///
/// For the residual estimator the slots hold: `eta_perp` the tangential flux
/// jumps, `eta_0` the normal jumps together with the divergence residual, and
/// `eta_r` the element residual. For the ZZ estimators `eta_perp` is the curl
/// part, `eta_0` the field part and `eta_r` is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorField {
    pub kind: EstimatorKind,
    pub eta_perp: Vec<f64>,
    pub eta_0: Vec<f64>,
    pub eta_r: Vec<f64>,
    pub eta_k: Vec<f64>,
    pub data: Option<DataTerms>,
}

fn root_sum_sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

impl IndicatorField {
    fn from_components(kind: EstimatorKind, comps: Vec<[f64; 3]>) -> Self {
        let include_r = !matches!(kind, EstimatorKind::RecoveryPure);
        let eta_k = comps
            .iter()
            .map(|c| {
                let r = if include_r { c[2] * c[2] } else { 0.0 };
                (c[0] * c[0] + c[1] * c[1] + r).sqrt()
            })
            .collect();
        Self {
            kind,
            eta_perp: comps.iter().map(|c| c[0]).collect(),
            eta_0: comps.iter().map(|c| c[1]).collect(),
            eta_r: comps.iter().map(|c| c[2]).collect(),
            eta_k,
            data: None,
        }
    }

    pub fn len(&self) -> usize {
        self.eta_k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eta_k.is_empty()
    }

    pub fn eta(&self) -> f64 {
        root_sum_sq(&self.eta_k)
    }
    pub fn eta_perp_global(&self) -> f64 {
        root_sum_sq(&self.eta_perp)
    }
    pub fn eta_0_global(&self) -> f64 {
        root_sum_sq(&self.eta_0)
    }
    pub fn eta_r_global(&self) -> f64 {
        root_sum_sq(&self.eta_r)
    }
}

/// Data oscillation terms: `η_{K,d}`, `H`, `H̃`, and the per-element
/// oscillation `osc_K² = β_K⁻¹h_K²‖div f‖²_K + μ_K h_K²‖f − f_h‖²_K`.
#[derive(Debug, Clone, PartialEq)]
pub struct DataTerms {
    pub eta_d: Vec<f64>,
    pub osc_k: Vec<f64>,
    pub h: f64,
    pub h_tilde: f64,
    pub osc: f64,
}

impl DataTerms {
    /// `osc(f, μ, β; ω_{K,F})` over the face patch of `k`.
    pub fn osc_face_patch(&self, patches: &PatchIndex, k: usize) -> f64 {
        patches
            .element_face_neighbors(k)
            .iter()
            .map(|&j| self.osc_k[j] * self.osc_k[j])
            .sum::<f64>()
            .sqrt()
    }
}

/// `∫_K |f − p|²` for an affine `p` given by vertex values.
fn source_misfit_sq(f: &Source, tag: usize, g: &TetGeometry, p: &VertexValues, order: usize) -> Result<f64> {
    let rule = tet_rule(order)?;
    Ok(rule
        .iter()
        .map(|(l, w)| w * (f.eval(tag, &g.point_from_barycentric(l)) - linear::eval(p, l)).norm_squared())
        .sum::<f64>()
        * g.volume)
}

/// `∫_K (div f − c)²` for a constant `c`.
fn divergence_misfit_sq(f: &Source, tag: usize, g: &TetGeometry, c: f64, order: usize) -> Result<f64> {
    let div = f.divergence().ok_or(Error::MissingDivergence("divergence residual"))?;
    let rule = tet_rule(order)?;
    Ok(rule
        .iter()
        .map(|(l, w)| w * (div(tag, &g.point_from_barycentric(l)) - c).powi(2))
        .sum::<f64>()
        * g.volume)
}

/// Recovery-based indicators from a precomputed recovered pair.
pub fn eta_recovery_with(
    mesh: &TetMesh,
    coeff: &CoefficientField,
    u_h: &FeFunction,
    rec: &RecoveredPair,
    f: &Source,
    kind: EstimatorKind,
) -> Result<IndicatorField> {
    u_h.check(Space::Nd0, mesh)?;
    rec.sigma_star.check(Space::Nd0, mesh)?;
    rec.tau_star.check(Space::Bdm1, mesh)?;
    let comps = (0..mesh.num_tets())
        .into_par_iter()
        .map(|k| -> Result<[f64; 3]> {
            let g = mesh.geometry(k);
            let tag = mesh.tag(k);
            let (mu, beta) = (coeff.mu(tag), coeff.beta(tag));
            let u = u_h.local(mesh, k);
            let sigma_k = linear::curl(g, &u) / mu;
            let sigma_star = rec.sigma_star.local(mesh, k);
            let tau_star = rec.tau_star.local(mesh, k);
            let d_sigma = sigma_star.map(|s| s - sigma_k);
            let perp = (mu * linear::norm_sq(g, &d_sigma)).sqrt();
            let d_tau = linear::sub(&tau_star, &linear::scale(&u, beta));
            let zero = (linear::norm_sq(g, &d_tau) / beta).sqrt();
            // f − βu_h − curl σ*: the affine part is βu_h + curl σ*.
            let curl_star = linear::curl(g, &sigma_star);
            let p = linear::scale(&u, beta).map(|v| v + curl_star);
            let r = mu.sqrt() * g.diameter * source_misfit_sq(f, tag, g, &p, DEFAULT_ORDER)?.sqrt();
            Ok([perp, zero, r])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IndicatorField::from_components(kind, comps))
}

/// Recovery-based estimator `η_K`, recovering `σ*_h` and `τ*_h` first.
pub fn eta_recovery(
    mesh: &TetMesh,
    coeff: &CoefficientField,
    patches: &PatchIndex,
    u_h: &FeFunction,
    f: &Source,
) -> Result<IndicatorField> {
    let rec = recover(mesh, coeff, patches, u_h)?;
    eta_recovery_with(mesh, coeff, u_h, &rec, f, EstimatorKind::Recovery)
}

/// `‖[β u_h·n]‖²_F` on an interior face, `None` on the boundary.
fn normal_jump_sq(mesh: &TetMesh, coeff: &CoefficientField, u_h: &FeFunction, f: usize) -> Option<f64> {
    let adj = mesh.face_adjacency(f);
    let (km, kp) = (adj.minus?, adj.plus?);
    let n = mesh.face_normal(f);
    let trace = |k: usize| {
        let local = u_h.local(mesh, k);
        let beta = coeff.element_beta(mesh, k);
        mesh.face(f)
            .map(|z| beta * local[mesh.local_vertex(k, z).expect("face vertex")].dot(n))
    };
    let (a, b) = (trace(km), trace(kp));
    Some(linear::triangle_sq_integral(mesh.face_area(f), [a[0] - b[0], a[1] - b[1], a[2] - b[2]]))
}

/// `‖[(μ⁻¹ curl u_h) × n]‖²_F` on an interior face, `None` on the boundary.
fn tangential_jump_sq(mesh: &TetMesh, coeff: &CoefficientField, u_h: &FeFunction, f: usize) -> Option<f64> {
    let adj = mesh.face_adjacency(f);
    let (km, kp) = (adj.minus?, adj.plus?);
    let d = sigma_h(mesh, coeff, u_h, km) - sigma_h(mesh, coeff, u_h, kp);
    Some(d.cross(mesh.face_normal(f)).norm_squared() * mesh.face_area(f))
}

/// Weighted residual estimator. Face jump terms are taken over interior faces
/// and contribute `h_F/2` to each neighbour.
pub fn eta_residual(mesh: &TetMesh, coeff: &CoefficientField, u_h: &FeFunction, f: &Source) -> Result<IndicatorField> {
    u_h.check(Space::Nd0, mesh)?;
    if !f.has_divergence() {
        return Err(Error::MissingDivergence("the residual estimator"));
    }
    let face_terms: Vec<(f64, f64)> = (0..mesh.num_faces())
        .into_par_iter()
        .map(|face| {
            let hf = mesh.face_diameter(face);
            match (
                normal_jump_sq(mesh, coeff, u_h, face),
                tangential_jump_sq(mesh, coeff, u_h, face),
            ) {
                (Some(nj), Some(tj)) => (
                    0.5 * hf * nj / coeff.face_beta(mesh, face),
                    0.5 * hf * coeff.face_mu(mesh, face) * tj,
                ),
                _ => (0.0, 0.0),
            }
        })
        .collect();
    let comps = (0..mesh.num_tets())
        .into_par_iter()
        .map(|k| -> Result<[f64; 3]> {
            let g = mesh.geometry(k);
            let tag = mesh.tag(k);
            let (mu, beta) = (coeff.mu(tag), coeff.beta(tag));
            let h2 = g.diameter * g.diameter;
            let u = u_h.local(mesh, k);
            // curl(μ⁻¹ curl u_h) and div u_h vanish elementwise in ND₀.
            let element = mu * h2 * source_misfit_sq(f, tag, g, &linear::scale(&u, beta), DEFAULT_ORDER)?;
            let div = h2 / beta * divergence_misfit_sq(f, tag, g, 0.0, DEFAULT_ORDER)?;
            let (mut normal, mut tangential) = (0.0, 0.0);
            for &face in mesh.tet_faces(k) {
                normal += face_terms[face].0;
                tangential += face_terms[face].1;
            }
            Ok([tangential.sqrt(), (div + normal).sqrt(), element.sqrt()])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IndicatorField::from_components(EstimatorKind::Residual, comps))
}

/// Nodal vertex-patch volume averages of an elementwise affine field.
fn patch_average(mesh: &TetMesh, field: &[VertexValues]) -> Vec<Vec3> {
    (0..mesh.num_vertices())
        .into_par_iter()
        .map(|z| {
            let tets = mesh.vertex_tets(z);
            let vol: f64 = tets.iter().map(|&k| mesh.volume(k)).sum();
            let int: Vec3 = tets.iter().map(|&k| linear::mean(&field[k]) * mesh.volume(k)).sum();
            int / vol
        })
        .collect()
}

/// ZZ-type estimators: recover the two fields into continuous P1 by
/// vertex-patch volume averaging and measure the mismatch. `weights` gives,
/// for element `k`, the weights applied to the curl part and to the field part
/// and the element values being averaged.
fn zz_generic(
    mesh: &TetMesh,
    u_h: &FeFunction,
    kind: EstimatorKind,
    fields: impl Fn(usize) -> (VertexValues, VertexValues, f64, f64) + Sync,
) -> Result<IndicatorField> {
    u_h.check(Space::Nd0, mesh)?;
    let elementwise: Vec<_> = (0..mesh.num_tets()).into_par_iter().map(&fields).collect();
    let curl_part: Vec<VertexValues> = elementwise.iter().map(|e| e.0).collect();
    let field_part: Vec<VertexValues> = elementwise.iter().map(|e| e.1).collect();
    let r_perp = patch_average(mesh, &curl_part);
    let r_zero = patch_average(mesh, &field_part);
    let comps = (0..mesh.num_tets())
        .into_par_iter()
        .map(|k| {
            let g = mesh.geometry(k);
            let t = mesh.tet(k);
            let (c, v, wc, wv) = &elementwise[k];
            let dc = linear::sub(&t.map(|z| r_perp[z]), c);
            let dv = linear::sub(&t.map(|z| r_zero[z]), v);
            [
                (wc * linear::norm_sq(g, &dc)).sqrt(),
                (wv * linear::norm_sq(g, &dv)).sqrt(),
                0.0,
            ]
        })
        .collect();
    Ok(IndicatorField::from_components(kind, comps))
}

/// ZZ estimator in the energy norm: averages `curl u_h` and `u_h`.
pub fn eta_zz(mesh: &TetMesh, coeff: &CoefficientField, u_h: &FeFunction) -> Result<IndicatorField> {
    zz_generic(mesh, u_h, EstimatorKind::Zz, |k| {
        let local = u_h.local(mesh, k);
        let c = linear::curl(mesh.geometry(k), &local);
        let tag = mesh.tag(k);
        ([c; 4], local, coeff.mu_inv(tag), coeff.beta(tag))
    })
}

/// Flux-based ZZ estimator: averages `μ⁻¹ curl u_h` and `β u_h`.
pub fn eta_zz_flux(mesh: &TetMesh, coeff: &CoefficientField, u_h: &FeFunction) -> Result<IndicatorField> {
    zz_generic(mesh, u_h, EstimatorKind::ZzFlux, |k| {
        let local = u_h.local(mesh, k);
        let tag = mesh.tag(k);
        let (mu, beta) = (coeff.mu(tag), coeff.beta(tag));
        let s = linear::curl(mesh.geometry(k), &local) / mu;
        ([s; 4], linear::scale(&local, beta), mu, 1.0 / beta)
    })
}

/// Element-local L² projection of `f` onto affine vector fields (which is
/// `BDM₁(K)`), returned as vertex values.
pub fn local_projection(f: &Source, tag: usize, g: &TetGeometry, order: usize) -> Result<VertexValues> {
    let rule = tet_rule(order)?;
    let mut b = [Vec3::zeros(); 4];
    for (l, w) in rule.iter() {
        let fx = f.eval(tag, &g.point_from_barycentric(l));
        for i in 0..4 {
            b[i] += fx * (w * l[i] * g.volume);
        }
    }
    // The P1 mass matrix is |K|/20 (I + 11ᵀ); its inverse is 20/|K| (I − 11ᵀ/5).
    let s = (b[0] + b[1] + b[2] + b[3]) / 5.0;
    Ok(b.map(|bi| (bi - s) * (20.0 / g.volume)))
}

/// Data terms `η_{K,d} = β_K^{-1/2} h_K ‖div(f − τ*_h)‖_K`, `H`, `H̃` and the
/// oscillation of `f`. The vertex-patch mean `F_{ω_z}` is zero at boundary
/// vertices.
pub fn data_terms(
    mesh: &TetMesh,
    coeff: &CoefficientField,
    rec: &RecoveredPair,
    f: &Source,
) -> Result<DataTerms> {
    rec.tau_star.check(Space::Bdm1, mesh)?;
    if !f.has_divergence() {
        return Err(Error::MissingDivergence("the data oscillation terms"));
    }
    let div = f.divergence().expect("checked above").clone();
    // Per element: ∫ g, ∫ g², osc_K², with g = div f − div τ*.
    let per_element = (0..mesh.num_tets())
        .into_par_iter()
        .map(|k| -> Result<(f64, f64, f64)> {
            let g = mesh.geometry(k);
            let tag = mesh.tag(k);
            let (mu, beta) = (coeff.mu(tag), coeff.beta(tag));
            let h2 = g.diameter * g.diameter;
            let c = rec.tau_star.div(mesh, k);
            let rule = tet_rule(DEFAULT_ORDER)?;
            let mut int_g = 0.0;
            for (l, w) in rule.iter() {
                int_g += w * (div(tag, &g.point_from_barycentric(l)) - c);
            }
            int_g *= g.volume;
            let int_g2 = divergence_misfit_sq(f, tag, g, c, DEFAULT_ORDER)?;
            let fh = local_projection(f, tag, g, DEFAULT_ORDER)?;
            let osc2 = h2 / beta * divergence_misfit_sq(f, tag, g, 0.0, DEFAULT_ORDER)?
                + mu * h2 * source_misfit_sq(f, tag, g, &fh, DEFAULT_ORDER)?;
            Ok((int_g, int_g2, osc2))
        })
        .collect::<Result<Vec<_>>>()?;
    let weight = |k: usize| {
        let h = mesh.h(k);
        h * h / coeff.element_beta(mesh, k)
    };
    let eta_d: Vec<f64> = (0..mesh.num_tets())
        .map(|k| (weight(k) * per_element[k].1).sqrt())
        .collect();
    let h_tilde_sq: f64 = (0..mesh.num_vertices())
        .into_par_iter()
        .map(|z| {
            let tets = mesh.vertex_tets(z);
            let mean = if mesh.is_boundary_vertex(z) {
                0.0
            } else {
                let vol: f64 = tets.iter().map(|&k| mesh.volume(k)).sum();
                tets.iter().map(|&k| per_element[k].0).sum::<f64>() / vol
            };
            tets.iter()
                .map(|&k| {
                    let (ig, ig2, _) = per_element[k];
                    let sq = ig2 - 2.0 * mean * ig + mean * mean * mesh.volume(k);
                    weight(k) * sq.max(0.0)
                })
                .sum::<f64>()
        })
        .sum();
    let osc_k: Vec<f64> = per_element.iter().map(|p| p.2.sqrt()).collect();
    Ok(DataTerms {
        h: root_sum_sq(&eta_d),
        h_tilde: h_tilde_sq.sqrt(),
        osc: root_sum_sq(&osc_k),
        eta_d,
        osc_k,
    })
}

/// Evaluate the estimator `kind`. Recovery estimators also carry their data
/// terms when the divergence of `f` is known.
pub fn estimate(
    kind: EstimatorKind,
    mesh: &TetMesh,
    coeff: &CoefficientField,
    patches: &PatchIndex,
    u_h: &FeFunction,
    f: &Source,
) -> Result<IndicatorField> {
    match kind {
        EstimatorKind::Recovery | EstimatorKind::RecoveryPure => {
            let rec = recover(mesh, coeff, patches, u_h)?;
            let mut field = eta_recovery_with(mesh, coeff, u_h, &rec, f, kind)?;
            if f.has_divergence() {
                field.data = Some(data_terms(mesh, coeff, &rec, f)?);
            }
            Ok(field)
        }
        EstimatorKind::Residual => eta_residual(mesh, coeff, u_h, f),
        EstimatorKind::Zz => eta_zz(mesh, coeff, u_h),
        EstimatorKind::ZzFlux => eta_zz_flux(mesh, coeff, u_h),
    }
}

/// Face-jump bounds against which the recovery indicators are compared:
/// for each element, `Σ_{F⊂∂K} h_F^{1/2} ‖β_F^{-1/2}[βu_h·n]‖_F` and
/// `Σ_{e∈E(K)} Σ_{F⊂ω_{e,F}} h_F^{1/2} ‖μ_F^{1/2}[(μ⁻¹curl u_h)×n]‖_F`.
pub fn jump_bounds(
    mesh: &TetMesh,
    coeff: &CoefficientField,
    patches: &PatchIndex,
    u_h: &FeFunction,
) -> Result<(Vec<f64>, Vec<f64>)> {
    u_h.check(Space::Nd0, mesh)?;
    let per_face: Vec<(f64, f64)> = (0..mesh.num_faces())
        .into_par_iter()
        .map(|face| {
            let hf = mesh.face_diameter(face).sqrt();
            let n = normal_jump_sq(mesh, coeff, u_h, face)
                .map_or(0.0, |j| hf * (j / coeff.face_beta(mesh, face)).sqrt());
            let t = tangential_jump_sq(mesh, coeff, u_h, face)
                .map_or(0.0, |j| hf * (j * coeff.face_mu(mesh, face)).sqrt());
            (n, t)
        })
        .collect();
    let normal = (0..mesh.num_tets())
        .map(|k| mesh.tet_faces(k).iter().map(|&f| per_face[f].0).sum())
        .collect();
    let tangential = (0..mesh.num_tets())
        .map(|k| {
            mesh.tet_edges(k)
                .iter()
                .flat_map(|&e| patches.edge_interior_faces(e).iter())
                .map(|&f| per_face[f].1)
                .sum()
        })
        .collect();
    Ok((normal, tangential))
}

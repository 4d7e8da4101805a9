use rayon::prelude::*;

use super::{FeFunction, Space};
use crate::error::Result;
use crate::geometry::{Point3, Vec3};
use crate::mesh::{PatchIndex, TetMesh};
use crate::quadrature::{integrate_tet, segment_rule};

/// Canonical ND₀ interpolant: `α_e(v) = |e|⁻¹ ∫_e v·t_e ds`, by two-point
/// Gauss quadrature on each edge. The caller is responsible for `v` having
/// well-defined edge traces.
pub fn nedelec_interpolate<F>(mesh: &TetMesh, v: F) -> FeFunction
where
    F: Fn(&Point3) -> Vec3 + Sync,
{
    let rule = segment_rule(3).expect("order 3 is supported");
    let values = (0..mesh.num_edges())
        .into_par_iter()
        .map(|e| edge_mean(mesh, e, &v, rule.points.as_slice(), &rule.weights))
        .collect();
    FeFunction::new(Space::Nd0, mesh, values).expect("one value per edge")
}

pub(crate) fn edge_mean<F>(mesh: &TetMesh, e: usize, v: &F, points: &[[f64; 2]], weights: &[f64]) -> f64
where
    F: Fn(&Point3) -> Vec3,
{
    let [a, b] = mesh.edge(e);
    let (xa, xb) = (mesh.vertex(a), mesh.vertex(b));
    let t = mesh.edge_tangent(e);
    points
        .iter()
        .zip(weights)
        .map(|(p, w)| w * v(&(xa * p[0] + xb * p[1])).dot(t))
        .sum()
}

/// ND₀ interpolant of `∇ψ`, exact: `α_e = (ψ(x_b) − ψ(x_a)) / |e|`.
pub fn nedelec_interpolate_potential<F>(mesh: &TetMesh, psi: F) -> FeFunction
where
    F: Fn(&Point3) -> f64 + Sync,
{
    let values = (0..mesh.num_edges())
        .into_par_iter()
        .map(|e| {
            let [a, b] = mesh.edge(e);
            (psi(mesh.vertex(b)) - psi(mesh.vertex(a))) / mesh.edge_length(e)
        })
        .collect();
    FeFunction::new(Space::Nd0, mesh, values).expect("one value per edge")
}

/// Weighted Clément-type interpolant: on an interior edge the coefficient is
/// the mean of `v` over `ω̃_e` (the maximal-`μ⁻¹` part of the edge patch)
/// dotted with `t_e`; boundary-edge coefficients are zero.
///
/// `v(k, x)` evaluates the field on element `k`, which allows fields that are
/// discontinuous across element faces. Element integrals use a rule of the
/// given order.
pub fn clement_interpolate<F>(mesh: &TetMesh, patches: &PatchIndex, order: usize, v: F) -> Result<FeFunction>
where
    F: Fn(usize, &Point3) -> Vec3 + Sync,
{
    // Element means are shared between many edges.
    let means: Vec<(Vec3, f64)> = (0..mesh.num_tets())
        .into_par_iter()
        .map(|k| {
            let g = mesh.geometry(k);
            let mut m = Vec3::zeros();
            for c in 0..3 {
                m[c] = integrate_tet(g, order, |x, _| v(k, x)[c])?;
            }
            Ok((m, g.volume))
        })
        .collect::<Result<_>>()?;
    let values = (0..mesh.num_edges())
        .map(|e| {
            if mesh.is_boundary_edge(e) {
                return 0.0;
            }
            let set = patches.edge_max_mu_inv(e);
            let integral: Vec3 = set.iter().map(|&k| means[k].0).sum();
            let volume: f64 = set.iter().map(|&k| means[k].1).sum();
            (integral / volume).dot(mesh.edge_tangent(e))
        })
        .collect();
    FeFunction::new(Space::Nd0, mesh, values)
}

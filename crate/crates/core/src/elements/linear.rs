//! Element-local affine vector fields stored by their four vertex values.
//!
//! Every ND₀ and BDM₁ function is affine on an element, so products,
//! norms, curls and divergences of these fields are available in closed form.

use crate::geometry::{TetGeometry, Vec3};

pub type VertexValues = [Vec3; 4];

pub fn eval(v: &VertexValues, lambda: &[f64; 4]) -> Vec3 {
    v[0] * lambda[0] + v[1] * lambda[1] + v[2] * lambda[2] + v[3] * lambda[3]
}

pub fn mean(v: &VertexValues) -> Vec3 {
    (v[0] + v[1] + v[2] + v[3]) * 0.25
}

pub fn scale(v: &VertexValues, s: f64) -> VertexValues {
    v.map(|x| x * s)
}

pub fn sub(a: &VertexValues, b: &VertexValues) -> VertexValues {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

/// `∫_K p·q dx`, from `∫_K λ_i λ_j = |K|(1 + δ_ij)/20`.
pub fn inner(g: &TetGeometry, p: &VertexValues, q: &VertexValues) -> f64 {
    let diag: f64 = (0..4).map(|i| p[i].dot(&q[i])).sum();
    let sp = p[0] + p[1] + p[2] + p[3];
    let sq = q[0] + q[1] + q[2] + q[3];
    g.volume / 20.0 * (diag + sp.dot(&sq))
}

pub fn norm_sq(g: &TetGeometry, p: &VertexValues) -> f64 {
    inner(g, p, p).max(0.0)
}

pub fn curl(g: &TetGeometry, v: &VertexValues) -> Vec3 {
    (0..4).map(|i| g.grad_lambda[i].cross(&v[i])).sum()
}

pub fn div(g: &TetGeometry, v: &VertexValues) -> f64 {
    (0..4).map(|i| g.grad_lambda[i].dot(&v[i])).sum()
}

/// `∫_T p² dS` for a scalar affine function on a triangle with vertex values `a`.
pub fn triangle_sq_integral(area: f64, a: [f64; 3]) -> f64 {
    let s = a[0] + a[1] + a[2];
    area / 12.0 * (a[0] * a[0] + a[1] * a[1] + a[2] * a[2] + s * s)
}

/// `∫_T p·q dS` for affine vector fields on a triangle with vertex values.
pub fn triangle_inner(area: f64, p: [Vec3; 3], q: [Vec3; 3]) -> f64 {
    let diag: f64 = (0..3).map(|i| p[i].dot(&q[i])).sum();
    let sp = p[0] + p[1] + p[2];
    let sq = q[0] + q[1] + q[2];
    area / 12.0 * (diag + sp.dot(&sq))
}

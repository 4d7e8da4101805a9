//! Local shape functions in element-local orientation. Multiply by the mesh's
//! orientation signs to obtain the restriction of a global basis function.

use crate::geometry::{TetGeometry, Vec3, EDGE_VERTICES, FACE_VERTICES};

/// ND₀ shape function of local edge `le = (a, b)` oriented from `a` to `b`:
/// `φ = |e| (λ_a ∇λ_b − λ_b ∇λ_a)`, normalized so that its mean tangential
/// component along the edge is one.
pub fn nd0_basis(g: &TetGeometry, le: usize, lambda: &[f64; 4]) -> Vec3 {
    let [a, b] = EDGE_VERTICES[le];
    let len = (g.vertices[b] - g.vertices[a]).norm();
    (g.grad_lambda[b] * lambda[a] - g.grad_lambda[a] * lambda[b]) * len
}

/// Constant curl of [`nd0_basis`]: `2|e| ∇λ_a × ∇λ_b`.
pub fn nd0_basis_curl(g: &TetGeometry, le: usize) -> Vec3 {
    let [a, b] = EDGE_VERTICES[le];
    let len = (g.vertices[b] - g.vertices[a]).norm();
    g.grad_lambda[a].cross(&g.grad_lambda[b]) * (2.0 * len)
}

/// BDM₁ shape function for local face `i` (opposite vertex `i`) and local
/// vertex `j` of that face, with the outward normal of the face as reference:
/// `ψ = (9λ_j(x_j − x_i) − 3λ_k(x_k − x_i) − 3λ_l(x_l − x_i)) / h_i`.
///
/// Its first moments on face `i` are `δ_jm`, and its normal trace vanishes on
/// the other three faces.
pub fn bdm1_basis(g: &TetGeometry, i: usize, j: usize, lambda: &[f64; 4]) -> Vec3 {
    debug_assert!(FACE_VERTICES[i].contains(&j));
    let h = g.height(i);
    FACE_VERTICES[i]
        .iter()
        .map(|&m| {
            let w = if m == j { 9.0 } else { -3.0 };
            (g.vertices[m] - g.vertices[i]) * (w * lambda[m])
        })
        .sum::<Vec3>()
        / h
}

/// Constant divergence of [`bdm1_basis`]: `3 / h_i`.
pub fn bdm1_basis_div(g: &TetGeometry, i: usize) -> f64 {
    3.0 / g.height(i)
}

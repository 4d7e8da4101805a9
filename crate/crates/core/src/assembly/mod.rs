//! Galerkin discretization of `curl(μ⁻¹ curl u) + β u = f` in ND₀.

mod norms;
mod solve;
mod sparse;

pub use norms::{energy_error, energy_norm, energy_norm_exact, residual_functional, EnergyQuadrature};
pub use solve::{solve, SolveError, SolverOptions, DIRECT_SOLVER_LIMIT};
pub use sparse::{pcg, CgStats, CsrMatrix};

use std::sync::Arc;

use rayon::prelude::*;

use crate::elements::CoefficientField;
use crate::error::Result;
use crate::geometry::{Point3, TetGeometry, Vec3, EDGE_VERTICES};
use crate::mesh::TetMesh;
use crate::quadrature::tet_rule;

/// Vector field evaluated with the subdomain tag of the element that contains
/// the point, so that piecewise-defined data is unambiguous on interfaces.
pub type VectorFn = Arc<dyn Fn(usize, &Point3) -> Vec3 + Send + Sync>;
pub type ScalarFn = Arc<dyn Fn(usize, &Point3) -> f64 + Send + Sync>;

/// Right-hand side `f`, optionally with its (piecewise) divergence.
#[derive(Clone)]
pub struct Source {
    value: VectorFn,
    divergence: Option<ScalarFn>,
}

impl std::fmt::Debug for Source {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Source")
            .field("has_divergence", &self.divergence.is_some())
            .finish()
    }
}

impl Source {
    pub fn new(value: impl Fn(usize, &Point3) -> Vec3 + Send + Sync + 'static) -> Self {
        Self {
            value: Arc::new(value),
            divergence: None,
        }
    }

    pub fn with_divergence(mut self, div: impl Fn(usize, &Point3) -> f64 + Send + Sync + 'static) -> Self {
        self.divergence = Some(Arc::new(div));
        self
    }

    /// A constant source; its divergence is zero.
    pub fn constant(c: Vec3) -> Self {
        Self::new(move |_, _| c).with_divergence(|_, _| 0.0)
    }

    pub fn zero() -> Self {
        Self::constant(Vec3::zeros())
    }

    pub fn eval(&self, tag: usize, x: &Point3) -> Vec3 {
        (self.value)(tag, x)
    }

    pub fn divergence(&self) -> Option<&ScalarFn> {
        self.divergence.as_ref()
    }

    pub fn has_divergence(&self) -> bool {
        self.divergence.is_some()
    }

    /// `s f`, with the divergence scaled accordingly.
    pub fn scaled(&self, s: f64) -> Self {
        let v = self.value.clone();
        Self {
            value: Arc::new(move |t, x| v(t, x) * s),
            divergence: self.divergence.clone().map(|d| -> ScalarFn { Arc::new(move |t, x| d(t, x) * s) }),
        }
    }
}

/// Closed-form exact solution: `u` and `curl u`.
#[derive(Clone)]
pub struct ExactSolution {
    pub u: VectorFn,
    pub curl: VectorFn,
}

impl std::fmt::Debug for ExactSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("ExactSolution")
    }
}

/// Assembled operator over all ND₀ DOFs, the load vector, and the Dirichlet
/// constraints (edge index, value) once applied.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    constrained: Vec<Option<f64>>,
}

impl LinearSystem {
    pub fn n(&self) -> usize {
        self.rhs.len()
    }

    pub fn constraint(&self, i: usize) -> Option<f64> {
        self.constrained[i]
    }

    pub fn is_constrained(&self, i: usize) -> bool {
        self.constrained[i].is_some()
    }

    pub fn free_dofs(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.constrained[i].is_none()).collect()
    }
}

/// Default order for load vectors and element integrals of data.
pub const DEFAULT_ORDER: usize = 4;

/// Element stiffness `μ⁻¹ ∫ curl φ_a · curl φ_b` plus mass `β ∫ φ_a · φ_b`,
/// in local orientation, with the products of barycentric functions
/// integrated exactly.
pub fn nd0_element_matrix(g: &TetGeometry, mu_inv: f64, beta: f64) -> [[f64; 6]; 6] {
    let m = |i: usize, j: usize| g.volume * if i == j { 2.0 } else { 1.0 } / 20.0;
    let gd = |i: usize, j: usize| g.grad_lambda[i].dot(&g.grad_lambda[j]);
    let len: [f64; 6] = EDGE_VERTICES.map(|[a, b]| (g.vertices[b] - g.vertices[a]).norm());
    let curls: [Vec3; 6] =
        std::array::from_fn(|le| crate::elements::nd0_basis_curl(g, le));
    let mut out = [[0.0; 6]; 6];
    for a in 0..6 {
        let [i, j] = EDGE_VERTICES[a];
        for b in a..6 {
            let [k, l] = EDGE_VERTICES[b];
            let mass = len[a] * len[b] * (m(i, k) * gd(j, l) - m(i, l) * gd(j, k) - m(j, k) * gd(i, l) + m(j, l) * gd(i, k));
            let stiff = curls[a].dot(&curls[b]) * g.volume;
            out[a][b] = mu_inv * stiff + beta * mass;
            out[b][a] = out[a][b];
        }
    }
    out
}

/// `∫_K f · φ_a` for the six local shape functions (local orientation).
pub fn nd0_element_load(g: &TetGeometry, tag: usize, f: &Source, order: usize) -> Result<[f64; 6]> {
    let rule = tet_rule(order)?;
    let mut out = [0.0; 6];
    for (l, w) in rule.iter() {
        let x = g.point_from_barycentric(l);
        let fx = f.eval(tag, &x) * (w * g.volume);
        for (le, o) in out.iter_mut().enumerate() {
            *o += fx.dot(&crate::elements::nd0_basis(g, le, l));
        }
    }
    Ok(out)
}

/// Assembles the full (unconstrained) system.
pub fn assemble(mesh: &TetMesh, coeff: &CoefficientField, f: &Source) -> Result<LinearSystem> {
    coeff.validate(mesh)?;
    let locals: Vec<([[f64; 6]; 6], [f64; 6])> = (0..mesh.num_tets())
        .into_par_iter()
        .map(|k| {
            let g = mesh.geometry(k);
            let tag = mesh.tag(k);
            let a = nd0_element_matrix(g, coeff.mu_inv(tag), coeff.beta(tag));
            let b = nd0_element_load(g, tag, f, DEFAULT_ORDER)?;
            Ok((a, b))
        })
        .collect::<Result<_>>()?;
    let n = mesh.num_edges();
    let mut triplets = Vec::with_capacity(36 * mesh.num_tets());
    let mut rhs = vec![0.0; n];
    for (k, (a, b)) in locals.iter().enumerate() {
        let edges = mesh.tet_edges(k);
        let s = mesh.tet_edge_signs(k);
        for i in 0..6 {
            rhs[edges[i]] += s[i] * b[i];
            for j in 0..6 {
                triplets.push((edges[i], edges[j], s[i] * s[j] * a[i][j]));
            }
        }
    }
    Ok(LinearSystem {
        matrix: CsrMatrix::from_triplets(n, triplets),
        rhs,
        constrained: vec![None; n],
    })
}

/// Fixes every boundary-edge DOF to `g(e)`, the ND₀ functional of the
/// boundary data on edge `e`. The constrained rows are eliminated in
/// [`solve`].
pub fn apply_dirichlet(mut system: LinearSystem, mesh: &TetMesh, g: impl Fn(usize) -> f64) -> LinearSystem {
    for e in 0..mesh.num_edges() {
        if mesh.is_boundary_edge(e) {
            system.constrained[e] = Some(g(e));
        }
    }
    system
}

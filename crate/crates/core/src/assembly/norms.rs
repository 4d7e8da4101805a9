use std::sync::Arc;

use rayon::prelude::*;

use super::{ExactSolution, Source, DEFAULT_ORDER};
use crate::elements::{linear, CoefficientField, FeFunction, Space};
use crate::error::Result;
use crate::geometry::TetGeometry;
use crate::mesh::TetMesh;
use crate::quadrature::tet_rule;

/// Quadrature orders for integrals against an exact solution. Elements for
/// which `singular` returns true use `singular_order`.
#[derive(Clone)]
pub struct EnergyQuadrature {
    pub order: usize,
    pub singular_order: usize,
    pub singular: Option<Arc<dyn Fn(&TetGeometry) -> bool + Send + Sync>>,
}

impl Default for EnergyQuadrature {
    fn default() -> Self {
        Self {
            order: DEFAULT_ORDER,
            singular_order: 8,
            singular: None,
        }
    }
}

impl std::fmt::Debug for EnergyQuadrature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EnergyQuadrature")
            .field("order", &self.order)
            .field("singular_order", &self.singular_order)
            .finish()
    }
}

impl EnergyQuadrature {
    pub fn order_for(&self, g: &TetGeometry) -> usize {
        match &self.singular {
            Some(s) if s(g) => self.singular_order,
            _ => self.order,
        }
    }
}

/// `|||v|||` for an ND₀ function, exact.
pub fn energy_norm(mesh: &TetMesh, coeff: &CoefficientField, v: &FeFunction) -> f64 {
    (0..mesh.num_tets())
        .into_par_iter()
        .map(|k| {
            let g = mesh.geometry(k);
            let tag = mesh.tag(k);
            let local = v.local(mesh, k);
            let c = linear::curl(g, &local);
            coeff.mu_inv(tag) * c.norm_squared() * g.volume + coeff.beta(tag) * linear::norm_sq(g, &local)
        })
        .sum::<f64>()
        .sqrt()
}

/// `|||u|||` for a closed-form field, by quadrature.
pub fn energy_norm_exact(
    mesh: &TetMesh,
    coeff: &CoefficientField,
    exact: &ExactSolution,
    quad: &EnergyQuadrature,
) -> Result<f64> {
    let zero = FeFunction::zeros(Space::Nd0, mesh);
    energy_error(mesh, coeff, &zero, exact, quad)
}

/// `|||u − u_h|||` by quadrature.
pub fn energy_error(
    mesh: &TetMesh,
    coeff: &CoefficientField,
    u_h: &FeFunction,
    exact: &ExactSolution,
    quad: &EnergyQuadrature,
) -> Result<f64> {
    u_h.check(Space::Nd0, mesh)?;
    let total: f64 = (0..mesh.num_tets())
        .into_par_iter()
        .map(|k| -> Result<f64> {
            let g = mesh.geometry(k);
            let tag = mesh.tag(k);
            let local = u_h.local(mesh, k);
            let curl_h = linear::curl(g, &local);
            let rule = tet_rule(quad.order_for(g))?;
            let (mu_inv, beta) = (coeff.mu_inv(tag), coeff.beta(tag));
            let mut acc = 0.0;
            for (l, w) in rule.iter() {
                let x = g.point_from_barycentric(l);
                let du = (exact.u)(tag, &x) - linear::eval(&local, l);
                let dc = (exact.curl)(tag, &x) - curl_h;
                acc += w * (mu_inv * dc.norm_squared() + beta * du.norm_squared());
            }
            Ok(acc * g.volume)
        })
        .try_reduce(|| 0.0, |a, b| Ok(a + b))?;
    Ok(total.sqrt())
}

/// `R(v_h) = (f, v_h) − A(u_h, v_h)`, evaluated element by element without
/// reference to an assembled matrix.
pub fn residual_functional(
    mesh: &TetMesh,
    coeff: &CoefficientField,
    f: &Source,
    u_h: &FeFunction,
    v_h: &FeFunction,
) -> Result<f64> {
    u_h.check(Space::Nd0, mesh)?;
    v_h.check(Space::Nd0, mesh)?;
    let rule = tet_rule(DEFAULT_ORDER)?;
    Ok((0..mesh.num_tets())
        .into_par_iter()
        .map(|k| {
            let g = mesh.geometry(k);
            let tag = mesh.tag(k);
            let u = u_h.local(mesh, k);
            let v = v_h.local(mesh, k);
            let a = coeff.mu_inv(tag) * linear::curl(g, &u).dot(&linear::curl(g, &v)) * g.volume
                + coeff.beta(tag) * linear::inner(g, &u, &v);
            let load: f64 = rule
                .iter()
                .map(|(l, w)| w * f.eval(tag, &g.point_from_barycentric(l)).dot(&linear::eval(&v, l)))
                .sum::<f64>()
                * g.volume;
            load - a
        })
        .sum())
}

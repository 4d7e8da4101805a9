use crate::error::{Error, Result};
use crate::mesh::TetMesh;

/// Piecewise-constant `μ` and `β`, one value per subdomain tag.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientField {
    mu: Vec<f64>,
    beta: Vec<f64>,
}

impl CoefficientField {
    pub fn new(mu: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        if mu.len() != beta.len() || mu.is_empty() {
            return Err(Error::Coefficient(format!(
                "need one μ and one β per subdomain, got {} and {}",
                mu.len(),
                beta.len()
            )));
        }
        for (j, (&m, &b)) in mu.iter().zip(&beta).enumerate() {
            if !(m > 0.0 && m.is_finite() && b > 0.0 && b.is_finite()) {
                return Err(Error::Coefficient(format!(
                    "subdomain {j}: μ = {m}, β = {b} must be positive and finite"
                )));
            }
        }
        Ok(Self { mu, beta })
    }

    /// Same as [`CoefficientField::new`] with `μ⁻¹` given instead of `μ`.
    pub fn from_mu_inv(mu_inv: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        Self::new(mu_inv.iter().map(|m| 1.0 / m).collect(), beta)
    }

    pub fn uniform(mu: f64, beta: f64) -> Result<Self> {
        Self::new(vec![mu], vec![beta])
    }

    pub fn num_subdomains(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self, tag: usize) -> f64 {
        self.mu[tag]
    }
    pub fn mu_inv(&self, tag: usize) -> f64 {
        1.0 / self.mu[tag]
    }
    pub fn beta(&self, tag: usize) -> f64 {
        self.beta[tag]
    }

    /// Fails if the mesh uses a tag without coefficients.
    pub fn validate(&self, mesh: &TetMesh) -> Result<()> {
        if mesh.num_subdomains() > self.mu.len() {
            return Err(Error::Coefficient(format!(
                "mesh uses {} subdomain tags, coefficients given for {}",
                mesh.num_subdomains(),
                self.mu.len()
            )));
        }
        Ok(())
    }

    pub fn element_mu(&self, mesh: &TetMesh, k: usize) -> f64 {
        self.mu(mesh.tag(k))
    }
    pub fn element_mu_inv(&self, mesh: &TetMesh, k: usize) -> f64 {
        self.mu_inv(mesh.tag(k))
    }
    pub fn element_beta(&self, mesh: &TetMesh, k: usize) -> f64 {
        self.beta(mesh.tag(k))
    }

    /// `μ_F⁻¹ = (μ_{K₋}⁻¹ + μ_{K₊}⁻¹)/2`; the one-sided value on boundary faces.
    pub fn face_mu_inv(&self, mesh: &TetMesh, f: usize) -> f64 {
        let vals: Vec<f64> = mesh.face_adjacency(f).elements().map(|k| self.element_mu_inv(mesh, k)).collect();
        vals.iter().sum::<f64>() / vals.len() as f64
    }

    pub fn face_mu(&self, mesh: &TetMesh, f: usize) -> f64 {
        1.0 / self.face_mu_inv(mesh, f)
    }

    /// `β_F = (β_{K₋} + β_{K₊})/2`; the one-sided value on boundary faces.
    pub fn face_beta(&self, mesh: &TetMesh, f: usize) -> f64 {
        let vals: Vec<f64> = mesh.face_adjacency(f).elements().map(|k| self.element_beta(mesh, k)).collect();
        vals.iter().sum::<f64>() / vals.len() as f64
    }
}

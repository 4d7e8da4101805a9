//! Benchmark problems: the Kellogg-type interface solution extruded in `z`,
//! a cube inclusion with a constant current, and a smooth manufactured
//! solution on the unit cube.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::assembly::{EnergyQuadrature, ExactSolution, Source};
use crate::elements::{nedelec_interpolate, nedelec_interpolate_potential, CoefficientField, FeFunction};
use crate::error::{Error, Result};
use crate::geometry::{Point3, Vec3};
use crate::mesh::{box_mesh, TetMesh};
use crate::quadrature::segment_rule;

/// Tangential boundary data, given through a field whose ND₀ interpolant
/// supplies the boundary-edge values.
#[derive(Clone)]
pub enum BoundaryData {
    Zero,
    /// `u = ∇ψ` near the boundary: edge values are exact potential differences.
    Potential(Arc<dyn Fn(&Point3) -> f64 + Send + Sync>),
    Field(Arc<dyn Fn(&Point3) -> Vec3 + Send + Sync>),
}

impl BoundaryData {
    /// ND₀ coefficients whose boundary-edge entries carry the data.
    pub fn interpolate(&self, mesh: &TetMesh) -> Option<FeFunction> {
        match self {
            BoundaryData::Zero => None,
            BoundaryData::Potential(psi) => Some(nedelec_interpolate_potential(mesh, |x| psi(x))),
            BoundaryData::Field(g) => Some(nedelec_interpolate(mesh, |x| g(x))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StoppingRule {
    /// `|||u − u_h||| / |||u||| ≤ tol`; needs an exact solution.
    RelativeError(f64),
    /// `η ≤ tol` on the current mesh, checked before refining.
    Estimator(f64),
    /// Refine until the DOF budget is exhausted.
    Budget,
}

impl StoppingRule {
    pub fn with_tol(self, tol: f64) -> Self {
        match self {
            StoppingRule::RelativeError(_) => StoppingRule::RelativeError(tol),
            StoppingRule::Estimator(_) | StoppingRule::Budget => StoppingRule::Estimator(tol),
        }
    }

    pub fn tol(self) -> Option<f64> {
        match self {
            StoppingRule::RelativeError(t) | StoppingRule::Estimator(t) => Some(t),
            StoppingRule::Budget => None,
        }
    }
}

#[derive(Clone)]
pub struct BenchmarkProblem {
    pub name: &'static str,
    pub mesh: TetMesh,
    pub coeff: CoefficientField,
    pub source: Source,
    pub boundary: BoundaryData,
    pub exact: Option<ExactSolution>,
    /// `|||u|||` over the whole domain, when known in closed form.
    pub exact_energy: Option<f64>,
    pub quadrature: EnergyQuadrature,
    pub stop: StoppingRule,
}

impl std::fmt::Debug for BenchmarkProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BenchmarkProblem")
            .field("name", &self.name)
            .field("elements", &self.mesh.num_tets())
            .field("stop", &self.stop)
            .finish()
    }
}

impl BenchmarkProblem {
    /// Replace the initial mesh, keeping everything else.
    pub fn with_mesh(mut self, mesh: TetMesh) -> Result<Self> {
        self.coeff.validate(&mesh)?;
        self.mesh = mesh;
        Ok(self)
    }
}

pub const BENCHMARK_NAMES: [&str; 3] = ["kellogg_slit", "cube_inclusion", "manufactured_cube"];

pub fn benchmark(name: &str) -> Result<BenchmarkProblem> {
    match name {
        "kellogg_slit" => kellogg_slit(),
        "cube_inclusion" => cube_inclusion(),
        "manufactured_cube" => manufactured_cube(),
        _ => Err(Error::Config(format!(
            "unknown benchmark '{name}' (expected one of {})",
            BENCHMARK_NAMES.join(", ")
        ))),
    }
}

pub fn benchmark_catalog() -> Result<Vec<BenchmarkProblem>> {
    BENCHMARK_NAMES.iter().map(|n| benchmark(n)).collect()
}

/// Parameters of the four-sector interface singularity `r^α φ(θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KelloggParams {
    pub alpha: f64,
    pub ratio: f64,
    pub rho: f64,
    pub sigma: f64,
}

impl Default for KelloggParams {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            ratio: 5.828_427_124_746_190_7,
            rho: PI / 4.0,
            sigma: -3.0 * PI / 4.0,
        }
    }
}

impl KelloggParams {
    /// `(φ(θ), φ'(θ))` for `θ ∈ [0, 2π)`.
    pub fn phi(&self, theta: f64) -> (f64, f64) {
        let g = self.alpha;
        let (amp, shift) = if theta < PI / 2.0 {
            ((g * (PI / 2.0 - self.sigma)).cos(), -PI / 2.0 + self.rho)
        } else if theta < PI {
            ((g * self.rho).cos(), -PI + self.sigma)
        } else if theta < 1.5 * PI {
            ((g * self.sigma).cos(), -PI - self.rho)
        } else {
            ((g * (PI / 2.0 - self.rho)).cos(), -1.5 * PI - self.sigma)
        };
        let a = g * (theta + shift);
        (amp * a.cos(), -g * amp * a.sin())
    }

    pub fn polar(x: &Point3) -> (f64, f64) {
        let r = x.x.hypot(x.y);
        let mut theta = x.y.atan2(x.x);
        if theta < 0.0 {
            theta += 2.0 * PI;
        }
        (r, theta)
    }

    pub fn potential(&self, x: &Point3) -> f64 {
        let (r, theta) = Self::polar(x);
        r.powf(self.alpha) * self.phi(theta).0
    }

    /// `∇(r^α φ(θ))`; the z-component vanishes.
    pub fn gradient(&self, x: &Point3) -> Vec3 {
        let (r, theta) = Self::polar(x);
        if r == 0.0 {
            return Vec3::zeros();
        }
        let (p, dp) = self.phi(theta);
        let s = r.powf(self.alpha - 1.0);
        let (c, sn) = (theta.cos(), theta.sin());
        let er = Vec3::new(c, sn, 0.0);
        let et = Vec3::new(-sn, c, 0.0);
        (er * (self.alpha * p) + et * dp) * s
    }

    /// `β` on the quadrant containing angle `θ`.
    pub fn beta_at(&self, theta: f64) -> f64 {
        let q = (theta / (PI / 2.0)).floor() as i64;
        if q % 2 == 0 {
            self.ratio
        } else {
            1.0
        }
    }

    /// `|||∇ψ|||²` over `(−1,1)² × (−δ, δ)` by composite Gauss quadrature in
    /// `θ` of the radial integral `∫_0^{ρ(θ)} r^{2α−1} dr = ρ^{2α}/(2α)`,
    /// with `ρ(θ)` the distance to the square's boundary.
    pub fn energy_sq(&self, half_depth: f64) -> f64 {
        let rule = segment_rule(11).expect("supported order");
        let pieces = 256;
        let mut total = 0.0;
        // Integrate each octant separately: ρ(θ) has kinks at odd multiples of π/4.
        for oct in 0..8 {
            let (a, b) = (oct as f64 * PI / 4.0, (oct + 1) as f64 * PI / 4.0);
            let h = (b - a) / pieces as f64;
            for i in 0..pieces {
                for (p, w) in rule.iter() {
                    let theta = a + h * (i as f64 + p[1]);
                    let rho = 1.0 / theta.cos().abs().max(theta.sin().abs());
                    let (phi, dphi) = self.phi(theta);
                    let radial = rho.powf(2.0 * self.alpha) / (2.0 * self.alpha);
                    total += w * h * radial * self.beta_at(theta) * (self.alpha.powi(2) * phi * phi + dphi * dphi);
                }
            }
        }
        2.0 * half_depth * total
    }
}

pub fn kellogg_slit() -> Result<BenchmarkProblem> {
    kellogg_with(KelloggParams::default(), [8, 8, 2])
}

/// The Kellogg benchmark with explicit parameters and initial cell counts.
pub fn kellogg_with(params: KelloggParams, cells: [usize; 3]) -> Result<BenchmarkProblem> {
    let half_depth = 0.2;
    // Tag 0: first and third quadrants (β = R); tag 1: the other two.
    let mesh = box_mesh(
        Point3::new(-1.0, -1.0, -half_depth),
        Point3::new(1.0, 1.0, half_depth),
        cells,
        |c| usize::from(c.x * c.y < 0.0),
    )?;
    let coeff = CoefficientField::new(vec![1.0, 1.0], vec![params.ratio, 1.0])?;
    let betas = [params.ratio, 1.0];
    let p = params;
    let source = Source::new(move |tag, x| p.gradient(x) * betas[tag]).with_divergence(|_, _| 0.0);
    let exact = ExactSolution {
        u: Arc::new(move |_, x| p.gradient(x)),
        curl: Arc::new(|_, _| Vec3::zeros()),
    };
    let quadrature = EnergyQuadrature {
        singular: Some(Arc::new(|g| g.vertices.iter().any(|v| v.x.hypot(v.y) < 1e-12))),
        ..EnergyQuadrature::default()
    };
    Ok(BenchmarkProblem {
        name: "kellogg_slit",
        mesh,
        coeff,
        source,
        boundary: BoundaryData::Potential(Arc::new(move |x| p.potential(x))),
        exact: Some(exact),
        exact_energy: Some(params.energy_sq(half_depth).sqrt()),
        quadrature,
        stop: StoppingRule::RelativeError(0.1),
    })
}

pub fn cube_inclusion() -> Result<BenchmarkProblem> {
    cube_inclusion_with([8, 8, 8])
}

/// The inclusion `Ω_c = [−1/2, 1/2]³` (β = 1) inside `(−1, 1)³` (β = 100),
/// `μ = 1`, `f = (1, 1, 1)`, homogeneous boundary data.
pub fn cube_inclusion_with(cells: [usize; 3]) -> Result<BenchmarkProblem> {
    let mesh = box_mesh(
        Point3::new(-1.0, -1.0, -1.0),
        Point3::new(1.0, 1.0, 1.0),
        cells,
        |c| usize::from(c.x.abs().max(c.y.abs()).max(c.z.abs()) > 0.5),
    )?;
    Ok(BenchmarkProblem {
        name: "cube_inclusion",
        mesh,
        coeff: CoefficientField::new(vec![1.0, 1.0], vec![1.0, 100.0])?,
        source: Source::constant(Vec3::new(1.0, 1.0, 1.0)),
        boundary: BoundaryData::Zero,
        exact: None,
        exact_energy: None,
        quadrature: EnergyQuadrature::default(),
        stop: StoppingRule::Estimator(0.16),
    })
}

/// `u_m = (sin πy sin πz, sin πx sin πz, sin πx sin πy)`, whose tangential
/// trace vanishes on the boundary of the unit cube.
pub fn manufactured_field(x: &Point3) -> Vec3 {
    let (sx, sy, sz) = ((PI * x.x).sin(), (PI * x.y).sin(), (PI * x.z).sin());
    Vec3::new(sy * sz, sx * sz, sx * sy)
}

pub fn manufactured_curl(x: &Point3) -> Vec3 {
    let (sx, sy, sz) = ((PI * x.x).sin(), (PI * x.y).sin(), (PI * x.z).sin());
    let (cx, cy, cz) = ((PI * x.x).cos(), (PI * x.y).cos(), (PI * x.z).cos());
    Vec3::new(sx * (cy - cz), sy * (cz - cx), sz * (cx - cy)) * PI
}

/// `|||u_m|||² = ‖curl u_m‖² + ‖u_m‖² = 3π²/2 + 3/4` on the unit cube.
pub const MANUFACTURED_ENERGY_SQ: f64 = 1.5 * PI * PI + 0.75;

pub fn manufactured_cube() -> Result<BenchmarkProblem> {
    manufactured_cube_with(4)
}

pub fn manufactured_cube_with(cells: usize) -> Result<BenchmarkProblem> {
    let mesh = box_mesh(Point3::zeros(), Point3::new(1.0, 1.0, 1.0), [cells; 3], |_| 0)?;
    // curl curl u_m = 2π² u_m, so f = (2π² + 1) u_m, which is divergence free.
    let source = Source::new(|_, x| manufactured_field(x) * (2.0 * PI * PI + 1.0)).with_divergence(|_, _| 0.0);
    Ok(BenchmarkProblem {
        name: "manufactured_cube",
        mesh,
        coeff: CoefficientField::uniform(1.0, 1.0)?,
        source,
        boundary: BoundaryData::Zero,
        exact: Some(ExactSolution {
            u: Arc::new(|_, x| manufactured_field(x)),
            curl: Arc::new(|_, x| manufactured_curl(x)),
        }),
        exact_energy: Some(MANUFACTURED_ENERGY_SQ.sqrt()),
        quadrature: EnergyQuadrature::default(),
        stop: StoppingRule::Budget,
    })
}

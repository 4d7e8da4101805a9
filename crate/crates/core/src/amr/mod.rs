//! The adaptive loop: solve, estimate, mark (Dörfler), bisect.

mod benchmarks;

pub use benchmarks::{
    benchmark, benchmark_catalog, cube_inclusion, cube_inclusion_with, kellogg_slit, kellogg_with, manufactured_cube,
    manufactured_cube_with, manufactured_curl, manufactured_field, BenchmarkProblem, BoundaryData, KelloggParams,
    StoppingRule, BENCHMARK_NAMES, MANUFACTURED_ENERGY_SQ,
};

use crate::assembly::{apply_dirichlet, assemble, energy_error, solve, LinearSystem, SolverOptions};
use crate::elements::FeFunction;
use crate::error::{Error, Result};
use crate::estimators::{estimate, EstimatorKind, IndicatorField};
use crate::mesh::{bisect, build_patches, TetMesh};

/// Dörfler marking: the shortest prefix of elements sorted by decreasing
/// indicator whose squared sum reaches `θ Σ η_K²`. Ties are broken by element
/// index. If every indicator vanishes, the element with the largest `h_K` is
/// marked.
pub fn dorfler_mark(eta: &[f64], theta: f64, h: &[f64]) -> Result<Vec<usize>> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::Marking(format!("θ = {theta} is outside (0, 1]")));
    }
    if eta.is_empty() {
        return Err(Error::Marking("no indicators".into()));
    }
    if eta.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
        return Err(Error::Marking("indicators must be finite and nonnegative".into()));
    }
    let total: f64 = eta.iter().map(|e| e * e).sum();
    if total == 0.0 {
        let k = (0..h.len()).fold(0, |best, k| if h[k] > h[best] { k } else { best });
        return Ok(vec![k]);
    }
    let mut order: Vec<usize> = (0..eta.len()).collect();
    order.sort_by(|&a, &b| eta[b].total_cmp(&eta[a]).then(a.cmp(&b)));
    let target = theta * total;
    let mut acc = 0.0;
    let mut marked = Vec::new();
    for k in order {
        marked.push(k);
        acc += eta[k] * eta[k];
        if acc >= target {
            break;
        }
    }
    Ok(marked)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelRecord {
    pub level: usize,
    pub ndof: usize,
    pub elements: usize,
    pub eta: f64,
    pub eta_perp: f64,
    pub eta_0: f64,
    pub eta_r: f64,
    /// `|||u − u_h|||` when the exact solution is known.
    pub error: Option<f64>,
    pub rel_error: Option<f64>,
    /// `η / |||u − u_h|||`.
    pub eff_index: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceHistory {
    pub problem: String,
    pub estimator: EstimatorKind,
    pub levels: Vec<LevelRecord>,
    /// Whether the problem's stopping rule was met (as opposed to the DOF or
    /// level budget running out).
    pub converged: bool,
}

impl ConvergenceHistory {
    pub fn last(&self) -> Option<&LevelRecord> {
        self.levels.last()
    }

    /// Rates `(r_η, r_err)`; see [`fit_rate`].
    pub fn rates(&self) -> Result<(f64, Option<f64>)> {
        fit_rate(self)
    }
}

/// Least-squares slope of `ln y` against `−ln N` over the last half of the
/// levels. Needs at least four levels.
pub fn fit_slope(ndof: &[usize], y: &[f64]) -> Result<f64> {
    const MIN_LEVELS: usize = 4;
    if ndof.len() < MIN_LEVELS {
        return Err(Error::TooFewLevels {
            needed: MIN_LEVELS,
            got: ndof.len(),
        });
    }
    let start = ndof.len() / 2;
    let xs: Vec<f64> = ndof[start..].iter().map(|&n| -(n as f64).ln()).collect();
    let ys: Vec<f64> = y[start..].iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Precondition("rate fit needs distinct DOF counts".into()));
    }
    Ok(sxy / sxx)
}

/// `(r_η, r_err)`, the fitted convergence orders of the estimator and, when
/// known, the error.
pub fn fit_rate(history: &ConvergenceHistory) -> Result<(f64, Option<f64>)> {
    let ndof: Vec<usize> = history.levels.iter().map(|l| l.ndof).collect();
    let eta: Vec<f64> = history.levels.iter().map(|l| l.eta).collect();
    let r_eta = fit_slope(&ndof, &eta)?;
    let errors: Option<Vec<f64>> = history.levels.iter().map(|l| l.error).collect();
    let r_err = match errors {
        Some(e) => Some(fit_slope(&ndof, &e)?),
        None => None,
    };
    Ok((r_eta, r_err))
}

#[derive(Debug, Clone, Copy)]
pub struct AmrOptions {
    pub theta: f64,
    /// Stop once a level with at least this many DOFs has been solved.
    pub max_dof: usize,
    pub max_levels: usize,
    pub solver: SolverOptions,
    /// Overrides the problem's stopping rule.
    pub stop: Option<StoppingRule>,
}

impl Default for AmrOptions {
    fn default() -> Self {
        Self {
            theta: 0.2,
            max_dof: 200_000,
            max_levels: 100,
            solver: SolverOptions::default(),
            stop: None,
        }
    }
}

/// Everything produced on one level, handed to the observer of [`amr_loop`].
pub struct LevelState<'a> {
    pub record: &'a LevelRecord,
    pub mesh: &'a TetMesh,
    pub solution: &'a FeFunction,
    pub indicators: &'a IndicatorField,
}

/// Assemble and solve the problem on `mesh`.
pub fn solve_on(problem: &BenchmarkProblem, mesh: &TetMesh, solver: &SolverOptions) -> Result<(LinearSystem, FeFunction)> {
    let system = assemble(mesh, &problem.coeff, &problem.source)?;
    let g = problem.boundary.interpolate(mesh);
    let system = apply_dirichlet(system, mesh, |e| g.as_ref().map_or(0.0, |g| g.values()[e]));
    let u = solve(&system, solver)?;
    Ok((system, u))
}

/// Run the adaptive loop. The observer sees every level after estimation and
/// before refinement; an error from it aborts the loop.
pub fn amr_loop_with<F>(
    problem: &BenchmarkProblem,
    kind: EstimatorKind,
    opts: &AmrOptions,
    mut observer: F,
) -> Result<ConvergenceHistory>
where
    F: FnMut(&LevelState<'_>) -> Result<()>,
{
    let stop = opts.stop.unwrap_or(problem.stop);
    if matches!(stop, StoppingRule::RelativeError(_)) && problem.exact.is_none() {
        return Err(Error::Config(format!(
            "{} has no exact solution, so it cannot stop on the relative error",
            problem.name
        )));
    }
    let mut history = ConvergenceHistory {
        problem: problem.name.to_string(),
        estimator: kind,
        levels: Vec::new(),
        converged: false,
    };
    let mut mesh = problem.mesh.clone();
    for level in 0..opts.max_levels {
        let (_, u_h) = solve_on(problem, &mesh, &opts.solver)?;
        let patches = build_patches(&mesh, &problem.coeff);
        let ind = estimate(kind, &mesh, &problem.coeff, &patches, &u_h, &problem.source)?;
        let error = match &problem.exact {
            Some(exact) => Some(energy_error(&mesh, &problem.coeff, &u_h, exact, &problem.quadrature)?),
            None => None,
        };
        let eta = ind.eta();
        let record = LevelRecord {
            level,
            ndof: mesh.num_edges(),
            elements: mesh.num_tets(),
            eta,
            eta_perp: ind.eta_perp_global(),
            eta_0: ind.eta_0_global(),
            eta_r: ind.eta_r_global(),
            error,
            rel_error: error.zip(problem.exact_energy).map(|(e, n)| e / n),
            eff_index: error.map(|e| eta / e),
        };
        observer(&LevelState {
            record: &record,
            mesh: &mesh,
            solution: &u_h,
            indicators: &ind,
        })?;
        let done = match stop {
            StoppingRule::RelativeError(tol) => record.rel_error.is_some_and(|r| r <= tol),
            StoppingRule::Estimator(tol) => eta <= tol,
            StoppingRule::Budget => false,
        };
        let ndof = record.ndof;
        history.levels.push(record);
        if done {
            history.converged = true;
            break;
        }
        if ndof >= opts.max_dof {
            break;
        }
        let h: Vec<f64> = (0..mesh.num_tets()).map(|k| mesh.h(k)).collect();
        let marked = dorfler_mark(&ind.eta_k, opts.theta, &h)?;
        mesh = bisect(&mesh, &marked)?;
    }
    Ok(history)
}

pub fn amr_loop(problem: &BenchmarkProblem, kind: EstimatorKind, opts: &AmrOptions) -> Result<ConvergenceHistory> {
    amr_loop_with(problem, kind, opts, |_| Ok(()))
}

#[cfg(test)]
mod tests;

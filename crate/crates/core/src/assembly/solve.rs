use faer::linalg::solvers::SolveCore;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Conj, MatMut, Side};
use thiserror::Error;

use super::sparse::{norm, pcg, CsrMatrix};
use super::LinearSystem;
use crate::elements::{FeFunction, Space};

/// Free-DOF count above which the direct factorization is replaced by PCG.
pub const DIRECT_SOLVER_LIMIT: usize = 200_000;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("solver did not converge: relative residual {residual:e} after {iterations} iterations")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("sparse factorization failed: {0}")]
    Factorization(String),
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Target relative algebraic residual on the free DOFs.
    pub tol: f64,
    pub direct_limit: usize,
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            direct_limit: DIRECT_SOLVER_LIMIT,
            max_iterations: 50_000,
        }
    }
}

fn cholesky_solve(a: &CsrMatrix, b: &[f64]) -> Result<Vec<f64>, SolveError> {
    let n = a.n();
    let mut triplets = Vec::with_capacity(a.nnz() / 2 + n);
    for i in 0..n {
        for (j, v) in a.row(i) {
            if j <= i {
                triplets.push(Triplet::new(i, j, v));
            }
        }
    }
    let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| SolveError::Factorization(format!("{e:?}")))?;
    let llt = mat
        .sp_cholesky(Side::Lower)
        .map_err(|e| SolveError::Factorization(format!("{e:?}")))?;
    let mut x = b.to_vec();
    llt.solve_in_place_with_conj(Conj::No, MatMut::from_column_major_slice_mut(&mut x, n, 1));
    Ok(x)
}

/// Solves the condensed system for the free DOFs and returns the full ND₀
/// coefficient vector including the constrained values.
pub fn solve(system: &LinearSystem, opts: &SolverOptions) -> Result<FeFunction, SolveError> {
    let n = system.n();
    let free = system.free_dofs();
    let mut u = vec![0.0; n];
    for (i, ui) in u.iter_mut().enumerate() {
        if let Some(g) = system.constraint(i) {
            *ui = g;
        }
    }
    if free.is_empty() {
        return Ok(FeFunction::from_parts(Space::Nd0, u));
    }
    // r_f = b_f - A_fc g_c
    let lifted = system.matrix.matvec(&u);
    let rhs: Vec<f64> = free.iter().map(|&i| system.rhs[i] - lifted[i]).collect();
    let a = system.matrix.principal_submatrix(&free);

    let mut x = if free.len() <= opts.direct_limit {
        cholesky_solve(&a, &rhs)?
    } else {
        vec![0.0; free.len()]
    };
    let bnorm = norm(&rhs);
    let residual = |x: &[f64]| {
        let ax = a.matvec(x);
        let r: Vec<f64> = ax.iter().zip(&rhs).map(|(p, q)| q - p).collect();
        if bnorm > 0.0 {
            norm(&r) / bnorm
        } else {
            norm(&r)
        }
    };
    let mut rel = residual(&x);
    if rel > opts.tol {
        let stats = pcg(&a, &rhs, &mut x, opts.tol, opts.max_iterations);
        rel = stats.relative_residual;
        if rel > opts.tol {
            return Err(SolveError::NotConverged {
                iterations: stats.iterations,
                residual: rel,
            });
        }
    }
    for (xi, &i) in x.iter().zip(&free) {
        u[i] = *xi;
    }
    Ok(FeFunction::from_parts(Space::Nd0, u))
}

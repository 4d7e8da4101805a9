//! Drivers behind the command-line subcommands.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use super::config::RunConfig;
use super::tables::{format_summary, summary_row, write_history_csv, write_indicator_csv};
use super::vtk::export_vtk;
use crate::amr::{amr_loop_with, benchmark, AmrOptions, BenchmarkProblem, ConvergenceHistory};
use crate::analysis::{
    check_quasimonotone_edge, check_quasimonotone_vertex, identity_suite, interp_constant_probe, write_probe_csv,
    ProbeRow,
};
use crate::assembly::SolverOptions;
use crate::error::{Error, Result};
use crate::estimators::EstimatorKind;
use crate::geometry::Point3;
use crate::mesh::{box_mesh, build_patches, read_mesh};

fn problem(config: &RunConfig) -> Result<BenchmarkProblem> {
    config.validate()?;
    let mut p = benchmark(&config.benchmark)?;
    if let Some(path) = &config.mesh {
        p = p.with_mesh(read_mesh(path)?)?;
    }
    if let Some(tol) = config.tol {
        p.stop = p.stop.with_tol(tol);
    }
    if let Some(order) = config.quadrature_order {
        p.quadrature.order = order;
    }
    Ok(p)
}

fn options(config: &RunConfig, p: &BenchmarkProblem) -> Result<AmrOptions> {
    let initial = p.mesh.num_edges();
    if config.max_dof < initial {
        return Err(Error::Config(format!(
            "max_dof = {} is below the {initial} DOFs of the initial mesh",
            config.max_dof
        )));
    }
    Ok(AmrOptions {
        theta: config.theta,
        max_dof: config.max_dof,
        max_levels: config.max_levels,
        solver: SolverOptions {
            tol: config.solver_tol,
            ..SolverOptions::default()
        },
        stop: None,
    })
}

fn run_one(config: &RunConfig, p: &BenchmarkProblem, kind: EstimatorKind, dir: &Path) -> Result<ConvergenceHistory> {
    fs::create_dir_all(dir)?;
    let opts = options(config, p)?;
    let mut partial = ConvergenceHistory {
        problem: p.name.to_string(),
        estimator: kind,
        levels: Vec::new(),
        converged: false,
    };
    let result = amr_loop_with(p, kind, &opts, |s| {
        let level = s.record.level;
        partial.levels.push(s.record.clone());
        let file = File::create(dir.join(format!("indicators_level{level:03}.csv")))?;
        write_indicator_csv(BufWriter::new(file), s.indicators)?;
        if config.vtk {
            export_vtk(
                dir.join(format!("level{level:03}.vtk")),
                s.mesh,
                Some(&s.indicators.eta_k),
                Some(s.solution),
            )?;
        }
        Ok(())
    });
    let history = match result {
        Ok(h) => h,
        Err(e) => {
            // Keep whatever was computed before the failure.
            write_history_csv(BufWriter::new(File::create(dir.join("history.csv"))?), &partial)?;
            return Err(e);
        }
    };
    write_history_csv(BufWriter::new(File::create(dir.join("history.csv"))?), &history)?;
    let rows: Vec<_> = summary_row(&history).into_iter().collect();
    fs::write(dir.join("summary.txt"), format_summary(p.name, &rows))?;
    Ok(history)
}

/// Run the adaptive loop for the configured benchmark and estimator. Writes
/// `history.csv`, `indicators_levelNNN.csv`, `levelNNN.vtk` (unless disabled)
/// and `summary.txt` into the output directory.
pub fn run(config: &RunConfig) -> Result<ConvergenceHistory> {
    let p = problem(config)?;
    run_one(config, &p, config.estimator, &config.out)
}

/// Run every estimator in `kinds` on the configured benchmark, each in its
/// own subdirectory, and write a combined `summary.txt`.
pub fn compare_estimators(config: &RunConfig, kinds: &[EstimatorKind]) -> Result<Vec<ConvergenceHistory>> {
    let p = problem(config)?;
    let mut histories = Vec::new();
    for &kind in kinds {
        histories.push(run_one(config, &p, kind, &config.out.join(kind.name()))?);
    }
    let rows: Vec<_> = histories.iter().filter_map(summary_row).collect();
    fs::write(config.out.join("summary.txt"), format_summary(p.name, &rows))?;
    Ok(histories)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AssumptionSummary {
    pub edges: usize,
    pub edge_violations: usize,
    pub vertices: usize,
    pub vertex_violations: usize,
}

/// Check both quasi-monotonicity hypotheses on the initial mesh of the
/// configured benchmark and write the violating entities to
/// `edge_violations.csv` and `vertex_violations.csv`.
pub fn check_assumptions(config: &RunConfig) -> Result<AssumptionSummary> {
    let p = problem(config)?;
    fs::create_dir_all(&config.out)?;
    let patches = build_patches(&p.mesh, &p.coeff);
    let edge = check_quasimonotone_edge(&p.mesh, &p.coeff, &patches);
    let vertex = check_quasimonotone_vertex(&p.mesh, &p.coeff, &patches);
    edge.save_violations_csv(config.out.join("edge_violations.csv"))?;
    vertex.save_violations_csv(config.out.join("vertex_violations.csv"))?;
    Ok(AssumptionSummary {
        edges: edge.entities.len(),
        edge_violations: edge.violations().count(),
        vertices: vertex.entities.len(),
        vertex_violations: vertex.violations().count(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityRow {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub defect: f64,
}

/// Evaluate the norm identity on the test-field suite (`identity.csv`) and
/// probe the interpolation constants on a two-layer unit cube for jumps
/// `1, 10², 10⁴` (`interp_constants.csv`).
pub fn verify_identity(out: &Path) -> Result<(Vec<IdentityRow>, Vec<ProbeRow>)> {
    fs::create_dir_all(out)?;
    let mut rows = Vec::new();
    for case in identity_suite() {
        let r = case.run(6, 12)?;
        rows.push(IdentityRow {
            name: case.name.to_string(),
            lhs: r.lhs,
            rhs: r.rhs,
            defect: r.defect,
        });
    }
    let mut csv = String::from("field,lhs,rhs,defect\n");
    for r in &rows {
        csv.push_str(&format!("{},{},{},{}\n", r.name, r.lhs, r.rhs, r.defect));
    }
    fs::write(out.join("identity.csv"), csv)?;

    let mesh = box_mesh(Point3::zeros(), Point3::new(1.0, 1.0, 1.0), [4, 4, 4], |x| usize::from(x.x > 0.5))?;
    let sine = identity_suite()
        .into_iter()
        .find(|c| c.name == "sine")
        .map(|c| c.field)
        .ok_or_else(|| Error::Precondition("the suite has no sine field".into()))?;
    let probe = interp_constant_probe(&mesh, &[1.0, 1e2, 1e4], &sine, 6)?;
    write_probe_csv(&probe, out.join("interp_constants.csv"))?;
    Ok((rows, probe))
}

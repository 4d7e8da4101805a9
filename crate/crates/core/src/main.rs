//! Command-line driver for the adaptive solver.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hcurl_afem::estimators::EstimatorKind;
use hcurl_afem::io::{
    check_assumptions, compare_estimators, format_summary, read_config, run, summary_row, verify_identity, RunConfig,
};
use hcurl_afem::Error;

#[derive(Parser)]
#[command(name = "hcurl-afem", version, about = "Adaptive edge elements for H(curl) interface problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the adaptive loop with one estimator.
    Run(RunArgs),
    /// Check the quasi-monotonicity hypotheses on the initial mesh.
    CheckAssumptions(RunArgs),
    /// Evaluate the norm identity suite and the interpolation probe.
    VerifyIdentity {
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run several estimators on the same benchmark and tabulate them.
    CompareEstimators {
        #[command(flatten)]
        args: RunArgs,
        /// Comma-separated estimator names; all of them by default.
        #[arg(long, value_delimiter = ',')]
        estimators: Vec<String>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// `key = value` file; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    benchmark: Option<String>,
    #[arg(long)]
    estimator: Option<String>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_dof: Option<usize>,
    #[arg(long)]
    max_levels: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Initial mesh file replacing the benchmark's own.
    #[arg(long)]
    mesh: Option<PathBuf>,
    /// Skip the per-level VTK files.
    #[arg(long)]
    no_vtk: bool,
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => read_config(path)?,
            None => RunConfig::default(),
        };
        let mut set = |key: &str, value: Option<String>| match value {
            Some(v) => cfg.set(key, &v).map_err(Error::Config),
            None => Ok(()),
        };
        set("benchmark", self.benchmark.clone())?;
        set("estimator", self.estimator.clone())?;
        set("theta", self.theta.map(|v| v.to_string()))?;
        set("tol", self.tol.map(|v| v.to_string()))?;
        set("max_dof", self.max_dof.map(|v| v.to_string()))?;
        set("max_levels", self.max_levels.map(|v| v.to_string()))?;
        set("out", self.out.as_ref().map(|p| p.display().to_string()))?;
        set("mesh", self.mesh.as_ref().map(|p| p.display().to_string()))?;
        if self.no_vtk {
            cfg.vtk = false;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or("-".into(), |x| format!("{x:.4e}"))
}

fn execute(command: Command) -> Result<(), Error> {
    match command {
        Command::Run(args) => {
            let cfg = args.config()?;
            let history = run(&cfg)?;
            for l in &history.levels {
                println!(
                    "level {:3}  dofs {:8}  eta {:.4e}  err {}  eff {}",
                    l.level,
                    l.ndof,
                    l.eta,
                    opt(l.error),
                    opt(l.eff_index)
                );
            }
            let rows: Vec<_> = summary_row(&history).into_iter().collect();
            print!("{}", format_summary(&history.problem, &rows));
            println!("converged: {}; output in {}", history.converged, cfg.out.display());
        }
        Command::CheckAssumptions(args) => {
            let cfg = args.config()?;
            let s = check_assumptions(&cfg)?;
            println!("edge patches:   {} of {} violate quasi-monotonicity", s.edge_violations, s.edges);
            println!("vertex patches: {} of {} violate quasi-monotonicity", s.vertex_violations, s.vertices);
        }
        Command::VerifyIdentity { out } => {
            let (rows, probe) = verify_identity(&out)?;
            println!("{:<24}{:>16}{:>16}{:>12}", "field", "lhs", "rhs", "defect");
            for r in &rows {
                println!("{:<24}{:>16.10}{:>16.10}{:>12.2e}", r.name, r.lhs, r.rhs, r.defect);
            }
            println!("\n{:>10}{:>14}{:>14}", "jump", "ratio_l2", "ratio_curl");
            for r in &probe {
                println!("{:>10.0e}{:>14.4}{:>14.4}", r.jump, r.ratio_l2, r.ratio_curl);
            }
        }
        Command::CompareEstimators { args, estimators } => {
            let cfg = args.config()?;
            let kinds = if estimators.is_empty() {
                EstimatorKind::ALL.to_vec()
            } else {
                estimators
                    .iter()
                    .map(|s| EstimatorKind::parse(s).ok_or_else(|| Error::Config(format!("unknown estimator '{s}'"))))
                    .collect::<Result<_, _>>()?
            };
            let histories = compare_estimators(&cfg, &kinds)?;
            let rows: Vec<_> = histories.iter().filter_map(summary_row).collect();
            print!("{}", format_summary(&cfg.benchmark, &rows));
        }
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Parse { .. } => 2,
        Error::Io(_) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

//! `stokes-afem`: adaptive Taylor-Hood Stokes runs from the command line.

mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use stokes_afem::adapt::{ErrorProblem, LoopConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] stokes_afem::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use stokes_afem::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(E::Config(_) | E::Parse { .. } | E::InvalidMesh(_) | E::UnsupportedQuadratureDegree(..)) => 2,
            CliError::Core(E::NonManifoldEdge(..) | E::DegenerateTriangle(..) | E::EmptyMesh) => 2,
            _ => 1,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "stokes-afem", version, about = "Adaptive Taylor-Hood P2/P1 Stokes solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// L-shaped domain with a known singular solution.
    Example1(Flags),
    /// Lid-driven cavity on the unit square.
    Example2(Flags),
    /// Adaptive run on a mesh file with a `key = value` run file.
    Solve {
        mesh: PathBuf,
        config: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
}

#[derive(Args, Debug, Clone)]
struct Flags {
    /// Dorfler parameter in (0, 1).
    #[arg(long)]
    theta: Option<f64>,
    /// Stop once eta_G drops below this.
    #[arg(long)]
    eps: Option<f64>,
    /// Number of refinement steps.
    #[arg(long = "max-iter")]
    max_iter: Option<usize>,
    /// Stop once the Taylor-Hood dof count reaches this.
    #[arg(long = "max-dofs")]
    max_dofs: Option<usize>,
    #[arg(long = "quad-degree")]
    quad_degree: Option<usize>,
    #[arg(long = "error-quad-degree")]
    error_quad_degree: Option<usize>,
    /// first | second | third; the first two are evaluated alongside the third.
    #[arg(long = "error-problem")]
    error_problem: Option<ErrorProblem>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads for element loops (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Leave the timing columns of records.csv empty.
    #[arg(long = "no-timings")]
    no_timings: bool,
    /// Also write per-element estimates of every iteration.
    #[arg(long = "dump-estimates")]
    dump_estimates: bool,
}

impl Flags {
    fn apply(&self, mut cfg: LoopConfig) -> LoopConfig {
        if let Some(v) = self.theta {
            cfg.theta = v;
        }
        if let Some(v) = self.eps {
            cfg.eps = v;
        }
        if let Some(v) = self.max_iter {
            cfg.max_iterations = v;
        }
        if let Some(v) = self.max_dofs {
            cfg.max_dofs = Some(v);
        }
        if let Some(v) = self.quad_degree {
            cfg.quad_degree = v;
        }
        if let Some(v) = self.error_quad_degree {
            cfg.error_quad_degree = v;
        }
        if let Some(v) = self.error_problem {
            cfg.error_problem = v;
        }
        cfg
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run::execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let CliError::Core(stokes_afem::Error::Iteration { source, .. }) = &e {
                log::debug!("cause: {source:?}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}

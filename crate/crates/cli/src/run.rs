use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use stokes_afem::adapt::{adaptive_loop_with, records_to_csv, AdaptiveRun, ErrorProblem, IterationRecord, LoopConfig, StokesProblem};
use stokes_afem::bench::{example1_initial_mesh, example2_initial_mesh, pressure_to_text, Cavity, ConvergenceTable, Example1};
use stokes_afem::mesh::Mesh;

use crate::config::parse_run_file;
use crate::{CliError, Command, Flags};

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: PathBuf, contents: &str) -> Result<(), CliError> {
    fs::write(&path, contents).map_err(|source| CliError::Io { path, source })
}

fn mkdir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Example1(flags) => {
            let cfg = flags.apply(LoopConfig::default());
            run(&flags, cfg, example1_initial_mesh()?, &Example1::default())
        }
        Command::Example2(flags) => {
            let cfg = flags.apply(LoopConfig::default());
            run(&flags, cfg, example2_initial_mesh()?, &Cavity)
        }
        Command::Solve { mesh, config, flags } => {
            let mesh_text = read(&mesh)?;
            let mesh = Mesh::parse_text(&mesh_text).map_err(|e| CliError::Usage(format!("{}: {e}", mesh.display())))?;
            let file = parse_run_file(&read(&config)?).map_err(|e| match e {
                CliError::Usage(m) => CliError::Usage(format!("{}: {m}", config.display())),
                other => other,
            })?;
            let cfg = flags.apply(file.loop_config);
            let problem = file.boundary.problem();
            run(&flags, cfg, mesh, problem.as_ref())
        }
    }
}

fn run(flags: &Flags, cfg: LoopConfig, mesh: Mesh, problem: &dyn StokesProblem) -> Result<(), CliError> {
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    if let Some(n) = flags.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    let out = flags.out.clone();
    let meshes = out.join("meshes");
    let estimates = out.join("estimates");
    mkdir(&meshes)?;
    if flags.dump_estimates {
        mkdir(&estimates)?;
    }

    let mut io_error = None;
    let result = adaptive_loop_with(mesh, problem, &cfg, |state| {
        let m = state.iteration;
        let step = || -> Result<(), CliError> {
            write(meshes.join(format!("m{m}.txt")), &state.mesh.to_text())?;
            if m == 0 {
                write(out.join("pressure_m0.txt"), &pressure_to_text(state.mesh, &state.solution.pressure))?;
            }
            if flags.dump_estimates {
                write(estimates.join(format!("m{m}.csv")), &state.estimate.locals.to_csv())?;
            }
            Ok(())
        };
        if let Err(e) = step() {
            io_error = Some(e);
            return Err(stokes_afem::Error::Config("output failed".into()));
        }
        Ok(())
    });
    let AdaptiveRun { records, mesh, solution } = match result {
        Ok(r) => r,
        Err(e) => return Err(io_error.unwrap_or(CliError::Core(e))),
    };
    let last = records.last().map_or(0, |r| r.iteration);
    write(out.join(format!("pressure_m{last}.txt")), &pressure_to_text(&mesh, &solution.pressure))?;
    write(out.join("records.csv"), &records_to_csv(&records, !flags.no_timings))?;
    let table = ConvergenceTable::from_records(&records);
    write(out.join("table.csv"), &table.to_csv())?;
    if cfg.error_problem != ErrorProblem::Third {
        write(out.join("validation.csv"), &validation_csv(&records))?;
    }
    print!("{}", summary(&records, &table));
    Ok(())
}

fn validation_csv(records: &[IterationRecord]) -> String {
    let mut s = String::from("m,nt,eta_g,eta_validation\n");
    for r in records {
        let v = r.validation_eta.map(|v| format!("{v:e}")).unwrap_or_default();
        writeln!(s, "{},{},{:e},{v}", r.iteration, r.n_triangles, r.eta_g).unwrap();
    }
    s
}

fn summary(records: &[IterationRecord], table: &ConvergenceTable) -> String {
    let f = |v: Option<f64>, w: usize| v.map(|x| format!("{x:>w$.4}")).unwrap_or_else(|| format!("{:>w$}", "-"));
    let mut s = format!("{:>3} {:>7} {:>8} {:>10} {:>10} {:>7} {:>7}\n", "m", "nt", "dof", "eta_g", "error", "order", "kappa");
    for (r, row) in records.iter().zip(&table.rows) {
        let err = r.error.map(|e| format!("{e:>10.4e}")).unwrap_or_else(|| format!("{:>10}", "-"));
        writeln!(
            s,
            "{:>3} {:>7} {:>8} {:>10.4e} {err} {} {}",
            r.iteration,
            r.n_triangles,
            r.dofs,
            r.eta_g,
            f(row.error_order, 7),
            f(r.kappa, 7)
        )
        .unwrap();
    }
    s
}

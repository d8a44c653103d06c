//! Command-line interface.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use mcrelax::exec::Execution;
use mcrelax::flux::SchemeKind;
use mcrelax::mesh::{read_mesh, write_mesh, write_vtk, DoubleConeParams};
use mcrelax::verify::suite::{all_passed, run_suite, write_csv, Suite};

use crate::cases;
use crate::config::{CaseKind, RunConfig, SchemeName};
use crate::run::{self, Steady2D};
use crate::setup::{self, Problem1D, Problem2D};

#[derive(Debug, Parser)]
#[command(name = "mcrelax", version, about = "Energy-relaxation finite-volume solvers for multicomponent nonequilibrium flows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one case with one scheme over its grid series and write CSV/VTK outputs.
    Run(RunArgs),
    /// Run a case with several schemes and print the error or standoff table.
    Convergence(ConvergenceArgs),
    /// Run randomized verification suites.
    Verify(VerifyArgs),
    /// Generate or convert meshes.
    #[command(subcommand)]
    Mesh(MeshCommand),
    /// Print the built-in configuration of a case as TOML.
    Config {
        #[arg(long)]
        case: CaseKind,
    },
}

#[derive(Debug, Args)]
struct CaseArgs {
    /// Configuration file; command-line options override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in case, used when no configuration file is given.
    #[arg(long)]
    case: Option<CaseKind>,
    /// Cell counts (1D, or n for n x n sphere grids); repeat or separate with commas.
    #[arg(long = "n", value_delimiter = ',')]
    cells: Vec<usize>,
    /// Double-cone refinement levels.
    #[arg(long = "level", value_delimiter = ',')]
    levels: Vec<usize>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    cfl: Option<f64>,
    /// Relaxation exponent (> 5/3).
    #[arg(long)]
    gamma: Option<f64>,
    /// Residual drop of steady runs.
    #[arg(long)]
    target_drop: Option<f64>,
    #[arg(long)]
    max_iterations: Option<usize>,
    #[arg(long)]
    mesh_file: Option<PathBuf>,
    /// Species database file (also read from $MCRELAX_SPECIES_DB).
    #[arg(long)]
    species_db: Option<PathBuf>,
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Abort with a nonzero exit code on the first audit violation.
    #[arg(long)]
    strict: bool,
    #[arg(long)]
    no_audits: bool,
    /// Evaluate everything on one thread.
    #[arg(long)]
    serial: bool,
    /// Print progress to stderr.
    #[arg(long, short)]
    verbose: bool,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    case: CaseArgs,
    #[arg(long)]
    scheme: Option<SchemeKind>,
}

#[derive(Debug, Args)]
struct ConvergenceArgs {
    #[command(flatten)]
    case: CaseArgs,
    #[arg(long, value_delimiter = ',', default_value = "godunov,hll,relax")]
    schemes: Vec<SchemeKind>,
    /// Also write the fields of every run.
    #[arg(long)]
    write_fields: bool,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Suite name, or `all`.
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV report of every trial.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long)]
    serial: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MeshKind {
    Sphere,
    DoubleCone,
}

#[derive(Debug, Subcommand)]
enum MeshCommand {
    /// Write a generated mesh (`.vtk` extension writes VTK, anything else the native format).
    Generate {
        #[arg(long, value_enum)]
        kind: MeshKind,
        /// Sphere grid size.
        #[arg(long, default_value_t = 20)]
        n: usize,
        /// Double-cone refinement level.
        #[arg(long, default_value_t = 0)]
        level: usize,
        #[arg(long, short)]
        output: PathBuf,
    },
    /// Read a native mesh and write it as VTK or native.
    Convert {
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long, short)]
        output: PathBuf,
    },
}

/// Runs the command line and returns the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match dispatch(cli.command, &mut out) {
        Ok(code) => code,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Run(a) => {
            let mut cfg = load(&a.case)?;
            if let Some(s) = a.scheme {
                cfg.scheme = SchemeName(s);
            }
            cfg.validate()?;
            run_case(&cfg, &[cfg.scheme.0], true, &a.case, out)
        }
        Command::Convergence(a) => {
            ensure!(!a.schemes.is_empty(), "no schemes given");
            let cfg = load(&a.case)?;
            cfg.validate()?;
            run_case(&cfg, &a.schemes, a.write_fields, &a.case, out)
        }
        Command::Verify(a) => verify(&a, out),
        Command::Mesh(m) => mesh(m, out),
        Command::Config { case } => {
            write!(out, "{}", cases::case(case).to_toml()?)?;
            Ok(0)
        }
    }
}

fn load(a: &CaseArgs) -> Result<RunConfig> {
    let mut cfg = match (&a.config, a.case) {
        (Some(path), _) => RunConfig::load(path)?,
        (None, Some(case)) => cases::case(case),
        (None, None) => bail!("give --config or --case"),
    };
    if a.config.is_some() {
        if let Some(case) = a.case {
            ensure!(case == cfg.case, "--case {case} contradicts the configuration file ({})", cfg.case);
        }
    }
    if !a.cells.is_empty() {
        cfg.grid.cells = a.cells.clone();
    }
    if !a.levels.is_empty() {
        cfg.grid.levels = a.levels.clone();
    }
    if a.t_end.is_some() {
        cfg.t_end = a.t_end;
    }
    if let Some(c) = a.cfl {
        cfg.cfl = c;
    }
    if a.gamma.is_some() {
        cfg.gamma = a.gamma;
    }
    if a.target_drop.is_some() || a.max_iterations.is_some() {
        let mut s = cfg.steady.clone().unwrap_or_default();
        if let Some(d) = a.target_drop {
            s.target_drop = d;
        }
        if let Some(m) = a.max_iterations {
            s.max_iterations = m;
        }
        cfg.steady = Some(s);
    }
    if a.mesh_file.is_some() {
        cfg.grid.mesh_file = a.mesh_file.clone();
    }
    if a.species_db.is_some() {
        cfg.species_file = a.species_db.clone();
    }
    if let Some(o) = &a.output {
        cfg.output_dir = o.clone();
    }
    if a.strict {
        cfg.audits.strict = true;
    }
    if a.no_audits {
        ensure!(!a.strict, "--strict needs audits");
        cfg.audits.enabled = false;
    }
    Ok(cfg)
}

fn execution(serial: bool) -> Execution {
    if serial {
        Execution::Serial
    } else {
        Execution::default()
    }
}

fn run_case(cfg: &RunConfig, schemes: &[SchemeKind], write_fields: bool, a: &CaseArgs, out: &mut dyn Write) -> Result<i32> {
    let exec = execution(a.serial);
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    fs::write(dir.join("config.toml"), cfg.to_toml()?)?;
    let mut violations = 0usize;
    if cfg.case.is_steady() {
        let problem = Problem2D::from_config(cfg)?;
        let meshes = setup::meshes(cfg)?;
        let mut table = Vec::new();
        for kind in schemes {
            for m in &meshes {
                let verbose = a.verbose;
                let label = format!("{kind} {}", m.label);
                let r = run::run_steady(cfg, &problem, *kind, m, exec, |it, drop| {
                    if verbose && it % 500 == 0 {
                        eprintln!("{label}: iteration {it}, residual drop {drop:.3e}");
                    }
                })?;
                if write_fields {
                    run::write_steady(dir, cfg.case, &problem, m, &r)?;
                }
                violations += r.output.violations.len();
                table.push(r);
            }
        }
        write_steady_table(cfg, &table, out)?;
        let mut f = BufWriter::new(File::create(dir.join(format!("{}_summary.csv", cfg.case)))?);
        write_steady_table(cfg, &table, &mut f)?;
        f.flush()?;
        if table.iter().any(|r| !r.output.converged) {
            eprintln!("warning: some runs did not reach the residual drop");
        }
    } else {
        let problem = Problem1D::from_config(cfg)?;
        let mut f = BufWriter::new(File::create(dir.join(format!("{}_summary.csv", cfg.case)))?);
        let header = "scheme,n,steps,l1_rho,rel_l1_rho,order,linf_u,linf_p,violations";
        writeln!(out, "{header}")?;
        writeln!(f, "{header}")?;
        for kind in schemes {
            let mut prev: Option<(usize, f64)> = None;
            for &n in &cfg.grid.cells {
                if a.verbose {
                    eprintln!("{kind}: {n} cells");
                }
                let r = run::run_1d(cfg, &problem, *kind, n, exec)?;
                if write_fields {
                    run::write_run_1d(dir, cfg.case, &problem, &r)?;
                }
                let nv = r.violations().count();
                violations += nv;
                let row = match run::errors_1d(cfg.case, &problem, &r) {
                    Ok(e) => {
                        let order = prev.map_or(f64::NAN, |(n0, e0)| crate::exact::observed_order(n0, e0, n, e.l1_rho));
                        prev = Some((n, e.l1_rho));
                        format!("{kind},{n},{},{:.6e},{:.6e},{order:.4},{:.6e},{:.6e},{nv}", r.reports.len(), e.l1_rho, e.rel_l1_rho, e.linf_u, e.linf_p)
                    }
                    // no reference solution for this data
                    Err(e) => {
                        if a.verbose {
                            eprintln!("no reference solution: {e:#}");
                        }
                        format!("{kind},{n},{},NaN,NaN,NaN,NaN,NaN,{nv}", r.reports.len())
                    }
                };
                writeln!(out, "{row}")?;
                writeln!(f, "{row}")?;
            }
        }
        f.flush()?;
    }
    if violations > 0 {
        eprintln!("{violations} audit violations recorded");
    }
    Ok(0)
}

fn write_steady_table(cfg: &RunConfig, rows: &[Steady2D], out: &mut dyn Write) -> Result<()> {
    match cfg.case {
        CaseKind::Sphere => {
            let radius = cfg.grid.radius.unwrap_or(0.5 * cases::SPHERE_DIAMETER);
            writeln!(out, "scheme,mesh,cells,iterations,converged,residual_drop,standoff,standoff_over_radius,violations")?;
            for r in rows {
                let d = r.standoff.unwrap_or(f64::NAN);
                writeln!(
                    out,
                    "{},{},{},{},{},{:.6e},{:.6e},{:.6},{}",
                    r.scheme,
                    r.label,
                    r.n_cells,
                    r.output.reports.len(),
                    r.output.converged,
                    r.output.final_drop(),
                    d,
                    d / radius,
                    r.output.violations.len()
                )?;
            }
        }
        _ => {
            writeln!(out, "scheme,mesh,cells,iterations,converged,residual_drop,wall_peaks,peak_x,peak_p,violations")?;
            for r in rows {
                let xs: Vec<String> = r.wall_maxima.iter().map(|&i| format!("{:.6e}", r.wall[i][0])).collect();
                let ps: Vec<String> = r.wall_maxima.iter().map(|&i| format!("{:.6e}", r.wall[i][2])).collect();
                writeln!(
                    out,
                    "{},{},{},{},{},{:.6e},{},{},{},{}",
                    r.scheme,
                    r.label,
                    r.n_cells,
                    r.output.reports.len(),
                    r.output.converged,
                    r.output.final_drop(),
                    r.wall_maxima.len(),
                    xs.join(";"),
                    ps.join(";"),
                    r.output.violations.len()
                )?;
            }
        }
    }
    Ok(())
}

fn verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let suites: Vec<Suite> = if a.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        a.suite
            .split(',')
            .map(|s| s.trim().parse::<Suite>().map_err(anyhow::Error::msg))
            .collect::<Result<_>>()?
    };
    let exec = execution(a.serial);
    let mut all = Vec::new();
    let mut ok = true;
    writeln!(out, "suite,trials,failures,min_margin")?;
    for s in suites {
        let records = run_suite(s, a.trials, a.seed, exec);
        let failures = records.iter().filter(|r| !r.passed).count();
        let margin = records.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
        writeln!(out, "{s},{},{failures},{margin:.4e}", a.trials)?;
        for r in records.iter().filter(|r| !r.passed).take(3) {
            eprintln!("{s} trial {}: {}", r.trial, r.detail);
        }
        ok &= all_passed(&records);
        all.extend(records);
    }
    if let Some(path) = &a.output {
        let f = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
        write_csv(&all, f)?;
    }
    Ok(if ok { 0 } else { 1 })
}

fn mesh(cmd: MeshCommand, out: &mut dyn Write) -> Result<i32> {
    let (m, output) = match cmd {
        MeshCommand::Generate { kind, n, level, output } => {
            let m = match kind {
                MeshKind::Sphere => setup::sphere_mesh(n, 0.5 * cases::SPHERE_DIAMETER)?,
                MeshKind::DoubleCone => mcrelax::mesh::gen_double_cone(&DoubleConeParams::default(), level)?,
            };
            (m, output)
        }
        MeshCommand::Convert { input, output } => (read_mesh(&input).with_context(|| format!("reading {}", input.display()))?, output),
    };
    if output.extension().is_some_and(|e| e == "vtk") {
        write_vtk(&m, &output, "mesh", &[])?;
    } else {
        write_mesh(&m, &output)?;
    }
    writeln!(out, "{} cells, {} vertices, {} edges -> {}", m.n_cells(), m.vertices().len(), m.edges().len(), output.display())?;
    Ok(0)
}

//! Runs of configured cases, their diagnostics and output files.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};

use mcrelax::exec::Execution;
use mcrelax::flux::{FluxScheme, SchemeKind};
use mcrelax::mesh::Mesh;
use mcrelax::solver1d::{self, Grid1D, RunOutput, Solver1D, StepReport};
use mcrelax::solver2d::{prominent_maxima, shock_standoff, wall_pressure, write_steady_log, Field2D, Solver2D, SteadyOutput};
use mcrelax::thermo::ConservedState;
use mcrelax::verify::audit::AuditViolation;

use crate::config::{CaseKind, RunConfig};
use crate::exact::{self, Profile};
use crate::setup::{self, LabeledMesh, Problem1D, Problem2D};

/// Relative prominence of a wall-pressure peak, in units of the profile range.
pub const PEAK_PROMINENCE: f64 = 0.05;

/// An unsteady 1D run with its snapshots.
#[derive(Clone, Debug)]
pub struct Run1D {
    pub scheme: SchemeKind,
    pub grid: Grid1D,
    /// `(t, field)` at every output time, ending with `t_end`.
    pub snapshots: Vec<(f64, Vec<ConservedState>)>,
    pub reports: Vec<StepReport>,
}

impl Run1D {
    pub fn final_states(&self) -> &[ConservedState] {
        &self.snapshots.last().expect("at least the final snapshot").1
    }

    pub fn t_end(&self) -> f64 {
        self.snapshots.last().map_or(0.0, |s| s.0)
    }

    pub fn violations(&self) -> impl Iterator<Item = &AuditViolation> {
        self.reports.iter().flat_map(|r| r.violations.iter())
    }
}

pub fn run_1d(cfg: &RunConfig, problem: &Problem1D, kind: SchemeKind, n: usize, exec: Execution) -> Result<Run1D> {
    let grid = problem.grid(n)?;
    let mut solver = Solver1D::new(&problem.species, grid, setup::scheme_of(cfg, kind)?);
    solver.cfl = cfg.cfl;
    solver.exec = exec;
    solver.audits = cfg.audits.enabled;
    solver.strict = cfg.audits.strict;
    let t_end = cfg.t_end.unwrap_or(0.0);
    let mut times: Vec<f64> = cfg.output_times.iter().copied().filter(|&t| t < t_end).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    times.push(t_end);
    let initial = problem.initial_field(&grid);
    let RunOutput { mut states, .. } = solver.run(initial, 0.0)?;
    let mut reports = Vec::new();
    let mut snapshots = Vec::new();
    let mut t = 0.0;
    for target in times {
        states = solver.advance(states, t, target, &mut reports).with_context(|| format!("{kind} with {n} cells"))?;
        t = target;
        snapshots.push((t, states.clone()));
    }
    Ok(Run1D {
        scheme: kind,
        grid,
        snapshots,
        reports,
    })
}

/// Writes `<case>_<scheme>_n<N>_<k>.csv` for each snapshot and a step log `<case>_<scheme>_n<N>_steps.csv`.
pub fn write_run_1d(dir: &Path, case: CaseKind, problem: &Problem1D, run: &Run1D) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let stem = format!("{case}_{}_n{}", run.scheme, run.grid.n);
    for (k, (_, states)) in run.snapshots.iter().enumerate() {
        let path = dir.join(format!("{stem}_{k}.csv"));
        let f = BufWriter::new(File::create(&path).with_context(|| format!("creating {}", path.display()))?);
        solver1d::write_csv(&problem.species, &run.grid, states, f)?;
    }
    let path = dir.join(format!("{stem}_steps.csv"));
    let mut f = BufWriter::new(File::create(&path)?);
    writeln!(f, "step,t,dt,total_entropy,min_specific_entropy,violations")?;
    for r in &run.reports {
        writeln!(f, "{},{:.17e},{:.17e},{:.17e},{:.17e},{}", r.step, r.t, r.dt, r.total_entropy, r.min_specific_entropy, r.violations.len())?;
    }
    f.flush()?;
    Ok(())
}

/// Errors of a 1D run at `t_end` against the case's reference solution.
#[derive(Clone, Debug)]
pub struct Errors1D {
    pub l1_rho: f64,
    /// `l1_rho` over the L1 norm of the reference density.
    pub rel_l1_rho: f64,
    /// Largest deviation of `u` and `p` from their common initial value (contact cases only).
    pub linf_u: f64,
    pub linf_p: f64,
    pub profile: Profile,
    pub reference: Profile,
}

/// Reference solution of a 1D case: the advected contact for the material
/// interface, the polytropic Riemann solution otherwise.
pub fn reference_1d(case: CaseKind, problem: &Problem1D, grid: &Grid1D, t: f64) -> Result<Profile> {
    match case {
        CaseKind::MaterialInterface => exact::advected_contact(problem, grid, t),
        _ => exact::polytropic_riemann(problem, grid, t, None),
    }
}

pub fn errors_1d(case: CaseKind, problem: &Problem1D, run: &Run1D) -> Result<Errors1D> {
    let profile = Profile::of(&problem.species, run.final_states())?;
    let reference = reference_1d(case, problem, &run.grid, run.t_end())?;
    let l1_rho = exact::l1_distance(&run.grid, &profile.rho, &reference.rho);
    let (linf_u, linf_p) = if case == CaseKind::MaterialInterface {
        (exact::linf_deviation(&profile.u, reference.u[0]), exact::linf_deviation(&profile.p, reference.p[0]))
    } else {
        (f64::NAN, f64::NAN)
    };
    Ok(Errors1D {
        l1_rho,
        rel_l1_rho: l1_rho / exact::l1_norm(&run.grid, &reference.rho),
        linf_u,
        linf_p,
        profile,
        reference,
    })
}

/// Result of a steady run on one mesh.
#[derive(Clone, Debug)]
pub struct Steady2D {
    pub scheme: SchemeKind,
    pub label: String,
    pub size: usize,
    pub n_cells: usize,
    pub output: SteadyOutput,
    /// Sphere: body-to-shock distance on the symmetry line.
    pub standoff: Option<f64>,
    /// Wall pressure `(x, y, p)` ordered by `x`.
    pub wall: Vec<[f64; 3]>,
    /// Indices into `wall` of its prominent maxima.
    pub wall_maxima: Vec<usize>,
}

pub fn run_steady(
    cfg: &RunConfig,
    problem: &Problem2D,
    kind: SchemeKind,
    mesh: &LabeledMesh,
    exec: Execution,
    mut observer: impl FnMut(usize, f64),
) -> Result<Steady2D> {
    let scheme: FluxScheme = setup::scheme_of(cfg, kind)?;
    let mut solver = Solver2D::new(&problem.species, &mesh.mesh, scheme).with_freestream(problem.freestream.clone());
    solver.cfl = cfg.cfl;
    solver.exec = exec;
    solver.audits = cfg.audits.enabled;
    solver.strict = cfg.audits.strict;
    let steady = cfg.steady.clone().unwrap_or_default();
    let initial = vec![problem.freestream.clone(); mesh.mesh.n_cells()];
    let output = solver
        .solve_steady(initial, steady.target_drop, steady.max_iterations, |r| observer(r.iteration, r.residual_drop))
        .with_context(|| format!("{kind} on {}", mesh.label))?;
    let (standoff, wall, wall_maxima) = body_diagnostics(problem, &mesh.mesh, &output.states)?;
    Ok(Steady2D {
        scheme: kind,
        label: mesh.label.clone(),
        size: mesh.size,
        n_cells: mesh.mesh.n_cells(),
        output,
        standoff,
        wall,
        wall_maxima,
    })
}

/// Standoff, wall pressure and indices of its prominent maxima.
type BodyDiagnostics = (Option<f64>, Vec<[f64; 3]>, Vec<usize>);

fn body_diagnostics(problem: &Problem2D, mesh: &Mesh, states: &[ConservedState]) -> Result<BodyDiagnostics> {
    let sp = &problem.species;
    let wall = wall_pressure(sp, mesh, states)?;
    let ps: Vec<f64> = wall.iter().map(|w| w[2]).collect();
    let maxima = prominent_maxima(&ps, PEAK_PROMINENCE);
    let standoff = match problem.case {
        CaseKind::Sphere => shock_standoff(sp, mesh, states)?,
        _ => None,
    };
    Ok((standoff, wall, maxima))
}

/// Writes `<case>_<scheme>_<label>.vtk`, `_residuals.csv` and `_wall.csv`.
pub fn write_steady(dir: &Path, case: CaseKind, problem: &Problem2D, mesh: &LabeledMesh, run: &Steady2D) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let stem = format!("{case}_{}_{}", run.scheme, run.label);
    let field = Field2D {
        mesh: &mesh.mesh,
        states: run.output.states.clone(),
    };
    let f = BufWriter::new(File::create(dir.join(format!("{stem}.vtk")))?);
    field.write_vtk(&problem.species, &stem, f)?;
    let mut f = BufWriter::new(File::create(dir.join(format!("{stem}_residuals.csv")))?);
    write_steady_log(&run.output.reports, &mut f)?;
    f.flush()?;
    let mut f = BufWriter::new(File::create(dir.join(format!("{stem}_wall.csv")))?);
    writeln!(f, "x,y,p,peak")?;
    for (i, w) in run.wall.iter().enumerate() {
        writeln!(f, "{:.17e},{:.17e},{:.17e},{}", w[0], w[1], w[2], u8::from(run.wall_maxima.contains(&i)))?;
    }
    f.flush()?;
    Ok(())
}

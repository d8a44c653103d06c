//! Explicit three-point finite-volume scheme on a uniform 1D grid.

use std::io::{self, Write};

use thiserror::Error;

use crate::exec::Execution;
use crate::flux::{FluxError, FluxScheme, InterfaceFlux};
use crate::thermo::{ConservedState, SpeciesSet, ThermoError, Vars};
use crate::verify::audit::{self, AuditViolation, CellEntropy};

/// Default Courant number.
pub const DEFAULT_CFL: f64 = 0.5;

const NORMAL: [f64; 1] = [1.0];

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("grid needs at least 3 cells and dx > 0 (got n = {n}, dx = {dx})")]
    Grid { n: usize, dx: f64 },
    #[error("initial field has {got} cells, grid has {expected}")]
    Size { expected: usize, got: usize },
    #[error("cell {cell}: {source}")]
    Inadmissible { cell: usize, source: ThermoError },
    #[error("interface {interface}: {source}")]
    Flux { interface: usize, source: FluxError },
    #[error("time step collapsed to {dt:e} at t = {t:e}")]
    TimeStep { dt: f64, t: f64 },
    #[error("step limit {0} reached before t_end")]
    StepLimit(usize),
    #[error("audit failure at step {step}: {violation}")]
    Audit { step: usize, violation: AuditViolation },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary1D {
    Periodic,
    /// Zeroth-order extrapolation through a ghost copy of the boundary cell.
    Transmissive,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid1D {
    pub n: usize,
    pub dx: f64,
    pub boundary: Boundary1D,
    /// Coordinate of the left end of the domain.
    pub origin: f64,
}

impl Grid1D {
    pub fn new(n: usize, dx: f64, boundary: Boundary1D) -> Result<Self, SolverError> {
        if n < 3 || !(dx > 0.0) || !dx.is_finite() {
            return Err(SolverError::Grid { n, dx });
        }
        Ok(Self { n, dx, boundary, origin: 0.0 })
    }

    /// `n` cells covering `[a, b]`.
    pub fn on_interval(n: usize, a: f64, b: f64, boundary: Boundary1D) -> Result<Self, SolverError> {
        let mut g = Self::new(n, (b - a) / n as f64, boundary)?;
        g.origin = a;
        Ok(g)
    }

    pub fn center(&self, j: usize) -> f64 {
        self.origin + (j as f64 + 0.5) * self.dx
    }

    pub fn length(&self) -> f64 {
        self.n as f64 * self.dx
    }

    /// Cells on the two sides of interface `i` (between cells `i - 1` and `i`).
    fn neighbors(&self, i: usize) -> (usize, usize) {
        match self.boundary {
            Boundary1D::Periodic => ((i + self.n - 1) % self.n, i % self.n),
            Boundary1D::Transmissive => (i.saturating_sub(1), i.min(self.n - 1)),
        }
    }

    fn n_interfaces(&self) -> usize {
        match self.boundary {
            Boundary1D::Periodic => self.n,
            Boundary1D::Transmissive => self.n + 1,
        }
    }

    /// Index of the flux at the right interface of cell `j`.
    fn right_interface(&self, j: usize) -> usize {
        match self.boundary {
            Boundary1D::Periodic => (j + 1) % self.n,
            Boundary1D::Transmissive => j + 1,
        }
    }
}

/// Diagnostics of one time step.
#[derive(Clone, Debug, PartialEq)]
pub struct StepReport {
    pub step: usize,
    /// Time at the end of the step.
    pub t: f64,
    pub dt: f64,
    /// `sum dx u` for every conserved variable.
    pub totals: Vars,
    /// `sum dx eta`.
    pub total_entropy: f64,
    pub min_specific_entropy: f64,
    /// Per-species `(min, max)` of the mass fractions.
    pub y_bounds: Vec<(f64, f64)>,
    pub admissible: bool,
    pub violations: Vec<AuditViolation>,
}

/// Three-point solver configuration.
#[derive(Clone, Debug)]
pub struct Solver1D<'a> {
    pub species: &'a SpeciesSet,
    pub grid: Grid1D,
    pub scheme: FluxScheme,
    pub cfl: f64,
    pub exec: Execution,
    /// Run the cell audits on every step.
    pub audits: bool,
    /// Fail on the first audit violation instead of recording it.
    pub strict: bool,
    pub max_steps: usize,
}

/// Result of [`Solver1D::run`].
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub states: Vec<ConservedState>,
    pub t: f64,
    pub reports: Vec<StepReport>,
}

impl RunOutput {
    pub fn violations(&self) -> impl Iterator<Item = &AuditViolation> {
        self.reports.iter().flat_map(|r| r.violations.iter())
    }
}

impl<'a> Solver1D<'a> {
    pub fn new(species: &'a SpeciesSet, grid: Grid1D, scheme: FluxScheme) -> Self {
        Self {
            species,
            grid,
            scheme,
            cfl: DEFAULT_CFL,
            exec: Execution::default(),
            audits: true,
            strict: false,
            max_steps: 10_000_000,
        }
    }

    /// All interface fluxes; interface `i` separates cells `i - 1` and `i`.
    pub fn interface_fluxes(&self, states: &[ConservedState]) -> Result<Vec<InterfaceFlux>, SolverError> {
        self.check_size(states)?;
        self.exec.try_map(self.grid.n_interfaces(), |i| {
            let (l, r) = self.grid.neighbors(i);
            self.scheme
                .flux(self.species, &states[l], &states[r], &NORMAL)
                .map_err(|source| SolverError::Flux { interface: i, source })
        })
    }

    /// `cfl dx / max lambda` over all interfaces.
    pub fn cfl_dt(&self, states: &[ConservedState]) -> Result<f64, SolverError> {
        Ok(self.dt_from(&self.interface_fluxes(states)?))
    }

    fn dt_from(&self, fluxes: &[InterfaceFlux]) -> f64 {
        let lambda = fluxes.iter().fold(0.0f64, |m, f| m.max(f.max_speed));
        self.cfl * self.grid.dx / lambda
    }

    fn check_size(&self, states: &[ConservedState]) -> Result<(), SolverError> {
        if states.len() != self.grid.n {
            return Err(SolverError::Size {
                expected: self.grid.n,
                got: states.len(),
            });
        }
        Ok(())
    }

    /// One forward-Euler step of size `dt`.
    pub fn step(&self, states: &[ConservedState], dt: f64) -> Result<(Vec<ConservedState>, StepReport), SolverError> {
        let fluxes = self.interface_fluxes(states)?;
        self.apply(states, &fluxes, dt, 0, dt)
    }

    fn apply(
        &self,
        states: &[ConservedState],
        fluxes: &[InterfaceFlux],
        dt: f64,
        step: usize,
        t: f64,
    ) -> Result<(Vec<ConservedState>, StepReport), SolverError> {
        let ratio = dt / self.grid.dx;
        let next: Vec<ConservedState> = self.exec.map(states.len(), |j| {
            let (hl, hr) = (&fluxes[j].flux, &fluxes[self.grid.right_interface(j)].flux);
            let mut u = states[j].clone();
            for ((x, a), b) in u.as_mut_slice().iter_mut().zip(hr).zip(hl) {
                *x -= ratio * (a - b);
            }
            u
        });
        let report = self.report(states, &next, fluxes, dt, step, t)?;
        Ok((next, report))
    }

    fn report(
        &self,
        old: &[ConservedState],
        new: &[ConservedState],
        fluxes: &[InterfaceFlux],
        dt: f64,
        step: usize,
        t: f64,
    ) -> Result<StepReport, SolverError> {
        let sp = self.species;
        let new_cells = self
            .exec
            .try_map(new.len(), |j| CellEntropy::new(sp, &new[j]).map_err(|source| SolverError::Inadmissible { cell: j, source }))?;
        let ns = sp.n_species();
        let mut totals = Vars::from_elem(0.0, old[0].as_slice().len());
        for u in new {
            for (t, x) in totals.iter_mut().zip(u.as_slice()) {
                *t += self.grid.dx * x;
            }
        }
        let total_entropy: f64 = new_cells.iter().map(|c| self.grid.dx * c.eta).sum();
        let min_specific_entropy = new_cells.iter().map(|c| c.s).fold(f64::INFINITY, f64::min);
        let y_bounds = (0..ns)
            .map(|k| new_cells.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| (lo.min(c.y[k]), hi.max(c.y[k]))))
            .collect();
        let mut violations = Vec::new();
        if self.audits {
            let old_cells: Vec<CellEntropy> = self
                .exec
                .try_map(old.len(), |j| CellEntropy::new(sp, &old[j]).map_err(|source| SolverError::Inadmissible { cell: j, source }))?;
            let ratio = dt / self.grid.dx;
            let per_cell: Vec<Vec<AuditViolation>> = self.exec.map(new.len(), |j| {
                let mut v = Vec::new();
                let (l, _) = self.grid.neighbors(j);
                let (_, r) = self.grid.neighbors(j + 1);
                audit::check_principles(j, &new_cells[j], [&old_cells[l], &old_cells[j], &old_cells[r]], &mut v);
                let (ql, qr) = (fluxes[j].entropy_flux, fluxes[self.grid.right_interface(j)].entropy_flux);
                audit::check_entropy_inequality(j, old_cells[j].eta, new_cells[j].eta, ratio * (qr - ql), ratio * (qr.abs() + ql.abs()), &mut v);
                v
            });
            violations.extend(per_cell.into_iter().flatten());
            if self.grid.boundary == Boundary1D::Periodic {
                let old_total: f64 = old_cells.iter().map(|c| self.grid.dx * c.eta).sum();
                let scale: f64 = old_cells.iter().map(|c| self.grid.dx * c.eta.abs()).sum();
                audit::check_global_entropy(old_total, total_entropy, scale, &mut violations);
            }
            if self.strict {
                if let Some(v) = violations.first() {
                    return Err(SolverError::Audit {
                        step,
                        violation: v.clone(),
                    });
                }
            }
        }
        Ok(StepReport {
            step,
            t,
            dt,
            totals,
            total_entropy,
            min_specific_entropy,
            y_bounds,
            admissible: true,
            violations,
        })
    }

    /// Advances from `t0` to `t_end`, clipping the last step; reports are appended to `reports`.
    pub fn advance(
        &self,
        mut states: Vec<ConservedState>,
        t0: f64,
        t_end: f64,
        reports: &mut Vec<StepReport>,
    ) -> Result<Vec<ConservedState>, SolverError> {
        self.check_size(&states)?;
        let mut t = t0;
        while t < t_end {
            if reports.len() >= self.max_steps {
                return Err(SolverError::StepLimit(self.max_steps));
            }
            let fluxes = self.interface_fluxes(&states)?;
            let mut dt = self.dt_from(&fluxes);
            if !(dt > 0.0) || !dt.is_finite() {
                return Err(SolverError::TimeStep { dt, t });
            }
            let last = t + dt >= t_end;
            if last {
                dt = t_end - t;
            }
            let (next, report) = self.apply(&states, &fluxes, dt, reports.len() + 1, if last { t_end } else { t + dt })?;
            t = report.t;
            reports.push(report);
            states = next;
        }
        Ok(states)
    }

    pub fn run(&self, initial: Vec<ConservedState>, t_end: f64) -> Result<RunOutput, SolverError> {
        for (cell, u) in initial.iter().enumerate() {
            self.species.primitive(u).map_err(|source| SolverError::Inadmissible { cell, source })?;
        }
        let mut reports = Vec::new();
        let states = self.advance(initial, 0.0, t_end, &mut reports)?;
        Ok(RunOutput { states, t: t_end.max(0.0), reports })
    }
}

/// `sum dx u` of a field.
pub fn totals(grid: &Grid1D, states: &[ConservedState]) -> Vars {
    let mut out = Vars::from_elem(0.0, states.first().map_or(0, |u| u.as_slice().len()));
    for u in states {
        for (t, x) in out.iter_mut().zip(u.as_slice()) {
            *t += grid.dx * x;
        }
    }
    out
}

/// Writes `x,rho,u,p,T,gamma_mix,Y_1..,Tv_1..,s`, one row per cell.
pub fn write_csv<W: Write>(species: &SpeciesSet, grid: &Grid1D, states: &[ConservedState], mut out: W) -> Result<(), SolverError> {
    let mut header = String::from("x,rho,u,p,T,gamma_mix");
    for k in 1..=species.n_species() {
        header += &format!(",Y_{k}");
    }
    for k in 1..=species.n_diatomic() {
        header += &format!(",Tv_{k}");
    }
    writeln!(out, "{header},s")?;
    for (j, u) in states.iter().enumerate() {
        let prim = species.primitive(u).map_err(|source| SolverError::Inadmissible { cell: j, source })?;
        let mut row = format!("{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}", grid.center(j), prim.rho, prim.v[0], prim.p, prim.t, prim.gamma);
        for y in prim.y.iter().chain(&prim.tv) {
            row += &format!(",{y:.17e}");
        }
        writeln!(out, "{row},{:.17e}", species.specific_entropy_of(&prim))?;
    }
    Ok(())
}

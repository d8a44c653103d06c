//! Unstructured 2D finite-volume driver with wall, symmetry and supersonic
//! inflow/outflow boundaries, global or local time stepping, and steady-state iteration.

use std::io::{self, Write};

use thiserror::Error;

use crate::exec::Execution;
use crate::flux::{physical_flux, wall_flux, FluxError, FluxScheme, InterfaceFlux};
use crate::mesh::{BoundaryTag, Mesh, MeshError, Neighbor};
use crate::thermo::{ConservedState, SpeciesSet, ThermoError, Vars};
use crate::verify::audit::{self, AuditViolation, CellEntropy};

pub const DEFAULT_CFL: f64 = 0.5;

#[derive(Debug, Error)]
pub enum Solver2DError {
    #[error("field has {got} cells, mesh has {expected}")]
    Size { expected: usize, got: usize },
    #[error("cell {cell}: {source}")]
    Inadmissible { cell: usize, source: ThermoError },
    #[error("edge {edge}: {source}")]
    Flux { edge: usize, source: FluxError },
    #[error("inflow boundary without a freestream state")]
    NoFreestream,
    #[error("non-positive time step in cell {cell}")]
    TimeStep { cell: usize },
    #[error("audit failure at iteration {iteration}: {violation}")]
    Audit { iteration: usize, violation: AuditViolation },
    #[error("no symmetry-line cells or no wall/symmetry corner on this mesh")]
    NoSymmetryLine,
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Cell states on a mesh.
#[derive(Clone, Debug)]
pub struct Field2D<'m> {
    pub mesh: &'m Mesh,
    pub states: Vec<ConservedState>,
}

impl<'m> Field2D<'m> {
    pub fn uniform(mesh: &'m Mesh, u: &ConservedState) -> Self {
        Self {
            mesh,
            states: vec![u.clone(); mesh.n_cells()],
        }
    }

    /// `sum |cell| u` per conserved variable.
    pub fn totals(&self) -> Vars {
        let mut out = Vars::from_elem(0.0, self.states.first().map_or(0, |u| u.as_slice().len()));
        for (c, u) in self.states.iter().enumerate() {
            for (t, x) in out.iter_mut().zip(u.as_slice()) {
                *t += self.mesh.area(c) * x;
            }
        }
        out
    }

    /// Named cell arrays `rho, p, T, Mach, Y_<name>, Tv_<name>`.
    pub fn output_arrays(&self, species: &SpeciesSet) -> Result<Vec<(String, Vec<f64>)>, Solver2DError> {
        let prims = self
            .states
            .iter()
            .enumerate()
            .map(|(cell, u)| species.primitive(u).map_err(|source| Solver2DError::Inadmissible { cell, source }))
            .collect::<Result<Vec<_>, _>>()?;
        let col = |f: &dyn Fn(&crate::thermo::PrimitiveState) -> f64| prims.iter().map(f).collect::<Vec<f64>>();
        let mut out = vec![
            ("rho".to_string(), col(&|p| p.rho)),
            ("p".to_string(), col(&|p| p.p)),
            ("T".to_string(), col(&|p| p.t)),
            ("Mach".to_string(), col(&|p| (2.0 * p.kinetic_energy()).sqrt() / (p.gamma * p.p / p.rho).sqrt())),
        ];
        for (k, s) in species.species().iter().enumerate() {
            out.push((format!("Y_{}", s.name), col(&|p| p.y[k])));
        }
        for (k, s) in species.species().iter().take(species.n_diatomic()).enumerate() {
            out.push((format!("Tv_{}", s.name), col(&|p| p.tv[k])));
        }
        Ok(out)
    }

    pub fn write_vtk<W: Write>(&self, species: &SpeciesSet, title: &str, out: W) -> Result<(), Solver2DError> {
        let arrays = self.output_arrays(species)?;
        let refs: Vec<(&str, &[f64])> = arrays.iter().map(|(n, v)| (n.as_str(), v.as_slice())).collect();
        crate::mesh::write_vtk_to(self.mesh, title, &refs, out)?;
        Ok(())
    }
}

/// Time step of one update: the same everywhere or one per cell.
#[derive(Clone, Debug, PartialEq)]
pub enum TimeStep {
    Global(f64),
    Local(Vec<f64>),
}

impl TimeStep {
    pub fn at(&self, cell: usize) -> f64 {
        match self {
            TimeStep::Global(dt) => *dt,
            TimeStep::Local(dts) => dts[cell],
        }
    }
}

/// Diagnostics of one 2D update.
#[derive(Clone, Debug, PartialEq)]
pub struct StepReport2D {
    /// `||(U' - U)/dt||_2` over cells, per conserved variable.
    pub residual_l2: Vars,
    pub violations: Vec<AuditViolation>,
}

/// Steady-iteration record.
#[derive(Clone, Debug, PartialEq)]
pub struct SteadyReport {
    pub iteration: usize,
    pub residual_l2: Vars,
    /// Norm of the full residual vector.
    pub residual: f64,
    /// Initial residual over the current one.
    pub residual_drop: f64,
    /// Running maximum of `residual_drop`.
    pub smoothed_drop: f64,
    pub dt_min: f64,
    pub dt_max: f64,
}

#[derive(Clone, Debug)]
pub struct SteadyOutput {
    pub states: Vec<ConservedState>,
    pub reports: Vec<SteadyReport>,
    pub converged: bool,
    pub violations: Vec<(usize, AuditViolation)>,
}

impl SteadyOutput {
    pub fn final_drop(&self) -> f64 {
        self.reports.last().map_or(1.0, |r| r.residual_drop)
    }
}

#[derive(Clone, Debug)]
pub struct Solver2D<'a> {
    pub species: &'a SpeciesSet,
    pub mesh: &'a Mesh,
    pub scheme: FluxScheme,
    pub freestream: Option<ConservedState>,
    pub cfl: f64,
    pub exec: Execution,
    pub audits: bool,
    pub strict: bool,
}

impl<'a> Solver2D<'a> {
    pub fn new(species: &'a SpeciesSet, mesh: &'a Mesh, scheme: FluxScheme) -> Self {
        Self {
            species,
            mesh,
            scheme,
            freestream: None,
            cfl: DEFAULT_CFL,
            exec: Execution::default(),
            audits: true,
            strict: false,
        }
    }

    pub fn with_freestream(mut self, u: ConservedState) -> Self {
        self.freestream = Some(u);
        self
    }

    /// Flux through a boundary edge with outward normal `n`.
    pub fn apply_bc(&self, u: &ConservedState, n: &[f64], tag: BoundaryTag) -> Result<InterfaceFlux, FluxError> {
        let sp = self.species;
        match tag {
            BoundaryTag::Wall | BoundaryTag::Symmetry => wall_flux(sp, u, n),
            BoundaryTag::Outflow => {
                let (_, q) = sp.entropy_pair(u, n)?;
                Ok(InterfaceFlux {
                    flux: physical_flux(sp, u, n)?,
                    max_speed: self.scheme.cell_speed(sp, u, n)?,
                    entropy_flux: q,
                })
            }
            BoundaryTag::Inflow => {
                let Some(inf) = &self.freestream else {
                    return Err(FluxError::WaveSpeed("inflow boundary without a freestream state".into()));
                };
                let prim = sp.primitive(inf)?;
                let un = prim.normal_velocity(n);
                let c = (prim.gamma * prim.p / prim.rho).sqrt();
                if un + c < 0.0 {
                    let (_, q) = sp.entropy_pair(inf, n)?;
                    Ok(InterfaceFlux {
                        flux: physical_flux(sp, inf, n)?,
                        max_speed: self.scheme.cell_speed(sp, u, n)?.max(self.scheme.cell_speed(sp, inf, n)?),
                        entropy_flux: q,
                    })
                } else {
                    self.scheme.flux(sp, u, inf, n)
                }
            }
        }
    }

    fn check_size(&self, states: &[ConservedState]) -> Result<(), Solver2DError> {
        if states.len() != self.mesh.n_cells() {
            return Err(Solver2DError::Size {
                expected: self.mesh.n_cells(),
                got: states.len(),
            });
        }
        if self.freestream.is_none() && self.mesh.boundary_edges().any(|(_, e)| e.right == Neighbor::Boundary(BoundaryTag::Inflow)) {
            return Err(Solver2DError::NoFreestream);
        }
        Ok(())
    }

    /// One flux per edge, oriented along the stored edge normal.
    pub fn edge_fluxes(&self, states: &[ConservedState]) -> Result<Vec<InterfaceFlux>, Solver2DError> {
        self.check_size(states)?;
        let edges = self.mesh.edges();
        self.exec.try_map(edges.len(), |i| {
            let e = &edges[i];
            let u = &states[e.left];
            let r = match e.right {
                Neighbor::Cell(r) => self.scheme.flux(self.species, u, &states[r], &e.normal),
                Neighbor::Boundary(tag) => self.apply_bc(u, &e.normal, tag),
            };
            r.map_err(|source| Solver2DError::Flux { edge: i, source })
        })
    }

    /// Largest wave speed over the edges of each cell.
    fn cell_lambdas(&self, fluxes: &[InterfaceFlux]) -> Vec<f64> {
        (0..self.mesh.n_cells())
            .map(|c| self.mesh.cell_edges(c).iter().fold(0.0f64, |m, &e| m.max(fluxes[e].max_speed)))
            .collect()
    }

    fn local_dts(&self, fluxes: &[InterfaceFlux]) -> Result<Vec<f64>, Solver2DError> {
        self.cell_lambdas(fluxes)
            .into_iter()
            .enumerate()
            .map(|(c, lambda)| {
                let dt = self.cfl * self.mesh.area(c) / (self.mesh.perimeter(c) * lambda);
                if dt > 0.0 && dt.is_finite() {
                    Ok(dt)
                } else {
                    Err(Solver2DError::TimeStep { cell: c })
                }
            })
            .collect()
    }

    /// Global step `cfl min |cell|/(|boundary| lambda)`.
    pub fn cfl_dt_global(&self, states: &[ConservedState]) -> Result<f64, Solver2DError> {
        let dts = self.local_dts(&self.edge_fluxes(states)?)?;
        Ok(dts.into_iter().fold(f64::INFINITY, f64::min))
    }

    /// Per-cell steps `cfl |cell|/(|boundary| lambda_cell)`.
    pub fn cfl_dt_local(&self, states: &[ConservedState]) -> Result<Vec<f64>, Solver2DError> {
        self.local_dts(&self.edge_fluxes(states)?)
    }

    pub fn step(&self, states: &[ConservedState], dt: &TimeStep) -> Result<(Vec<ConservedState>, StepReport2D), Solver2DError> {
        let fluxes = self.edge_fluxes(states)?;
        self.apply(states, &fluxes, dt, 0)
    }

    fn apply(
        &self,
        states: &[ConservedState],
        fluxes: &[InterfaceFlux],
        dt: &TimeStep,
        iteration: usize,
    ) -> Result<(Vec<ConservedState>, StepReport2D), Solver2DError> {
        let mesh = self.mesh;
        let edges = mesh.edges();
        let nvars = states[0].as_slice().len();
        let next: Vec<ConservedState> = self.exec.map(states.len(), |c| {
            let mut div = vec![0.0; nvars];
            for &e in mesh.cell_edges(c) {
                let sign = if edges[e].left == c { 1.0 } else { -1.0 };
                let w = sign * edges[e].length;
                for (d, h) in div.iter_mut().zip(&fluxes[e].flux) {
                    *d += w * h;
                }
            }
            let mut u = states[c].clone();
            u.add_scaled(-dt.at(c) / mesh.area(c), &div);
            u
        });
        let mut residual_l2 = Vars::from_elem(0.0, nvars);
        for (c, (a, b)) in states.iter().zip(&next).enumerate() {
            let dtc = dt.at(c);
            for (r, (x, y)) in residual_l2.iter_mut().zip(a.as_slice().iter().zip(b.as_slice())) {
                *r += ((y - x) / dtc).powi(2);
            }
        }
        residual_l2.iter_mut().for_each(|r| *r = r.sqrt());
        let violations = self.audit(states, &next, fluxes, dt, iteration)?;
        Ok((next, StepReport2D { residual_l2, violations }))
    }

    fn audit(
        &self,
        old: &[ConservedState],
        new: &[ConservedState],
        fluxes: &[InterfaceFlux],
        dt: &TimeStep,
        iteration: usize,
    ) -> Result<Vec<AuditViolation>, Solver2DError> {
        let sp = self.species;
        let new_cells = self
            .exec
            .try_map(new.len(), |c| CellEntropy::new(sp, &new[c]).map_err(|source| Solver2DError::Inadmissible { cell: c, source }))?;
        if !self.audits {
            return Ok(Vec::new());
        }
        let old_cells = self
            .exec
            .try_map(old.len(), |c| CellEntropy::new(sp, &old[c]).map_err(|source| Solver2DError::Inadmissible { cell: c, source }))?;
        let inflow = match &self.freestream {
            Some(u) => Some(CellEntropy::new(sp, u).map_err(|source| Solver2DError::Inadmissible { cell: usize::MAX, source })?),
            None => None,
        };
        let mesh = self.mesh;
        let edges = mesh.edges();
        let per_cell: Vec<Vec<AuditViolation>> = self.exec.map(new.len(), |c| {
            let mut v = Vec::new();
            let mut stencil = vec![&old_cells[c]];
            let (mut q, mut q_abs) = (0.0, 0.0);
            for &e in mesh.cell_edges(c) {
                let (_, nb) = mesh.oriented(e, c);
                match nb {
                    Neighbor::Cell(o) => stencil.push(&old_cells[o]),
                    Neighbor::Boundary(BoundaryTag::Inflow) => stencil.extend(inflow.as_ref()),
                    Neighbor::Boundary(_) => {}
                }
                let sign = if edges[e].left == c { 1.0 } else { -1.0 };
                q += sign * edges[e].length * fluxes[e].entropy_flux;
                q_abs += edges[e].length * fluxes[e].entropy_flux.abs();
            }
            audit::check_principles(c, &new_cells[c], stencil, &mut v);
            let ratio = dt.at(c) / mesh.area(c);
            audit::check_entropy_inequality(c, old_cells[c].eta, new_cells[c].eta, ratio * q, ratio * q_abs, &mut v);
            v
        });
        let violations: Vec<AuditViolation> = per_cell.into_iter().flatten().collect();
        if self.strict {
            if let Some(v) = violations.first() {
                return Err(Solver2DError::Audit {
                    iteration,
                    violation: v.clone(),
                });
            }
        }
        Ok(violations)
    }

    /// Local-time-stepping iteration until the residual has dropped by `target_drop` or `max_iter` is reached.
    pub fn solve_steady(
        &self,
        initial: Vec<ConservedState>,
        target_drop: f64,
        max_iter: usize,
        mut observer: impl FnMut(&SteadyReport),
    ) -> Result<SteadyOutput, Solver2DError> {
        for (cell, u) in initial.iter().enumerate() {
            self.species.primitive(u).map_err(|source| Solver2DError::Inadmissible { cell, source })?;
        }
        let mut states = initial;
        let mut reports: Vec<SteadyReport> = Vec::new();
        let mut violations = Vec::new();
        let mut r0 = None;
        let mut best: f64 = 0.0;
        let mut converged = false;
        for iteration in 1..=max_iter {
            let fluxes = self.edge_fluxes(&states)?;
            let dts = self.local_dts(&fluxes)?;
            let (dt_min, dt_max) = dts.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &d| (a.min(d), b.max(d)));
            let (next, report) = self.apply(&states, &fluxes, &TimeStep::Local(dts), iteration)?;
            violations.extend(report.violations.into_iter().map(|v| (iteration, v)));
            states = next;
            let residual = report.residual_l2.iter().map(|r| r * r).sum::<f64>().sqrt();
            let r0v = *r0.get_or_insert(residual);
            let drop = if residual > 0.0 { r0v / residual } else { f64::INFINITY };
            best = best.max(drop);
            let rep = SteadyReport {
                iteration,
                residual_l2: report.residual_l2,
                residual,
                residual_drop: drop,
                smoothed_drop: best,
                dt_min,
                dt_max,
            };
            observer(&rep);
            reports.push(rep);
            // a field at round-off level from the start counts as converged
            if drop >= target_drop || residual == 0.0 || (iteration == 1 && self.is_round_off(&states, residual)) {
                converged = true;
                break;
            }
        }
        Ok(SteadyOutput {
            states,
            reports,
            converged,
            violations,
        })
    }

    fn is_round_off(&self, states: &[ConservedState], residual: f64) -> bool {
        let fluxes = match self.edge_fluxes(states) {
            Ok(f) => f,
            Err(_) => return false,
        };
        let Ok(dts) = self.local_dts(&fluxes) else { return false };
        let scale: f64 = states
            .iter()
            .zip(&dts)
            .map(|(u, dt)| u.as_slice().iter().map(|x| (x / dt).powi(2)).sum::<f64>())
            .sum::<f64>()
            .sqrt();
        residual <= 1e-13 * scale
    }
}

/// Writes the steady run log as CSV.
pub fn write_steady_log<W: Write>(reports: &[SteadyReport], mut out: W) -> io::Result<()> {
    let nv = reports.first().map_or(0, |r| r.residual_l2.len());
    let mut header = String::from("iteration,residual,residual_drop,smoothed_drop,dt_min,dt_max");
    for k in 1..=nv {
        header += &format!(",res_{k}");
    }
    writeln!(out, "{header}")?;
    for r in reports {
        let mut row = format!("{},{:e},{:e},{:e},{:e},{:e}", r.iteration, r.residual, r.residual_drop, r.smoothed_drop, r.dt_min, r.dt_max);
        for x in &r.residual_l2 {
            row += &format!(",{x:e}");
        }
        writeln!(out, "{row}")?;
    }
    Ok(())
}

/// Cells touching the symmetry line, with the wall/symmetry corner of the body.
fn symmetry_line(mesh: &Mesh) -> Result<(Vec<usize>, [f64; 2]), Solver2DError> {
    let mut cells = Vec::new();
    let mut sym_vertices = Vec::new();
    let mut wall_vertices = Vec::new();
    for (_, e) in mesh.boundary_edges() {
        match e.right {
            Neighbor::Boundary(BoundaryTag::Symmetry) => {
                cells.push(e.left);
                sym_vertices.extend(e.vertices);
            }
            Neighbor::Boundary(BoundaryTag::Wall) => wall_vertices.extend(e.vertices),
            _ => {}
        }
    }
    let corner = sym_vertices.iter().find(|v| wall_vertices.contains(v)).ok_or(Solver2DError::NoSymmetryLine)?;
    cells.sort_unstable();
    cells.dedup();
    if cells.is_empty() {
        return Err(Solver2DError::NoSymmetryLine);
    }
    Ok((cells, mesh.vertices()[*corner]))
}

/// Distance from the body to the shock along the symmetry line, or `None` without a shock.
///
/// The shock is where the pressure crosses the midpoint between the upstream
/// value and the post-shock maximum, interpolated linearly between cell centroids.
pub fn shock_standoff(species: &SpeciesSet, mesh: &Mesh, states: &[ConservedState]) -> Result<Option<f64>, Solver2DError> {
    let (cells, corner) = symmetry_line(mesh)?;
    let mut samples = Vec::with_capacity(cells.len());
    for c in cells {
        let p = species.primitive(&states[c]).map_err(|source| Solver2DError::Inadmissible { cell: c, source })?.p;
        let x = mesh.centroid(c);
        samples.push(((x[0] - corner[0]).abs(), p));
    }
    // far to near
    samples.sort_by(|a, b| b.0.total_cmp(&a.0));
    let p_free = samples[0].1;
    let plateau = samples.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
    if !(plateau > p_free * (1.0 + 1e-3)) {
        return Ok(None);
    }
    let mid = 0.5 * (p_free + plateau);
    for w in samples.windows(2) {
        let ((d0, p0), (d1, p1)) = (w[0], w[1]);
        if p0 < mid && p1 >= mid {
            return Ok(Some(d0 + (mid - p0) / (p1 - p0) * (d1 - d0)));
        }
    }
    Ok(None)
}

/// Wall pressure `(x, y, p)` at wall-edge midpoints, ordered by `x`.
pub fn wall_pressure(species: &SpeciesSet, mesh: &Mesh, states: &[ConservedState]) -> Result<Vec<[f64; 3]>, Solver2DError> {
    let mut out = Vec::new();
    for (_, e) in mesh.boundary_edges() {
        if e.right == Neighbor::Boundary(BoundaryTag::Wall) {
            let p = species
                .primitive(&states[e.left])
                .map_err(|source| Solver2DError::Inadmissible { cell: e.left, source })?
                .p;
            out.push([e.midpoint[0], e.midpoint[1], p]);
        }
    }
    out.sort_by(|a, b| a[0].total_cmp(&b[0]));
    Ok(out)
}

/// Local maxima of a sampled profile whose prominence on both sides exceeds
/// `rel_prominence` times the profile range. Returns their indices.
pub fn prominent_maxima(values: &[f64], rel_prominence: f64) -> Vec<usize> {
    let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let thresh = rel_prominence * (hi - lo);
    let n = values.len();
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        // plateau [i, j]
        let mut j = i;
        while j + 1 < n && values[j + 1] == values[i] {
            j += 1;
        }
        let v = values[i];
        let left_higher = i > 0 && values[i - 1] > v;
        let right_higher = j + 1 < n && values[j + 1] > v;
        if !left_higher && !right_higher && (i > 0 || j + 1 < n) {
            let mut left_min = v;
            let mut k = i;
            while k > 0 && values[k - 1] <= v {
                k -= 1;
                left_min = left_min.min(values[k]);
            }
            let mut right_min = v;
            let mut k = j;
            while k + 1 < n && values[k + 1] <= v {
                k += 1;
                right_min = right_min.min(values[k]);
            }
            if v - left_min > thresh && v - right_min > thresh {
                out.push(i);
            }
        }
        i = j + 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux::SchemeKind;
    use crate::mesh::{gen_rect, gen_rect_periodic, RectTags};
    use crate::thermo::bundled_database;

    fn air() -> SpeciesSet {
        SpeciesSet::select(&bundled_database(), &["N2", "O2"]).unwrap()
    }

    fn state(sp: &SpeciesSet, p: f64, v: [f64; 2]) -> ConservedState {
        sp.conserved_from_ptv(&[0.79, 0.21], p, 300.0, &v, &[300.0, 300.0]).unwrap()
    }

    #[test]
    fn global_dt_on_uniform_square_mesh() {
        let sp = air();
        let m = gen_rect(4, 4, [0.0, 1.0, 0.0, 1.0], RectTags::uniform(BoundaryTag::Outflow)).unwrap();
        let u = state(&sp, 1e5, [30.0, 0.0]);
        let s = Solver2D::new(&sp, &m, FluxScheme::new(SchemeKind::Godunov));
        let prim = sp.primitive(&u).unwrap();
        let c = (1.01 * 5.0 / 3.0 * prim.p / prim.rho).sqrt();
        let dt = s.cfl_dt_global(&vec![u.clone(); 16]).unwrap();
        assert!((dt - 0.5 * 0.25 / 4.0 / (30.0 + c)).abs() < 1e-12 * dt);
        let m2 = gen_rect(8, 8, [0.0, 1.0, 0.0, 1.0], RectTags::uniform(BoundaryTag::Outflow)).unwrap();
        let dt2 = Solver2D::new(&sp, &m2, FluxScheme::new(SchemeKind::Godunov)).cfl_dt_global(&vec![u.clone(); 64]).unwrap();
        assert!((dt2 - 0.5 * dt).abs() < 1e-12 * dt);
    }

    #[test]
    fn uniform_flow_is_steady_and_local_dt_dominates() {
        let sp = air();
        let m = gen_rect(
            5,
            3,
            [0.0, 1.0, 0.0, 0.5],
            RectTags {
                left: BoundaryTag::Inflow,
                right: BoundaryTag::Outflow,
                bottom: BoundaryTag::Symmetry,
                top: BoundaryTag::Symmetry,
            },
        )
        .unwrap();
        let u = state(&sp, 1e4, [2000.0, 0.0]);
        for kind in SchemeKind::ALL {
            let s = Solver2D::new(&sp, &m, FluxScheme::new(kind)).with_freestream(u.clone());
            let states = vec![u.clone(); m.n_cells()];
            let local = s.cfl_dt_local(&states).unwrap();
            let global = s.cfl_dt_global(&states).unwrap();
            assert!(local.iter().all(|&d| d >= global));
            let (next, report) = s.step(&states, &TimeStep::Local(local)).unwrap();
            for v in &next {
                for (a, b) in v.as_slice().iter().zip(u.as_slice()) {
                    assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "{kind}");
                }
            }
            assert!(report.violations.is_empty());
            let out = s.solve_steady(states, 1e4, 5, |_| {}).unwrap();
            assert!(out.converged && out.reports.len() == 1, "{kind}");
        }
    }

    #[test]
    fn boundary_fluxes() {
        let sp = air();
        let m = gen_rect(2, 2, [0.0, 1.0, 0.0, 1.0], RectTags::uniform(BoundaryTag::Wall)).unwrap();
        let inf = state(&sp, 1e4, [2000.0, 0.0]);
        let s = Solver2D::new(&sp, &m, FluxScheme::new(SchemeKind::Hll)).with_freestream(inf.clone());
        let u = state(&sp, 2e4, [0.0, 50.0]);
        let w = s.apply_bc(&u, &[1.0, 0.0], BoundaryTag::Symmetry).unwrap();
        assert_eq!(w.entropy_flux, 0.0);
        assert!((w.flux[2] - 2e4).abs() < 1e-9 * 2e4 && w.flux[3] == 0.0 && w.flux[0] == 0.0);
        let f = s.apply_bc(&u, &[-1.0, 0.0], BoundaryTag::Inflow).unwrap();
        assert_eq!(f.flux, physical_flux(&sp, &inf, &[-1.0, 0.0]).unwrap());
        let o = s.apply_bc(&u, &[0.0, 1.0], BoundaryTag::Outflow).unwrap();
        assert_eq!(o.flux, physical_flux(&sp, &u, &[0.0, 1.0]).unwrap());
    }

    fn random_field(sp: &SpeciesSet, n: usize) -> Vec<ConservedState> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        (0..n)
            .map(|_| {
                let y0: f64 = rng.gen_range(0.1..0.9);
                sp.conserved_from_ptv(
                    &[y0, 1.0 - y0],
                    rng.gen_range(1e4..1e5),
                    rng.gen_range(200.0..2000.0),
                    &[rng.gen_range(-300.0..300.0), rng.gen_range(-300.0..300.0)],
                    &[rng.gen_range(200.0..3000.0), rng.gen_range(200.0..3000.0)],
                )
                .unwrap()
            })
            .collect()
    }

    #[test]
    fn torus_conservation_and_convex_combination() {
        let sp = air();
        let m = gen_rect_periodic(6, 5, [0.0, 1.0, 0.0, 0.7]).unwrap();
        let states = random_field(&sp, m.n_cells());
        for kind in SchemeKind::ALL {
            let mut s = Solver2D::new(&sp, &m, FluxScheme::new(kind));
            s.strict = kind != SchemeKind::Hll;
            let f0 = Field2D { mesh: &m, states: states.clone() };
            let dt = s.cfl_dt_global(&states).unwrap();
            let (next, _) = s.step(&states, &TimeStep::Global(dt)).unwrap();
            let f1 = Field2D { mesh: &m, states: next.clone() };
            for (a, b) in f0.totals().iter().zip(&f1.totals()) {
                assert!((a - b).abs() <= 1e-12 * a.abs(), "{kind}");
            }
            // the update is the |e|/|boundary|-weighted mean of three-point updates
            for c in 0..m.n_cells() {
                let u = &states[c];
                let lam = dt * m.perimeter(c) / m.area(c);
                let mut acc = vec![0.0; u.as_slice().len()];
                for &e in m.cell_edges(c) {
                    let (n, nb) = m.oriented(e, c);
                    let Neighbor::Cell(o) = nb else { unreachable!() };
                    let h = s.scheme.flux(&sp, u, &states[o], &n).unwrap().flux;
                    let f = physical_flux(&sp, u, &n).unwrap();
                    let w = m.edges()[e].length / m.perimeter(c);
                    for k in 0..acc.len() {
                        acc[k] += w * (u.as_slice()[k] - lam * (h[k] - f[k]));
                    }
                }
                for (a, b) in acc.iter().zip(next[c].as_slice()) {
                    assert!((a - b).abs() <= 1e-12 * b.abs().max(1e-3 * u.rho_e().abs()), "{kind} cell {c}");
                }
            }
        }
    }

    #[test]
    fn standoff_of_a_synthetic_step() {
        let sp = air();
        let m = gen_rect(
            40,
            4,
            [-2.0, 0.0, 0.0, 1.0],
            RectTags {
                left: BoundaryTag::Inflow,
                right: BoundaryTag::Wall,
                bottom: BoundaryTag::Symmetry,
                top: BoundaryTag::Outflow,
            },
        )
        .unwrap();
        let lo = state(&sp, 1e3, [0.0, 0.0]);
        let hi = state(&sp, 1e5, [0.0, 0.0]);
        assert_eq!(shock_standoff(&sp, &m, &vec![lo.clone(); m.n_cells()]).unwrap(), None);
        let x0 = -0.73;
        let states: Vec<_> = (0..m.n_cells()).map(|c| if m.centroid(c)[0] < x0 { lo.clone() } else { hi.clone() }).collect();
        let d = shock_standoff(&sp, &m, &states).unwrap().unwrap();
        assert!((d - 0.73).abs() <= 0.5 * 2.0 / 40.0, "{d}");
    }

    #[test]
    fn maxima_detection() {
        let v = [1.0, 2.0, 5.0, 3.0, 3.0, 8.0, 2.0];
        assert_eq!(prominent_maxima(&v, 0.1), vec![2, 5]);
        assert_eq!(prominent_maxima(&v, 0.5), vec![5]);
        assert!(prominent_maxima(&[1.0, 1.0, 1.0], 0.0).is_empty());
    }
}

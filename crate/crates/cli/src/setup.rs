//! Turns a validated configuration into species, fluxes, grids and initial fields.

use anyhow::{anyhow, bail, Context, Result};

use mcrelax::flux::{FluxScheme, SchemeKind};
use mcrelax::mesh::{gen_cylinder_ogrid, gen_double_cone, read_mesh, DoubleConeParams, Mesh};
use mcrelax::relax::RelaxGamma;
use mcrelax::solver1d::{Boundary1D, Grid1D};
use mcrelax::thermo::{ConservedState, SpeciesSet};

use crate::config::{BoundaryKind, CaseKind, InitialConfig, RunConfig};

/// Outer boundary of the sphere grid at angle `phi` from the stagnation line, in body radii.
/// Leaves room for the bow shock near the axis and for its widening towards the outflow plane.
pub fn sphere_outer_radius(phi: f64) -> f64 {
    2.0 + 2.0 * phi.sin().powi(2)
}

/// Resolved 1D problem.
#[derive(Clone, Debug)]
pub struct Problem1D {
    pub species: SpeciesSet,
    pub domain: [f64; 2],
    pub boundary: Boundary1D,
    pub x0: f64,
    pub left: ConservedState,
    pub right: ConservedState,
}

impl Problem1D {
    pub fn from_config(cfg: &RunConfig) -> Result<Self> {
        let species = cfg.species_set()?;
        let InitialConfig::Riemann { x0, left, right } = &cfg.initial else {
            bail!("case {} is not a 1D problem", cfg.case);
        };
        Ok(Self {
            left: left.resolve(&species, 1).context("left state")?,
            right: right.resolve(&species, 1).context("right state")?,
            species,
            domain: cfg.grid.domain,
            boundary: match cfg.grid.boundary {
                BoundaryKind::Transmissive => Boundary1D::Transmissive,
                BoundaryKind::Periodic => Boundary1D::Periodic,
            },
            x0: *x0,
        })
    }

    pub fn grid(&self, n: usize) -> Result<Grid1D> {
        Ok(Grid1D::on_interval(n, self.domain[0], self.domain[1], self.boundary)?)
    }

    /// Cell values of the initial data. The cell containing `x0` (if any) gets
    /// the state of the side covering its centre.
    pub fn initial_field(&self, grid: &Grid1D) -> Vec<ConservedState> {
        (0..grid.n)
            .map(|j| if grid.center(j) < self.x0 { self.left.clone() } else { self.right.clone() })
            .collect()
    }
}

/// Resolved steady 2D problem.
#[derive(Clone, Debug)]
pub struct Problem2D {
    pub case: CaseKind,
    pub species: SpeciesSet,
    pub freestream: ConservedState,
}

impl Problem2D {
    pub fn from_config(cfg: &RunConfig) -> Result<Self> {
        let species = cfg.species_set()?;
        let InitialConfig::Uniform { state } = &cfg.initial else {
            bail!("case {} is not a steady 2D problem", cfg.case);
        };
        Ok(Self {
            case: cfg.case,
            freestream: state.resolve(&species, 2).context("freestream")?,
            species,
        })
    }
}

/// One mesh of a series, with a label used in file names and tables.
#[derive(Clone, Debug)]
pub struct LabeledMesh {
    pub label: String,
    /// `n` of an `n x n` sphere grid or the double-cone level; 0 for meshes read from file.
    pub size: usize,
    pub mesh: Mesh,
}

pub fn double_cone_params(cfg: &RunConfig) -> DoubleConeParams {
    let mut p = DoubleConeParams::default();
    if let Some(c) = &cfg.grid.cone {
        if let Some([a, b]) = c.angles {
            p.angles = (a, b);
        }
        if let Some([a, b]) = c.lengths {
            p.lengths = (a, b);
        }
        if let Some(x) = c.aft {
            p.aft = x;
        }
        if let Some(x) = c.upstream {
            p.upstream = x;
        }
        if let Some(x) = c.height {
            p.height = x;
        }
        if let Some([a, b]) = c.base_cells {
            p.base_cells = (a, b);
        }
    }
    p
}

pub fn sphere_mesh(n: usize, radius: f64) -> Result<Mesh> {
    Ok(gen_cylinder_ogrid(n, n, radius, &|phi| radius * sphere_outer_radius(phi), 0.0)?)
}

/// Meshes of the configured series, coarsest first.
pub fn meshes(cfg: &RunConfig) -> Result<Vec<LabeledMesh>> {
    if let Some(path) = &cfg.grid.mesh_file {
        let mesh = read_mesh(path).with_context(|| format!("reading {}", path.display()))?;
        return Ok(vec![LabeledMesh { label: "file".into(), size: 0, mesh }]);
    }
    match cfg.case {
        CaseKind::Sphere => {
            let radius = cfg.grid.radius.unwrap_or(0.5 * crate::cases::SPHERE_DIAMETER);
            cfg.grid
                .cells
                .iter()
                .map(|&n| Ok(LabeledMesh { label: format!("n{n}"), size: n, mesh: sphere_mesh(n, radius)? }))
                .collect()
        }
        CaseKind::DoubleCone => {
            let params = double_cone_params(cfg);
            cfg.grid
                .levels
                .iter()
                .map(|&l| Ok(LabeledMesh { label: format!("level{l}"), size: l, mesh: gen_double_cone(&params, l)? }))
                .collect()
        }
        other => Err(anyhow!("case {other} has no 2D mesh")),
    }
}

/// Flux scheme of `kind` with the configured relaxation exponent.
pub fn scheme_of(cfg: &RunConfig, kind: SchemeKind) -> Result<FluxScheme> {
    let mut s = FluxScheme::new(kind);
    if let Some(g) = cfg.gamma {
        s = s.with_gamma(RelaxGamma::new(g).map_err(|e| anyhow!("gamma: {e}"))?);
    }
    Ok(s)
}

//! Run configuration, read from TOML and validated against the species data.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};

use mcrelax::flux::{FluxScheme, SchemeKind};
use mcrelax::relax::RelaxGamma;
use mcrelax::thermo::{bundled_database, parse_database, ConservedState, Species, SpeciesSet};

/// Environment variable naming a species database file.
pub const SPECIES_DB_ENV: &str = "MCRELAX_SPECIES_DB";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseKind {
    MaterialInterface,
    AirShockTube,
    /// User-defined 1D Riemann problem.
    Riemann,
    Sphere,
    DoubleCone,
}

impl CaseKind {
    pub const ALL: [CaseKind; 5] = [
        CaseKind::MaterialInterface,
        CaseKind::AirShockTube,
        CaseKind::Riemann,
        CaseKind::Sphere,
        CaseKind::DoubleCone,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CaseKind::MaterialInterface => "material_interface",
            CaseKind::AirShockTube => "air_shock_tube",
            CaseKind::Riemann => "riemann",
            CaseKind::Sphere => "sphere",
            CaseKind::DoubleCone => "double_cone",
        }
    }

    pub fn is_steady(self) -> bool {
        matches!(self, CaseKind::Sphere | CaseKind::DoubleCone)
    }
}

impl fmt::Display for CaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CaseKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CaseKind::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown case `{s}` (expected one of {})", CaseKind::ALL.map(CaseKind::name).join(", ")))
    }
}

/// A flux scheme name as it appears in files and on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SchemeName(pub SchemeKind);

impl TryFrom<String> for SchemeName {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse().map(SchemeName)
    }
}

impl From<SchemeName> for String {
    fn from(s: SchemeName) -> String {
        s.0.name().to_string()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKind {
    Transmissive,
    Periodic,
}

/// A pressure in pascals, or a string with a `Pa` or `bar` unit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Pressure {
    Pascals(f64),
    WithUnit(String),
}

impl Pressure {
    pub fn pascals(&self) -> Result<f64> {
        match self {
            Pressure::Pascals(p) => Ok(*p),
            Pressure::WithUnit(s) => {
                let s = s.trim();
                let (num, factor) = if let Some(v) = s.strip_suffix("bar") {
                    (v, 1e5)
                } else if let Some(v) = s.strip_suffix("Pa") {
                    (v, 1.0)
                } else {
                    (s, 1.0)
                };
                let v: f64 = num.trim().parse().with_context(|| format!("bad pressure `{s}`"))?;
                Ok(v * factor)
            }
        }
    }
}

/// A uniform state. Two of `rho`, `p`, `t` fix the thermodynamic state; the
/// vibration energies come from `e_v`, from `tv`, or default to `Tv = T`.
/// The velocity is `velocity`, or `mach` times the frozen sound speed along `x`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub y: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Pressure>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub velocity: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mach: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_v: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tv: Option<Vec<f64>>,
}

impl StateSpec {
    /// Conserved state in `dim` dimensions.
    pub fn resolve(&self, species: &SpeciesSet, dim: usize) -> Result<ConservedState> {
        let ns = species.n_species();
        let nd = species.n_diatomic();
        ensure!(self.y.len() == ns, "composition has {} entries, species set has {ns}", self.y.len());
        let y = mcrelax::thermo::Composition::new(&self.y)?;
        let y = y.as_slice();
        let mix = species.mixture(y);
        let p = self.p.as_ref().map(Pressure::pascals).transpose()?;
        let (rho, t) = match (self.rho, p, self.t) {
            (Some(rho), _, Some(t)) => (rho, t),
            (Some(rho), Some(p), None) => (rho, p / (rho * mix.r)),
            (None, Some(p), Some(t)) => (p / (mix.r * t), t),
            _ => bail!("a state needs two of rho, p, t"),
        };
        ensure!(rho > 0.0 && t > 0.0 && rho.is_finite() && t.is_finite(), "state has rho = {rho}, T = {t}");
        let e_t = mix.cv_t * t;
        let e_v: Vec<f64> = match (&self.e_v, &self.tv) {
            (Some(_), Some(_)) => bail!("give either e_v or tv, not both"),
            (Some(e), None) => e.clone(),
            (None, Some(tv)) => {
                ensure!(tv.len() == nd, "tv has {} entries, species set has {nd} diatomic species", tv.len());
                tv.iter().enumerate().map(|(b, &x)| species.vib_energy(b, x)).collect::<Result<_, _>>()?
            }
            (None, None) => (0..nd).map(|b| species.vib_energy(b, t)).collect::<Result<_, _>>()?,
        };
        ensure!(e_v.len() == nd, "e_v has {} entries, species set has {nd} diatomic species", e_v.len());
        ensure!(e_v.iter().all(|&e| e >= 0.0), "vibration energies must be non-negative");
        let v: Vec<f64> = match (&self.velocity, self.mach) {
            (Some(_), Some(_)) => bail!("give either velocity or mach, not both"),
            (Some(v), None) => {
                ensure!(v.len() <= dim, "velocity has {} components in {dim}D", v.len());
                let mut v = v.clone();
                v.resize(dim, 0.0);
                v
            }
            (None, Some(m)) => {
                let c = (mix.gamma * (mix.gamma - 1.0) * e_t).sqrt();
                let mut v = vec![0.0; dim];
                v[0] = m * c;
                v
            }
            (None, None) => vec![0.0; dim],
        };
        let u = species.conserved(y, rho, &v, e_t, &e_v);
        species.primitive(&u).context("state is not admissible")?;
        Ok(u)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialConfig {
    /// `left` for `x < x0`, `right` for `x > x0`.
    Riemann { x0: f64, left: StateSpec, right: StateSpec },
    /// Freestream of a steady case, also used as the initial field.
    Uniform { state: StateSpec },
}

/// Overrides of the double-cone geometry; unset values keep the generator defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angles: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lengths: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aft: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upstream: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_cells: Option<[usize; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// 1D cell counts, or `n` for `n x n` sphere grids. Several values make a series.
    #[serde(default)]
    pub cells: Vec<usize>,
    /// Refinement levels of generated double-cone meshes.
    #[serde(default)]
    pub levels: Vec<usize>,
    /// 1D domain `[a, b]`.
    #[serde(default = "unit_interval")]
    pub domain: [f64; 2],
    #[serde(default = "transmissive")]
    pub boundary: BoundaryKind,
    /// Read the 2D mesh from this file instead of generating it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mesh_file: Option<PathBuf>,
    /// Body radius of the sphere case, m.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cone: Option<ConeConfig>,
}

fn unit_interval() -> [f64; 2] {
    [0.0, 1.0]
}

fn transmissive() -> BoundaryKind {
    BoundaryKind::Transmissive
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            cells: Vec::new(),
            levels: Vec::new(),
            domain: unit_interval(),
            boundary: transmissive(),
            mesh_file: None,
            radius: None,
            cone: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SteadyConfig {
    /// Stop when the residual has dropped by this factor.
    #[serde(default = "default_drop")]
    pub target_drop: f64,
    #[serde(default = "default_iterations")]
    pub max_iterations: usize,
}

fn default_drop() -> f64 {
    1e4
}

fn default_iterations() -> usize {
    100_000
}

impl Default for SteadyConfig {
    fn default() -> Self {
        Self {
            target_drop: default_drop(),
            max_iterations: default_iterations(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditConfig {
    #[serde(default = "yes")]
    pub enabled: bool,
    /// Abort on the first violation.
    #[serde(default)]
    pub strict: bool,
}

fn yes() -> bool {
    true
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self { enabled: true, strict: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub case: CaseKind,
    /// Species names, looked up in the database.
    pub species: Vec<String>,
    /// Species database file; overrides the bundled one and the environment.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub species_file: Option<PathBuf>,
    /// Inline species database in the same format as the file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub species_table: Option<String>,
    #[serde(default)]
    pub zero_formation_enthalpies: bool,
    pub scheme: SchemeName,
    /// Relaxation exponent; must exceed 5/3.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(default)]
    pub grid: GridConfig,
    /// End time of unsteady runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    /// Extra output times of unsteady runs; `t_end` is always written.
    #[serde(default)]
    pub output_times: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steady: Option<SteadyConfig>,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub audits: AuditConfig,
    #[serde(default)]
    pub seed: u64,
    pub initial: InitialConfig,
}

fn default_cfl() -> f64 {
    0.5
}

fn default_output() -> PathBuf {
    PathBuf::from("output")
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).context("parsing run configuration")?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string_pretty(self)?)
    }

    pub fn dim(&self) -> usize {
        if self.case.is_steady() {
            2
        } else {
            1
        }
    }

    /// Species database: inline table, then `species_file`, then `$MCRELAX_SPECIES_DB`, then the bundled file.
    pub fn database(&self) -> Result<Vec<Species>> {
        if let Some(table) = &self.species_table {
            return Ok(parse_database(table)?);
        }
        let path = self
            .species_file
            .clone()
            .or_else(|| std::env::var_os(SPECIES_DB_ENV).map(PathBuf::from));
        match path {
            Some(p) => {
                let text = std::fs::read_to_string(&p).with_context(|| format!("reading species database {}", p.display()))?;
                parse_database(&text).with_context(|| format!("in {}", p.display()))
            }
            None => Ok(bundled_database()),
        }
    }

    pub fn species_set(&self) -> Result<SpeciesSet> {
        ensure!(!self.species.is_empty(), "no species given");
        let db = self.database()?;
        let names: Vec<&str> = self.species.iter().map(String::as_str).collect();
        let set = SpeciesSet::select(&db, &names)?;
        // composition vectors are given in the listed order, so it must already be diatomic-first
        for (k, name) in names.iter().enumerate() {
            if set.index_of(name) != Some(k) {
                bail!("species must be listed with the diatomic ones first (`{name}` is out of place)");
            }
        }
        Ok(if self.zero_formation_enthalpies { set.without_formation_enthalpies() } else { set })
    }

    pub fn flux_scheme(&self) -> Result<FluxScheme> {
        let mut s = FluxScheme::new(self.scheme.0);
        if let Some(g) = self.gamma {
            s = s.with_gamma(RelaxGamma::new(g).map_err(|e| anyhow!("gamma: {e}"))?);
        }
        Ok(s)
    }

    /// Checks everything that can be checked without running.
    pub fn validate(&self) -> Result<()> {
        let species = self.species_set()?;
        self.flux_scheme()?;
        ensure!(self.cfl > 0.0 && self.cfl <= 1.0, "cfl = {} must lie in (0, 1]", self.cfl);
        let dim = self.dim();
        match (&self.initial, self.case.is_steady()) {
            (InitialConfig::Riemann { x0, left, right }, false) => {
                let [a, b] = self.grid.domain;
                ensure!(a < b, "empty domain [{a}, {b}]");
                ensure!(*x0 >= a && *x0 <= b, "x0 = {x0} outside the domain");
                left.resolve(&species, dim).context("left state")?;
                right.resolve(&species, dim).context("right state")?;
                ensure!(!self.grid.cells.is_empty(), "grid.cells is empty");
                ensure!(self.grid.cells.iter().all(|&n| n >= 3), "1D grids need at least 3 cells");
                let t_end = self.t_end.ok_or_else(|| anyhow!("unsteady cases need t_end"))?;
                ensure!(t_end >= 0.0, "t_end = {t_end} is negative");
                ensure!(self.output_times.iter().all(|&t| (0.0..=t_end).contains(&t)), "output times must lie in [0, t_end]");
            }
            (InitialConfig::Uniform { state }, true) => {
                state.resolve(&species, dim).context("freestream")?;
                let s = self.steady.clone().unwrap_or_default();
                ensure!(s.target_drop > 1.0, "steady.target_drop must exceed 1");
                if self.grid.mesh_file.is_none() {
                    match self.case {
                        CaseKind::Sphere => ensure!(self.grid.cells.iter().all(|&n| n >= 2) && !self.grid.cells.is_empty(), "sphere grids need cells >= 2"),
                        _ => ensure!(!self.grid.levels.is_empty(), "grid.levels is empty"),
                    }
                }
            }
            (InitialConfig::Riemann { .. }, true) => bail!("case {} needs a uniform initial state", self.case),
            (InitialConfig::Uniform { .. }, false) => bail!("case {} needs Riemann initial data", self.case),
        }
        Ok(())
    }
}

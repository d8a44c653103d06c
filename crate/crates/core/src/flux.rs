//! Numerical fluxes for the multicomponent system obtained by lifting polytropic
//! fluxes of the relaxation system: `h(u-, u+, n) = L H(P(u-), P(u+), n)`.
//!
//! Three relaxation fluxes `H` are provided (exact Godunov, HLL, pressure
//! relaxation) plus the wall flux obtained from the pressure-relaxation solver
//! with a mirror state.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::relax::{equilibrium_split, zeta, RelaxError, RelaxGamma};
use crate::riemann::{self, PolytropicSide, RiemannError};
use crate::thermo::{dot, ConservedState, Layout, PrimitiveState, SpeciesSet, ThermoError, Vars};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FluxError {
    #[error(transparent)]
    Thermo(#[from] ThermoError),
    #[error(transparent)]
    Riemann(#[from] RiemannError),
    #[error(transparent)]
    Relax(#[from] RelaxError),
    #[error("wave-speed estimate failure: {0}")]
    WaveSpeed(String),
    #[error("speed inflation {0} must be >= 1")]
    Inflation(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    Godunov,
    Hll,
    PressureRelax,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 3] = [SchemeKind::Godunov, SchemeKind::Hll, SchemeKind::PressureRelax];

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Godunov => "godunov",
            SchemeKind::Hll => "hll",
            SchemeKind::PressureRelax => "relax",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "godunov" | "god" => Ok(SchemeKind::Godunov),
            "hll" => Ok(SchemeKind::Hll),
            "relax" | "rel" | "pressure-relax" | "pressure_relax" | "pr" => Ok(SchemeKind::PressureRelax),
            other => Err(format!("unknown scheme `{other}` (expected godunov, hll or relax)")),
        }
    }
}

/// A relaxation flux together with its parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FluxScheme {
    pub kind: SchemeKind,
    pub gamma: RelaxGamma,
    /// Factor applied to the sound-speed part of the wave-speed estimates.
    pub speed_inflation: f64,
}

/// Flux through a unit-area interface plus its wave-speed bound and entropy flux.
#[derive(Clone, Debug, PartialEq)]
pub struct InterfaceFlux {
    pub flux: Vars,
    pub max_speed: f64,
    pub entropy_flux: f64,
}

impl FluxScheme {
    /// Default parameters: `gamma = 1.01 * 5/3`, inflation 1.01 for the approximate solvers.
    pub fn new(kind: SchemeKind) -> Self {
        let speed_inflation = match kind {
            SchemeKind::Godunov => 1.0,
            SchemeKind::Hll | SchemeKind::PressureRelax => 1.01,
        };
        Self {
            kind,
            gamma: RelaxGamma::default(),
            speed_inflation,
        }
    }

    pub fn with_gamma(mut self, gamma: RelaxGamma) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_inflation(mut self, factor: f64) -> Result<Self, FluxError> {
        if !(factor >= 1.0) || !factor.is_finite() {
            return Err(FluxError::Inflation(factor));
        }
        self.speed_inflation = factor;
        Ok(self)
    }

    /// Interface flux `h(u_l, u_r, n)` for a unit normal `n` pointing from `u_l` to `u_r`.
    pub fn flux(&self, species: &SpeciesSet, u_l: &ConservedState, u_r: &ConservedState, n: &[f64]) -> Result<InterfaceFlux, FluxError> {
        let l = Side::new(species, u_l, n, self.gamma)?;
        let r = Side::new(species, u_r, n, self.gamma)?;
        match self.kind {
            SchemeKind::Godunov => godunov(species, &l, &r, n, self),
            SchemeKind::Hll => hll(species, u_l, u_r, &l, &r, n, self),
            SchemeKind::PressureRelax => pressure_relax(species, &l, &r, n, self),
        }
    }

    /// Cell wave speed `|v.n| + c_gamma(rho, p)` used in time-step estimates.
    pub fn cell_speed(&self, species: &SpeciesSet, u: &ConservedState, n: &[f64]) -> Result<f64, FluxError> {
        let prim = species.primitive(u)?;
        Ok(prim.normal_velocity(n).abs() + riemann::sound_speed(self.gamma.value(), prim.rho, prim.p))
    }
}

/// Interface data of one side, with its equilibrium projection.
struct Side {
    prim: PrimitiveState,
    u: f64,
    v_perp: Vars,
    /// Total energy per unit mass.
    e_total: f64,
    e_s: f64,
    h0: f64,
    /// Vibration energy per unit mass of mixture, per diatomic species.
    e_v_mix: Vars,
}

impl Side {
    fn new(species: &SpeciesSet, u: &ConservedState, n: &[f64], gamma: RelaxGamma) -> Result<Self, FluxError> {
        let prim = species.primitive(u)?;
        let un = prim.normal_velocity(n);
        let v_perp = prim.v.iter().zip(n).map(|(v, ni)| v - un * ni).collect();
        let (_, e_s) = equilibrium_split(prim.gamma, prim.e_t, gamma);
        let h0 = dot(&prim.y, species.h0());
        let e_v_mix = u.rho_ev().iter().map(|r| r / prim.rho).collect();
        Ok(Self {
            e_total: u.rho_e() / prim.rho,
            u: un,
            v_perp,
            e_s,
            h0,
            e_v_mix,
            prim,
        })
    }

    fn polytropic(&self) -> PolytropicSide {
        PolytropicSide::new(self.prim.rho, self.u, self.prim.p)
    }

    fn eta(&self, species: &SpeciesSet) -> f64 {
        species.entropy_of(&self.prim)
    }
}

/// Physical flux `f(u).n`.
pub fn physical_flux(species: &SpeciesSet, u: &ConservedState, n: &[f64]) -> Result<Vars, FluxError> {
    let prim = species.primitive(u)?;
    Ok(physical_flux_of(u, &prim, n))
}

fn physical_flux_of(u: &ConservedState, prim: &PrimitiveState, n: &[f64]) -> Vars {
    let un = prim.normal_velocity(n);
    let mut f: Vars = u.as_slice().iter().map(|x| x * un).collect();
    let layout = u.layout();
    for (k, i) in layout.momentum().enumerate() {
        f[i] += prim.p * n[k];
    }
    f[layout.energy()] = (u.rho_e() + prim.p) * un;
    f
}

/// Entropy pair flux `eta (v.n)` of a state.
pub fn physical_entropy_flux(species: &SpeciesSet, u: &ConservedState, n: &[f64]) -> Result<f64, FluxError> {
    Ok(species.entropy_pair(u, n)?.1)
}

/// Assembles the conserved-variable flux from a relaxation flux laid out as
/// `(rho_alpha, rho v, rho E_r, rho e_v, rho e_s)`.
pub fn lift_flux(species: &SpeciesSet, layout: Layout, h: &[f64]) -> Vars {
    assert_eq!(h.len(), layout.n_vars() + 1);
    let mut out = Vars::from_slice(&h[..layout.n_vars()]);
    let species_rows = &h[layout.species()];
    let vib_rows = &h[layout.vibration()];
    let h_es = h[layout.n_vars()];
    out[layout.energy()] = (h[layout.energy()] + h_es) + dot(species.h0(), species_rows) + vib_rows.iter().sum::<f64>();
    out
}

/// Assembles a relaxation flux with a common normal velocity `u` and pressure `p`:
/// advected rows `rho (Y, v, E_r, e_v, e_s) u` plus the pressure terms.
fn relax_flux_rows(layout: Layout, rho: f64, u: f64, p: f64, n: &[f64], side: &Side, e_r_total: f64) -> Vars {
    let mut h = Vars::from_elem(0.0, layout.n_vars() + 1);
    let m = rho * u;
    for (i, y) in layout.species().zip(&side.prim.y) {
        h[i] = m * y;
    }
    for (k, i) in layout.momentum().enumerate() {
        h[i] = m * (u * n[k] + side.v_perp[k]) + p * n[k];
    }
    h[layout.energy()] = (rho * e_r_total + p) * u;
    for (i, ev) in layout.vibration().zip(&side.e_v_mix) {
        h[i] = m * ev;
    }
    h[layout.n_vars()] = m * side.e_s;
    h
}

fn godunov(species: &SpeciesSet, l: &Side, r: &Side, n: &[f64], scheme: &FluxScheme) -> Result<InterfaceFlux, FluxError> {
    let g = scheme.gamma.value();
    let (pl, pr) = (l.polytropic(), r.polytropic());
    let (p_star, u_star) = riemann::exact_star(&pl, &pr, g, riemann::DEFAULT_TOL)?;
    let (rho, u, p) = riemann::sample_fan(&pl, &pr, g, p_star, u_star, 0.0);
    let side = if u_star > 0.0 { l } else { r };
    let e_r = p / ((g - 1.0) * rho);
    let e_r_total = e_r + 0.5 * (u * u + dot(&side.v_perp, &side.v_perp));
    let layout = side.prim_layout();
    let h = relax_flux_rows(layout, rho, u, p, n, side, e_r_total);
    let (wl, wr) = riemann::exact_wave_speeds(&pl, &pr, g, p_star);
    let cell = (l.u.abs() + pl.sound_speed(g)).max(r.u.abs() + pr.sound_speed(g));
    let z = zeta(species, &side.prim.y, 1.0 / rho, e_r, side.e_s, &side.prim.e_v, scheme.gamma);
    Ok(InterfaceFlux {
        flux: lift_flux(species, layout, &h),
        max_speed: cell.max(wl.abs()).max(wr.abs()),
        entropy_flux: rho * z * u,
    })
}

impl Side {
    fn prim_layout(&self) -> Layout {
        Layout::new(self.prim.y.len(), self.e_v_mix.len(), self.v_perp.len())
    }
}

fn hll(species: &SpeciesSet, u_l: &ConservedState, u_r: &ConservedState, l: &Side, r: &Side, n: &[f64], scheme: &FluxScheme) -> Result<InterfaceFlux, FluxError> {
    let g = scheme.gamma.value();
    let (pl, pr) = (l.polytropic(), r.polytropic());
    let (sl0, sr0) = riemann::two_rarefaction_speeds(&pl, &pr, g);
    let s_l = l.u - scheme.speed_inflation * (l.u - sl0);
    let s_r = r.u + scheme.speed_inflation * (sr0 - r.u);
    let f_l = physical_flux_of(u_l, &l.prim, n);
    let f_r = physical_flux_of(u_r, &r.prim, n);
    let (eta_l, eta_r) = (l.eta(species), r.eta(species));
    let (q_l, q_r) = (eta_l * l.u, eta_r * r.u);
    let max_speed = s_l.abs().max(s_r.abs());
    if s_l >= 0.0 {
        return Ok(InterfaceFlux { flux: f_l, max_speed, entropy_flux: q_l });
    }
    if s_r <= 0.0 {
        return Ok(InterfaceFlux { flux: f_r, max_speed, entropy_flux: q_r });
    }
    let den = s_r - s_l;
    let flux = f_l
        .iter()
        .zip(&f_r)
        .zip(u_l.as_slice().iter().zip(u_r.as_slice()))
        .map(|((fl, fr), (ul, ur))| ((s_r * fl - s_l * fr) + s_l * s_r * (ur - ul)) / den)
        .collect();
    let entropy_flux = ((s_r * q_l - s_l * q_r) + s_l * s_r * (eta_r - eta_l)) / den;
    Ok(InterfaceFlux { flux, max_speed, entropy_flux })
}

fn pressure_relax(species: &SpeciesSet, l: &Side, r: &Side, n: &[f64], scheme: &FluxScheme) -> Result<InterfaceFlux, FluxError> {
    let g = scheme.gamma.value();
    let (pl, pr) = (l.polytropic(), r.polytropic());
    let (al, ar) = riemann::lagrangian_speeds(&pl, &pr, g);
    let (al, ar) = (scheme.speed_inflation * al, scheme.speed_inflation * ar);
    let e_rl = l.e_total - l.e_s - l.h0 - l.e_v_mix.iter().sum::<f64>();
    let e_rr = r.e_total - r.e_s - r.h0 - r.e_v_mix.iter().sum::<f64>();
    let st = riemann::pressure_relax_star(&pl, &pr, al, ar, e_rl, e_rr);
    let (s_l, s_r) = st.wave_speeds(&pl, &pr);
    let max_speed = s_l.abs().max(s_r.abs());
    let layout = l.prim_layout();
    let (rho, u, p, side, e_r_total, eta_star) = if s_l > 0.0 {
        (pl.rho, pl.u, pl.p, l, e_rl, None)
    } else if s_r < 0.0 {
        (pr.rho, pr.u, pr.p, r, e_rr, None)
    } else if st.u_star > 0.0 {
        (st.rho_l_star, st.u_star, st.p_star, l, st.e_l_star, Some(l))
    } else {
        (st.rho_r_star, st.u_star, st.p_star, r, st.e_r_star, Some(r))
    };
    if !(st.rho_l_star > 0.0 && st.rho_r_star > 0.0) {
        return Err(FluxError::WaveSpeed(format!(
            "non-positive star density ({:e}, {:e})",
            st.rho_l_star, st.rho_r_star
        )));
    }
    let h = relax_flux_rows(layout, rho, u, p, n, side, e_r_total);
    let entropy_flux = match eta_star {
        None => side.eta(species) * u,
        // the specific entropy of each side is carried unchanged into its star region
        Some(s) => -rho * species.specific_entropy_of(&s.prim) * u,
    };
    Ok(InterfaceFlux {
        flux: lift_flux(species, layout, &h),
        max_speed,
        entropy_flux,
    })
}

/// Wall flux `(0, p* n, 0, 0)` from the pressure-relaxation solver with the mirror state.
pub fn wall_flux(species: &SpeciesSet, u: &ConservedState, n: &[f64]) -> Result<InterfaceFlux, FluxError> {
    let prim = species.primitive(u)?;
    let un = prim.normal_velocity(n);
    let a = (prim.gamma * prim.rho * prim.p).sqrt() + (prim.gamma + 1.0) * prim.rho * un.max(0.0);
    let p_star = prim.p + a * un;
    let layout = u.layout();
    let mut flux = Vars::from_elem(0.0, layout.n_vars());
    for (k, i) in layout.momentum().enumerate() {
        flux[i] = p_star * n[k];
    }
    Ok(InterfaceFlux {
        flux,
        max_speed: un.abs() + a / prim.rho,
        entropy_flux: 0.0,
    })
}

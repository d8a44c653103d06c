//! Single-interface and single-cell checks on random data.

use crate::flux::{physical_flux, FluxError, FluxScheme};
use crate::thermo::{ConservedState, SpeciesSet, ThermoError};
use crate::verify::audit::{check_entropy_inequality, check_principles, AuditViolation, CellEntropy};

pub const CONSISTENCY_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct FluxPairReport {
    /// `max_i |h_i(u, u, n) - f_i(u).n| / |f(u).n|_scale`, over both states.
    pub consistency: f64,
    /// `h(u_l, u_r, n) == -h(u_r, u_l, -n)` bit for bit.
    pub antisymmetric: bool,
}

impl FluxPairReport {
    pub fn passed(&self) -> bool {
        self.antisymmetric && self.consistency <= CONSISTENCY_TOL
    }
}

/// Consistency and conservation of `scheme` on the pair `(u_l, u_r)` across `n`.
///
/// Each flux component is compared relative to the magnitude of its block
/// (`rho |v.n| + rho c` for mass, momentum and vibration rows, `(rho E + p)|v.n| + p c` for energy)
/// so that rows that vanish at rest are not divided by zero.
pub fn check_flux_pair(
    species: &SpeciesSet,
    scheme: &FluxScheme,
    u_l: &ConservedState,
    u_r: &ConservedState,
    n: &[f64],
) -> Result<FluxPairReport, FluxError> {
    let mut consistency: f64 = 0.0;
    for u in [u_l, u_r] {
        let h = scheme.flux(species, u, u, n)?.flux;
        let f = physical_flux(species, u, n)?;
        let prim = species.primitive(u)?;
        let c = (prim.gamma * (prim.gamma - 1.0) * prim.e_t).sqrt();
        let un = prim.normal_velocity(n).abs();
        let layout = u.layout();
        for i in 0..layout.n_vars() {
            let scale = if i == layout.energy() {
                (u.rho_e().abs() + prim.p) * (un + c)
            } else if layout.momentum().contains(&i) {
                prim.rho * (un + c) * (un + c)
            } else {
                (u.as_slice()[i].abs() + f64::MIN_POSITIVE) * (un + c)
            };
            consistency = consistency.max((h[i] - f[i]).abs() / scale);
        }
    }
    let neg: Vec<f64> = n.iter().map(|x| -x).collect();
    let forward = scheme.flux(species, u_l, u_r, n)?;
    let backward = scheme.flux(species, u_r, u_l, &neg)?;
    let antisymmetric = forward.flux.iter().zip(&backward.flux).all(|(a, b)| *a == -*b)
        && forward.entropy_flux == -backward.entropy_flux;
    Ok(FluxPairReport {
        consistency,
        antisymmetric,
    })
}

#[derive(Clone, Debug)]
pub struct ThreePointOutcome {
    pub updated: ConservedState,
    pub dt_over_dx: f64,
    pub violations: Vec<AuditViolation>,
}

#[derive(Debug, thiserror::Error)]
pub enum ThreePointError {
    #[error("flux evaluation failed: {0}")]
    Flux(#[from] FluxError),
    #[error("updated state left the admissible set: {0}")]
    Inadmissible(#[from] ThermoError),
}

/// One explicit update of the middle cell of `(a, b, c)` in 1D at the given CFL number,
/// followed by the admissibility, mass-fraction, entropy-minimum and cell entropy checks.
pub fn three_point_update(
    species: &SpeciesSet,
    scheme: &FluxScheme,
    cells: [&ConservedState; 3],
    cfl: f64,
) -> Result<ThreePointOutcome, ThreePointError> {
    let n = [1.0];
    let left = scheme.flux(species, cells[0], cells[1], &n)?;
    let right = scheme.flux(species, cells[1], cells[2], &n)?;
    let lambda = left.max_speed.max(right.max_speed);
    let dt_over_dx = cfl / lambda;
    let mut updated = cells[1].clone();
    let delta: Vec<f64> = right.flux.iter().zip(&left.flux).map(|(r, l)| r - l).collect();
    updated.add_scaled(-dt_over_dx, &delta);
    let new = CellEntropy::new(species, &updated)?;
    let stencil = cells.iter().map(|u| CellEntropy::new(species, u)).collect::<Result<Vec<_>, _>>()?;
    let mut violations = Vec::new();
    check_principles(1, &new, &stencil, &mut violations);
    let net = dt_over_dx * (right.entropy_flux - left.entropy_flux);
    let scale = dt_over_dx * (right.entropy_flux.abs() + left.entropy_flux.abs());
    check_entropy_inequality(1, stencil[1].eta, new.eta, net, scale, &mut violations);
    Ok(ThreePointOutcome {
        updated,
        dt_over_dx,
        violations,
    })
}

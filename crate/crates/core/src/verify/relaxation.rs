//! The variational principle and the H-theorem of the energy relaxation system.

use crate::relax::{
    equilibrium_split, lift, project, relax_primitive, variational_minimize, zeta_of, RelaxError, RelaxGamma, RelaxState,
};
use crate::thermo::SpeciesSet;

pub const VARIATIONAL_TOL: f64 = 1e-9;
pub const TERMINAL_TOL: f64 = 1e-8;
/// Allowed round-off growth of `zeta` between steps and drift of the invariants.
const ROUNDOFF_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct VariationalReport {
    /// `|e_r* - e_r_eq| / e_t`.
    pub split_error: f64,
    /// `|zeta_min + s| / max(|s|, C_vt)`.
    pub value_error: f64,
}

impl VariationalReport {
    pub fn passed(&self) -> bool {
        self.split_error <= VARIATIONAL_TOL && self.value_error <= VARIATIONAL_TOL
    }
}

/// Minimizes `zeta` over splits `e_r + e_s = e_t` and compares with the equilibrium split and `-s`.
pub fn check_variational(species: &SpeciesSet, y: &[f64], tau: f64, e_t: f64, e_v: &[f64], gamma: RelaxGamma) -> VariationalReport {
    let mix = species.mixture(y);
    let (e_r, zeta_min) = variational_minimize(species, y, tau, e_t, e_v, gamma);
    let (e_r_eq, _) = equilibrium_split(mix.gamma, e_t, gamma);
    let s = species.specific_entropy(y, tau, e_t, e_v);
    VariationalReport {
        split_error: (e_r - e_r_eq).abs() / e_t,
        value_error: (zeta_min + s).abs() / s.abs().max(mix.cv_t),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HTheoremReport {
    /// Largest step-to-step increase of `zeta`, relative to `max(|zeta|, C_vt)`.
    pub max_increase: f64,
    /// Largest relative drift of `rho_alpha`, `rho v`, `rho e_v` and `rho E_r + rho e_s`.
    pub invariant_drift: f64,
    /// Distance of the final state to `P(L(w0))`, relative per block.
    pub terminal_error: f64,
}

impl HTheoremReport {
    pub fn passed(&self) -> bool {
        self.max_increase <= ROUNDOFF_TOL && self.invariant_drift <= ROUNDOFF_TOL && self.terminal_error <= TERMINAL_TOL
    }
}

/// Integrates the homogeneous relaxation from `w0` over `t_end` in `n_steps` exact steps.
pub fn check_h_theorem(
    species: &SpeciesSet,
    w0: &RelaxState,
    gamma: RelaxGamma,
    epsilon: f64,
    t_end: f64,
    n_steps: usize,
) -> Result<HTheoremReport, RelaxError> {
    let p0 = relax_primitive(species, w0)?;
    let cv = species.mixture(&p0.y).cv_t;
    let dt = t_end / n_steps as f64;
    let energy0 = w0.rho_er() + w0.rho_es();
    let mut w = w0.clone();
    let mut zeta = zeta_of(species, &w, gamma)?;
    let mut max_increase: f64 = 0.0;
    let mut drift: f64 = 0.0;
    for _ in 0..n_steps {
        w = crate::relax::homogeneous_relax_step(species, &w, gamma, epsilon, dt)?;
        let next = zeta_of(species, &w, gamma)?;
        max_increase = max_increase.max((next - zeta) / zeta.abs().max(cv));
        zeta = next;
        drift = drift.max(block_error(w0, &w, energy0));
    }
    let target = project(species, &lift(species, w0), gamma)?;
    let terminal_error = block_error(&target, &w, energy0).max(
        ((w.rho_er() - target.rho_er()).abs() + (w.rho_es() - target.rho_es()).abs()) / (p0.rho * (p0.e_r + p0.e_s)),
    );
    Ok(HTheoremReport {
        max_increase,
        invariant_drift: drift,
        terminal_error,
    })
}

/// Relative differences of the quantities the homogeneous relaxation leaves unchanged.
fn block_error(a: &RelaxState, b: &RelaxState, energy: f64) -> f64 {
    let rho = a.rho();
    let mut worst: f64 = 0.0;
    for (x, y) in a.rho_alpha().iter().zip(b.rho_alpha()) {
        worst = worst.max((x - y).abs() / rho);
    }
    let mom_scale = a.mom().iter().map(|m| m.abs()).fold((rho * energy).sqrt(), f64::max);
    for (x, y) in a.mom().iter().zip(b.mom()) {
        worst = worst.max((x - y).abs() / mom_scale);
    }
    for (x, y) in a.rho_ev().iter().zip(b.rho_ev()) {
        worst = worst.max((x - y).abs() / x.abs().max(f64::MIN_POSITIVE));
    }
    let e_b = b.rho_er() + b.rho_es();
    worst.max((e_b - energy).abs() / energy.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thermo::bundled_database;
    use crate::verify::sampling::{random_relax, trial_rng};

    fn set(names: &[&str]) -> SpeciesSet {
        SpeciesSet::select(&bundled_database(), names).unwrap()
    }

    #[test]
    fn minimizer_is_the_equilibrium_split() {
        let sp = set(&["N2", "O2", "N"]);
        let r = check_variational(&sp, &[0.5, 0.3, 0.2], 2.0, 3e5, &[1e4, 2e4], RelaxGamma::default());
        assert!(r.passed(), "{r:?}");
        let he = set(&["He"]);
        let r = check_variational(&he, &[1.0], 0.1, 1e-3, &[], RelaxGamma::new(1.9).unwrap());
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn equilibrium_start_stays_put() {
        let sp = set(&["N2", "N"]);
        let u = sp.conserved(&[0.9, 0.1], 0.3, &[50.0, -20.0], 2e5, &[1e4]);
        let w0 = project(&sp, &u, RelaxGamma::default()).unwrap();
        let r = check_h_theorem(&sp, &w0, RelaxGamma::default(), 1e-3, 1e-2, 20).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.terminal_error < 1e-14, "{r:?}");
    }

    #[test]
    fn off_equilibrium_starts_decay_to_one_state() {
        let sp = set(&["N2", "O2", "N"]);
        let gamma = RelaxGamma::default();
        for t in 0..50 {
            let w0 = random_relax(&sp, &mut trial_rng(3, t), 2);
            let a = check_h_theorem(&sp, &w0, gamma, 1e-3, 0.05, 40).unwrap();
            let b = check_h_theorem(&sp, &w0, gamma, 2e-3, 0.1, 40).unwrap();
            assert!(a.passed(), "trial {t}: {a:?}");
            assert!(b.passed(), "trial {t}: {b:?}");
        }
    }

    #[test]
    fn too_short_a_horizon_is_reported() {
        let sp = set(&["N2"]);
        let w0 = RelaxState::from_parts(&[1.0], &[0.0], 1.0, &[0.1], 0.01);
        let r = check_h_theorem(&sp, &w0, RelaxGamma::default(), 1.0, 0.1, 5).unwrap();
        assert!(r.terminal_error > TERMINAL_TOL);
        assert!(r.max_increase <= 0.0);
    }
}

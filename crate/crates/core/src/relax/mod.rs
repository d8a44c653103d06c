//! Energy relaxation: the polytropic relaxation system, its equilibrium manifold,
//! the relaxation entropy `zeta`, and the homogeneous relaxation dynamics.
//!
//! The internal energy is split as `e_t = e_r + e_s` where `e_r` obeys a
//! polytropic law `p_r = (gamma - 1) rho e_r` with a single exponent `gamma > 5/3`
//! and `e_s` is a passively advected remainder. At equilibrium
//! `e_s = F(Y, e_r) = (gamma - gamma(Y)) / (gamma(Y) - 1) e_r`.

mod reduced;

use thiserror::Error;

use crate::thermo::{dot, ConservedState, Layout, SpeciesSet, ThermoError, Vars};

pub use reduced::{ReducedPoint, ReducedZeta};

/// Upper bound of the mixture exponent over all compositions.
pub const GAMMA_MIX_MAX: f64 = 5.0 / 3.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RelaxError {
    #[error("relaxation exponent {0} must exceed 5/3")]
    Subcharacteristic(f64),
    #[error("inadmissible relaxation state: {quantity} = {value:e}")]
    Inadmissible { quantity: &'static str, value: f64 },
    #[error(transparent)]
    Thermo(#[from] ThermoError),
}

/// Exponent of the polytropic relaxation pressure; always strictly above 5/3.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct RelaxGamma(f64);

impl RelaxGamma {
    pub fn new(gamma: f64) -> Result<Self, RelaxError> {
        if gamma > GAMMA_MIX_MAX && gamma.is_finite() {
            Ok(Self(gamma))
        } else {
            Err(RelaxError::Subcharacteristic(gamma))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Default for RelaxGamma {
    /// `1.01 * 5/3`.
    fn default() -> Self {
        Self(1.01 * GAMMA_MIX_MAX)
    }
}

/// Relaxation state `w = (rho_alpha, rho v, rho E_r, rho e_v, rho e_s)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RelaxState {
    layout: Layout,
    data: Vars,
}

impl RelaxState {
    pub fn from_parts(rho_alpha: &[f64], mom: &[f64], rho_er: f64, rho_ev: &[f64], rho_es: f64) -> Self {
        let layout = Layout::new(rho_alpha.len(), rho_ev.len(), mom.len());
        let mut data = Vars::with_capacity(layout.n_vars() + 1);
        data.extend_from_slice(rho_alpha);
        data.extend_from_slice(mom);
        data.push(rho_er);
        data.extend_from_slice(rho_ev);
        data.push(rho_es);
        Self { layout, data }
    }

    /// Layout of the leading `(rho_alpha, rho v, rho E_r, rho e_v)` block; `rho e_s` follows it.
    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn rho_alpha(&self) -> &[f64] {
        &self.data[self.layout.species()]
    }

    pub fn mom(&self) -> &[f64] {
        &self.data[self.layout.momentum()]
    }

    pub fn rho_er(&self) -> f64 {
        self.data[self.layout.energy()]
    }

    pub fn rho_ev(&self) -> &[f64] {
        &self.data[self.layout.vibration()]
    }

    pub fn rho_es(&self) -> f64 {
        self.data[self.layout.n_vars()]
    }

    pub fn rho(&self) -> f64 {
        self.rho_alpha().iter().sum()
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        assert_eq!(self.layout, other.layout);
        Self {
            layout: self.layout,
            data: self.data.iter().zip(&other.data).map(|(x, y)| a * x + b * y).collect(),
        }
    }
}

/// Specific variables of a relaxation state.
#[derive(Clone, Debug, PartialEq)]
pub struct RelaxPrimitive {
    pub y: Vars,
    pub rho: f64,
    pub v: Vars,
    pub e_r: f64,
    pub e_s: f64,
    /// Per-species vibration energies (0 for vanishing species).
    pub e_v: Vars,
}

impl RelaxPrimitive {
    pub fn tau(&self) -> f64 {
        1.0 / self.rho
    }

    /// Polytropic relaxation pressure.
    pub fn p_r(&self, gamma: RelaxGamma) -> f64 {
        (gamma.value() - 1.0) * self.rho * self.e_r
    }
}

/// Equilibrium value of `e_s` for a given `e_r`.
pub fn f_equilibrium(species: &SpeciesSet, y: &[f64], e_r: f64, gamma: RelaxGamma) -> f64 {
    let gy = species.mixture(y).gamma;
    (gamma.value() - gy) / (gy - 1.0) * e_r
}

/// Equilibrium split `(e_r, e_s)` of a translation-rotation energy.
pub fn equilibrium_split(gamma_mix: f64, e_t: f64, gamma: RelaxGamma) -> (f64, f64) {
    let g = gamma.value();
    ((gamma_mix - 1.0) / (g - 1.0) * e_t, (g - gamma_mix) / (g - 1.0) * e_t)
}

/// Projection onto the equilibrium manifold: `e_r = e_r(rho, p)`, `e_s = e_t - e_r`.
pub fn project(species: &SpeciesSet, u: &ConservedState, gamma: RelaxGamma) -> Result<RelaxState, RelaxError> {
    let prim = species.primitive(u)?;
    let (e_r, e_s) = equilibrium_split(prim.gamma, prim.e_t, gamma);
    let rho_er = prim.rho * e_r + 0.5 * dot(u.mom(), &prim.v);
    Ok(RelaxState::from_parts(u.rho_alpha(), u.mom(), rho_er, u.rho_ev(), prim.rho * e_s))
}

/// The linear map back to conserved variables, `rho E = rho E_r + rho e_s + rho h0 + rho e_v`.
pub fn lift(species: &SpeciesSet, w: &RelaxState) -> ConservedState {
    let rho_e = w.rho_er() + w.rho_es() + dot(w.rho_alpha(), species.h0()) + w.rho_ev().iter().sum::<f64>();
    ConservedState::from_parts(w.rho_alpha(), w.mom(), rho_e, w.rho_ev())
}

/// Decodes a relaxation state, checking membership in the admissible set.
pub fn relax_primitive(species: &SpeciesSet, w: &RelaxState) -> Result<RelaxPrimitive, RelaxError> {
    if let Some(&v) = w.rho_alpha().iter().find(|v| !(**v >= 0.0)) {
        return Err(RelaxError::Inadmissible { quantity: "rho_alpha", value: v });
    }
    let rho = w.rho();
    if !(rho > 0.0) {
        return Err(RelaxError::Inadmissible { quantity: "rho", value: rho });
    }
    let y: Vars = w.rho_alpha().iter().map(|r| r / rho).collect();
    let v: Vars = w.mom().iter().map(|m| m / rho).collect();
    let e_r = w.rho_er() / rho - 0.5 * dot(&v, &v);
    let e_s = w.rho_es() / rho;
    if !(e_r > 0.0) {
        return Err(RelaxError::Inadmissible { quantity: "e_r", value: e_r });
    }
    if !(e_s > 0.0) {
        return Err(RelaxError::Inadmissible { quantity: "e_s", value: e_s });
    }
    let mut e_v = Vars::new();
    for (beta, &rev) in w.rho_ev().iter().enumerate() {
        let rb = w.rho_alpha()[beta];
        let e = if rb > 0.0 { rev / rb } else { 0.0 };
        if rb > 0.0 && !(e > 0.0) {
            return Err(RelaxError::Inadmissible { quantity: "e_v", value: e });
        }
        e_v.push(e);
    }
    debug_assert_eq!(species.n_diatomic(), e_v.len());
    Ok(RelaxPrimitive { y, rho, v, e_r, e_s, e_v })
}

/// Non-equilibrium part of `zeta`; zero on the equilibrium manifold and positive elsewhere.
pub fn varsigma(species: &SpeciesSet, y: &[f64], e_r: f64, e_s: f64, gamma: RelaxGamma) -> f64 {
    let mix = species.mixture(y);
    let g = gamma.value();
    let a = (mix.gamma - 1.0) / (g - 1.0);
    let x = e_s / e_r;
    // ln f with f = (1 - a)(1 + x)/x * (a x / (1 - a))^a
    let one_m_a = (g - mix.gamma) / (g - 1.0);
    let ln_f = one_m_a.ln() + x.ln_1p() - x.ln() + a * (a.ln() + x.ln() - one_m_a.ln());
    mix.cv_t * ln_f
}

/// Relaxation entropy `zeta = -s(Y, tau, e_r + e_s, e_v) + varsigma(Y, e_r, e_s)`.
pub fn zeta(species: &SpeciesSet, y: &[f64], tau: f64, e_r: f64, e_s: f64, e_v: &[f64], gamma: RelaxGamma) -> f64 {
    -species.specific_entropy(y, tau, e_r + e_s, e_v) + varsigma(species, y, e_r, e_s, gamma)
}

/// Closed-form partial derivatives of `zeta` in `tau`, `e_r` and `e_s`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZetaPartials {
    pub d_tau: f64,
    pub d_er: f64,
    pub d_es: f64,
}

pub fn zeta_partials(species: &SpeciesSet, y: &[f64], tau: f64, e_r: f64, e_s: f64, gamma: RelaxGamma) -> ZetaPartials {
    let mix = species.mixture(y);
    let g = gamma.value();
    ZetaPartials {
        d_tau: -mix.r / tau,
        d_er: -mix.r / ((g - 1.0) * e_r),
        d_es: (mix.gamma - g) / (g - 1.0) * mix.cv_t / e_s,
    }
}

/// `zeta` of a relaxation state.
pub fn zeta_of(species: &SpeciesSet, w: &RelaxState, gamma: RelaxGamma) -> Result<f64, RelaxError> {
    let p = relax_primitive(species, w)?;
    Ok(zeta(species, &p.y, p.tau(), p.e_r, p.e_s, &p.e_v, gamma))
}

/// Minimizes `zeta` over the splits `e_r + e_s = e_t`, returning `(e_r*, zeta_min)`.
///
/// The derivative along the segment is strictly increasing, so the minimizer is
/// bracketed by `(0, e_t)` and located by bisection on its sign.
pub fn variational_minimize(species: &SpeciesSet, y: &[f64], tau: f64, e_t: f64, e_v: &[f64], gamma: RelaxGamma) -> (f64, f64) {
    let mix = species.mixture(y);
    let g = gamma.value();
    let slope = |e_r: f64| -mix.r / e_r + (g - mix.gamma) * mix.cv_t / (e_t - e_r);
    let (mut lo, mut hi) = (0.0, e_t);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if slope(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let e_r = 0.5 * (lo + hi);
    (e_r, zeta(species, y, tau, e_r, e_t - e_r, e_v, gamma))
}

/// Exact solution over `dt` of the spatially homogeneous system `dw/dt = -(w - M(w))/epsilon`.
///
/// Only `e_s` and `E_r` exchange energy; with `e_r + e_s` fixed the departure
/// `e_s - F(Y, e_r)` decays like `exp(-(gamma - 1)/(gamma(Y) - 1) t / epsilon)`.
pub fn homogeneous_relax_step(species: &SpeciesSet, w: &RelaxState, gamma: RelaxGamma, epsilon: f64, dt: f64) -> Result<RelaxState, RelaxError> {
    let p = relax_primitive(species, w)?;
    let mix = species.mixture(&p.y);
    let g = gamma.value();
    let e_t = p.e_r + p.e_s;
    let (_, es_eq) = equilibrium_split(mix.gamma, e_t, gamma);
    let rate = (g - 1.0) / (mix.gamma - 1.0) / epsilon;
    let decay = (-rate * dt).exp();
    let rho_es = p.rho * (es_eq + (p.e_s - es_eq) * decay);
    let rho_er = (w.rho_er() + w.rho_es()) - rho_es;
    Ok(RelaxState::from_parts(w.rho_alpha(), w.mom(), rho_er, w.rho_ev(), rho_es))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thermo::bundled_database;

    fn set(names: &[&str]) -> SpeciesSet {
        SpeciesSet::select(&bundled_database(), names).unwrap()
    }

    #[test]
    fn gamma_selection() {
        assert!((RelaxGamma::default().value() - 1.01 * 5.0 / 3.0).abs() < 1e-15);
        assert!(RelaxGamma::new(1.7).is_ok());
        assert!(RelaxGamma::new(1.6).is_err());
        assert!(RelaxGamma::new(5.0 / 3.0).is_err());
    }

    #[test]
    fn equilibrium_function_values() {
        let he = set(&["He"]);
        let f = f_equilibrium(&he, &[1.0], 1.0, RelaxGamma::default());
        assert!((f - 0.025).abs() < 1e-14, "{f}");
    }

    #[test]
    fn projection_of_pure_diatomic_gas() {
        let n2 = set(&["N2"]);
        let u = n2.conserved(&[1.0], 1.0, &[0.0], 1.0, &[0.3]);
        let w = project(&n2, &u, RelaxGamma::default()).unwrap();
        let p = relax_primitive(&n2, &w).unwrap();
        assert!((p.e_r - 0.4 / (1.01 * 5.0 / 3.0 - 1.0)).abs() < 1e-14);
        assert!((p.e_r - 0.58537).abs() < 1e-5);
        assert!((p.e_r + p.e_s - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lift_without_enthalpies_or_vibration() {
        let he = set(&["He", "Ar"]);
        let w = RelaxState::from_parts(&[0.3, 0.7], &[0.2, 0.1], 2.0, &[], 0.5);
        let u = lift(&he, &w);
        assert_eq!(u.rho_e(), 2.5);
    }

    #[test]
    fn equilibrium_zeta_is_minus_entropy() {
        let sp = set(&["N2", "O2", "N"]);
        let y = [0.5, 0.3, 0.2];
        let gamma = RelaxGamma::default();
        let gy = sp.mixture(&y).gamma;
        let (e_r, e_s) = equilibrium_split(gy, 3e5, gamma);
        let s = sp.specific_entropy(&y, 2.0, 3e5, &[1e4, 2e4]);
        let z = zeta(&sp, &y, 2.0, e_r, e_s, &[1e4, 2e4], gamma);
        assert!((z + s).abs() < 1e-12 * s.abs());
        let z_off = zeta(&sp, &y, 2.0, 0.9 * e_r, e_s + 0.1 * e_r, &[1e4, 2e4], gamma);
        assert!(z_off > -s);
    }

    #[test]
    fn minimizer_is_equilibrium_split() {
        let sp = set(&["N2", "O2", "N"]);
        let y = [0.5, 0.3, 0.2];
        let gamma = RelaxGamma::default();
        let gy = sp.mixture(&y).gamma;
        let (e_r, zmin) = variational_minimize(&sp, &y, 2.0, 3e5, &[1e4, 2e4], gamma);
        let (expected, _) = equilibrium_split(gy, 3e5, gamma);
        assert!((e_r - expected).abs() < 1e-12 * expected);
        let s = sp.specific_entropy(&y, 2.0, 3e5, &[1e4, 2e4]);
        assert!((zmin + s).abs() < 1e-10 * s.abs());
        let (e_r2, _) = variational_minimize(&sp, &y, 2.0, 6e5, &[1e4, 2e4], gamma);
        assert!((e_r2 / 6e5 - e_r / 3e5).abs() < 1e-13);
    }

    #[test]
    fn infinite_relaxation_time_step_reaches_equilibrium() {
        let sp = set(&["N2", "He"]);
        let gamma = RelaxGamma::default();
        let w = RelaxState::from_parts(&[0.4, 0.6], &[0.3], 5.0, &[0.2], 0.8);
        let relaxed = homogeneous_relax_step(&sp, &w, gamma, 1e-3, f64::INFINITY).unwrap();
        let expected = project(&sp, &lift(&sp, &w), gamma).unwrap();
        for (a, b) in relaxed.as_slice().iter().zip(expected.as_slice()) {
            assert!((a - b).abs() < 1e-14 * (1.0 + b.abs()), "{a} vs {b}");
        }
    }
}

//! Species data and mixture thermodynamics for the multi-temperature model.
//!
//! Each species follows a polytropic ideal-gas law for its translation-rotation
//! modes (`Cv = 3/2 r` for atoms, `5/2 r` for molecules). Diatomic species also
//! carry a harmonic-oscillator vibration energy with its own temperature. The
//! mixture pressure is `p = (gamma(Y) - 1) rho e_t` where `gamma(Y) = r(Y)/Cv(Y) + 1`.
//!
//! Entropies are defined up to additive constants; all constants are set to zero.

mod database;
mod state;

use smallvec::SmallVec;
use thiserror::Error;

pub use database::{bundled_database, parse_database, BUNDLED_DATABASE};
pub use state::{ConservedState, Layout, PrimitiveState, Vars};

pub(crate) use state::dot;

/// Universal gas constant, J/(mol K).
pub const GAS_CONSTANT: f64 = 8.31446;

/// Composition sums within this distance of one are accepted as is.
pub const COMPOSITION_TOL: f64 = 1e-12;
/// Composition sums within this distance of one are silently re-normalized.
pub const COMPOSITION_RENORMALIZE_TOL: f64 = 1e-9;
/// Partial densities below this (zero or subnormal) carry no usable vibration energy per unit mass.
pub const TRACE_DENSITY: f64 = f64::MIN_POSITIVE;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ThermoError {
    #[error("inadmissible state: {quantity}{} = {value:e}", .index.map(|i| format!("[{i}]")).unwrap_or_default())]
    Inadmissible {
        quantity: &'static str,
        index: Option<usize>,
        value: f64,
    },
    #[error("invalid composition: {0}")]
    Composition(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("species database line {line}: {message}")]
    Database { line: usize, message: String },
    #[error("unknown species `{0}`")]
    UnknownSpecies(String),
    #[error("species ordering: diatomic species must precede monoatomic ones")]
    Ordering,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpeciesKind {
    Monoatomic,
    Diatomic { theta_v: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Species {
    pub name: String,
    /// Molecular weight, kg/mol.
    pub molar_mass: f64,
    pub kind: SpeciesKind,
    /// Formation enthalpy, J/kg.
    pub h0: f64,
}

impl Species {
    pub fn new(name: &str, molar_mass: f64, kind: SpeciesKind, h0: f64) -> Result<Self, ThermoError> {
        if !(molar_mass > 0.0) {
            return Err(ThermoError::Domain(format!("{name}: molar mass must be positive")));
        }
        if !(h0 >= 0.0) {
            return Err(ThermoError::Domain(format!("{name}: formation enthalpy must be >= 0")));
        }
        if let SpeciesKind::Diatomic { theta_v } = kind {
            if !(theta_v > 0.0) {
                return Err(ThermoError::Domain(format!("{name}: theta_v must be positive")));
            }
        }
        Ok(Self {
            name: name.to_string(),
            molar_mass,
            kind,
            h0,
        })
    }

    pub fn gas_constant(&self) -> f64 {
        GAS_CONSTANT / self.molar_mass
    }

    pub fn is_diatomic(&self) -> bool {
        matches!(self.kind, SpeciesKind::Diatomic { .. })
    }

    pub fn cv_t(&self) -> f64 {
        match self.kind {
            SpeciesKind::Monoatomic => 1.5 * self.gas_constant(),
            SpeciesKind::Diatomic { .. } => 2.5 * self.gas_constant(),
        }
    }
}

/// A validated mass-fraction vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Composition(Vars);

impl Composition {
    pub fn new(y: &[f64]) -> Result<Self, ThermoError> {
        if let Some((i, &v)) = y.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
            return Err(ThermoError::Composition(format!("Y[{i}] = {v} is negative")));
        }
        let sum: f64 = y.iter().sum();
        let dev = (sum - 1.0).abs();
        if dev <= COMPOSITION_TOL {
            Ok(Self(Vars::from_slice(y)))
        } else if dev <= COMPOSITION_RENORMALIZE_TOL {
            Ok(Self(y.iter().map(|v| v / sum).collect()))
        } else {
            Err(ThermoError::Composition(format!("mass fractions sum to {sum}")))
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Mixture gas constant, translation-rotation heat capacity and adiabatic exponent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MixtureProps {
    pub r: f64,
    pub cv_t: f64,
    pub gamma: f64,
}

/// Species set with the diatomic species stored first.
#[derive(Clone, Debug, PartialEq)]
pub struct SpeciesSet {
    species: Vec<Species>,
    n_diatomic: usize,
    r: SmallVec<[f64; 8]>,
    cv: SmallVec<[f64; 8]>,
    h0: SmallVec<[f64; 8]>,
    theta_v: SmallVec<[f64; 8]>,
}

impl SpeciesSet {
    /// Builds a species set. Diatomic species must come first.
    pub fn new(species: Vec<Species>) -> Result<Self, ThermoError> {
        if species.is_empty() {
            return Err(ThermoError::Domain("empty species set".into()));
        }
        let n_diatomic = species.iter().take_while(|s| s.is_diatomic()).count();
        if species[n_diatomic..].iter().any(Species::is_diatomic) {
            return Err(ThermoError::Ordering);
        }
        let r = species.iter().map(Species::gas_constant).collect();
        let cv = species.iter().map(Species::cv_t).collect();
        let h0 = species.iter().map(|s| s.h0).collect();
        let theta_v = species
            .iter()
            .filter_map(|s| match s.kind {
                SpeciesKind::Diatomic { theta_v } => Some(theta_v),
                SpeciesKind::Monoatomic => None,
            })
            .collect();
        Ok(Self {
            species,
            n_diatomic,
            r,
            cv,
            h0,
            theta_v,
        })
    }

    /// Picks species by name from a database, reordering so that diatomic species come first
    /// (relative order is otherwise kept).
    pub fn select(database: &[Species], names: &[&str]) -> Result<Self, ThermoError> {
        let mut picked = Vec::with_capacity(names.len());
        for name in names {
            let s = database
                .iter()
                .find(|s| s.name.eq_ignore_ascii_case(name))
                .ok_or_else(|| ThermoError::UnknownSpecies(name.to_string()))?;
            picked.push(s.clone());
        }
        picked.sort_by_key(|s| !s.is_diatomic());
        Self::new(picked)
    }

    /// Same species with all formation enthalpies set to zero.
    pub fn without_formation_enthalpies(&self) -> Self {
        let species = self
            .species
            .iter()
            .map(|s| Species { h0: 0.0, ..s.clone() })
            .collect();
        Self::new(species).expect("reordering preserved")
    }

    pub fn species(&self) -> &[Species] {
        &self.species
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.species.iter().position(|s| s.name.eq_ignore_ascii_case(name))
    }

    pub fn n_species(&self) -> usize {
        self.species.len()
    }

    pub fn n_diatomic(&self) -> usize {
        self.n_diatomic
    }

    pub fn layout(&self, dim: usize) -> Layout {
        Layout::new(self.n_species(), self.n_diatomic, dim)
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    pub fn cv(&self) -> &[f64] {
        &self.cv
    }

    pub fn h0(&self) -> &[f64] {
        &self.h0
    }

    pub fn theta_v(&self) -> &[f64] {
        &self.theta_v
    }

    /// Mixture properties from mass fractions (no validation, hot path).
    pub fn mixture(&self, y: &[f64]) -> MixtureProps {
        let mut r = 0.0;
        let mut cv_t = 0.0;
        for ((yi, ri), ci) in y.iter().zip(&self.r).zip(&self.cv) {
            r += yi * ri;
            cv_t += yi * ci;
        }
        MixtureProps {
            r,
            cv_t,
            gamma: r / cv_t + 1.0,
        }
    }

    /// Equivalent adiabatic exponent `gamma(Y)`.
    pub fn gamma_mix(&self, y: &Composition) -> f64 {
        self.mixture(y.as_slice()).gamma
    }

    /// `p = (gamma(Y) - 1) rho e_t`.
    pub fn pressure(&self, y: &Composition, rho: f64, e_t: f64) -> f64 {
        (self.gamma_mix(y) - 1.0) * rho * e_t
    }

    /// Frozen sound speed `c = sqrt(gamma (gamma - 1) e_t)`.
    pub fn frozen_sound_speed(&self, y: &Composition, e_t: f64) -> f64 {
        let g = self.gamma_mix(y);
        (g * (g - 1.0) * e_t).sqrt()
    }

    /// Vibration energy of diatomic species `beta` at vibration temperature `tv`.
    pub fn vib_energy(&self, beta: usize, tv: f64) -> Result<f64, ThermoError> {
        if !(tv > 0.0) {
            return Err(ThermoError::Domain(format!("vibration temperature {tv} must be positive")));
        }
        let (r, theta) = (self.r[beta], self.theta_v[beta]);
        Ok(r * theta / (theta / tv).exp_m1())
    }

    /// Inverse of [`Self::vib_energy`].
    pub fn vib_temperature(&self, beta: usize, e_v: f64) -> Result<f64, ThermoError> {
        if !(e_v > 0.0) {
            return Err(ThermoError::Domain(format!("vibration energy {e_v} must be positive")));
        }
        Ok(self.vib_temperature_unchecked(beta, e_v))
    }

    fn vib_temperature_unchecked(&self, beta: usize, e_v: f64) -> f64 {
        let (r, theta) = (self.r[beta], self.theta_v[beta]);
        theta / (r * theta / e_v).ln_1p()
    }

    /// Vibration entropy `s_v(e)` of diatomic species `beta` (harmonic oscillator, no coupling).
    pub fn vib_entropy(&self, beta: usize, e_v: f64) -> f64 {
        let (r, theta) = (self.r[beta], self.theta_v[beta]);
        let rt = r * theta;
        if e_v == 0.0 {
            return r * rt.ln();
        }
        r * ((e_v + rt).ln() + e_v / rt * (rt / e_v).ln_1p())
    }

    /// Second derivative of [`Self::vib_entropy`], negative.
    pub fn vib_entropy_second_derivative(&self, beta: usize, e_v: f64) -> f64 {
        let r = self.r[beta];
        -r / (e_v * (e_v + r * self.theta_v[beta]))
    }

    /// Mixture specific entropy `s(Y, tau, e_t, e_v)`; species with `Y = 0` are dropped.
    pub fn specific_entropy(&self, y: &[f64], tau: f64, e_t: f64, e_v: &[f64]) -> f64 {
        let mix = self.mixture(y);
        let mut k = 0.0;
        for (i, &yi) in y.iter().enumerate() {
            if yi > 0.0 {
                k += yi * (self.cv[i] * (self.cv[i] / mix.cv_t).ln() - self.r[i] * yi.ln());
            }
        }
        let mut s_v = 0.0;
        for (beta, &ev) in e_v.iter().enumerate() {
            if y[beta] > 0.0 && ev > 0.0 {
                s_v += y[beta] * self.vib_entropy(beta, ev);
            }
        }
        mix.cv_t * e_t.ln() + mix.r * tau.ln() + k + s_v
    }

    /// Decodes a conserved state, checking membership in the admissible set.
    ///
    /// Partial densities may vanish. A diatomic species below [`TRACE_DENSITY`]
    /// only needs `rho_ev >= 0` and is reported with `e_v = Tv = 0`; the
    /// translation-rotation energy is extracted as `E - h0 - e_v - |v|^2/2`.
    pub fn primitive(&self, u: &ConservedState) -> Result<PrimitiveState, ThermoError> {
        let layout = u.layout();
        debug_assert_eq!(layout.n_species, self.n_species());
        let rho_alpha = u.rho_alpha();
        if let Some((i, &v)) = rho_alpha.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
            return Err(ThermoError::Inadmissible {
                quantity: "rho_alpha",
                index: Some(i),
                value: v,
            });
        }
        let rho = u.rho();
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(ThermoError::Inadmissible {
                quantity: "rho",
                index: None,
                value: rho,
            });
        }
        let y: Vars = rho_alpha.iter().map(|r| r / rho).collect();
        let v: Vars = u.mom().iter().map(|m| m / rho).collect();
        let mut e_v = Vars::new();
        let mut tv = Vars::new();
        let mut e_v_mix = 0.0;
        for (beta, &rev) in u.rho_ev().iter().enumerate() {
            let rb = rho_alpha[beta];
            if rb >= TRACE_DENSITY {
                let e = rev / rb;
                if !(e > 0.0) || !e.is_finite() {
                    return Err(ThermoError::Inadmissible {
                        quantity: "e_v",
                        index: Some(beta),
                        value: e,
                    });
                }
                e_v.push(e);
                tv.push(self.vib_temperature_unchecked(beta, e));
            } else {
                if !(rev >= 0.0) || !rev.is_finite() {
                    return Err(ThermoError::Inadmissible {
                        quantity: "rho_ev (trace species)",
                        index: Some(beta),
                        value: rev,
                    });
                }
                e_v.push(0.0);
                tv.push(0.0);
            }
            e_v_mix += rev / rho;
        }
        let e_total = u.rho_e() / rho;
        let h0: f64 = y.iter().zip(&self.h0).map(|(a, b)| a * b).sum();
        let kinetic = 0.5 * dot(&v, &v);
        let e_t = e_total - h0 - e_v_mix - kinetic;
        if !(e_t > 0.0) || !e_t.is_finite() {
            return Err(ThermoError::Inadmissible {
                quantity: "e_t",
                index: None,
                value: e_t,
            });
        }
        let mix = self.mixture(&y);
        Ok(PrimitiveState {
            p: (mix.gamma - 1.0) * rho * e_t,
            t: e_t / mix.cv_t,
            gamma: mix.gamma,
            y,
            rho,
            v,
            e_t,
            e_v,
            tv,
        })
    }

    /// Builds a conserved state from `(Y, rho, v, e_t, e_v)`.
    pub fn conserved(&self, y: &[f64], rho: f64, v: &[f64], e_t: f64, e_v: &[f64]) -> ConservedState {
        let rho_alpha: Vars = y.iter().map(|yi| yi * rho).collect();
        let mom: Vars = v.iter().map(|vi| rho * vi).collect();
        let rho_ev: Vars = e_v.iter().zip(&rho_alpha).map(|(e, r)| e * r).collect();
        let h0: f64 = y.iter().zip(&self.h0).map(|(a, b)| a * b).sum();
        let e_v_mix: f64 = e_v.iter().zip(y).map(|(e, yi)| e * yi).sum();
        let rho_e = rho * (h0 + e_t + e_v_mix + 0.5 * dot(v, v));
        ConservedState::from_parts(&rho_alpha, &mom, rho_e, &rho_ev)
    }

    /// Builds a conserved state from pressure, temperature and vibration temperatures.
    pub fn conserved_from_ptv(&self, y: &[f64], p: f64, t: f64, v: &[f64], tv: &[f64]) -> Result<ConservedState, ThermoError> {
        let mix = self.mixture(y);
        let rho = p / (mix.r * t);
        let e_t = mix.cv_t * t;
        let e_v = tv
            .iter()
            .enumerate()
            .map(|(beta, &t)| self.vib_energy(beta, t))
            .collect::<Result<Vars, _>>()?;
        Ok(self.conserved(y, rho, v, e_t, &e_v))
    }

    /// Physical entropy `eta = -rho s` and its flux through `n`.
    pub fn entropy_pair(&self, u: &ConservedState, n: &[f64]) -> Result<(f64, f64), ThermoError> {
        let prim = self.primitive(u)?;
        let eta = self.entropy_of(&prim);
        Ok((eta, eta * prim.normal_velocity(n)))
    }

    /// `eta = -rho s` of a decoded state.
    pub fn entropy_of(&self, prim: &PrimitiveState) -> f64 {
        -prim.rho * self.specific_entropy_of(prim)
    }

    pub fn specific_entropy_of(&self, prim: &PrimitiveState) -> f64 {
        self.specific_entropy(&prim.y, 1.0 / prim.rho, prim.e_t, &prim.e_v)
    }

    /// Entropy variables `eta'(u)`. All partial densities must be positive.
    pub fn entropy_variables(&self, u: &ConservedState) -> Result<Vars, ThermoError> {
        let prim = self.primitive(u)?;
        self.entropy_variables_with(&prim, u.rho_alpha())
    }

    /// Entropy variables of a decoded state, with partial densities `Y rho`.
    pub fn entropy_variables_of(&self, prim: &PrimitiveState) -> Result<Vars, ThermoError> {
        let rho_alpha: Vars = prim.y.iter().map(|y| y * prim.rho).collect();
        self.entropy_variables_with(prim, &rho_alpha)
    }

    fn entropy_variables_with(&self, prim: &PrimitiveState, rho_alpha: &[f64]) -> Result<Vars, ThermoError> {
        let layout = self.layout(prim.v.len());
        let ns = self.n_species();
        if let Some((i, &v)) = rho_alpha.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
            return Err(ThermoError::Inadmissible {
                quantity: "rho_alpha (entropy variables need rho_alpha > 0)",
                index: Some(i),
                value: v,
            });
        }
        let theta = 1.0 / prim.t;
        let e_c = prim.kinetic_energy();
        let mut out = Vars::from_elem(0.0, layout.n_vars());
        for alpha in 0..ns {
            let cv = self.cv[alpha];
            let r = self.r[alpha];
            let s_t = cv * (cv * prim.t).ln() - r * rho_alpha[alpha].ln();
            let mut val = cv + r - s_t + (self.h0[alpha] - e_c) * theta;
            if alpha < self.n_diatomic {
                let ev = prim.e_v[alpha];
                // theta_v g_v = e_v / T_v - s_v
                val += ev / prim.tv[alpha] - self.vib_entropy(alpha, ev);
            }
            out[alpha] = val;
        }
        for (k, i) in layout.momentum().enumerate() {
            out[i] = theta * prim.v[k];
        }
        out[layout.energy()] = -theta;
        for (beta, i) in layout.vibration().enumerate() {
            out[i] = theta - 1.0 / prim.tv[beta];
        }
        Ok(out)
    }

    /// Decoded state from `(Y, rho, v, e_t, e_v)` without passing through `rho E`.
    /// Vibration energies must be positive.
    pub fn primitive_from(&self, y: &[f64], rho: f64, v: &[f64], e_t: f64, e_v: &[f64]) -> PrimitiveState {
        let mix = self.mixture(y);
        PrimitiveState {
            p: (mix.gamma - 1.0) * rho * e_t,
            t: e_t / mix.cv_t,
            gamma: mix.gamma,
            y: Vars::from_slice(y),
            rho,
            v: Vars::from_slice(v),
            e_t,
            e_v: Vars::from_slice(e_v),
            tv: e_v.iter().enumerate().map(|(b, &e)| self.vib_temperature_unchecked(b, e)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn air5() -> SpeciesSet {
        SpeciesSet::select(&bundled_database(), &["N2", "O2", "NO", "N", "O"]).unwrap()
    }

    const AIR5_Y: [f64; 5] = [0.7543, 0.2283, 0.01026, 6.5e-7, 0.00713];

    fn air5_composition() -> Composition {
        // the published fractions sum to 1 - 3.5e-7; close the budget on N2
        let mut y = AIR5_Y;
        let sum: f64 = y.iter().sum();
        y[0] += 1.0 - sum;
        Composition::new(&y).unwrap()
    }

    #[test]
    fn gamma_bounds_for_pure_gases() {
        let db = bundled_database();
        let he = SpeciesSet::select(&db, &["He"]).unwrap();
        let n2 = SpeciesSet::select(&db, &["N2"]).unwrap();
        let pure = Composition::new(&[1.0]).unwrap();
        assert!((he.gamma_mix(&pure) - 5.0 / 3.0).abs() < 1e-15);
        assert!((n2.gamma_mix(&pure) - 1.4).abs() < 1e-15);
    }

    #[test]
    fn air_equivalent_gamma() {
        let sp = air5();
        let g = sp.gamma_mix(&air5_composition());
        assert!((g - 1.402).abs() < 1e-3, "gamma = {g}");
        let p = sp.pressure(&air5_composition(), 1.0, 1.0);
        assert!((p - 0.402).abs() < 1e-3);
    }

    #[test]
    fn composition_rules() {
        assert!(Composition::new(&[0.5, 0.5]).is_ok());
        let c = Composition::new(&[0.5, 0.5 + 5e-10]).unwrap();
        assert!((c.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(Composition::new(&[0.5, 0.6]).is_err());
        assert!(Composition::new(&[1.1, -0.1]).is_err());
    }

    #[test]
    fn pressure_and_sound_speed() {
        let db = bundled_database();
        let he = SpeciesSet::select(&db, &["He"]).unwrap();
        let n2 = SpeciesSet::select(&db, &["N2"]).unwrap();
        let pure = Composition::new(&[1.0]).unwrap();
        assert!((he.pressure(&pure, 1.0, 1.0) - 2.0 / 3.0).abs() < 1e-15);
        assert!((n2.pressure(&pure, 2.0, 3.0) - 2.4).abs() < 1e-14);
        assert!((he.frozen_sound_speed(&pure, 1.0) - (10.0f64 / 9.0).sqrt()).abs() < 1e-15);
        assert!((n2.frozen_sound_speed(&pure, 1.0) - 0.56f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn vibration_energy_limits() {
        let sp = air5();
        let (r, theta) = (sp.r()[0], sp.theta_v()[0]);
        let e = sp.vib_energy(0, theta).unwrap();
        assert!((e / (r * theta) - 1.0 / (1f64.exp() - 1.0)).abs() < 1e-15);
        assert!((e / (r * theta) - 0.58198).abs() < 1e-5);
        let hot = 100.0 * theta;
        let e = sp.vib_energy(0, hot).unwrap();
        assert!((e / (r * hot) - 1.0).abs() < 5e-3);
        assert!(sp.vib_energy(0, 1e-3 * theta).unwrap() < 1e-300 * r);
        assert!(sp.vib_energy(0, 0.0).is_err());
        assert!(sp.vib_temperature(0, 0.0).is_err());
        assert!((sp.vib_temperature(0, r * theta / (1f64.exp() - 1.0)).unwrap() - theta).abs() < 1e-9);
        assert!(sp.vib_temperature(0, 1e-200).unwrap() < 10.0);
    }

    #[test]
    fn entropy_scaling_laws() {
        let sp = air5();
        let y = air5_composition();
        let y = y.as_slice();
        let mix = sp.mixture(y);
        let ev = [1e5, 5e4, 2e4];
        let s0 = sp.specific_entropy(y, 0.7, 2e5, &ev);
        let s_tau = sp.specific_entropy(y, 1.4, 2e5, &ev);
        let s_e = sp.specific_entropy(y, 0.7, 4e5, &ev);
        assert!((s_tau - s0 - mix.r * 2f64.ln()).abs() < 1e-9 * s0.abs());
        assert!((s_e - s0 - mix.cv_t * 2f64.ln()).abs() < 1e-9 * s0.abs());
    }

    #[test]
    fn vanishing_species_drop_out() {
        let db = bundled_database();
        let sp = SpeciesSet::select(&db, &["N2", "He"]).unwrap();
        let he = SpeciesSet::select(&db, &["He"]).unwrap();
        let u = sp.conserved(&[0.0, 1.0], 0.5, &[1.0], 3.0, &[0.0]);
        let prim = sp.primitive(&u).unwrap();
        assert_eq!(prim.tv[0], 0.0);
        let s_mix = sp.specific_entropy_of(&prim);
        let s_pure = he.specific_entropy(&[1.0], 2.0, 3.0, &[]);
        assert!((s_mix - s_pure).abs() < 1e-12 * s_pure.abs());
    }

    #[test]
    fn negative_translational_energy_is_reported() {
        let sp = air5();
        let mut u = sp.conserved(air5_composition().as_slice(), 1.0, &[0.0], 1e5, &[1e4, 1e4, 1e4]);
        let e = u.layout().energy();
        u.as_mut_slice()[e] = -1.0;
        match sp.primitive(&u) {
            Err(ThermoError::Inadmissible { quantity: "e_t", value, .. }) => assert!(value < 0.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ordering_contract() {
        let db = bundled_database();
        let he = db.iter().find(|s| s.name == "He").unwrap().clone();
        let n2 = db.iter().find(|s| s.name == "N2").unwrap().clone();
        assert_eq!(SpeciesSet::new(vec![he.clone(), n2.clone()]), Err(ThermoError::Ordering));
        let sp = SpeciesSet::select(&db, &["He", "N2"]).unwrap();
        assert_eq!(sp.species()[0].name, "N2");
        assert_eq!(sp.n_diatomic(), 1);
    }
}

use std::ops::Range;

use smallvec::SmallVec;

/// Inline storage for per-species and per-variable vectors.
pub type Vars = SmallVec<[f64; 16]>;

/// Index layout of a flat state vector `(rho_1..rho_ns, m_1..m_d, rhoE, rhoev_1..rhoev_nd)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Layout {
    pub n_species: usize,
    pub n_diatomic: usize,
    pub dim: usize,
}

impl Layout {
    pub fn new(n_species: usize, n_diatomic: usize, dim: usize) -> Self {
        assert!(n_diatomic <= n_species, "more diatomic species than species");
        assert!((1..=3).contains(&dim), "dimension must be 1, 2 or 3");
        Self {
            n_species,
            n_diatomic,
            dim,
        }
    }

    /// Number of conserved variables.
    pub fn n_vars(&self) -> usize {
        self.n_species + self.dim + 1 + self.n_diatomic
    }

    pub fn species(&self) -> Range<usize> {
        0..self.n_species
    }

    pub fn momentum(&self) -> Range<usize> {
        self.n_species..self.n_species + self.dim
    }

    pub fn energy(&self) -> usize {
        self.n_species + self.dim
    }

    pub fn vibration(&self) -> Range<usize> {
        let start = self.energy() + 1;
        start..start + self.n_diatomic
    }
}

/// Conserved variables `u = (rho_alpha, rho v, rho E, rho e_v)` of the equilibrium model.
#[derive(Clone, Debug, PartialEq)]
pub struct ConservedState {
    layout: Layout,
    data: Vars,
}

impl ConservedState {
    pub fn from_parts(rho_alpha: &[f64], mom: &[f64], rho_e: f64, rho_ev: &[f64]) -> Self {
        let layout = Layout::new(rho_alpha.len(), rho_ev.len(), mom.len());
        let mut data = Vars::with_capacity(layout.n_vars());
        data.extend_from_slice(rho_alpha);
        data.extend_from_slice(mom);
        data.push(rho_e);
        data.extend_from_slice(rho_ev);
        Self { layout, data }
    }

    pub fn from_vars(layout: Layout, vars: &[f64]) -> Self {
        assert_eq!(vars.len(), layout.n_vars(), "state vector length mismatch");
        Self {
            layout,
            data: Vars::from_slice(vars),
        }
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn rho_alpha(&self) -> &[f64] {
        &self.data[self.layout.species()]
    }

    pub fn mom(&self) -> &[f64] {
        &self.data[self.layout.momentum()]
    }

    pub fn rho_e(&self) -> f64 {
        self.data[self.layout.energy()]
    }

    pub fn rho_ev(&self) -> &[f64] {
        &self.data[self.layout.vibration()]
    }

    /// Mixture density.
    pub fn rho(&self) -> f64 {
        self.rho_alpha().iter().sum()
    }

    /// `self += factor * delta`.
    pub fn add_scaled(&mut self, factor: f64, delta: &[f64]) {
        debug_assert_eq!(delta.len(), self.data.len());
        for (u, d) in self.data.iter_mut().zip(delta) {
            *u += factor * d;
        }
    }

    /// Mirror state with reflected normal velocity, used at walls.
    pub fn mirrored(&self, n: &[f64]) -> Self {
        let mut out = self.clone();
        let m = self.mom();
        let mn: f64 = m.iter().zip(n).map(|(a, b)| a * b).sum();
        let range = self.layout.momentum();
        for (k, i) in range.enumerate() {
            out.data[i] = m[k] - 2.0 * mn * n[k];
        }
        out
    }
}

/// Primitive description of a conserved state.
#[derive(Clone, Debug, PartialEq)]
pub struct PrimitiveState {
    /// Mass fractions.
    pub y: Vars,
    pub rho: f64,
    pub v: Vars,
    /// Translation-rotation internal energy per unit mass of mixture.
    pub e_t: f64,
    /// Vibration energy per unit mass of each diatomic species (0 for a vanishing species).
    pub e_v: Vars,
    pub p: f64,
    pub t: f64,
    /// Vibration temperatures (0 for a vanishing species).
    pub tv: Vars,
    pub gamma: f64,
}

impl PrimitiveState {
    pub fn normal_velocity(&self, n: &[f64]) -> f64 {
        dot(&self.v, n)
    }

    pub fn kinetic_energy(&self) -> f64 {
        0.5 * dot(&self.v, &self.v)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

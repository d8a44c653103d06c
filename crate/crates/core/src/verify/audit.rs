//! Cell audits shared by the 1D and 2D solvers: mass-fraction maximum
//! principle, specific-entropy minimum principle and the cell entropy inequality.

use std::fmt;

use crate::thermo::{ConservedState, PrimitiveState, SpeciesSet, ThermoError, Vars};

/// Absolute tolerance on mass-fraction bounds.
pub const MASS_FRACTION_TOL: f64 = 1e-12;
/// Relative tolerance on entropy inequalities.
pub const ENTROPY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AuditKind {
    MassFraction { species: usize },
    EntropyMinimum,
    EntropyInequality,
    GlobalEntropy,
}

impl fmt::Display for AuditKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AuditKind::MassFraction { species } => write!(f, "mass-fraction bound (species {species})"),
            AuditKind::EntropyMinimum => f.write_str("specific-entropy minimum principle"),
            AuditKind::EntropyInequality => f.write_str("cell entropy inequality"),
            AuditKind::GlobalEntropy => f.write_str("global entropy decay"),
        }
    }
}

/// A failed audit; `excess` is by how much the bound was exceeded, `tol` the allowance.
#[derive(Clone, Debug, PartialEq)]
pub struct AuditViolation {
    pub cell: Option<usize>,
    pub kind: AuditKind,
    pub excess: f64,
    pub tol: f64,
}

impl fmt::Display for AuditViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.cell {
            Some(c) => write!(f, "cell {c}: {} violated by {:e} (tol {:e})", self.kind, self.excess, self.tol),
            None => write!(f, "{} violated by {:e} (tol {:e})", self.kind, self.excess, self.tol),
        }
    }
}

/// Quantities of one cell needed by the audits.
#[derive(Clone, Debug, PartialEq)]
pub struct CellEntropy {
    pub y: Vars,
    /// Specific entropy `s`.
    pub s: f64,
    /// Entropy density `eta = -rho s`.
    pub eta: f64,
    /// Natural scale of `s`, used when `s` itself is near zero.
    pub s_scale: f64,
}

impl CellEntropy {
    pub fn new(species: &SpeciesSet, u: &ConservedState) -> Result<Self, ThermoError> {
        Ok(Self::from_primitive(species, &species.primitive(u)?))
    }

    pub fn from_primitive(species: &SpeciesSet, prim: &PrimitiveState) -> Self {
        let s = species.specific_entropy_of(prim);
        let mix = species.mixture(&prim.y);
        Self {
            y: prim.y.clone(),
            s,
            eta: -prim.rho * s,
            s_scale: s.abs().max(mix.cv_t),
        }
    }
}

/// Checks the maximum principle on mass fractions and the minimum principle on
/// `s` for a cell whose update depended on the cells in `stencil`.
pub fn check_principles<'a>(
    cell: usize,
    new: &CellEntropy,
    stencil: impl IntoIterator<Item = &'a CellEntropy>,
    out: &mut Vec<AuditViolation>,
) {
    let ns = new.y.len();
    let mut lo = Vars::from_elem(f64::INFINITY, ns);
    let mut hi = Vars::from_elem(f64::NEG_INFINITY, ns);
    let mut s_min = f64::INFINITY;
    let mut scale: f64 = new.s_scale;
    for c in stencil {
        for k in 0..ns {
            lo[k] = lo[k].min(c.y[k]);
            hi[k] = hi[k].max(c.y[k]);
        }
        s_min = s_min.min(c.s);
        scale = scale.max(c.s_scale);
    }
    for k in 0..ns {
        let excess = (lo[k] - new.y[k]).max(new.y[k] - hi[k]);
        if excess > MASS_FRACTION_TOL {
            out.push(AuditViolation {
                cell: Some(cell),
                kind: AuditKind::MassFraction { species: k },
                excess,
                tol: MASS_FRACTION_TOL,
            });
        }
    }
    let tol = ENTROPY_TOL * scale;
    if s_min - new.s > tol {
        out.push(AuditViolation {
            cell: Some(cell),
            kind: AuditKind::EntropyMinimum,
            excess: s_min - new.s,
            tol,
        });
    }
}

/// Cell entropy inequality `eta' - eta + net_flux <= 0`, where `net_flux` is
/// `dt/|cell|` times the outgoing entropy flux and `flux_scale` its absolute counterpart.
pub fn check_entropy_inequality(cell: usize, eta_old: f64, eta_new: f64, net_flux: f64, flux_scale: f64, out: &mut Vec<AuditViolation>) {
    let lhs = eta_new - eta_old + net_flux;
    let tol = ENTROPY_TOL * (eta_old.abs() + eta_new.abs() + flux_scale);
    if lhs > tol {
        out.push(AuditViolation {
            cell: Some(cell),
            kind: AuditKind::EntropyInequality,
            excess: lhs,
            tol,
        });
    }
}

/// Global decay `sum eta' <= sum eta` of the volume-weighted entropy on a closed domain.
pub fn check_global_entropy(total_old: f64, total_new: f64, abs_scale: f64, out: &mut Vec<AuditViolation>) {
    let tol = ENTROPY_TOL * abs_scale;
    if total_new - total_old > tol {
        out.push(AuditViolation {
            cell: None,
            kind: AuditKind::GlobalEntropy,
            excess: total_new - total_old,
            tol,
        });
    }
}

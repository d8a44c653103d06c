//! Numerical checks of the entropy structure: convexity of the physical and
//! relaxation entropies, the variational principle, the H-theorem, flux and
//! single-cell fuzzing, and the cell audits used by the solvers.

pub mod audit;
pub mod convexity;
pub mod fuzz;
pub mod relaxation;
pub mod sampling;
pub mod suite;

//! Finite-volume fluxes and solvers for multicomponent Euler flows in thermal
//! nonequilibrium, built by energy relaxation on top of polytropic-gas Riemann solvers.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod thermo;
pub mod relax;
pub mod riemann;
pub mod flux;
pub mod exec;
pub mod verify;
pub mod solver1d;
pub mod mesh;
pub mod solver2d;

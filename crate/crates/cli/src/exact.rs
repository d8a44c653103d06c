//! Reference solutions of the 1D cases and error norms against them.

use anyhow::{ensure, Result};

use mcrelax::riemann::{exact_star, sample_fan, PolytropicSide, DEFAULT_TOL};
use mcrelax::solver1d::Grid1D;
use mcrelax::thermo::{ConservedState, SpeciesSet};

use crate::setup::Problem1D;

/// Sub-samples per cell used for cell averages of the self-similar solution.
const SUBSAMPLES: usize = 16;

/// Primitive profile `(rho, u, p)` on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Profile {
    pub rho: Vec<f64>,
    pub u: Vec<f64>,
    pub p: Vec<f64>,
}

impl Profile {
    pub fn of(species: &SpeciesSet, states: &[ConservedState]) -> Result<Self> {
        let mut out = Profile { rho: Vec::new(), u: Vec::new(), p: Vec::new() };
        for s in states {
            let prim = species.primitive(s)?;
            out.rho.push(prim.rho);
            out.u.push(prim.v[0]);
            out.p.push(prim.p);
        }
        Ok(out)
    }
}

/// Exact cell averages of a contact moving at the common velocity of two states
/// with equal velocity and pressure.
pub fn advected_contact(problem: &Problem1D, grid: &Grid1D, t: f64) -> Result<Profile> {
    let sp = &problem.species;
    let (l, r) = (sp.primitive(&problem.left)?, sp.primitive(&problem.right)?);
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
    ensure!(close(l.v[0], r.v[0]) && close(l.p, r.p), "states are not a pure contact");
    let x = problem.x0 + l.v[0] * t;
    let rho = (0..grid.n)
        .map(|j| {
            let a = grid.origin + j as f64 * grid.dx;
            let frac_left = ((x - a) / grid.dx).clamp(0.0, 1.0);
            frac_left * l.rho + (1.0 - frac_left) * r.rho
        })
        .collect();
    Ok(Profile { rho, u: vec![l.v[0]; grid.n], p: vec![l.p; grid.n] })
}

/// Cell averages of the exact polytropic Riemann solution at exponent `gamma`
/// (by default the common `gamma(Y)` of the two states).
pub fn polytropic_riemann(problem: &Problem1D, grid: &Grid1D, t: f64, gamma: Option<f64>) -> Result<Profile> {
    let sp = &problem.species;
    let (l, r) = (sp.primitive(&problem.left)?, sp.primitive(&problem.right)?);
    let gamma = match gamma {
        Some(g) => g,
        None => {
            ensure!((l.gamma - r.gamma).abs() <= 1e-12 * l.gamma, "gamma(Y) differs across the interface");
            l.gamma
        }
    };
    let ls = PolytropicSide::new(l.rho, l.v[0], l.p);
    let rs = PolytropicSide::new(r.rho, r.v[0], r.p);
    let (p_star, u_star) = exact_star(&ls, &rs, gamma, DEFAULT_TOL)?;
    let mut out = Profile { rho: Vec::new(), u: Vec::new(), p: Vec::new() };
    for j in 0..grid.n {
        let a = grid.origin + j as f64 * grid.dx;
        let (mut rho, mut u, mut p) = (0.0, 0.0, 0.0);
        for k in 0..SUBSAMPLES {
            let x = a + (k as f64 + 0.5) / SUBSAMPLES as f64 * grid.dx;
            let (rk, uk, pk) = if t > 0.0 {
                sample_fan(&ls, &rs, gamma, p_star, u_star, (x - problem.x0) / t)
            } else if x < problem.x0 {
                (ls.rho, ls.u, ls.p)
            } else {
                (rs.rho, rs.u, rs.p)
            };
            rho += rk;
            u += uk;
            p += pk;
        }
        let w = SUBSAMPLES as f64;
        out.rho.push(rho / w);
        out.u.push(u / w);
        out.p.push(p / w);
    }
    Ok(out)
}

/// `sum dx |a - b|`.
pub fn l1_distance(grid: &Grid1D, a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| grid.dx * (x - y).abs()).sum()
}

/// `sum dx |a|`.
pub fn l1_norm(grid: &Grid1D, a: &[f64]) -> f64 {
    a.iter().map(|x| grid.dx * x.abs()).sum()
}

/// `max |a - value|`.
pub fn linf_deviation(a: &[f64], value: f64) -> f64 {
    a.iter().map(|x| (x - value).abs()).fold(0.0, f64::max)
}

/// Observed order between two grids: `log(e_coarse / e_fine) / log(n_fine / n_coarse)`.
pub fn observed_order(n_coarse: usize, e_coarse: f64, n_fine: usize, e_fine: f64) -> f64 {
    (e_coarse / e_fine).ln() / (n_fine as f64 / n_coarse as f64).ln()
}

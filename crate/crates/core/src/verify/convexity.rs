//! Finite-difference checks of the physical and relaxation entropies.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::relax::{relax_primitive, ReducedPoint, ReducedZeta, RelaxError, RelaxState};
use crate::thermo::{ConservedState, SpeciesSet, ThermoError, Vars};

/// Default relative finite-difference step.
pub const FD_STEP: f64 = 1e-5;
/// Entrywise tolerance of the congruence check, relative to `sqrt(D_ii D_jj)`.
pub const CONGRUENCE_TOL: f64 = 1e-4;
/// Required smallest eigenvalue of the Jacobi-scaled Hessian, relative to its norm.
pub const PD_MARGIN: f64 = 1e-8;
/// Largest relative step tried when round-off forces the step up.
const MAX_STEP: f64 = 0.1;
/// Threshold on `x_i^2 H_ii / C_vt` below which a curvature counts as zero.
const VANISHING_CURVATURE: f64 = 64.0 * f64::EPSILON;
/// Disagreement between the `h` and `h/2` estimates above which Richardson extrapolation is used.
const RICHARDSON_TRIGGER: f64 = 1e-6;

/// Relative steps `10^j fd_step` for `j < 6`, up to [`MAX_STEP`].
fn steps(fd_step: f64) -> impl Iterator<Item = f64> {
    (0..6).map(move |j| fd_step * 10f64.powi(j)).take_while(|h| *h <= MAX_STEP * (1.0 + 1e-9))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CongruenceReport {
    /// Largest `|M_ij - D_ij| / sqrt(D_ii D_jj)`.
    pub max_deviation: f64,
    pub min_diagonal: f64,
}

impl CongruenceReport {
    pub fn passed(&self) -> bool {
        self.min_diagonal > 0.0 && self.max_deviation <= CONGRUENCE_TOL
    }
}

/// Variables `Z = (rho_alpha, v, T, e_v)` in which the Hessian of `eta` is congruent to a diagonal.
struct ZVars<'a> {
    species: &'a SpeciesSet,
    dim: usize,
}

impl ZVars<'_> {
    fn entropy_variables(&self, z: &[f64]) -> Result<Vars, ThermoError> {
        let ns = self.species.n_species();
        let d = self.dim;
        let rho_alpha = &z[..ns];
        let rho: f64 = rho_alpha.iter().sum();
        let y: Vars = rho_alpha.iter().map(|r| r / rho).collect();
        let e_t = self.species.mixture(&y).cv_t * z[ns + d];
        let prim = self.species.primitive_from(&y, rho, &z[ns..ns + d], e_t, &z[ns + d + 1..]);
        self.species.entropy_variables_of(&prim)
    }
}

/// Checks that `(du/dZ)^T H_eta (du/dZ)` equals
/// `diag(r_alpha / rho_alpha, rho/T I, rho C_vt / T^2, -rho_beta s_beta'')`.
///
/// `H_eta du/dZ` is obtained column by column from central differences of the
/// analytic entropy variables along `Z`, with steps relative to the scale of
/// each variable. The perturbed states are built directly in primitive form, so
/// no digits are lost to `rho E`. Per column, Richardson estimates are formed
/// at `10^j fd_step`, `j < 6` and at most a tenth, and the one closest to its
/// successor is kept. All partial densities and vibration energies must be positive.
pub fn check_eta_congruence(species: &SpeciesSet, u: &ConservedState, fd_step: f64) -> Result<CongruenceReport, ThermoError> {
    let prim = species.primitive(u)?;
    let layout = u.layout();
    let (ns, nd, d) = (layout.n_species, layout.n_diatomic, layout.dim);
    let n = layout.n_vars();
    let rho = prim.rho;
    let rho_alpha = u.rho_alpha();
    let mix = species.mixture(&prim.y);
    let t = prim.t;
    let c = (prim.gamma * (prim.gamma - 1.0) * prim.e_t).sqrt();
    let speed = prim.v.iter().map(|v| v.abs()).fold(0.0, f64::max) + c;

    let mut z: Vec<f64> = rho_alpha.to_vec();
    z.extend_from_slice(&prim.v);
    z.push(t);
    z.extend_from_slice(&prim.e_v);
    let mut scale: Vec<f64> = rho_alpha.to_vec();
    scale.extend(std::iter::repeat_n(speed, d));
    scale.push(t);
    scale.extend_from_slice(&prim.e_v);

    // du/dZ
    let e_c = prim.kinetic_energy();
    let ie = layout.energy();
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for a in 0..ns {
        jac[(a, a)] = 1.0;
        for (k, i) in layout.momentum().enumerate() {
            jac[(i, a)] = prim.v[k];
        }
        let e_v = if a < nd { prim.e_v[a] } else { 0.0 };
        jac[(ie, a)] = species.cv()[a] * t + species.h0()[a] + e_v + e_c;
        if a < nd {
            jac[(layout.vibration().start + a, a)] = e_v;
        }
    }
    for (k, i) in layout.momentum().enumerate() {
        jac[(i, ns + k)] = rho;
        jac[(ie, ns + k)] = rho * prim.v[k];
    }
    jac[(ie, ns + d)] = rho * mix.cv_t;
    for b in 0..nd {
        jac[(ie, ns + d + 1 + b)] = rho_alpha[b];
        jac[(layout.vibration().start + b, ns + d + 1 + b)] = rho_alpha[b];
    }

    let mut target = vec![0.0; n];
    for a in 0..ns {
        target[a] = species.r()[a] / rho_alpha[a];
    }
    for k in 0..d {
        target[ns + k] = rho / t;
    }
    target[ns + d] = rho * mix.cv_t / (t * t);
    for b in 0..nd {
        target[ns + d + 1 + b] = -rho_alpha[b] * species.vib_entropy_second_derivative(b, prim.e_v[b]);
    }

    let zv = ZVars { species, dim: d };
    let jt = jac.transpose();
    // column k of (du/dZ)^T H_eta du/dZ, from central differences with relative step h
    let column = |k: usize, h_rel: f64| -> Result<DMatrix<f64>, ThermoError> {
        let h = h_rel * scale[k];
        let mut zp = z.clone();
        let mut zm = z.clone();
        zp[k] += h;
        zm[k] -= h;
        let ep = zv.entropy_variables(&zp)?;
        let em = zv.entropy_variables(&zm)?;
        let g = DMatrix::from_iterator(n, 1, (0..n).map(|i| (ep[i] - em[i]) / (2.0 * h)));
        Ok(&jt * g)
    };
    let deviation = |k: usize, m: &DMatrix<f64>, reference: &dyn Fn(usize) -> f64| {
        (0..n).fold(0.0_f64, |worst, i| worst.max((m[i] - reference(i)).abs() / (target[i] * target[k]).abs().sqrt()))
    };
    let mut max_deviation: f64 = 0.0;
    for k in 0..n {
        let estimates = steps(fd_step)
            .map(|h| {
                Ok((column(k, 0.5 * h)? * 4.0 - column(k, h)?) / 3.0)
            })
            .collect::<Result<Vec<_>, ThermoError>>()?;
        let m = estimates
            .windows(2)
            .map(|w| (deviation(k, &w[0], &|i| w[1][i]), &w[0]))
            .fold((f64::INFINITY, &estimates[0]), |best, c| if c.0 < best.0 { c } else { best })
            .1;
        max_deviation = max_deviation.max(deviation(k, m, &|i| if i == k { target[k] } else { 0.0 }));
    }
    Ok(CongruenceReport {
        max_deviation,
        min_diagonal: target.iter().copied().fold(f64::INFINITY, f64::min),
    })
}

/// Largest relative error of the analytic entropy variables against central
/// differences of `eta`. Components are compared relative to
/// `max(|eta'_i|, rho max(|s|, C_vt) / x_i)`, the second term covering
/// components that vanish (momentum at rest).
///
/// Base steps are `fd_step` relative to each variable, limited so that `e_t`
/// moves by at most `fd_step` relatively. Richardson estimates are formed at
/// `10^k` times the base step, `k < 6` and at most a tenth of it, and the one closest to its successor is
/// kept: with large formation enthalpies the extraction of `e_t` loses digits
/// and small steps are round-off bound.
pub fn entropy_variables_fd_error(species: &SpeciesSet, u: &ConservedState, fd_step: f64) -> Result<f64, ThermoError> {
    let prim = species.primitive(u)?;
    let layout = u.layout();
    let ana = species.entropy_variables(u)?;
    let rho = prim.rho;
    let rho_et = rho * prim.e_t;
    let s = species.specific_entropy_of(&prim);
    let eta_scale = rho * s.abs().max(species.mixture(&prim.y).cv_t);
    let speed: f64 = prim.v.iter().map(|v| v.abs()).sum::<f64>() + (prim.gamma * (prim.gamma - 1.0) * prim.e_t).sqrt();
    let derivative = |i: usize, h: f64| -> Result<f64, ThermoError> {
        let mut up = u.clone();
        let mut um = u.clone();
        up.as_mut_slice()[i] += h;
        um.as_mut_slice()[i] -= h;
        let width = up.as_slice()[i] - um.as_slice()[i];
        let ep = species.entropy_of(&species.primitive(&up)?);
        let em = species.entropy_of(&species.primitive(&um)?);
        Ok((ep - em) / width)
    };
    let mut worst: f64 = 0.0;
    for i in 0..layout.n_vars() {
        // own scale of x_i and the sensitivity d(rho e_t)/dx_i
        let (own, sensitivity) = if layout.species().contains(&i) {
            (u.as_slice()[i], species.h0()[i].abs() + prim.kinetic_energy())
        } else if layout.momentum().contains(&i) {
            (rho * speed, speed)
        } else if i == layout.energy() {
            (rho_et, 1.0)
        } else {
            (u.as_slice()[i], 1.0)
        };
        let own = own.abs();
        let reference = ana[i].abs().max(eta_scale / own);
        let base = own.min(rho_et / sensitivity.max(f64::MIN_POSITIVE));
        let richardson = steps(fd_step)
            .map(|h_rel| {
                let h = base * h_rel;
                Ok((4.0 * derivative(i, 0.5 * h)? - derivative(i, h)?) / 3.0)
            })
            .collect::<Result<Vec<f64>, ThermoError>>()?;
        let (_, estimate) = richardson
            .windows(2)
            .map(|w| ((w[0] - w[1]).abs(), w[0]))
            .fold((f64::INFINITY, f64::NAN), |best, c| if c.0 < best.0 { c } else { best });
        worst = worst.max((estimate - ana[i]).abs() / reference);
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvexityReport {
    /// Smallest eigenvalue of the Jacobi-scaled Hessian; at most zero if a
    /// diagonal curvature vanishes.
    pub min_eigenvalue: f64,
    /// Spectral norm of the same matrix.
    pub norm: f64,
    pub richardson: bool,
}

impl ConvexityReport {
    pub fn positive_definite(&self) -> bool {
        self.min_eigenvalue > PD_MARGIN * self.norm
    }
}

/// Finite-difference Hessian of `zeta` in the reduced variables `(Y, tau, e_r, e_s, Y_beta e_beta)`
/// at `w`, and its smallest eigenvalue. `gamma` is not range-checked so that the
/// degenerate limit can be probed. All mass fractions must be positive.
pub fn check_zeta_convexity(species: &SpeciesSet, w: &RelaxState, gamma: f64, fd_step: f64) -> Result<ConvexityReport, RelaxError> {
    let p = relax_primitive(species, w)?;
    if let Some(&y) = p.y.iter().find(|y| !(**y > 0.0)) {
        return Err(RelaxError::Inadmissible { quantity: "Y (convexity check needs Y > 0)", value: y });
    }
    let zeta = ReducedZeta::with_raw_gamma(species, gamma);
    let x = zeta.to_reduced(&ReducedPoint {
        tau: p.tau(),
        e_r: p.e_r,
        e_s: p.e_s,
        e_v: p.e_v.clone(),
        y: p.y.clone(),
    });
    let n = x.len();
    let n_free = species.n_species() - 1;
    let y_dropped = p.y[zeta.dropped_species()];
    let fd_hessian = |h_rel: f64| {
        let mut h = DMatrix::zeros(n, n);
        for j in 0..n {
            let limit = if j < n_free { x[j].min(y_dropped) } else { x[j].abs() };
            let step = h_rel * limit;
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += step;
            xm[j] -= step;
            let (gp, gm) = (zeta.gradient(&xp), zeta.gradient(&xm));
            for i in 0..n {
                h[(i, j)] = (gp[i] - gm[i]) / (2.0 * step);
            }
        }
        0.5 * (&h + h.transpose())
    };
    let h1 = fd_hessian(fd_step);
    let h2 = fd_hessian(0.5 * fd_step);
    let mut spread: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let s = (h2[(i, i)] * h2[(j, j)]).abs().sqrt();
            if s > 0.0 {
                spread = spread.max((h1[(i, j)] - h2[(i, j)]).abs() / s);
            }
        }
    }
    let richardson = spread > RICHARDSON_TRIGGER;
    let mut h = if richardson { (&h2 * 4.0 - h1) / 3.0 } else { h2 };
    // A curvature that vanishes identically (gamma = gamma(Y)) only survives as
    // round-off; it is recognised on the dimensionless diagonal x_i^2 H_ii / C_vt.
    let cv = species.mixture(&p.y).cv_t;
    let vanishing = (0..n).any(|i| h[(i, i)] * x[i] * x[i] <= VANISHING_CURVATURE * cv);
    if !vanishing {
        let d: Vec<f64> = (0..n).map(|i| h[(i, i)].sqrt()).collect();
        for i in 0..n {
            for j in 0..n {
                h[(i, j)] /= d[i] * d[j];
            }
        }
    }
    let eig = SymmetricEigen::new(h).eigenvalues;
    Ok(ConvexityReport {
        min_eigenvalue: if vanishing { eig.min().min(0.0) } else { eig.min() },
        norm: eig.iter().fold(0.0, |m: f64, e| m.max(e.abs())),
        richardson,
    })
}

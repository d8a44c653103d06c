use nalgebra::DMatrix;

use super::RelaxGamma;
use crate::thermo::{SpeciesSet, Vars};

/// `zeta` in the reduced variables `x = (Y_k for k != d, tau, e_r, e_s, ebar_beta)`, where
/// `d` is the species with the smallest gas constant (its fraction is `1 - sum Y_k`) and
/// `ebar_beta = Y_beta e_beta` are the vibration energies per unit mass of mixture.
///
/// All mass fractions must be positive.
#[derive(Clone, Debug)]
pub struct ReducedZeta<'a> {
    species: &'a SpeciesSet,
    gamma: f64,
    dropped: usize,
    free: Vec<usize>,
}

/// Full-variable view of a reduced point.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedPoint {
    pub y: Vars,
    pub tau: f64,
    pub e_r: f64,
    pub e_s: f64,
    pub e_v: Vars,
}

impl<'a> ReducedZeta<'a> {
    pub fn new(species: &'a SpeciesSet, gamma: RelaxGamma) -> Self {
        let r = species.r();
        let dropped = (0..r.len()).fold(0, |best, i| if r[i] <= r[best] { i } else { best });
        let free = (0..r.len()).filter(|&i| i != dropped).collect();
        Self {
            species,
            gamma: gamma.value(),
            dropped,
            free,
        }
    }

    /// Same object with an unchecked exponent, for probing the degenerate limit `gamma -> 5/3`.
    pub fn with_raw_gamma(species: &'a SpeciesSet, gamma: f64) -> Self {
        let mut z = Self::new(species, RelaxGamma::default());
        z.gamma = gamma;
        z
    }

    pub fn dropped_species(&self) -> usize {
        self.dropped
    }

    pub fn dim(&self) -> usize {
        self.free.len() + 3 + self.species.n_diatomic()
    }

    fn n_free(&self) -> usize {
        self.free.len()
    }

    pub fn to_reduced(&self, p: &ReducedPoint) -> Vec<f64> {
        let mut x: Vec<f64> = self.free.iter().map(|&i| p.y[i]).collect();
        x.extend([p.tau, p.e_r, p.e_s]);
        x.extend(p.e_v.iter().enumerate().map(|(b, e)| p.y[b] * e));
        x
    }

    pub fn from_reduced(&self, x: &[f64]) -> ReducedPoint {
        let nf = self.n_free();
        let mut y = Vars::from_elem(0.0, self.species.n_species());
        let mut rest = 1.0;
        for (k, &i) in self.free.iter().enumerate() {
            y[i] = x[k];
            rest -= x[k];
        }
        y[self.dropped] = rest;
        let e_v = x[nf + 3..].iter().enumerate().map(|(b, eb)| eb / y[b]).collect();
        ReducedPoint {
            tau: x[nf],
            e_r: x[nf + 1],
            e_s: x[nf + 2],
            y,
            e_v,
        }
    }

    /// Expanded closed form of `zeta` (sum of separately convex-looking pieces).
    pub fn value(&self, x: &[f64]) -> f64 {
        let p = self.from_reduced(x);
        let sp = self.species;
        let mix = sp.mixture(&p.y);
        let (g, gy, c, r) = (self.gamma, mix.gamma, mix.cv_t, mix.r);
        let mut mixing = 0.0;
        let mut l = -c * (g - 1.0).ln();
        for (i, &yi) in p.y.iter().enumerate() {
            mixing += sp.r()[i] * yi * yi.ln();
            l -= yi * sp.cv()[i] * sp.cv()[i].ln();
        }
        let s_v: f64 = p.e_v.iter().enumerate().map(|(b, &e)| p.y[b] * sp.vib_entropy(b, e)).sum();
        c * ((g - gy) * c).ln() + mixing + r / (g - 1.0) * ((gy - 1.0) / (g - gy)).ln() - r * p.tau.ln() - r / (g - 1.0) * p.e_r.ln()
            - (g - gy) * c / (g - 1.0) * p.e_s.ln()
            + l
            - s_v
    }

    fn dy(&self, k: usize) -> (f64, f64) {
        let sp = self.species;
        let (i, d) = (self.free[k], self.dropped);
        (sp.r()[i] - sp.r()[d], sp.cv()[i] - sp.cv()[d])
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let p = self.from_reduced(x);
        let sp = self.species;
        let mix = sp.mixture(&p.y);
        let (g, gy, c, r) = (self.gamma, mix.gamma, mix.cv_t, mix.r);
        let d = self.dropped;
        let nf = self.n_free();
        let ln_ratio = ((gy - 1.0) / (g - gy)).ln();
        // s - e s' for a diatomic species, the derivative of Y s(ebar/Y) in Y
        let vib_y = |b: usize| {
            let e = p.e_v[b];
            sp.vib_entropy(b, e) - e * (sp.r()[b] * sp.theta_v()[b] / e).ln_1p() / sp.theta_v()[b]
        };
        let mut out = vec![0.0; self.dim()];
        for k in 0..nf {
            let i = self.free[k];
            let (dr, dc) = self.dy(k);
            let dg = (dr * c - r * dc) / (c * c);
            let mut v = dc * ((g - gy) * c).ln() + c * (-dg / (g - gy) + dc / c);
            v += sp.r()[i] * (p.y[i].ln() + 1.0) - sp.r()[d] * (p.y[d].ln() + 1.0);
            v += dr / (g - 1.0) * ln_ratio + r / (g - 1.0) * (dg / (gy - 1.0) + dg / (g - gy));
            v -= dr * p.tau.ln();
            v -= dr / (g - 1.0) * p.e_r.ln();
            v -= (-dg * c + (g - gy) * dc) / (g - 1.0) * p.e_s.ln();
            v -= sp.cv()[i] * sp.cv()[i].ln() - sp.cv()[d] * sp.cv()[d].ln() + dc * (g - 1.0).ln();
            if i < sp.n_diatomic() {
                v -= vib_y(i);
            }
            if d < sp.n_diatomic() {
                v += vib_y(d);
            }
            out[k] = v;
        }
        out[nf] = -r / p.tau;
        out[nf + 1] = -r / ((g - 1.0) * p.e_r);
        out[nf + 2] = -(g - gy) * c / ((g - 1.0) * p.e_s);
        for b in 0..sp.n_diatomic() {
            // d/debar of -Y s(ebar/Y) is -1/Tv
            out[nf + 3 + b] = -(sp.r()[b] * sp.theta_v()[b] / p.e_v[b]).ln_1p() / sp.theta_v()[b];
        }
        out
    }

    /// Analytic Hessian.
    pub fn hessian(&self, x: &[f64]) -> DMatrix<f64> {
        let p = self.from_reduced(x);
        let sp = self.species;
        let mix = sp.mixture(&p.y);
        let (g, gy, c, r) = (self.gamma, mix.gamma, mix.cv_t, mix.r);
        let d = self.dropped;
        let nf = self.n_free();
        let nd = sp.n_diatomic();
        let n = self.dim();
        let s2 = |b: usize| sp.vib_entropy_second_derivative(b, p.e_v[b]);
        let mut h = DMatrix::zeros(n, n);
        let grads: Vec<(f64, f64, f64)> = (0..nf)
            .map(|k| {
                let (dr, dc) = self.dy(k);
                (dr, dc, (dr * c - r * dc) / (c * c))
            })
            .collect();
        for k in 0..nf {
            let i = self.free[k];
            let (drk, dck, dgk) = grads[k];
            for l in 0..nf {
                let (_, dcl, dgl) = grads[l];
                let mut v = sp.r()[d] / p.y[d] + dck * dcl / c + c * dgk * dgl / ((g - gy) * (gy - 1.0));
                if k == l {
                    v += sp.r()[i] / p.y[i];
                    if i < nd {
                        v -= p.e_v[i] * p.e_v[i] * s2(i) / p.y[i];
                    }
                }
                if d < nd {
                    v -= p.e_v[d] * p.e_v[d] * s2(d) / p.y[d];
                }
                h[(k, l)] = v;
            }
            let cross = [
                -drk / p.tau,
                -drk / ((g - 1.0) * p.e_r),
                (drk - (g - 1.0) * dck) / ((g - 1.0) * p.e_s),
            ];
            for (j, v) in cross.into_iter().enumerate() {
                h[(k, nf + j)] = v;
                h[(nf + j, k)] = v;
            }
            for b in 0..nd {
                let mut v = 0.0;
                if b == i {
                    v += p.e_v[b] * s2(b) / p.y[b];
                }
                if b == d {
                    v -= p.e_v[b] * s2(b) / p.y[b];
                }
                h[(k, nf + 3 + b)] = v;
                h[(nf + 3 + b, k)] = v;
            }
        }
        h[(nf, nf)] = r / (p.tau * p.tau);
        h[(nf + 1, nf + 1)] = r / ((g - 1.0) * p.e_r * p.e_r);
        h[(nf + 2, nf + 2)] = (g - gy) / (g - 1.0) * c / (p.e_s * p.e_s);
        for b in 0..nd {
            h[(nf + 3 + b, nf + 3 + b)] = -s2(b) / p.y[b];
        }
        h
    }
}

//! Randomized batteries over the checks of this module, with CSV reports.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::Rng;

use super::convexity::{check_eta_congruence, check_zeta_convexity, entropy_variables_fd_error, CONGRUENCE_TOL, FD_STEP, PD_MARGIN};
use super::fuzz::{check_flux_pair, three_point_update};
use super::relaxation::{check_h_theorem, check_variational, TERMINAL_TOL, VARIATIONAL_TOL};
use super::sampling::{log_uniform, random_conserved, random_normal, random_relax, random_riemann_states, sample, trial_rng, StateRanges};
use crate::exec::Execution;
use crate::flux::{FluxScheme, SchemeKind};
use crate::relax::RelaxGamma;
use crate::thermo::{bundled_database, SpeciesSet};

/// Mixtures cycled through by the trials.
pub const SPECIES_SETS: [&[&str]; 6] = [
    &["N2", "O2", "NO", "N", "O"],
    &["N2", "O2", "N"],
    &["N2", "N"],
    &["N2"],
    &["He"],
    &["O2", "O", "Ar"],
];

/// Probability that a Riemann sample has a near-vacuum side.
pub const NEAR_VACUUM_FRACTION: f64 = 0.1;
/// CFL number of the single-cell fuzz.
pub const FUZZ_CFL: f64 = 0.5;
/// Tolerance on the entropy variables against differences of `eta`.
pub const ENTROPY_VARIABLES_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    EtaCongruence,
    EntropyVariables,
    ZetaConvexity,
    Variational,
    HTheorem,
    FluxConsistency,
    ThreePoint,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::EtaCongruence,
        Suite::EntropyVariables,
        Suite::ZetaConvexity,
        Suite::Variational,
        Suite::HTheorem,
        Suite::FluxConsistency,
        Suite::ThreePoint,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::EtaCongruence => "eta_congruence",
            Suite::EntropyVariables => "entropy_variables",
            Suite::ZetaConvexity => "zeta_convexity",
            Suite::Variational => "variational",
            Suite::HTheorem => "h_theorem",
            Suite::FluxConsistency => "flux_consistency",
            Suite::ThreePoint => "three_point",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite `{s}` (expected one of {})", Suite::ALL.map(Suite::name).join(", ")))
    }
}

/// Outcome of one trial. `margin` is positive when the check passes with room to spare,
/// in units of the check's own tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckRecord {
    pub suite: Suite,
    pub trial: u64,
    pub species: usize,
    pub dim: usize,
    pub margin: f64,
    pub passed: bool,
    pub detail: String,
}

/// Runs `trials` trials of `suite`. Trial `t` uses mixture `t mod 6`, dimension
/// `1 + t mod 2`, and its own random stream, so reports are reproducible and
/// independent of `exec`.
pub fn run_suite(suite: Suite, trials: u64, seed: u64, exec: Execution) -> Vec<CheckRecord> {
    let db = bundled_database();
    let sets: Vec<SpeciesSet> = SPECIES_SETS
        .iter()
        .map(|names| SpeciesSet::select(&db, names).expect("bundled species"))
        .collect();
    exec.map(trials as usize, |t| {
        let trial = t as u64;
        let species = t % sets.len();
        let dim = 1 + t % 2;
        let mut rng = trial_rng(seed ^ suite_salt(suite), trial);
        let (margin, passed, detail) = run_trial(suite, &sets[species], dim, &mut rng);
        CheckRecord {
            suite,
            trial,
            species,
            dim,
            margin,
            passed,
            detail,
        }
    })
}

fn suite_salt(suite: Suite) -> u64 {
    (Suite::ALL.iter().position(|s| *s == suite).unwrap_or(0) as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

fn run_trial<R: Rng>(suite: Suite, sp: &SpeciesSet, dim: usize, rng: &mut R) -> (f64, bool, String) {
    let gamma = RelaxGamma::default();
    match suite {
        Suite::EtaCongruence => {
            let u = random_conserved(sp, rng, dim);
            match check_eta_congruence(sp, &u, FD_STEP) {
                Ok(r) => (1.0 - r.max_deviation / CONGRUENCE_TOL, r.passed(), format!("max_deviation={:e}", r.max_deviation)),
                Err(e) => (f64::NEG_INFINITY, false, e.to_string()),
            }
        }
        Suite::EntropyVariables => {
            let u = random_conserved(sp, rng, dim);
            match entropy_variables_fd_error(sp, &u, 1e-6) {
                Ok(e) => (1.0 - e / ENTROPY_VARIABLES_TOL, e <= ENTROPY_VARIABLES_TOL, format!("error={e:e}")),
                Err(e) => (f64::NEG_INFINITY, false, e.to_string()),
            }
        }
        Suite::ZetaConvexity => {
            let w = random_relax(sp, rng, dim);
            match check_zeta_convexity(sp, &w, gamma.value(), FD_STEP) {
                Ok(r) => (
                    r.min_eigenvalue / (PD_MARGIN * r.norm) - 1.0,
                    r.positive_definite(),
                    format!("min_eigenvalue={:e} norm={:e}", r.min_eigenvalue, r.norm),
                ),
                Err(e) => (f64::NEG_INFINITY, false, e.to_string()),
            }
        }
        Suite::Variational => {
            let s = sample(sp, rng, dim, &StateRanges::default());
            let r = check_variational(sp, &s.y(), 1.0 / s.rho(), s.e_t, &s.e_v, gamma);
            let worst = r.split_error.max(r.value_error);
            (1.0 - worst / VARIATIONAL_TOL, r.passed(), format!("split_error={:e} value_error={:e}", r.split_error, r.value_error))
        }
        Suite::HTheorem => {
            let w0 = random_relax(sp, rng, dim);
            let epsilon = log_uniform(rng, 1e-6, 1.0);
            // the slowest decay rate is above 1/epsilon, so 40 epsilon leaves exp(-40)
            match check_h_theorem(sp, &w0, gamma, epsilon, 40.0 * epsilon, 20) {
                Ok(r) => (
                    1.0 - r.terminal_error / TERMINAL_TOL,
                    r.passed(),
                    format!("max_increase={:e} invariant_drift={:e} terminal_error={:e}", r.max_increase, r.invariant_drift, r.terminal_error),
                ),
                Err(e) => (f64::NEG_INFINITY, false, e.to_string()),
            }
        }
        Suite::FluxConsistency => {
            let cells = random_riemann_states(sp, rng, dim, 2, NEAR_VACUUM_FRACTION);
            let n = random_normal(rng, dim);
            let mut worst: f64 = 0.0;
            let mut notes = Vec::new();
            for kind in SchemeKind::ALL {
                match check_flux_pair(sp, &FluxScheme::new(kind), &cells[0], &cells[1], &n) {
                    Ok(r) => {
                        worst = worst.max(r.consistency / super::fuzz::CONSISTENCY_TOL);
                        if !r.antisymmetric {
                            worst = f64::INFINITY;
                            notes.push(format!("{kind}: not antisymmetric"));
                        }
                    }
                    Err(e) => {
                        worst = f64::INFINITY;
                        notes.push(format!("{kind}: {e}"));
                    }
                }
            }
            (1.0 - worst, worst <= 1.0, notes.join("; "))
        }
        Suite::ThreePoint => {
            let cells = random_riemann_states(sp, rng, 1, 3, NEAR_VACUUM_FRACTION);
            let mut worst = f64::NEG_INFINITY;
            let mut notes = Vec::new();
            for kind in SchemeKind::ALL {
                match three_point_update(sp, &FluxScheme::new(kind), [&cells[0], &cells[1], &cells[2]], FUZZ_CFL) {
                    Ok(out) => {
                        for v in &out.violations {
                            worst = worst.max(v.excess / v.tol);
                            notes.push(format!("{kind}: {v}"));
                        }
                    }
                    Err(e) => {
                        worst = f64::INFINITY;
                        notes.push(format!("{kind}: {e}"));
                    }
                }
            }
            (if notes.is_empty() { 1.0 } else { 1.0 - worst }, notes.is_empty(), notes.join("; "))
        }
    }
}

/// Whether every record passed.
pub fn all_passed(records: &[CheckRecord]) -> bool {
    records.iter().all(|r| r.passed)
}

pub fn write_csv<W: Write>(records: &[CheckRecord], mut out: W) -> std::io::Result<()> {
    writeln!(out, "suite,trial,species,dim,margin,passed,detail")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{:.6e},{},\"{}\"",
            r.suite,
            r.trial,
            SPECIES_SETS[r.species].join("+"),
            r.dim,
            r.margin,
            r.passed,
            r.detail.replace('"', "'")
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_passes_a_short_run() {
        for suite in Suite::ALL {
            let records = run_suite(suite, 60, 1, Execution::default());
            for r in &records {
                assert!(r.passed, "{suite} trial {}: {}", r.trial, r.detail);
            }
        }
    }

    #[test]
    fn reports_do_not_depend_on_the_schedule() {
        let a = run_suite(Suite::ZetaConvexity, 24, 5, Execution::Serial);
        let b = run_suite(Suite::ZetaConvexity, 24, 5, Execution::Parallel);
        assert_eq!(a, b);
        let mut buf = Vec::new();
        write_csv(&a, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("suite,trial,species,dim,margin,passed,detail\n"));
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }
}

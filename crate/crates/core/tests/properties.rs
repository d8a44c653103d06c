//! Property tests of the invariants of each module.

use proptest::prelude::*;

use mcrelax::flux::{physical_flux, FluxScheme, SchemeKind};
use mcrelax::mesh::{gen_cylinder_ogrid, gen_double_cone, gen_rect_periodic, BoundaryTag, DoubleConeParams, Neighbor};
use mcrelax::relax::{homogeneous_relax_step, lift, project, relax_primitive, zeta_of, RelaxGamma};
use mcrelax::riemann::{exact_star, lagrangian_speeds, pressure_function, pressure_relax_star, sample_fan, PolytropicSide, DEFAULT_TOL};
use mcrelax::solver1d::{totals, Boundary1D, Grid1D, Solver1D};
use mcrelax::solver2d::Solver2D;
use mcrelax::thermo::{bundled_database, Composition, ConservedState, SpeciesSet};
use mcrelax::verify::fuzz::check_flux_pair;
use mcrelax::verify::sampling::{random_conserved, random_normal, random_relax, random_riemann_pair, random_riemann_states, trial_rng};

const MIXTURES: [&[&str]; 4] = [&["N2", "O2", "NO", "N", "O"], &["N2", "N"], &["O2", "O", "Ar"], &["He"]];

fn mixture(i: usize) -> SpeciesSet {
    SpeciesSet::select(&bundled_database(), MIXTURES[i % MIXTURES.len()]).unwrap()
}

fn air() -> SpeciesSet {
    mixture(0)
}

/// Normalized composition from non-negative weights (at least one positive).
fn composition(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, n).prop_filter_map("all weights zero", |w| {
        let s: f64 = w.iter().sum();
        (s > 1e-3).then(|| w.iter().map(|x| x / s).collect())
    })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn mixture_exponent_lies_between_diatomic_and_monoatomic(y in composition(5)) {
        let g = air().gamma_mix(&Composition::new(&y).unwrap());
        prop_assert!((1.4 - 1e-15..=5.0 / 3.0 + 1e-15).contains(&g), "gamma = {}", g);
    }

    #[test]
    fn conserved_primitive_round_trip(
        y in composition(5),
        log_rho in -3.0f64..3.0,
        log_et in 2.0f64..8.0,
        log_ev in prop::collection::vec(1.0f64..7.0, 3),
        mach in prop::collection::vec(-3.0f64..3.0, 2),
    ) {
        let sp = air();
        let rho = 10f64.powf(log_rho);
        let e_t = 10f64.powf(log_et);
        let e_v: Vec<f64> = log_ev.iter().map(|l| 10f64.powf(*l)).collect();
        let c = (1.4 * 0.4 * e_t).sqrt();
        let v: Vec<f64> = mach.iter().map(|m| m * c).collect();
        let u = sp.conserved(&y, rho, &v, e_t, &e_v);
        let p = sp.primitive(&u).unwrap();
        prop_assert!(rel(p.rho, rho) < 1e-12);
        // e_t is recovered from E by subtracting the kinetic, vibrational and formation
        // energies, so round-off scales with the largest of them
        let e_vib: f64 = e_v.iter().zip(&y).map(|(e, yk)| e * yk).sum();
        let e_total = e_t + e_vib + 0.5 * v.iter().map(|x| x * x).sum::<f64>() + u.rho_e().abs() / rho;
        prop_assert!((p.e_t - e_t).abs() <= 1e-12 * e_total, "{} vs {}", p.e_t, e_t);
        for (a, b) in p.v.iter().zip(&v) {
            prop_assert!((a - b).abs() <= 1e-12 * c);
        }
        for (k, (a, b)) in p.e_v.iter().zip(&e_v).enumerate() {
            if y[k] > 1e-6 {
                prop_assert!(rel(*a, *b) < 1e-12, "e_v[{}]: {} vs {}", k, a, b);
            }
        }
        let back = sp.conserved(&p.y, p.rho, &p.v, p.e_t, &p.e_v);
        for (a, b) in back.as_slice().iter().zip(u.as_slice()) {
            prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(u.rho_e().abs() * 1e-6));
        }
    }

    #[test]
    fn vibration_temperature_inverts_vibration_energy(beta in 0usize..3, log_tv in 1.0f64..5.0) {
        let sp = air();
        let tv = 10f64.powf(log_tv);
        let e = sp.vib_energy(beta, tv).unwrap();
        prop_assert!(rel(sp.vib_temperature(beta, e).unwrap(), tv) < 1e-12);
    }

    #[test]
    fn lift_undoes_project(m in 0usize..4, seed in any::<u64>()) {
        let sp = mixture(m);
        let u = random_conserved(&sp, &mut trial_rng(seed, 0), 2);
        let w = project(&sp, &u, RelaxGamma::default()).unwrap();
        relax_primitive(&sp, &w).unwrap();
        let back = lift(&sp, &w);
        let scale = u.rho_e().abs();
        for (a, b) in back.as_slice().iter().zip(u.as_slice()) {
            prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1e-300) || (a - b).abs() <= 1e-15 * scale);
        }
    }

    #[test]
    fn projection_attains_minus_the_entropy(m in 0usize..4, seed in any::<u64>(), g in 1.6834f64..3.0) {
        let sp = mixture(m);
        let gamma = RelaxGamma::new(g).unwrap();
        let u = random_conserved(&sp, &mut trial_rng(seed, 1), 1);
        let prim = sp.primitive(&u).unwrap();
        let s = sp.specific_entropy_of(&prim);
        let z = zeta_of(&sp, &project(&sp, &u, gamma).unwrap(), gamma).unwrap();
        prop_assert!((z + s).abs() <= 1e-10 * s.abs().max(sp.mixture(&prim.y).cv_t), "zeta {} vs -s {}", z, -s);
    }

    #[test]
    fn relaxation_step_decreases_zeta(m in 0usize..3, seed in any::<u64>(), log_eps in -6.0f64..0.0, log_dt in -7.0f64..1.0) {
        let sp = mixture(m);
        let gamma = RelaxGamma::default();
        let w = random_relax(&sp, &mut trial_rng(seed, 2), 2);
        let z0 = zeta_of(&sp, &w, gamma).unwrap();
        let w1 = homogeneous_relax_step(&sp, &w, gamma, 10f64.powf(log_eps), 10f64.powf(log_dt)).unwrap();
        let z1 = zeta_of(&sp, &w1, gamma).unwrap();
        let cv = sp.mixture(&relax_primitive(&sp, &w).unwrap().y).cv_t;
        prop_assert!(z1 <= z0 + 1e-12 * z0.abs().max(cv));
        // equilibrium is a fixed point
        let eq = project(&sp, &lift(&sp, &w), gamma).unwrap();
        let eq1 = homogeneous_relax_step(&sp, &eq, gamma, 1e-3, 1.0).unwrap();
        prop_assert!(rel(eq1.rho_es(), eq.rho_es()) < 1e-12);
    }

    #[test]
    fn exact_star_solves_the_pressure_equation(
        rho in prop::array::uniform2(1e-3f64..1e3),
        p in prop::array::uniform2(1e-2f64..1e4),
        u in prop::array::uniform2(-2.0f64..2.0),
        g in 1.1f64..3.0,
    ) {
        let l = PolytropicSide::new(rho[0], u[0], p[0]);
        let r = PolytropicSide::new(rho[1], u[1], p[1]);
        if let Ok((ps, _)) = exact_star(&l, &r, g, DEFAULT_TOL) {
            // the residual is measured on the scale of the velocities involved
            let scale = l.sound_speed(g) + r.sound_speed(g) + (u[0] - u[1]).abs();
            prop_assert!(pressure_function(&l, &r, g, ps).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn fan_sampling_is_galilean_invariant(
        rho in prop::array::uniform2(1e-2f64..1e2),
        p in prop::array::uniform2(1e-1f64..1e2),
        u in prop::array::uniform2(-1.0f64..1.0),
        shift in -3.0f64..3.0,
        xi in -10.0f64..10.0,
    ) {
        let g = 1.4;
        let (l, r) = (PolytropicSide::new(rho[0], u[0], p[0]), PolytropicSide::new(rho[1], u[1], p[1]));
        let (ls, rs) = (PolytropicSide::new(rho[0], u[0] + shift, p[0]), PolytropicSide::new(rho[1], u[1] + shift, p[1]));
        let (ps, us) = exact_star(&l, &r, g, DEFAULT_TOL).unwrap();
        let (ps2, us2) = exact_star(&ls, &rs, g, DEFAULT_TOL).unwrap();
        prop_assert!(rel(ps, ps2) < 1e-9);
        let a = sample_fan(&l, &r, g, ps, us, xi);
        let b = sample_fan(&ls, &rs, g, ps2, us2, xi + shift);
        // away from wave fronts, where round-off in the shift can flip the side
        let front = [us, l.u - l.sound_speed(g), r.u + r.sound_speed(g)].iter().any(|s| (xi - s).abs() < 1e-6);
        if !front {
            prop_assert!(rel(a.0, b.0) < 1e-6, "rho {:?} vs {:?}", a, b);
            prop_assert!((a.1 + shift - b.1).abs() < 1e-6 * (1.0 + shift.abs()), "u {:?} vs {:?}", a, b);
            prop_assert!(rel(a.2, b.2) < 1e-6, "p {:?} vs {:?}", a, b);
        }
    }

    #[test]
    fn pressure_relaxation_star_states_are_positive(
        rho in prop::array::uniform2(1e-3f64..1e3),
        p in prop::array::uniform2(1e-3f64..1e3),
        u in prop::array::uniform2(-1.0f64..1.0),
    ) {
        let g = RelaxGamma::default().value();
        let (l, r) = (PolytropicSide::new(rho[0], u[0], p[0]), PolytropicSide::new(rho[1], u[1], p[1]));
        let (a_l, a_r) = lagrangian_speeds(&l, &r, g);
        let e = |s: &PolytropicSide| s.p / ((g - 1.0) * s.rho) + 0.5 * s.u * s.u;
        let st = pressure_relax_star(&l, &r, a_l, a_r, e(&l), e(&r));
        prop_assert!(st.rho_l_star > 0.0 && st.rho_r_star > 0.0);
        prop_assert!(st.e_l_star - 0.5 * st.u_star * st.u_star > 0.0);
        prop_assert!(st.e_r_star - 0.5 * st.u_star * st.u_star > 0.0);
    }

    #[test]
    fn fluxes_are_consistent_and_conservative(m in 0usize..4, seed in any::<u64>(), k in 0usize..3) {
        let sp = mixture(m);
        let mut rng = trial_rng(seed, 3);
        let (l, r) = random_riemann_pair(&sp, &mut rng, 2, 0.1);
        let n = random_normal(&mut rng, 2);
        let rep = check_flux_pair(&sp, &FluxScheme::new(SchemeKind::ALL[k]), &l, &r, &n).unwrap();
        prop_assert!(rep.passed(), "{:?}", rep);
    }

    #[test]
    fn species_fluxes_are_upwinded_mass_fluxes(m in 0usize..3, seed in any::<u64>(), k in prop::sample::select(vec![0usize, 2])) {
        let sp = mixture(m);
        let (l, r) = random_riemann_pair(&sp, &mut trial_rng(seed, 4), 1, 0.0);
        let h = FluxScheme::new(SchemeKind::ALL[k]).flux(&sp, &l, &r, &[1.0]).unwrap().flux;
        let ns = sp.n_species();
        let mass: f64 = h[..ns].iter().sum();
        let up = if mass >= 0.0 { sp.primitive(&l).unwrap() } else { sp.primitive(&r).unwrap() };
        for a in 0..ns {
            prop_assert!((h[a] - up.y[a] * mass).abs() <= 1e-12 * mass.abs().max(f64::MIN_POSITIVE) + 1e-300);
        }
    }

    #[test]
    fn flux_differences_are_lipschitz(m in 0usize..3, seed in any::<u64>(), k in 0usize..3, log_delta in -8.0f64..-2.0) {
        // small relative perturbations change the flux by at most C times as much
        let sp = mixture(m);
        let u = random_conserved(&sp, &mut trial_rng(seed, 5), 1);
        let delta = 10f64.powf(log_delta);
        let prim = sp.primitive(&u).unwrap();
        let v = sp.conserved(&prim.y, prim.rho * (1.0 + delta), &prim.v, prim.e_t * (1.0 + delta), &prim.e_v);
        let scheme = FluxScheme::new(SchemeKind::ALL[k]);
        let a = scheme.flux(&sp, &u, &u, &[1.0]).unwrap().flux;
        let b = scheme.flux(&sp, &u, &v, &[1.0]).unwrap().flux;
        let f = physical_flux(&sp, &u, &[1.0]).unwrap();
        let c = (prim.gamma * (prim.gamma - 1.0) * prim.e_t).sqrt();
        let du = u.as_slice().iter().zip(v.as_slice()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        let dh = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        let floor = 1e-13 * f.iter().map(|x| x.abs()).fold(0.0, f64::max);
        prop_assert!(dh <= 10.0 * (prim.v[0].abs() + c) * du + floor, "dh {} du {}", dh, du);
    }

    #[test]
    fn periodic_1d_runs_conserve_totals(m in 0usize..3, seed in any::<u64>(), k in 0usize..3) {
        let sp = mixture(m);
        let states = random_riemann_states(&sp, &mut trial_rng(seed, 6), 1, 16, 0.0);
        let mut s = Solver1D::new(&sp, Grid1D::new(16, 0.1, Boundary1D::Periodic).unwrap(), FluxScheme::new(SchemeKind::ALL[k]));
        s.strict = true;
        let t0 = totals(&s.grid, &states);
        let dt = s.cfl_dt(&states).unwrap();
        let mut reports = Vec::new();
        let out = s.advance(states, 0.0, 5.0 * dt, &mut reports).unwrap();
        for (a, b) in t0.iter().zip(&totals(&s.grid, &out)) {
            let scale = t0.iter().map(|x| x.abs()).fold(0.0, f64::max);
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-12 * scale));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generated_meshes_close_and_have_one_boundary_loop(n in 2usize..12, level in 0usize..2, nx in 3usize..9) {
        let meshes = [
            gen_cylinder_ogrid(n, n + 1, 1.0, &|phi: f64| 2.0 + phi.sin(), 0.0).unwrap(),
            gen_double_cone(&DoubleConeParams { base_cells: (8 + n, 4 + n / 2), ..DoubleConeParams::default() }, level).unwrap(),
            gen_rect_periodic(nx, nx + 1, [0.0, 1.0, 0.0, 2.0]).unwrap(),
        ];
        for (i, m) in meshes.iter().enumerate() {
            for c in 0..m.n_cells() {
                prop_assert!(m.closure_defect(c) <= 1e-12 * m.perimeter(c));
            }
            if !m.is_periodic() {
                prop_assert_eq!(m.boundary_loops(), 1, "mesh {}", i);
                prop_assert_eq!(m.euler_characteristic(), 1, "mesh {}", i);
            }
        }
    }

    #[test]
    fn periodic_2d_updates_conserve_and_wall_entropy_flux_vanishes(m in 0usize..3, seed in any::<u64>(), k in 0usize..3) {
        let sp = mixture(m);
        let mesh = gen_rect_periodic(5, 4, [0.0, 1.0, 0.0, 0.8]).unwrap();
        let mut rng = trial_rng(seed, 7);
        let states: Vec<ConservedState> = random_riemann_states(&sp, &mut rng, 2, mesh.n_cells(), 0.0);
        let solver = Solver2D::new(&sp, &mesh, FluxScheme::new(SchemeKind::ALL[k]));
        let dt = solver.cfl_dt_global(&states).unwrap();
        let (next, report) = solver.step(&states, &mcrelax::solver2d::TimeStep::Global(dt)).unwrap();
        prop_assert!(report.violations.is_empty(), "{:?}", report.violations);
        let total = |f: &[ConservedState]| {
            let mut t = vec![0.0; f[0].as_slice().len()];
            for (c, u) in f.iter().enumerate() {
                for (a, x) in t.iter_mut().zip(u.as_slice()) {
                    *a += mesh.area(c) * x;
                }
            }
            t
        };
        let (t0, t1) = (total(&states), total(&next));
        let scale = t0.iter().map(|x| x.abs()).fold(0.0, f64::max);
        for (a, b) in t0.iter().zip(&t1) {
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-12 * scale));
        }
        let u = &states[0];
        let n = random_normal(&mut rng, 2);
        let wall = solver.apply_bc(u, &n, BoundaryTag::Wall).unwrap();
        prop_assert_eq!(wall.entropy_flux, 0.0);
        prop_assert!(mesh.edges().iter().all(|e| !matches!(e.right, Neighbor::Boundary(_))));
    }
}

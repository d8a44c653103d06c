//! Built-in experiment configurations.

use std::path::PathBuf;

use mcrelax::flux::SchemeKind;
use mcrelax::thermo::GAS_CONSTANT;

use crate::config::{
    AuditConfig, BoundaryKind, CaseKind, GridConfig, InitialConfig, Pressure, RunConfig, SchemeName, StateSpec, SteadyConfig,
};

/// Sphere diameter, a quarter inch.
pub const SPHERE_DIAMETER: f64 = 0.25 * 0.0254;

/// Nondimensional species of the material-interface case: unit gas constants,
/// so `gamma = 7/5` for the diatomic gas and `5/3` for the monoatomic one.
/// The vibration temperature scale is not part of the data; it only enters the reported `Tv`.
pub fn material_interface_species() -> String {
    format!("air {GAS_CONSTANT} diatomic 0 1.0\nhelium {GAS_CONSTANT} monoatomic 0\n")
}

pub fn case_material_interface() -> RunConfig {
    let side = |y: [f64; 2], rho: f64, e_v: f64| StateSpec {
        y: y.to_vec(),
        rho: Some(rho),
        p: Some(Pressure::Pascals(1.0)),
        velocity: Some(vec![1.0]),
        e_v: Some(vec![e_v]),
        ..StateSpec::default()
    };
    RunConfig {
        case: CaseKind::MaterialInterface,
        species: vec!["air".into(), "helium".into()],
        species_file: None,
        species_table: Some(material_interface_species()),
        zero_formation_enthalpies: false,
        scheme: SchemeName(SchemeKind::Godunov),
        gamma: None,
        cfl: 0.5,
        grid: GridConfig {
            cells: vec![100, 800],
            domain: [0.0, 1.0],
            boundary: BoundaryKind::Transmissive,
            ..GridConfig::default()
        },
        t_end: Some(0.5),
        output_times: Vec::new(),
        steady: None,
        output_dir: PathBuf::from("output"),
        audits: AuditConfig::default(),
        seed: 0,
        initial: InitialConfig::Riemann {
            x0: 0.25,
            left: side([1.0, 0.0], 3.607655, 1.8070291),
            right: side([0.0, 1.0], 0.5, 0.0),
        },
    }
}

/// Five-species air composition of the shock tube.
pub const AIR5: [(&str, f64); 5] = [("N2", 0.7543), ("O2", 0.2283), ("NO", 0.01026), ("N", 6.5e-7), ("O", 0.00713)];

/// Normalized five-species air mass fractions (the listed values sum to `1 + 5e-7`).
pub fn air5_composition() -> Vec<f64> {
    let sum: f64 = AIR5.iter().map(|s| s.1).sum();
    AIR5.iter().map(|s| s.1 / sum).collect()
}

pub fn case_air_shock_tube() -> RunConfig {
    let y = air5_composition();
    let side = |p: &str, t: f64| StateSpec {
        y: y.clone(),
        p: Some(Pressure::WithUnit(p.into())),
        t: Some(t),
        ..StateSpec::default()
    };
    RunConfig {
        case: CaseKind::AirShockTube,
        species: AIR5.iter().map(|s| s.0.to_string()).collect(),
        species_file: None,
        species_table: None,
        zero_formation_enthalpies: true,
        scheme: SchemeName(SchemeKind::Godunov),
        gamma: None,
        cfl: 0.5,
        grid: GridConfig {
            cells: vec![100, 800],
            domain: [0.0, 1.0],
            boundary: BoundaryKind::Transmissive,
            ..GridConfig::default()
        },
        t_end: Some(1.5e-4),
        output_times: Vec::new(),
        steady: None,
        output_dir: PathBuf::from("output"),
        audits: AuditConfig::default(),
        seed: 0,
        initial: InitialConfig::Riemann {
            x0: 0.5,
            left: side("100 bar", 9000.0),
            right: side("1 bar", 300.0),
        },
    }
}

fn steady_case(case: CaseKind, species: &[&str], state: StateSpec, grid: GridConfig) -> RunConfig {
    RunConfig {
        case,
        species: species.iter().map(|s| s.to_string()).collect(),
        species_file: None,
        species_table: None,
        zero_formation_enthalpies: false,
        scheme: SchemeName(SchemeKind::Godunov),
        gamma: None,
        cfl: 0.5,
        grid,
        t_end: None,
        output_times: Vec::new(),
        steady: Some(SteadyConfig::default()),
        output_dir: PathBuf::from("output"),
        audits: AuditConfig::default(),
        seed: 0,
        initial: InitialConfig::Uniform { state },
    }
}

pub fn case_sphere() -> RunConfig {
    let state = StateSpec {
        y: vec![0.79, 0.21],
        rho: Some(7.83e-3),
        t: Some(293.0),
        mach: Some(15.3),
        ..StateSpec::default()
    };
    let grid = GridConfig {
        cells: vec![20, 40],
        radius: Some(0.5 * SPHERE_DIAMETER),
        ..GridConfig::default()
    };
    steady_case(CaseKind::Sphere, &["N2", "O2"], state, grid)
}

pub fn case_double_cone() -> RunConfig {
    let state = StateSpec {
        y: vec![0.99, 0.01],
        rho: Some(1.34e-3),
        t: Some(303.0),
        mach: Some(11.3),
        tv: Some(vec![3085.0]),
        ..StateSpec::default()
    };
    let grid = GridConfig {
        levels: vec![0],
        ..GridConfig::default()
    };
    steady_case(CaseKind::DoubleCone, &["N2", "N"], state, grid)
}

/// Built-in configuration of a named case. The `riemann` case is a placeholder
/// air problem meant to be edited.
pub fn case(kind: CaseKind) -> RunConfig {
    match kind {
        CaseKind::MaterialInterface => case_material_interface(),
        CaseKind::AirShockTube => case_air_shock_tube(),
        CaseKind::Sphere => case_sphere(),
        CaseKind::DoubleCone => case_double_cone(),
        CaseKind::Riemann => {
            let mut cfg = case_air_shock_tube();
            cfg.case = CaseKind::Riemann;
            cfg.species = vec!["N2".into(), "O2".into()];
            cfg.zero_formation_enthalpies = false;
            let side = |p: f64, t: f64| StateSpec {
                y: vec![0.79, 0.21],
                p: Some(Pressure::Pascals(p)),
                t: Some(t),
                ..StateSpec::default()
            };
            cfg.initial = InitialConfig::Riemann {
                x0: 0.5,
                left: side(1e5, 300.0),
                right: side(1e4, 300.0),
            };
            cfg.t_end = Some(5e-4);
            cfg
        }
    }
}

use super::{Species, SpeciesKind, ThermoError};

/// The species file shipped with the crate.
pub const BUNDLED_DATABASE: &str = include_str!("../../data/species.dat");

/// Parses `name M kind h0 [theta_v]` lines; `#` starts a comment.
pub fn parse_database(text: &str) -> Result<Vec<Species>, ThermoError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| ThermoError::Database {
            line: line_no,
            message,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() < 4 {
            return Err(err(format!("expected at least 4 fields, found {}", fields.len())));
        }
        let num = |s: &str, what: &str| s.parse::<f64>().map_err(|_| err(format!("bad {what} `{s}`")));
        let molar_mass = num(fields[1], "molar mass")?;
        let h0 = num(fields[3], "formation enthalpy")?;
        let kind = match (fields[2].to_ascii_lowercase().as_str(), fields.len()) {
            ("monoatomic", 4) => SpeciesKind::Monoatomic,
            ("diatomic", 5) => SpeciesKind::Diatomic {
                theta_v: num(fields[4], "theta_v")?,
            },
            ("monoatomic", _) => return Err(err("monoatomic species take 4 fields".into())),
            ("diatomic", _) => return Err(err("diatomic species need theta_v".into())),
            (other, _) => return Err(err(format!("unknown kind `{other}`"))),
        };
        let species = Species::new(fields[0], molar_mass, kind, h0).map_err(|e| err(e.to_string()))?;
        if out.iter().any(|s: &Species| s.name == species.name) {
            return Err(err(format!("duplicate species `{}`", species.name)));
        }
        out.push(species);
    }
    Ok(out)
}

pub fn bundled_database() -> Vec<Species> {
    parse_database(BUNDLED_DATABASE).expect("bundled species database parses")
}

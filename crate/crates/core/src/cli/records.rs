//! Text records for chains, scatterer ensembles and sampled spectra.

use std::rc::Rc;

use num_complex::Complex64;

use super::config::{parse_document, parse_real, ConfigError, ConfigResult, Params, Quantity, UnitUse};
use crate::chain1d::{de_broglie_k, ChainSpec, ScattererRT};
use crate::foldy::{AmplitudeModel, ScattererSpec};
use crate::greens::GreenKind;

fn invalid(key: &str, value: String, reason: &str) -> ConfigError {
    ConfigError::InvalidValue {
        key: key.into(),
        value,
        reason: reason.into(),
    }
}

/// Reads a chain record: one `[chain]` section with `k` (or `mass` and
/// `velocity`) and `positions`, then one `[scatterer]` section per scatterer
/// with any of `rL`, `tL`, `rR`, `tR`.
pub fn parse_chain(text: &str, units: Rc<UnitUse>) -> ConfigResult<ChainSpec> {
    let sections = parse_document(text)?;
    let mut header = None;
    let mut scatterers = Vec::new();
    for section in &sections {
        let p = Params::new(section, units.clone());
        match section.name.as_str() {
            "chain" if header.is_none() => {
                let k = match p.quantity("k", Quantity::WaveNumber)? {
                    Some(k) => {
                        if p.raw("mass").is_some() || p.raw("velocity").is_some() {
                            return Err(invalid("k", k.to_string(), "give either k or mass and velocity"));
                        }
                        k
                    }
                    None => {
                        let m = p.require_quantity("mass", Quantity::Mass)?;
                        let v = p.require_quantity("velocity", Quantity::Velocity)?;
                        if units.is_si() {
                            de_broglie_k(m, v).map_err(|e| invalid("mass", m.to_string(), &e.to_string()))?
                        } else {
                            m * v
                        }
                    }
                };
                let positions = p.quantity_list("positions", Quantity::Length)?;
                p.finish()?;
                header = Some((k, positions));
            }
            "scatterer" => {
                let s = ScattererRT {
                    r_left: p.complex("rL")?,
                    t_left: p.complex("tL")?,
                    r_right: p.complex("rR")?,
                    t_right: p.complex("tR")?,
                };
                p.finish()?;
                scatterers.push(s);
            }
            other => return Err(ConfigError::UnknownSection(other.to_string())),
        }
    }
    let (k, positions) = header.ok_or_else(|| ConfigError::MissingKey {
        section: "chain".into(),
        key: "k".into(),
    })?;
    let positions = positions.unwrap_or_else(|| (0..scatterers.len()).map(|i| i as f64).collect());
    ChainSpec::new(scatterers, positions, k).map_err(|e| invalid("positions", String::new(), &e.to_string()))
}

fn fmt_complex(z: Complex64) -> String {
    if z.im < 0.0 || (z.im == 0.0 && z.im.is_sign_negative()) {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// Inverse of [`parse_chain`] for nondimensional chains.
pub fn write_chain(chain: &ChainSpec) -> String {
    let mut out = String::from("[chain]\n");
    out.push_str(&format!("k = {}\n", chain.k));
    let positions: Vec<String> = chain.positions.iter().map(|p| p.to_string()).collect();
    out.push_str(&format!("positions = {}\n", positions.join(", ")));
    for s in &chain.scatterers {
        out.push_str("\n[scatterer]\n");
        for (key, v) in [("rL", s.r_left), ("tL", s.t_left), ("rR", s.r_right), ("tR", s.t_right)] {
            if let Some(v) = v {
                out.push_str(&format!("{key} = {}\n", fmt_complex(v)));
            }
        }
    }
    out
}

/// Reads `[scatterer]` sections with `position` (one or three components),
/// `green`, and either `amplitude` or `scattering_length`.
pub fn parse_scatterers(text: &str, units: Rc<UnitUse>) -> ConfigResult<Vec<ScattererSpec>> {
    let mut out = Vec::new();
    for section in parse_document(text)? {
        if section.name != "scatterer" {
            return Err(ConfigError::UnknownSection(section.name));
        }
        let p = Params::new(&section, units.clone());
        let pos = p
            .quantity_list("position", Quantity::Length)?
            .ok_or_else(|| ConfigError::MissingKey {
                section: "scatterer".into(),
                key: "position".into(),
            })?;
        let position = match pos.as_slice() {
            [x] => [*x, 0.0, 0.0],
            [x, y, z] => [*x, *y, *z],
            _ => return Err(invalid("position", format!("{pos:?}"), "expected 1 or 3 components")),
        };
        let green_raw = p.require("green")?;
        let green: GreenKind = green_raw
            .parse()
            .map_err(|e: crate::Error| invalid("green", green_raw.into(), &e.to_string()))?;
        let amplitude = match (p.complex("amplitude")?, p.quantity("scattering_length", Quantity::Length)?) {
            (Some(f), None) => AmplitudeModel::Constant(f),
            (None, Some(b)) => AmplitudeModel::NuclearExpansion { scattering_length: b },
            _ => {
                return Err(invalid(
                    "amplitude",
                    String::new(),
                    "give exactly one of amplitude or scattering_length",
                ))
            }
        };
        p.finish()?;
        out.push(ScattererSpec {
            position,
            amplitude,
            green,
        });
    }
    Ok(out)
}

/// Whitespace-separated `k re im` rows; `#` starts a comment.
pub fn parse_samples(text: &str) -> ConfigResult<Vec<(f64, Complex64)>> {
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let [k, re, im] = fields.as_slice() else {
            return Err(ConfigError::Syntax {
                line: idx + 1,
                message: "expected `k re im`".into(),
            });
        };
        rows.push((
            parse_real("k", k)?,
            Complex64::new(parse_real("re", re)?, parse_real("im", im)?),
        ));
    }
    Ok(rows)
}

//! Flat `key = value` documents with `[section]` headers.

use std::cell::{Cell, RefCell};
use std::collections::{BTreeMap, BTreeSet};
use std::rc::Rc;

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },

    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("unknown section [{0}]")]
    UnknownSection(String),

    #[error("unknown key `{key}` in [{section}]")]
    UnknownKey { section: String, key: String },

    #[error("missing key `{key}` in [{section}]")]
    MissingKey { section: String, key: String },

    #[error("invalid value for `{key}`: {reason} (got `{value}`)")]
    InvalidValue { key: String, value: String, reason: String },

    #[error("inputs mix SI unit suffixes with nondimensional values; `{key}` is {state}")]
    UnitMixing { key: String, state: &'static str },

    #[error("command {command} cannot write {format} output")]
    UnsupportedFormat { command: String, format: String },
}

pub type ConfigResult<T> = std::result::Result<T, ConfigError>;

#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub name: String,
    pub line: usize,
    pub entries: Vec<(String, String, usize)>,
}

/// Splits a document into sections. Blank lines and lines starting with `#`
/// or `;` are ignored; keys repeated within one section are rejected.
pub fn parse_document(text: &str) -> ConfigResult<Vec<Section>> {
    let mut sections: Vec<Section> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') || content.starts_with(';') {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| ConfigError::Syntax {
                line,
                message: "unterminated section header".into(),
            })?;
            let name = name.trim();
            if name.is_empty() {
                return Err(ConfigError::Syntax {
                    line,
                    message: "empty section name".into(),
                });
            }
            sections.push(Section {
                name: name.to_string(),
                line,
                entries: Vec::new(),
            });
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line,
            message: format!("expected `key = value`, got `{content}`"),
        })?;
        let key = key.trim();
        let value = value.split(" #").next().unwrap_or("").trim();
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(ConfigError::Syntax {
                line,
                message: format!("invalid key `{key}`"),
            });
        }
        let section = sections.last_mut().ok_or_else(|| ConfigError::Syntax {
            line,
            message: "key outside of any section".into(),
        })?;
        if section.entries.iter().any(|(k, _, _)| k == key) {
            return Err(ConfigError::Syntax {
                line,
                message: format!("duplicate key `{key}`"),
            });
        }
        section.entries.push((key.to_string(), value.to_string(), line));
    }
    Ok(sections)
}

/// Physical dimension of a parameter that may carry an SI suffix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Length,
    WaveNumber,
    Mass,
    Velocity,
    Time,
}

impl Quantity {
    fn factor(self, suffix: &str) -> Option<f64> {
        let f = match (self, suffix) {
            (Quantity::Length, "m") => 1.0,
            (Quantity::Length, "mm") => 1e-3,
            (Quantity::Length, "um") => 1e-6,
            (Quantity::Length, "nm") => 1e-9,
            (Quantity::WaveNumber, "1/m") => 1.0,
            (Quantity::WaveNumber, "1/mm") => 1e3,
            (Quantity::WaveNumber, "1/um") => 1e6,
            (Quantity::WaveNumber, "1/nm") => 1e9,
            (Quantity::Mass, "kg") => 1.0,
            (Quantity::Mass, "g") => 1e-3,
            (Quantity::Velocity, "m/s") => 1.0,
            (Quantity::Velocity, "mm/s") => 1e-3,
            (Quantity::Time, "s") => 1.0,
            (Quantity::Time, "ms") => 1e-3,
            (Quantity::Time, "us") => 1e-6,
            (Quantity::Time, "ns") => 1e-9,
            _ => return None,
        };
        Some(f)
    }
}

/// Records whether any physical input carried a suffix and whether any did not.
#[derive(Debug, Default)]
pub struct UnitUse {
    si: Cell<bool>,
    bare: Cell<bool>,
}

impl UnitUse {
    pub fn is_si(&self) -> bool {
        self.si.get()
    }

    fn record(&self, key: &str, with_suffix: bool) -> ConfigResult<()> {
        if with_suffix {
            self.si.set(true);
        } else {
            self.bare.set(true);
        }
        if self.si.get() && self.bare.get() {
            return Err(ConfigError::UnitMixing {
                key: key.to_string(),
                state: if with_suffix { "in SI units" } else { "nondimensional" },
            });
        }
        Ok(())
    }
}

pub fn parse_real(key: &str, value: &str) -> ConfigResult<f64> {
    let v: f64 = value.trim().parse().map_err(|_| invalid(key, value, "not a decimal number"))?;
    if !v.is_finite() {
        return Err(invalid(key, value, "not finite"));
    }
    Ok(v)
}

/// Parses `re`, `imi`, `re+imi` or `re-imi`; a bare `i` means one.
pub fn parse_complex(key: &str, value: &str) -> ConfigResult<Complex64> {
    let s: String = value.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(invalid(key, value, "empty complex value"));
    }
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex64::new(parse_real(key, &s)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&p| (bytes[p] == b'+' || bytes[p] == b'-') && !matches!(bytes[p - 1], b'e' | b'E'));
    let imag = |t: &str| -> ConfigResult<f64> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => parse_real(key, t).map_err(|_| invalid(key, value, "expected re+imi")),
        }
    };
    match split {
        Some(p) => Ok(Complex64::new(
            parse_real(key, &body[..p]).map_err(|_| invalid(key, value, "expected re+imi"))?,
            imag(&body[p..])?,
        )),
        None => Ok(Complex64::new(0.0, imag(body)?)),
    }
}

fn invalid(key: &str, value: &str, reason: &str) -> ConfigError {
    ConfigError::InvalidValue {
        key: key.to_string(),
        value: value.to_string(),
        reason: reason.to_string(),
    }
}

/// Key/value pairs of one section. Every key must be read before
/// [`Params::finish`], which rejects whatever is left over.
#[derive(Debug)]
pub struct Params {
    section: String,
    values: BTreeMap<String, String>,
    used: RefCell<BTreeSet<String>>,
    units: Rc<UnitUse>,
}

impl Params {
    pub fn new(section: &Section, units: Rc<UnitUse>) -> Self {
        Params {
            section: section.name.clone(),
            values: section.entries.iter().map(|(k, v, _)| (k.clone(), v.clone())).collect(),
            used: RefCell::new(BTreeSet::new()),
            units,
        }
    }

    pub fn empty(section: &str, units: Rc<UnitUse>) -> Self {
        Params {
            section: section.to_string(),
            values: BTreeMap::new(),
            used: RefCell::new(BTreeSet::new()),
            units,
        }
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        let v = self.values.get(key)?;
        self.used.borrow_mut().insert(key.to_string());
        Some(v.as_str())
    }

    fn missing(&self, key: &str) -> ConfigError {
        ConfigError::MissingKey {
            section: self.section.clone(),
            key: key.to_string(),
        }
    }

    pub fn require(&self, key: &str) -> ConfigResult<&str> {
        self.raw(key).ok_or_else(|| self.missing(key))
    }

    pub fn real(&self, key: &str) -> ConfigResult<Option<f64>> {
        self.raw(key).map(|v| parse_real(key, v)).transpose()
    }

    pub fn real_or(&self, key: &str, default: f64) -> ConfigResult<f64> {
        Ok(self.real(key)?.unwrap_or(default))
    }

    pub fn require_real(&self, key: &str) -> ConfigResult<f64> {
        self.real(key)?.ok_or_else(|| self.missing(key))
    }

    pub fn complex(&self, key: &str) -> ConfigResult<Option<Complex64>> {
        self.raw(key).map(|v| parse_complex(key, v)).transpose()
    }

    pub fn complex_or(&self, key: &str, default: Complex64) -> ConfigResult<Complex64> {
        Ok(self.complex(key)?.unwrap_or(default))
    }

    pub fn usize_or(&self, key: &str, default: usize) -> ConfigResult<usize> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v.trim().parse().map_err(|_| invalid(key, v, "not a non-negative integer")),
        }
    }

    pub fn u64_or(&self, key: &str, default: u64) -> ConfigResult<u64> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v.trim().parse().map_err(|_| invalid(key, v, "not an unsigned integer")),
        }
    }

    pub fn bool_or(&self, key: &str, default: bool) -> ConfigResult<bool> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => match v.trim() {
                "true" | "yes" | "1" => Ok(true),
                "false" | "no" | "0" => Ok(false),
                _ => Err(invalid(key, v, "expected true or false")),
            },
        }
    }

    /// A physical value, converted to SI when it carries a suffix.
    pub fn quantity(&self, key: &str, kind: Quantity) -> ConfigResult<Option<f64>> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => parse_quantity(key, v, kind, &self.units).map(Some),
        }
    }

    pub fn quantity_or(&self, key: &str, kind: Quantity, default: f64) -> ConfigResult<f64> {
        Ok(self.quantity(key, kind)?.unwrap_or(default))
    }

    pub fn require_quantity(&self, key: &str, kind: Quantity) -> ConfigResult<f64> {
        self.quantity(key, kind)?.ok_or_else(|| self.missing(key))
    }

    /// Comma-separated physical values.
    pub fn quantity_list(&self, key: &str, kind: Quantity) -> ConfigResult<Option<Vec<f64>>> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .split(',')
                .map(|item| parse_quantity(key, item, kind, &self.units))
                .collect::<ConfigResult<Vec<_>>>()
                .map(Some),
        }
    }

    pub fn real_list(&self, key: &str) -> ConfigResult<Option<Vec<f64>>> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v.split(',').map(|item| parse_real(key, item)).collect::<ConfigResult<Vec<_>>>().map(Some),
        }
    }

    pub fn finish(&self) -> ConfigResult<()> {
        let used = self.used.borrow();
        match self.values.keys().find(|k| !used.contains(*k)) {
            Some(key) => Err(ConfigError::UnknownKey {
                section: self.section.clone(),
                key: key.clone(),
            }),
            None => Ok(()),
        }
    }
}

fn parse_quantity(key: &str, value: &str, kind: Quantity, units: &UnitUse) -> ConfigResult<f64> {
    let mut parts = value.split_whitespace();
    let number = parts.next().ok_or_else(|| invalid(key, value, "empty value"))?;
    let x = parse_real(key, number)?;
    match (parts.next(), parts.next()) {
        (None, _) => {
            units.record(key, false)?;
            Ok(x)
        }
        (Some(suffix), None) => {
            let f = kind
                .factor(suffix)
                .ok_or_else(|| invalid(key, value, &format!("unit `{suffix}` does not fit a {kind:?} value")))?;
            units.record(key, true)?;
            Ok(x * f)
        }
        _ => Err(invalid(key, value, "expected a number and at most one unit")),
    }
}

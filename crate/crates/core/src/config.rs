//! Run configuration: a TOML document whose physical quantities may carry
//! unit suffixes ("69 GPa", "7 N/mm", "2.25 cm^2"). Values are converted to
//! SI on load through a fixed table; bare numbers are taken as SI already.

use std::fmt;
use std::ops::Range;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;
use toml::Spanned;

use crate::beam_model::{BeamParams, ModelKind, OutputKind, Violation, RECTANGULAR_SHEAR_FACTOR};
use crate::response::{Spacing, SweepSpec, DEFAULT_COARSE_POINTS};

/// The shipped configuration: the reference beam in its published units.
pub const DEFAULT_CONFIG: &str = include_str!("../config/default.toml");

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}", Located { line: *line, key: key.as_deref(), message })]
    Parse { line: Option<usize>, key: Option<String>, message: String },

    #[error("invalid configuration: {}", list(.0))]
    Validation(Vec<Violation>),
}

struct Located<'a> {
    line: Option<usize>,
    key: Option<&'a str>,
    message: &'a str,
}

impl fmt::Display for Located<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}: ")?;
        }
        if let Some(key) = self.key {
            write!(f, "`{key}`: ")?;
        }
        f.write_str(self.message)
    }
}

fn list(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dim {
    Length,
    Area,
    SecondMoment,
    Density,
    Pressure,
    Mass,
    Stiffness,
    Damping,
    Dimensionless,
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dim::Length => "a length",
            Dim::Area => "an area",
            Dim::SecondMoment => "an area moment",
            Dim::Density => "a density",
            Dim::Pressure => "a modulus",
            Dim::Mass => "a mass",
            Dim::Stiffness => "a stiffness",
            Dim::Damping => "a damping coefficient",
            Dim::Dimensionless => "a plain number",
        })
    }
}

/// Unit suffix, its dimension, and the power of ten taking it to SI.
const UNITS: &[(&str, Dim, i32)] = &[
    ("m", Dim::Length, 0),
    ("cm", Dim::Length, -2),
    ("mm", Dim::Length, -3),
    ("m^2", Dim::Area, 0),
    ("cm^2", Dim::Area, -4),
    ("mm^2", Dim::Area, -6),
    ("m^4", Dim::SecondMoment, 0),
    ("cm^4", Dim::SecondMoment, -8),
    ("mm^4", Dim::SecondMoment, -12),
    ("kg/m^3", Dim::Density, 0),
    ("g/cm^3", Dim::Density, 3),
    ("Pa", Dim::Pressure, 0),
    ("kPa", Dim::Pressure, 3),
    ("MPa", Dim::Pressure, 6),
    ("GPa", Dim::Pressure, 9),
    ("N/m^2", Dim::Pressure, 0),
    ("N/mm^2", Dim::Pressure, 6),
    ("kg", Dim::Mass, 0),
    ("g", Dim::Mass, -3),
    ("N/m", Dim::Stiffness, 0),
    ("N/mm", Dim::Stiffness, 3),
    ("kN/m", Dim::Stiffness, 3),
    ("N*s/m", Dim::Damping, 0),
    ("Ns/m", Dim::Damping, 0),
    ("kg/s", Dim::Damping, 0),
];

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
enum Quantity {
    Number(f64),
    Text(String),
}

/// Converts "<number> <unit>" to SI, checking the unit's dimension. The
/// power of ten is applied to the decimal text, so "2.25 cm^2" gives the
/// same double as the literal 2.25e-4.
fn to_si(q: &Quantity, dim: Dim) -> Result<f64, String> {
    let text = match q {
        Quantity::Number(x) => return Ok(*x),
        Quantity::Text(t) => t.trim(),
    };
    let (num, unit) = match text.split_once(char::is_whitespace) {
        Some((n, u)) => (n, u.trim()),
        None => (text, ""),
    };
    let not_a_number = || format!("`{text}` does not start with a number");
    let (mantissa, exp) = match num.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| not_a_number())?),
        None => (num, 0),
    };
    mantissa.parse::<f64>().map_err(|_| not_a_number())?;
    let shift = if unit.is_empty() {
        0
    } else {
        match UNITS.iter().find(|(u, _, _)| *u == unit) {
            Some(&(_, d, shift)) if d == dim => shift,
            Some(&(_, d, _)) => return Err(format!("unit `{unit}` is {d}, expected {dim}")),
            None => return Err(format!("unknown unit `{unit}`")),
        }
    };
    format!("{mantissa}e{}", exp + shift).parse().map_err(|_| not_a_number())
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBeam {
    ell: Option<Spanned<Quantity>>,
    ell0: Option<Spanned<Quantity>>,
    ellk: Option<Spanned<Quantity>>,
    rho0: Option<Spanned<Quantity>>,
    #[serde(alias = "A")]
    area: Option<Spanned<Quantity>>,
    #[serde(alias = "E")]
    youngs: Option<Spanned<Quantity>>,
    #[serde(alias = "G")]
    shear_modulus: Option<Spanned<Quantity>>,
    #[serde(alias = "I")]
    inertia: Option<Spanned<Quantity>>,
    k_shear: Option<Spanned<Quantity>>,
    #[serde(alias = "m_att")]
    mass: Option<Spanned<Quantity>>,
    #[serde(alias = "kappa")]
    stiffness: Option<Spanned<Quantity>>,
    #[serde(alias = "d")]
    damping: Option<Spanned<Quantity>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    model: Option<ModelKind>,
    output: Option<OutputKind>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    nu_min: Option<f64>,
    nu_max: Option<f64>,
    points: Option<usize>,
    spacing: Option<Spacing>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPeaks {
    nu_min: Option<f64>,
    nu_max: Option<f64>,
    coarse_points: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCompare {
    damping: Option<Spanned<Vec<Quantity>>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    beam: RawBeam,
    #[serde(default)]
    run: RawRun,
    #[serde(default)]
    sweep: RawSweep,
    #[serde(default)]
    peaks: RawPeaks,
    #[serde(default)]
    compare: RawCompare,
    out: Option<PathBuf>,
}

/// Everything a CLI invocation needs, in SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: BeamParams,
    pub model: ModelKind,
    pub kind: OutputKind,
    pub nu_min: f64,
    pub nu_max: f64,
    pub points: usize,
    pub spacing: Spacing,
    pub peak_range: (f64, f64),
    pub coarse_points: usize,
    /// Damping values for comparison runs, one output each.
    pub compare: Option<Vec<f64>>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    /// The comparison list, or the beam's own damping.
    pub fn dampings(&self) -> Vec<f64> {
        self.compare.clone().unwrap_or_else(|| vec![self.params.damping])
    }

    pub fn sweep_spec(&self) -> SweepSpec {
        SweepSpec {
            model: self.model,
            kind: self.kind,
            nu_min: self.nu_min,
            nu_max: self.nu_max,
            n_points: self.points,
            spacing: self.spacing,
        }
    }
}

/// Text being parsed. Line numbers are only meaningful for the user's own file.
struct Source<'a> {
    text: &'a str,
    has_lines: bool,
}

impl Source<'_> {
    fn line(&self, span: Range<usize>) -> Option<usize> {
        self.has_lines
            .then(|| self.text[..span.start.min(self.text.len())].matches('\n').count() + 1)
    }

    fn toml_error(&self, e: toml::de::Error) -> ConfigError {
        let (line, key) = match e.span() {
            Some(span) => {
                let key = self
                    .text
                    .get(span.clone())
                    .map(str::trim)
                    .filter(|k| !k.is_empty() && k.chars().all(|c| c.is_alphanumeric() || c == '_'))
                    .map(str::to_owned);
                (self.line(span), key)
            }
            None => (None, None),
        };
        ConfigError::Parse { line, key, message: e.message().trim().to_owned() }
    }
}

fn quantity(src: &Source, key: &str, q: &Option<Spanned<Quantity>>, dim: Dim) -> Result<Option<f64>, ConfigError> {
    let Some(q) = q else { return Ok(None) };
    to_si(q.get_ref(), dim)
        .map(Some)
        .map_err(|message| ConfigError::Parse { line: src.line(q.span()), key: Some(key.to_owned()), message })
}

fn required(src: &Source, key: &str, q: &Option<Spanned<Quantity>>, dim: Dim) -> Result<f64, ConfigError> {
    quantity(src, key, q, dim)?.ok_or_else(|| ConfigError::Parse {
        line: None,
        key: Some(key.to_owned()),
        message: "missing required value".to_owned(),
    })
}

fn build(src: &Source) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(src.text).map_err(|e| src.toml_error(e))?;
    let b = &raw.beam;
    let ell0 = required(src, "beam.ell0", &b.ell0, Dim::Length)?;
    let params = BeamParams {
        ell: required(src, "beam.ell", &b.ell, Dim::Length)?,
        ell0,
        ellk: quantity(src, "beam.ellk", &b.ellk, Dim::Length)?.unwrap_or(ell0),
        rho0: required(src, "beam.rho0", &b.rho0, Dim::Density)?,
        area: required(src, "beam.area", &b.area, Dim::Area)?,
        youngs: required(src, "beam.youngs", &b.youngs, Dim::Pressure)?,
        shear_modulus: required(src, "beam.shear_modulus", &b.shear_modulus, Dim::Pressure)?,
        inertia: required(src, "beam.inertia", &b.inertia, Dim::SecondMoment)?,
        k_shear: quantity(src, "beam.k_shear", &b.k_shear, Dim::Dimensionless)?
            .unwrap_or(RECTANGULAR_SHEAR_FACTOR),
        mass: required(src, "beam.mass", &b.mass, Dim::Mass)?,
        stiffness: required(src, "beam.stiffness", &b.stiffness, Dim::Stiffness)?,
        damping: required(src, "beam.damping", &b.damping, Dim::Damping)?,
    };
    let compare = match &raw.compare.damping {
        Some(list) => Some(list
            .get_ref()
            .iter()
            .map(|q| {
                to_si(q, Dim::Damping).map_err(|message| ConfigError::Parse {
                    line: src.line(list.span()),
                    key: Some("compare.damping".to_owned()),
                    message,
                })
            })
            .collect::<Result<Vec<_>, _>>()?),
        None => None,
    };
    let cfg = RunConfig {
        params,
        model: raw.run.model.unwrap_or(ModelKind::Timoshenko),
        kind: raw.run.output.unwrap_or(OutputKind::Displacement),
        nu_min: raw.sweep.nu_min.unwrap_or(0.5),
        nu_max: raw.sweep.nu_max.unwrap_or(250.0),
        points: raw.sweep.points.unwrap_or(2048),
        spacing: raw.sweep.spacing.unwrap_or_default(),
        peak_range: (raw.peaks.nu_min.unwrap_or(1.0), raw.peaks.nu_max.unwrap_or(50.0)),
        coarse_points: raw.peaks.coarse_points.unwrap_or(DEFAULT_COARSE_POINTS),
        compare,
        out: raw.out,
    };
    let violations = validate(&cfg);
    if violations.is_empty() {
        Ok(cfg)
    } else {
        Err(ConfigError::Validation(violations))
    }
}

/// Beam invariants plus a usable damping list.
pub fn validate(cfg: &RunConfig) -> Vec<Violation> {
    let mut v = cfg.params.validate();
    let Some(list) = &cfg.compare else { return v };
    if list.is_empty() {
        v.push(Violation::new("compare.damping", "must not be empty".to_owned()));
    }
    for &d in list {
        if !(d.is_finite() && d >= 0.0) {
            v.push(Violation::new("compare.damping", format!("must be finite and >= 0, got {d}")));
        }
    }
    v
}

/// Sets `section.key` (or a top-level key) to `value`. The value is read
/// as a TOML literal when it is one and as a string otherwise, so both
/// `beam.area=0` and `beam.area=2 cm^2` work.
fn apply_override(doc: &mut toml::Table, key: &str, value: &str) -> Result<(), ConfigError> {
    let bad = |message: String| ConfigError::Parse { line: None, key: Some(key.to_owned()), message };
    let parsed = toml::from_str::<toml::Table>(&format!("v = {value}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(value.to_owned()));
    let mut table = doc;
    let mut parts = key.split('.').peekable();
    while let Some(part) = parts.next() {
        if part.is_empty() {
            return Err(bad("empty key segment".to_owned()));
        }
        if parts.peek().is_none() {
            table.insert(part.to_owned(), parsed);
            return Ok(());
        }
        table = match table
            .entry(part.to_owned())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
        {
            toml::Value::Table(t) => t,
            _ => return Err(bad(format!("`{part}` is not a section"))),
        };
    }
    Err(bad("empty key".to_owned()))
}

/// Parses a configuration document and applies `KEY=VALUE` overrides.
pub fn parse_config(text: &str, overrides: &[(String, String)]) -> Result<RunConfig, ConfigError> {
    let src = Source { text, has_lines: true };
    if overrides.is_empty() {
        return build(&src);
    }
    // syntax errors are reported against the original text first
    let mut doc: toml::Table = toml::from_str(text).map_err(|e| src.toml_error(e))?;
    for (k, v) in overrides {
        apply_override(&mut doc, k, v)?;
    }
    let merged = toml::to_string(&doc).map_err(|e| ConfigError::Parse {
        line: None,
        key: None,
        message: e.to_string(),
    })?;
    build(&Source { text: &merged, has_lines: false })
}

pub fn load_config(path: &Path, overrides: &[(String, String)]) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_owned(), source })?;
    parse_config(&text, overrides)
}

pub fn default_config() -> RunConfig {
    parse_config(DEFAULT_CONFIG, &[]).expect("shipped configuration is valid")
}

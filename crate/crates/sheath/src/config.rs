//! Run configuration files.
//!
//! The format is line based:
//!
//! ```text
//! # comment
//! name = hydrogen_collisionless
//!
//! [plasma]
//! eps = 1/1836
//! kappa = 0.0025
//! chi = 4e-4
//!
//! [mesh]
//! n_cells = 256
//! ```
//!
//! Keys before the first section header belong to the top level. Numbers
//! accept a `numerator/denominator` form. Unknown sections or keys, repeated
//! keys and missing required keys are errors. Overrides use
//! `section.key=value` (or `key=value` for top-level keys) and replace or add
//! a key before validation. Overriding one snapshot cadence key drops the
//! other.

use std::collections::BTreeMap;
use std::path::PathBuf;

use sheath_core::boundary::ElectronBc;
use sheath_core::mesh::Mesh;
use sheath_core::params::NondimParams;
use sheath_core::riemann::FluxScheme;
use sheath_core::scheme::{Cadence, SchemeConfig, Splitting};

use crate::Error;

/// `(section, keys)`; the top level is the empty section.
const SCHEMA: &[(&str, &[&str])] = &[
    ("", &["name"]),
    ("plasma", &["eps", "kappa", "chi", "macro_to_mfp", "sigma_ratio"]),
    ("mesh", &["n_cells"]),
    (
        "scheme",
        &[
            "splitting",
            "electron_flux",
            "ion_flux",
            "electron_bc",
            "cfl_safety",
            "t_final",
            "dt_cap",
            "steady_tol",
            "steady_window",
            "ion_diffusion_tuning",
            "trace_every",
        ],
    ),
    ("output", &["dir", "snapshot_every_steps", "snapshot_every_time"]),
    ("checks", &["ambipolarity_max", "phi_peak_rel_tol", "oscillation_max", "bulk_fit_residual_max"]),
];

/// Pass/fail thresholds evaluated on the final state and written to the
/// summary. Unset thresholds are skipped.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Checks {
    pub ambipolarity_max: Option<f64>,
    /// Relative tolerance of the potential peak against the collisionless target.
    pub phi_peak_rel_tol: Option<f64>,
    pub oscillation_max: Option<f64>,
    pub bulk_fit_residual_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub name: String,
    pub params: NondimParams,
    pub mesh: Mesh,
    pub scheme: SchemeConfig,
    pub output_dir: PathBuf,
    pub checks: Checks,
    /// The text the configuration was parsed from, unchanged.
    pub source: String,
    /// Overrides applied on top of `source`, in order.
    pub overrides: Vec<String>,
}

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    /// Line in the source, or `None` for an override.
    line: Option<usize>,
}

type Table = BTreeMap<(String, String), Entry>;

fn known(section: &str, key: &str) -> bool {
    SCHEMA.iter().any(|(s, keys)| *s == section && keys.contains(&key))
}

fn tokenize(text: &str) -> Result<Table, Error> {
    let mut table = Table::new();
    let mut section = String::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| Error::Parse { line, message: format!("unterminated section header `{content}`") })?
                .trim();
            if name.is_empty() || !SCHEMA.iter().any(|(s, _)| *s == name) {
                return Err(Error::Parse { line, message: format!("unknown section `[{name}]`") });
            }
            section = name.to_string();
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| Error::Parse { line, message: format!("expected `key = value`, got `{content}`") })?;
        let (key, value) = (key.trim(), value.trim());
        if !known(&section, key) {
            let place = if section.is_empty() { "top level".to_string() } else { format!("section [{section}]") };
            return Err(Error::Parse { line, message: format!("unknown key `{key}` in {place}") });
        }
        if value.is_empty() {
            return Err(Error::Parse { line, message: format!("empty value for `{key}`") });
        }
        let slot = (section.clone(), key.to_string());
        if let Some(prev) = table.get(&slot) {
            let first = prev.line.unwrap_or(0);
            return Err(Error::Parse { line, message: format!("`{key}` already set on line {first}") });
        }
        table.insert(slot, Entry { value: value.to_string(), line: Some(line) });
    }
    Ok(table)
}

fn apply_override(table: &mut Table, spec: &str) -> Result<(), Error> {
    let bad = |message: String| Error::Override { spec: spec.to_string(), message };
    let (path, value) = spec.split_once('=').ok_or_else(|| bad("expected `section.key=value`".into()))?;
    let (section, key) = match path.trim().split_once('.') {
        Some((s, k)) => (s.trim(), k.trim()),
        None => ("", path.trim()),
    };
    if !known(section, key) {
        return Err(bad(format!("unknown key `{}`", path.trim())));
    }
    let value = value.trim();
    if value.is_empty() {
        return Err(bad("empty value".into()));
    }
    let rival = match (section, key) {
        ("output", "snapshot_every_steps") => Some("snapshot_every_time"),
        ("output", "snapshot_every_time") => Some("snapshot_every_steps"),
        _ => None,
    };
    if let Some(rival) = rival {
        table.remove(&("output".to_string(), rival.to_string()));
    }
    table.insert((section.to_string(), key.to_string()), Entry { value: value.to_string(), line: None });
    Ok(())
}

/// Parses a number, allowing `a/b`.
pub fn parse_number(text: &str) -> Option<f64> {
    let value = match text.split_once('/') {
        Some((a, b)) => a.trim().parse::<f64>().ok()? / b.trim().parse::<f64>().ok()?,
        None => text.parse::<f64>().ok()?,
    };
    value.is_finite().then_some(value)
}

struct Reader<'a> {
    table: &'a Table,
}

impl Reader<'_> {
    fn raw(&self, section: &str, key: &str) -> Option<&Entry> {
        self.table.get(&(section.to_string(), key.to_string()))
    }

    fn fail(&self, section: &str, key: &str, message: String) -> Error {
        let name = if section.is_empty() { key.to_string() } else { format!("{section}.{key}") };
        match self.raw(section, key).and_then(|e| e.line) {
            Some(line) => Error::Parse { line, message: format!("{name}: {message}") },
            None => Error::Override { spec: name, message },
        }
    }

    fn parsed<T>(&self, section: &str, key: &str, what: &str, parse: impl Fn(&str) -> Option<T>) -> Result<Option<T>, Error> {
        match self.raw(section, key) {
            None => Ok(None),
            Some(e) => parse(&e.value)
                .map(Some)
                .ok_or_else(|| self.fail(section, key, format!("expected {what}, got `{}`", e.value))),
        }
    }

    fn number(&self, section: &str, key: &str) -> Result<Option<f64>, Error> {
        self.parsed(section, key, "a number", parse_number)
    }

    fn required_number(&self, section: &str, key: &str) -> Result<f64, Error> {
        self.number(section, key)?
            .ok_or_else(|| Error::Invalid(format!("missing required key `{key}` in [{section}]")))
    }

    fn count(&self, section: &str, key: &str) -> Result<Option<u64>, Error> {
        self.parsed(section, key, "a non-negative integer", |s| s.parse::<u64>().ok())
    }

    fn named<T: std::str::FromStr>(&self, section: &str, key: &str) -> Result<Option<T>, Error> {
        match self.raw(section, key) {
            None => Ok(None),
            Some(e) => e.value.parse::<T>().map(Some).map_err(|_| self.fail(section, key, format!("unknown value `{}`", e.value))),
        }
    }

    fn text(&self, section: &str, key: &str) -> Option<String> {
        self.raw(section, key).map(|e| e.value.clone())
    }
}

fn build(table: &Table, source: &str, overrides: &[String]) -> Result<RunConfig, Error> {
    let r = Reader { table };
    let name = r.text("", "name").unwrap_or_else(|| "run".to_string());

    let params = NondimParams::new(
        r.required_number("plasma", "eps")?,
        r.required_number("plasma", "kappa")?,
        r.required_number("plasma", "chi")?,
        r.number("plasma", "macro_to_mfp")?.unwrap_or(0.0),
        r.number("plasma", "sigma_ratio")?.unwrap_or(0.1),
    )
    .map_err(|e| Error::Invalid(e.to_string()))?;

    let n_cells = r
        .count("mesh", "n_cells")?
        .ok_or_else(|| Error::Invalid("missing required key `n_cells` in [mesh]".into()))?;
    let mesh = Mesh::new(n_cells as usize).map_err(|e| Error::Invalid(e.to_string()))?;

    let d = SchemeConfig::default();
    let dt_cap = match r.raw("scheme", "dt_cap").map(|e| e.value.as_str()) {
        None | Some("none") => None,
        Some(_) => r.number("scheme", "dt_cap")?,
    };
    let cadence = match (r.count("output", "snapshot_every_steps")?, r.number("output", "snapshot_every_time")?) {
        (Some(_), Some(_)) => {
            return Err(Error::Invalid("set at most one of snapshot_every_steps and snapshot_every_time".into()))
        }
        (Some(k), None) => Some(Cadence::Steps(k)),
        (None, Some(t)) => Some(Cadence::Time(t)),
        (None, None) => None,
    };
    let scheme = SchemeConfig {
        splitting: r.named::<Splitting>("scheme", "splitting")?.unwrap_or(d.splitting),
        electron_flux: r.named::<FluxScheme>("scheme", "electron_flux")?.unwrap_or(d.electron_flux),
        ion_flux: r.named::<FluxScheme>("scheme", "ion_flux")?.unwrap_or(d.ion_flux),
        electron_bc: r.named::<ElectronBc>("scheme", "electron_bc")?.unwrap_or(d.electron_bc),
        cfl_safety: r.number("scheme", "cfl_safety")?.unwrap_or(d.cfl_safety),
        t_final: r.number("scheme", "t_final")?.unwrap_or(d.t_final),
        dt_cap,
        steady_tol: r.number("scheme", "steady_tol")?.unwrap_or(d.steady_tol),
        steady_window: r.count("scheme", "steady_window")?.unwrap_or(d.steady_window),
        ion_diffusion_tuning: r.number("scheme", "ion_diffusion_tuning")?.unwrap_or(d.ion_diffusion_tuning),
        cadence,
        trace_every: r.count("scheme", "trace_every")?.unwrap_or(d.trace_every),
    };
    scheme.validate().map_err(|e| match e {
        sheath_core::Error::Configuration(msg) => Error::Invalid(msg),
        other => Error::Invalid(other.to_string()),
    })?;

    let checks = Checks {
        ambipolarity_max: r.number("checks", "ambipolarity_max")?,
        phi_peak_rel_tol: r.number("checks", "phi_peak_rel_tol")?,
        oscillation_max: r.number("checks", "oscillation_max")?,
        bulk_fit_residual_max: r.number("checks", "bulk_fit_residual_max")?,
    };

    let output_dir = r.text("output", "dir").map(PathBuf::from).unwrap_or_else(|| PathBuf::from("out").join(&name));

    Ok(RunConfig {
        name,
        params,
        mesh,
        scheme,
        output_dir,
        checks,
        source: source.to_string(),
        overrides: overrides.to_vec(),
    })
}

pub fn parse_config(text: &str) -> Result<RunConfig, Error> {
    parse_config_with_overrides(text, &[])
}

pub fn parse_config_with_overrides(text: &str, overrides: &[String]) -> Result<RunConfig, Error> {
    let mut table = tokenize(text)?;
    for spec in overrides {
        apply_override(&mut table, spec)?;
    }
    build(&table, text, overrides)
}

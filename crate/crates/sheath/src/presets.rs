//! Bundled scenario configurations.

use crate::config::{parse_config_with_overrides, RunConfig};
use crate::Error;

pub const PRESETS: &[(&str, &str)] = &[
    ("hydrogen_collisionless", include_str!("../presets/hydrogen_collisionless.cfg")),
    ("hydrogen_collisional", include_str!("../presets/hydrogen_collisional.cfg")),
    ("argon_collisionless", include_str!("../presets/argon_collisionless.cfg")),
    ("large_domain", include_str!("../presets/large_domain.cfg")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}

pub fn preset_text(name: &str) -> Result<&'static str, Error> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| Error::UnknownPreset(name.to_string()))
}

pub fn preset(name: &str) -> Result<RunConfig, Error> {
    preset_with_overrides(name, &[])
}

pub fn preset_with_overrides(name: &str, overrides: &[String]) -> Result<RunConfig, Error> {
    parse_config_with_overrides(preset_text(name)?, overrides)
}

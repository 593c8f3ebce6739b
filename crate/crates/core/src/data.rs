//! Bundled datasets. Setting `QMASSEY_DATA` to a directory makes files there take precedence.

use std::path::PathBuf;

use crate::error::{Error, Result};

pub const ENV_VAR: &str = "QMASSEY_DATA";

const FILES: &[(&str, &str)] = &[
    ("y_algebra.txt", include_str!("../data/y_algebra.txt")),
    ("y_gw.txt", include_str!("../data/y_gw.txt")),
    ("y_tables.txt", include_str!("../data/y_tables.txt")),
    ("y_mainterm.txt", include_str!("../data/y_mainterm.txt")),
    ("surface_algebra.txt", include_str!("../data/surface_algebra.txt")),
    ("surface_mainterm.txt", include_str!("../data/surface_mainterm.txt")),
];

pub fn bundled(name: &str) -> Option<&'static str> {
    FILES.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn names() -> impl Iterator<Item = &'static str> {
    FILES.iter().map(|(n, _)| *n)
}

/// Reads `name` from the override directory if present there, else the bundled copy.
pub fn load(name: &str) -> Result<String> {
    if let Some(dir) = std::env::var_os(ENV_VAR) {
        let path = PathBuf::from(dir).join(name);
        if path.exists() {
            return Ok(std::fs::read_to_string(&path)?);
        }
    }
    bundled(name).map(str::to_string).ok_or_else(|| Error::Io(format!("no dataset named {name}")))
}

//! `key = value` configuration files with `[section]` headers.
//!
//! Every accepted key is listed in [`SCHEMA`]; anything else is rejected so
//! that a misspelt rule or model name never falls back to a default.

use std::collections::BTreeMap;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::error::CliError;

/// `(section, key)` pairs the parser accepts.
pub const SCHEMA: &[(&str, &str)] = &[
    ("model", "x"),
    ("model", "eps"),
    ("estimator", "kernel"),
    ("estimator", "s"),
    ("estimator", "bandwidth_r"),
    ("estimator", "bandwidth_c"),
    ("threshold", "rule"),
    ("threshold", "c"),
    ("threshold", "beta"),
    ("threshold", "a"),
    ("threshold", "p"),
    ("threshold", "kappa"),
    ("threshold", "delta"),
    ("threshold", "pilot_replicates"),
    ("schedule", "quantity"),
    ("schedule", "n"),
    ("schedule", "m"),
    ("schedule", "pairing"),
    ("schedule", "replicates"),
    ("schedule", "seed"),
    ("schedule", "oracle_y"),
    ("schedule", "fits"),
    ("grid", "t_max"),
    ("grid", "n_points"),
    ("audit", "source"),
    ("audit", "alphas"),
    ("audit", "m"),
    ("audit", "stochastic_replicates"),
    ("audit", "gammas"),
    ("audit", "probes"),
    ("audit", "moment_replicates"),
    ("audit", "kappa"),
    ("estimate", "x_min"),
    ("estimate", "x_max"),
    ("estimate", "x_points"),
];

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Config {
    entries: BTreeMap<(String, String), String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut section: Option<String> = None;
        let mut entries = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = |msg: String| CliError::Config(format!("line {}: {msg}", no + 1));
            if let Some(name) = line.strip_prefix('[') {
                let name = name.strip_suffix(']').ok_or_else(|| at(format!("bad section header `{line}`")))?.trim();
                if !SCHEMA.iter().any(|(s, _)| *s == name) {
                    return Err(at(format!("unknown section `[{name}]`")));
                }
                section = Some(name.to_string());
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| at(format!("expected key = value, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let sec = section.clone().ok_or_else(|| at(format!("`{key}` appears before any section")))?;
            if !SCHEMA.contains(&(sec.as_str(), key)) {
                return Err(at(format!("unknown key `{key}` in [{sec}]")));
            }
            if entries.insert((sec.clone(), key.to_string()), value.to_string()).is_some() {
                return Err(at(format!("duplicate key `{key}` in [{sec}]")));
            }
        }
        Ok(Self { entries })
    }

    pub fn set(&mut self, section: &str, key: &str, value: impl Into<String>) -> Result<(), CliError> {
        if !SCHEMA.contains(&(section, key)) {
            return Err(CliError::Config(format!("unknown key `{section}.{key}`")));
        }
        self.entries.insert((section.to_string(), key.to_string()), value.into());
        Ok(())
    }

    pub fn raw(&self, section: &str, key: &str) -> Option<&str> {
        self.entries.get(&(section.to_string(), key.to_string())).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        self.raw(section, key)
            .map(|v| v.parse::<T>().map_err(|e| CliError::Config(format!("{section}.{key} = `{v}`: {e}"))))
            .transpose()
    }

    pub fn require<T: FromStr>(&self, section: &str, key: &str) -> Result<T, CliError>
    where
        T::Err: std::fmt::Display,
    {
        self.get(section, key)?.ok_or_else(|| CliError::Config(format!("missing {section}.{key}")))
    }

    pub fn list<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<Vec<T>>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        self.raw(section, key)
            .map(|v| {
                v.split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse::<T>().map_err(|e| CliError::Config(format!("{section}.{key}: `{s}`: {e}"))))
                    .collect()
            })
            .transpose()
    }

    /// Sorted `section.key=value` lines.
    pub fn canonical(&self) -> String {
        self.entries.iter().map(|((s, k), v)| format!("{s}.{k}={v}\n")).collect()
    }

    pub fn sha256(&self) -> String {
        Sha256::digest(self.canonical().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Sizes may be written as plain integers, `2^k` or `10^x` (rounded).
pub fn parse_size(s: &str) -> Result<usize, String> {
    let s = s.trim();
    if let Some((b, e)) = s.split_once('^') {
        let base: f64 = b.trim().parse().map_err(|_| format!("bad base in `{s}`"))?;
        let exp: f64 = e.trim().parse().map_err(|_| format!("bad exponent in `{s}`"))?;
        let v = base.powf(exp).round();
        if !(v >= 1.0 && v < 1e12) {
            return Err(format!("`{s}` is out of range"));
        }
        return Ok(v as usize);
    }
    s.parse().map_err(|_| format!("bad size `{s}`"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Size(pub usize);

impl FromStr for Size {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        parse_size(s).map(Size)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_canonicalises() {
        let a = Config::parse("[model]\nx = sym_chi2:k=3  # signal\neps=laplace:b=1\n\n[schedule]\nseed = 4\n").unwrap();
        let b = Config::parse("[schedule]\nseed=4\n[model]\neps = laplace:b=1\nx=sym_chi2:k=3\n").unwrap();
        assert_eq!(a.canonical(), b.canonical());
        assert_eq!(a.sha256(), b.sha256());
        assert_eq!(a.canonical(), "model.eps=laplace:b=1\nmodel.x=sym_chi2:k=3\nschedule.seed=4\n");
    }

    #[test]
    fn rejects_unknown_and_duplicate_keys() {
        for bad in ["[model]\nxx = 1\n", "[modle]\nx = 1\n", "x = 1\n", "[model]\nx = 1\nx = 2\n", "[model]\njunk\n"] {
            assert!(matches!(Config::parse(bad), Err(CliError::Config(_))), "{bad}");
        }
    }

    #[test]
    fn sizes() {
        assert_eq!(parse_size("2^8"), Ok(256));
        assert_eq!(parse_size("10^2.5"), Ok(316));
        assert_eq!(parse_size("17"), Ok(17));
        assert!(parse_size("2^x").is_err());
        let c = Config::parse("[schedule]\nn = 2^8, 2^9,1000\n").unwrap();
        let v: Vec<Size> = c.list("schedule", "n").unwrap().unwrap();
        assert_eq!(v, vec![Size(256), Size(512), Size(1000)]);
    }

    #[test]
    fn override_changes_hash() {
        let mut c = Config::parse("[schedule]\nseed = 1\n").unwrap();
        let h = c.sha256();
        c.set("schedule", "seed", "2").unwrap();
        assert_ne!(c.sha256(), h);
        assert!(c.set("schedule", "sed", "2").is_err());
    }
}

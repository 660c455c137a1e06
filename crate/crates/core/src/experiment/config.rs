//! Flat key-value configuration.
//!
//! Grammar, one entry per line:
//!
//! ```text
//! # comment
//! key = value
//! list_key = 16, 32, 64
//! ```
//!
//! Keys are lower-case words joined by `_` (a `-` is read as `_`). Blank
//! lines and text after `#` are ignored. Later entries override earlier
//! ones, and command-line `--key value` pairs override the file.

use crate::error::{Error, Result};
use crate::rng::derive_seed;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    GenEnv,
    T1,
    Sigma,
    Dirichlet,
    Homog,
    ExitLaw,
    Sinks,
    Stairs,
    Holes,
    DistTail,
    Harnack,
    Osc,
    AbpCheck,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 13] = [
        ExperimentKind::GenEnv,
        ExperimentKind::T1,
        ExperimentKind::Sigma,
        ExperimentKind::Dirichlet,
        ExperimentKind::Homog,
        ExperimentKind::ExitLaw,
        ExperimentKind::Sinks,
        ExperimentKind::Stairs,
        ExperimentKind::Holes,
        ExperimentKind::DistTail,
        ExperimentKind::Harnack,
        ExperimentKind::Osc,
        ExperimentKind::AbpCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::GenEnv => "gen-env",
            ExperimentKind::T1 => "t1",
            ExperimentKind::Sigma => "sigma",
            ExperimentKind::Dirichlet => "dirichlet",
            ExperimentKind::Homog => "homog",
            ExperimentKind::ExitLaw => "exit-law",
            ExperimentKind::Sinks => "sinks",
            ExperimentKind::Stairs => "stairs",
            ExperimentKind::Holes => "holes",
            ExperimentKind::DistTail => "dist-tail",
            ExperimentKind::Harnack => "harnack",
            ExperimentKind::Osc => "osc",
            ExperimentKind::AbpCheck => "abp-check",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| config_err("kind", format!("unknown experiment kind `{s}`")))
    }
}

pub(crate) fn config_err(field: &str, message: impl Into<String>) -> Error {
    Error::Config {
        field: field.to_string(),
        message: message.into(),
    }
}

fn normalize_key(k: &str) -> String {
    k.trim().trim_start_matches("--").replace('-', "_")
}

/// Raw entries in key order.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ConfigMap(pub BTreeMap<String, String>);

impl ConfigMap {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| config_err("config", format!("line {}: expected `key = value`", no + 1)))?;
            let key = normalize_key(k);
            if key.is_empty() || !key.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_') {
                return Err(config_err("config", format!("line {}: bad key `{}`", no + 1, k.trim())));
            }
            map.insert(key, v.trim().to_string());
        }
        Ok(Self(map))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| config_err("config", format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.0.insert(normalize_key(key), value.into());
    }

    /// Applies `--key value` pairs.
    pub fn apply_overrides(&mut self, args: &[String]) -> Result<()> {
        let mut it = args.iter();
        while let Some(k) = it.next() {
            if !k.starts_with("--") {
                return Err(config_err("overrides", format!("expected `--key`, got `{k}`")));
            }
            let v = it
                .next()
                .ok_or_else(|| config_err(&normalize_key(k), "missing value"))?;
            self.set(k, v.clone());
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    pub fn parse_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| config_err(key, format!("cannot parse `{v}`"))),
        }
    }

    pub fn list_or<T: FromStr + Clone>(&self, key: &str, default: &[T]) -> Result<Vec<T>> {
        match self.get(key) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| s.parse().map_err(|_| config_err(key, format!("cannot parse `{s}`"))))
                .collect(),
        }
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool> {
        match self.get(key) {
            None => Ok(default),
            Some("true" | "1" | "yes") => Ok(true),
            Some("false" | "0" | "no") => Ok(false),
            Some(v) => Err(config_err(key, format!("expected true or false, got `{v}`"))),
        }
    }
}

/// Validated common fields plus the raw map for kind-specific parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub law: String,
    pub dim: usize,
    pub sizes: Vec<i64>,
    pub radii: Vec<f64>,
    /// Environment seeds, one task family per seed.
    pub seeds: Vec<u64>,
    pub tol: f64,
    pub out: PathBuf,
    pub jobs: usize,
    pub raw: ConfigMap,
}

impl ExperimentConfig {
    pub fn from_map(kind: ExperimentKind, raw: ConfigMap) -> Result<Self> {
        let dim: usize = raw.parse_or("dim", 2)?;
        if dim == 0 || dim > 16 {
            return Err(config_err("dim", format!("dimension must be in 1..=16, got {dim}")));
        }
        let (default_sizes, default_radii): (&[i64], &[f64]) = match kind {
            ExperimentKind::Sinks => (&[16, 32, 64, 128], &[]),
            ExperimentKind::Holes => (&[64], &[]),
            ExperimentKind::DistTail => (&[96], &[]),
            ExperimentKind::Stairs => (&[16], &[]),
            ExperimentKind::AbpCheck => (&[10], &[]),
            ExperimentKind::Sigma => (&[64], &[]),
            ExperimentKind::GenEnv => (&[32], &[]),
            ExperimentKind::Harnack => (&[], &[8.0, 16.0]),
            ExperimentKind::Osc => (&[], &[8.0]),
            _ => (&[], &[16.0, 32.0]),
        };
        let sizes = raw.list_or("sizes", default_sizes)?;
        if let Some(bad) = sizes.iter().find(|&&s| s <= 0) {
            return Err(config_err("sizes", format!("sizes must be positive, got {bad}")));
        }
        let radii = raw.list_or("radii", default_radii)?;
        if let Some(bad) = radii.iter().find(|&&r| !(r >= 1.0)) {
            return Err(config_err("radii", format!("radii must be at least 1, got {bad}")));
        }
        let seeds = match raw.get("seed_list") {
            Some(_) => raw.list_or::<u64>("seed_list", &[])?,
            None => {
                let master: u64 = raw.parse_or("seed", 0)?;
                let count: usize = raw.parse_or("seeds", 1)?;
                (0..count as u64).map(|i| derive_seed(master, i)).collect()
            }
        };
        if seeds.is_empty() {
            return Err(config_err("seeds", "at least one seed is required"));
        }
        let tol: f64 = raw.parse_or("tol", crate::dirichlet::DEFAULT_TOL)?;
        if !(tol > 0.0) {
            return Err(config_err("tol", format!("tolerance must be positive, got {tol}")));
        }
        let jobs: usize = raw.parse_or("jobs", 1)?;
        if jobs == 0 {
            return Err(config_err("jobs", "parallelism width must be at least 1"));
        }
        let out = PathBuf::from(raw.get("out").unwrap_or("out"));
        Ok(Self {
            kind,
            law: raw.get("law").unwrap_or("axis-choice").to_string(),
            dim,
            sizes,
            radii,
            seeds,
            tol,
            out,
            jobs,
            raw,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar() {
        let m = ConfigMap::parse("# header\nlaw = srw  # trailing\n\nsizes=16, 32\nsizes = 8\nmax-steps = 4\n").unwrap();
        assert_eq!(m.get("law"), Some("srw"));
        assert_eq!(m.list_or::<i64>("sizes", &[]).unwrap(), vec![8]);
        assert_eq!(m.get("max_steps"), Some("4"));
        assert!(ConfigMap::parse("no equals sign").is_err());
    }

    #[test]
    fn overrides_win() {
        let mut m = ConfigMap::parse("seeds = 3\n").unwrap();
        m.apply_overrides(&["--seeds".into(), "5".into(), "--law".into(), "srw".into()]).unwrap();
        assert_eq!(m.get("seeds"), Some("5"));
        assert!(m.apply_overrides(&["--dangling".into()]).is_err());
    }

    #[test]
    fn negative_size_names_the_field() {
        let mut m = ConfigMap::default();
        m.set("sizes", "-4");
        match ExperimentConfig::from_map(ExperimentKind::Sinks, m) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "sizes"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn seeds_from_master() {
        let mut m = ConfigMap::default();
        m.set("seeds", "4");
        m.set("seed", "11");
        let c = ExperimentConfig::from_map(ExperimentKind::Sinks, m).unwrap();
        assert_eq!(c.seeds.len(), 4);
        assert_eq!(c.seeds[2], derive_seed(11, 2));
        assert_eq!("exit-law".parse::<ExperimentKind>().unwrap(), ExperimentKind::ExitLaw);
    }
}

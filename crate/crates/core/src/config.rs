//! Suite configuration: a flat `key = value` file plus overrides.
//!
//! ```text
//! # comments and blank lines are ignored
//! grid.x_min = -30
//! grid.x_max = 30
//! grid.n = 6144
//! lambda.min = -8
//! lambda.max = 8
//! lambda.n = 257
//! contour = both:32:2
//! potentials = zero; sech; chirped_sech:c=1.5
//! bracket.pairs = 0.5+1i : 1+0.5i; -0.7+0.6i : 0.3+1.2i
//! seed = 7
//! tol.unitarity = 1e-8
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{fmt17, Grid, C64, DEFAULT_N, DEFAULT_X_MAX, DEFAULT_X_MIN};
use crate::potentials::{make_potential, parse_potential_spec, Potential};
use crate::scattering::HalfPlane;

/// Environment variable consulted when no `--config` is given.
pub const CONFIG_ENV: &str = "ZS_SCATTER_CONFIG";

/// Tolerance keys and their defaults. `tol.<key>` overrides one.
pub const DEFAULT_TOLERANCES: [(&str, f64); 30] = [
    ("abel", 1e-5),
    ("abel_first_integral", 1e-6),
    ("antisymmetry", 1e-10),
    ("asymptotics", 1e-4),
    ("assu", 1e-4),
    ("bank", 1e-7),
    ("containment", 1e-7),
    ("drift_nls", 1e-6),
    ("drift_x", 1e-8),
    ("fd_bracket", 1e-3),
    ("gluing", 1e-7),
    ("hamiltonian_drift", 1e-7),
    ("identity", 1e-6),
    ("involution", 1e-8),
    ("jost_action", 1e-5),
    ("kernel", 1e-5),
    ("log_roundtrip", 1e-10),
    ("modulus", 1e-8),
    ("pb", 1e-6),
    ("pbpi", 1e-4),
    ("pi_h1", 1e-5),
    ("recover_b", 1e-6),
    ("resolvent", 1e-8),
    ("split_step", 0.05),
    ("third", 1e-5),
    ("trace_decay", 0.125),
    ("unitarity", 1e-8),
    ("vam", 1e-5),
    ("velocity", 1e-5),
    ("velocity_forms", 1e-7),
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaRange {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl LambdaRange {
    pub fn points(&self) -> Vec<f64> {
        let d = (self.max - self.min) / (self.n - 1) as f64;
        (0..self.n).map(|i| self.min + d * i as f64).collect()
    }
}

impl Default for LambdaRange {
    fn default() -> Self {
        Self {
            min: -8.0,
            max: 8.0,
            n: 257,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Banks {
    Upper,
    Lower,
    Both,
}

impl Banks {
    pub fn half_planes(self) -> Vec<HalfPlane> {
        match self {
            Banks::Upper => vec![HalfPlane::Upper],
            Banks::Lower => vec![HalfPlane::Lower],
            Banks::Both => vec![HalfPlane::Upper, HalfPlane::Lower],
        }
    }
}

/// Contours for the log branches: `banks:arc_nodes:refine`, with the real
/// nodes taken from the lambda range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContourSpec {
    pub banks: Banks,
    pub arc_nodes: usize,
    pub refine: usize,
}

impl Default for ContourSpec {
    fn default() -> Self {
        Self {
            banks: Banks::Both,
            arc_nodes: 32,
            refine: 2,
        }
    }
}

impl FromStr for ContourSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let bad = || Error::Config(format!("contour `{s}`: expected banks:arc_nodes:refine"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let banks = match parts[0] {
            "upper" => Banks::Upper,
            "lower" => Banks::Lower,
            "both" => Banks::Both,
            _ => return Err(bad()),
        };
        Ok(Self {
            banks,
            arc_nodes: parts[1].parse().map_err(|_| bad())?,
            refine: parts[2].parse().map_err(|_| bad())?,
        })
    }
}

impl fmt::Display for ContourSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = match self.banks {
            Banks::Upper => "upper",
            Banks::Lower => "lower",
            Banks::Both => "both",
        };
        write!(f, "{b}:{}:{}", self.arc_nodes, self.refine)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub grid: Grid,
    pub lambda_range: LambdaRange,
    pub contour: ContourSpec,
    /// Potential specs, `name` or `name:key=value,...`.
    pub potentials: Vec<String>,
    pub tolerances: BTreeMap<String, f64>,
    /// Drives every randomly drawn sample set.
    pub seed: u64,
    /// `(lambda, mu)` pairs for the bracket suite.
    pub bracket_pairs: Vec<(C64, C64)>,
}

pub fn default_bracket_pairs() -> Vec<(C64, C64)> {
    [
        ((0.5, 1.0), (1.0, 0.5)),
        ((-0.7, 0.6), (0.3, 1.2)),
        ((0.2, 0.8), (-1.0, 1.0)),
        ((1.5, 0.7), (0.8, 1.5)),
        ((-0.3, 1.5), (0.4, 0.4)),
        ((0.0, 1.0), (0.0, 2.0)),
    ]
    .iter()
    .map(|&((a, b), (c, d))| (C64::new(a, b), C64::new(c, d)))
    .collect()
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            grid: Grid::new(DEFAULT_X_MIN, DEFAULT_X_MAX, DEFAULT_N).expect("default grid"),
            lambda_range: LambdaRange::default(),
            contour: ContourSpec::default(),
            potentials: vec!["zero".into(), "sech".into(), "chirped_sech".into()],
            tolerances: DEFAULT_TOLERANCES.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            seed: 0,
            bracket_pairs: default_bracket_pairs(),
        }
    }
}

fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{v}`")))
}

fn parse_pairs(v: &str) -> Result<Vec<(C64, C64)>> {
    v.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|pair| {
            let (l, m) = pair
                .split_once(':')
                .ok_or_else(|| Error::Config(format!("bracket pair `{pair}`: expected lambda:mu")))?;
            let parse = |s: &str| -> Result<C64> {
                let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
                t.parse()
                    .map_err(|_| Error::Config(format!("bracket pair: `{s}` is not a complex number")))
            };
            Ok((parse(l)?, parse(m)?))
        })
        .collect()
}

fn fmt_complex(z: C64) -> String {
    format!("{}{}{}i", fmt17(z.re), if z.im < 0.0 { "-" } else { "+" }, fmt17(z.im.abs()))
}

impl SuiteConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim();
        let value = value.trim();
        let (x_min, x_max, n) = (self.grid.x_min(), self.grid.x_max(), self.grid.n());
        match key {
            "grid.x_min" => self.grid = Grid::new(num(key, value)?, x_max, n).map_err(config_err)?,
            "grid.x_max" => self.grid = Grid::new(x_min, num(key, value)?, n).map_err(config_err)?,
            "grid.n" => self.grid = Grid::new(x_min, x_max, num(key, value)?).map_err(config_err)?,
            "lambda.min" => self.lambda_range.min = num(key, value)?,
            "lambda.max" => self.lambda_range.max = num(key, value)?,
            "lambda.n" => self.lambda_range.n = num(key, value)?,
            "contour" => self.contour = value.parse()?,
            "potentials" => {
                self.potentials = value
                    .split(';')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(String::from)
                    .collect()
            }
            "seed" => self.seed = num(key, value)?,
            "bracket.pairs" => self.bracket_pairs = parse_pairs(value)?,
            _ => match key.strip_prefix("tol.") {
                Some(t) if self.tolerances.contains_key(t) => {
                    self.tolerances.insert(t.to_string(), num(key, value)?);
                }
                Some(t) => return Err(Error::Config(format!("unknown tolerance `{t}`"))),
                None => return Err(Error::Config(format!("unknown key `{key}`"))),
            },
        }
        Ok(())
    }

    /// Applies `key=value` (or `key = value`).
    pub fn set_pair(&mut self, kv: &str) -> Result<()> {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override `{kv}`: expected key=value")))?;
        self.set(k, v)
    }

    pub fn from_kv_str(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            if let Some(prev) = seen.insert(k.trim().to_string(), lineno + 1) {
                return Err(Error::Config(format!(
                    "line {}: `{}` already set on line {prev}",
                    lineno + 1,
                    k.trim()
                )));
            }
            cfg.set(k, v)
                .map_err(|e| Error::Config(format!("line {}: {}", lineno + 1, strip(e))))?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_kv_str(&text)
    }

    /// `path`, else the file named by `ZS_SCATTER_CONFIG`, else defaults.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            Some(p) => Self::from_file(p),
            None => match std::env::var_os(CONFIG_ENV) {
                Some(p) if !p.is_empty() => Self::from_file(Path::new(&p)),
                _ => Ok(Self::default()),
            },
        }
    }

    pub fn tol(&self, key: &str) -> f64 {
        *self
            .tolerances
            .get(key)
            .unwrap_or_else(|| panic!("tolerance `{key}` is not registered"))
    }

    pub fn validate(&self) -> Result<()> {
        for (k, v) in &self.tolerances {
            if !(v.is_finite() && *v > 0.0) {
                return Err(Error::Config(format!("tolerance `{k}` must be positive, got {v}")));
            }
        }
        let r = &self.lambda_range;
        if !(r.min.is_finite() && r.max.is_finite() && r.min < r.max) || r.n < 2 {
            return Err(Error::Config(format!(
                "lambda range needs finite min < max and n >= 2, got ({}, {}, {})",
                r.min, r.max, r.n
            )));
        }
        if self.contour.arc_nodes == 0 {
            return Err(Error::Config("contour needs at least one arc node".into()));
        }
        if self.potentials.is_empty() {
            return Err(Error::Config("no potentials selected".into()));
        }
        let mut names = self.potentials.clone();
        names.sort();
        names.dedup();
        if names.len() != self.potentials.len() {
            return Err(Error::Config("duplicate potential in the list".into()));
        }
        for s in &self.potentials {
            parse_potential_spec(s).map_err(|e| Error::Config(format!("potential `{s}`: {}", strip(e))))?;
        }
        if self.bracket_pairs.is_empty() {
            return Err(Error::Config("no bracket pairs".into()));
        }
        for (l, m) in &self.bracket_pairs {
            if l == m {
                return Err(Error::Config(format!("bracket pair coalesces at {}", fmt_complex(*l))));
            }
            if l.im <= 0.0 || m.im <= 0.0 {
                return Err(Error::Config(format!(
                    "bracket pair ({}, {}) must lie in the upper half-plane",
                    fmt_complex(*l),
                    fmt_complex(*m)
                )));
            }
        }
        Ok(())
    }

    /// Samples every configured potential; failures are configuration errors.
    pub fn potentials(&self) -> Result<Vec<(String, Potential)>> {
        self.potentials
            .iter()
            .map(|s| {
                let (kind, params) = parse_potential_spec(s).map_err(config_err)?;
                let p = make_potential(kind, &params, self.grid)
                    .map_err(|e| Error::Config(format!("potential `{s}`: {}", strip(e))))?;
                Ok((s.clone(), p))
            })
            .collect()
    }

    /// Every setting as sorted `key -> value` strings (the report echo).
    pub fn to_map(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("grid.x_min".into(), fmt17(self.grid.x_min()));
        m.insert("grid.x_max".into(), fmt17(self.grid.x_max()));
        m.insert("grid.n".into(), self.grid.n().to_string());
        m.insert("lambda.min".into(), fmt17(self.lambda_range.min));
        m.insert("lambda.max".into(), fmt17(self.lambda_range.max));
        m.insert("lambda.n".into(), self.lambda_range.n.to_string());
        m.insert("contour".into(), self.contour.to_string());
        m.insert("potentials".into(), self.potentials.join("; "));
        m.insert("seed".into(), self.seed.to_string());
        let pairs: Vec<String> = self
            .bracket_pairs
            .iter()
            .map(|(l, m)| format!("{}:{}", fmt_complex(*l), fmt_complex(*m)))
            .collect();
        m.insert("bracket.pairs".into(), pairs.join("; "));
        for (k, v) in &self.tolerances {
            m.insert(format!("tol.{k}"), fmt17(*v));
        }
        m
    }

    /// The flat file form; `from_kv_str(to_kv_string())` reproduces `self`.
    pub fn to_kv_string(&self) -> String {
        self.to_map().iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

fn strip(e: Error) -> String {
    match e {
        Error::Config(s) => s,
        other => other.to_string(),
    }
}

fn config_err(e: Error) -> Error {
    Error::Config(strip(e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_through_text() {
        let mut cfg = SuiteConfig::default();
        cfg.set("seed", "42").unwrap();
        cfg.set("potentials", "sech:A=0.3,w=2; zero").unwrap();
        cfg.set("tol.unitarity", "1e-9").unwrap();
        cfg.set("contour", "upper:16:1").unwrap();
        let back = SuiteConfig::from_kv_str(&cfg.to_kv_string()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(SuiteConfig::from_kv_str("grid.n = 4").is_err());
        assert!(SuiteConfig::from_kv_str("nonsense = 1").is_err());
        assert!(SuiteConfig::from_kv_str("tol.nope = 1").is_err());
        assert!(SuiteConfig::from_kv_str("seed = 1\nseed = 2").is_err());
        let mut cfg = SuiteConfig::default();
        cfg.set("tol.vam", "-1").unwrap();
        assert!(cfg.validate().is_err());
        let mut cfg = SuiteConfig::default();
        cfg.set("bracket.pairs", "1+1i:1+1i").unwrap();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn comments_and_blank_lines() {
        let cfg = SuiteConfig::from_kv_str("# header\n\nseed = 3 # trailing\n").unwrap();
        assert_eq!(cfg.seed, 3);
        SuiteConfig::default().validate().unwrap();
    }
}

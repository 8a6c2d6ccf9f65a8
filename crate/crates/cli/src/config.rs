//! Flat `key = value` experiment configuration.
//!
//! A config file holds one assignment per line; `#` starts a comment. The
//! command line adds assignments after the file, and the last assignment of a
//! key wins. Keys are either global (listed in [`GLOBAL_KEYS`]) or belong to
//! the chosen suite; anything else is rejected.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::suites::{Param, ParamKind, Suite};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("no suite given (use --suite or `suite = ...`)")]
    MissingSuite,
    #[error("unknown suite `{0}` (see --list-suites)")]
    UnknownSuite(String),
    #[error("unknown key `{key}` for suite {suite}")]
    UnknownKey { key: String, suite: String },
    #[error("bad value for `{key}`: {message}")]
    BadValue { key: String, message: String },
}

fn bad(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::BadValue {
        key: key.to_string(),
        message: message.into(),
    }
}

/// Keys accepted by every suite, with defaults and a short description.
pub const GLOBAL_KEYS: &[(&str, &str, &str)] = &[
    ("suite", "", "suite name"),
    ("seed", "1", "first seed; seeds are seed, seed+1, ..."),
    ("replicates", "20", "number of seeds"),
    (
        "seeds",
        "",
        "explicit comma-separated seed list, overriding seed and replicates",
    ),
    ("n", "100000", "sample size per seed"),
    ("bins", "20", "bins per axis of the independence table"),
    ("level", "0.01", "significance level of each test"),
    (
        "min_passes",
        "",
        "seeds that must pass each check (90% of seeds, rounded up, if unset)",
    ),
    ("out", "", "report path (stdout if unset)"),
    ("jobs", "0", "worker threads (0: one per core)"),
    ("timing", "false", "record wall times in the report"),
];

/// Reads assignments from a config file.
pub fn read_config_file(path: &Path) -> Result<Vec<(String, String)>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_assignments(&text)
}

pub fn parse_assignments(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        out.push(parse_assignment(line).ok_or_else(|| ConfigError::Syntax {
            line: i + 1,
            text: raw.to_string(),
        })?);
    }
    Ok(out)
}

/// `key=value`, as given to `--set`.
pub fn parse_assignment(text: &str) -> Option<(String, String)> {
    let (k, v) = text.split_once('=')?;
    let k = k.trim();
    if k.is_empty() {
        return None;
    }
    Some((k.to_ascii_lowercase(), v.trim().to_string()))
}

/// A validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub suite: Suite,
    /// Suite parameters in canonical text form.
    pub parameters: BTreeMap<String, String>,
    pub seeds: Vec<u64>,
    pub n: usize,
    pub bins: usize,
    pub level: f64,
    pub min_passes: usize,
    pub output_path: Option<PathBuf>,
    pub jobs: usize,
    pub timing: bool,
}

/// Shortest round-trip text of `x`, in exponent form when very small or large.
pub fn fmt_num(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && !(1e-4..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64, ConfigError> {
    let x: f64 = v.parse().map_err(|_| bad(key, format!("`{v}` is not a number")))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(bad(key, "must be finite"))
    }
}

fn parse_count(key: &str, v: &str) -> Result<usize, ConfigError> {
    v.parse()
        .map_err(|_| bad(key, format!("`{v}` is not a nonnegative integer")))
}

fn parse_seed(key: &str, v: &str) -> Result<u64, ConfigError> {
    v.trim()
        .parse()
        .map_err(|_| bad(key, format!("`{v}` is not a 64-bit seed")))
}

fn canonical(p: &Param, v: &str) -> Result<String, ConfigError> {
    match p.kind {
        ParamKind::Number => Ok(fmt_num(parse_f64(p.key, v)?)),
        ParamKind::Count => Ok(parse_count(p.key, v)?.to_string()),
        ParamKind::List => {
            if v.is_empty() {
                return Ok(String::new());
            }
            let xs = v
                .split(',')
                .map(|s| parse_f64(p.key, s.trim()))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(xs.iter().map(|&x| fmt_num(x)).collect::<Vec<_>>().join(","))
        }
        ParamKind::Choice(options) => {
            let v = v.to_ascii_lowercase();
            if options.contains(&v.as_str()) {
                Ok(v)
            } else {
                Err(bad(p.key, format!("`{v}` is not one of {}", options.join(", "))))
            }
        }
    }
}

impl ExperimentConfig {
    /// Resolves assignments (later ones win) into a checked configuration.
    pub fn resolve(assignments: &[(String, String)]) -> Result<Self, ConfigError> {
        let mut map: BTreeMap<&str, &str> = BTreeMap::new();
        for (k, v) in assignments {
            map.insert(k, v);
        }
        let name = map
            .get("suite")
            .copied()
            .filter(|s| !s.is_empty())
            .ok_or(ConfigError::MissingSuite)?;
        let suite: Suite = name.parse().map_err(|_| ConfigError::UnknownSuite(name.to_string()))?;
        let params = suite.params();
        for key in map.keys() {
            if !GLOBAL_KEYS.iter().any(|(g, _, _)| g == key) && !params.iter().any(|p| p.key == *key) {
                return Err(ConfigError::UnknownKey {
                    key: key.to_string(),
                    suite: suite.name().to_string(),
                });
            }
        }
        let global = |key: &str| -> &str {
            map.get(key).copied().unwrap_or_else(|| {
                GLOBAL_KEYS
                    .iter()
                    .find(|(g, _, _)| *g == key)
                    .map(|g| g.1)
                    .unwrap_or("")
            })
        };

        let seeds: Vec<u64> = if !global("seeds").is_empty() {
            global("seeds")
                .split(',')
                .map(|s| parse_seed("seeds", s))
                .collect::<Result<_, _>>()?
        } else {
            let first = parse_seed("seed", global("seed"))?;
            let count = parse_count("replicates", global("replicates"))?;
            (0..count as u64).map(|i| first.wrapping_add(i)).collect()
        };
        if seeds.is_empty() {
            return Err(bad("seeds", "at least one seed is needed"));
        }
        let n = parse_count("n", global("n"))?;
        let bins = parse_count("bins", global("bins"))?;
        let level = parse_f64("level", global("level"))?;
        if !(level > 0.0 && level < 1.0) {
            return Err(bad("level", "must lie in (0, 1)"));
        }
        let min_passes = match global("min_passes") {
            "" => (seeds.len() * 9).div_ceil(10),
            v => parse_count("min_passes", v)?,
        };
        if min_passes > seeds.len() {
            return Err(bad("min_passes", format!("exceeds the {} seeds", seeds.len())));
        }
        if suite.sampled() {
            if n < lwmy::verifier::MIN_CHECK_SIZE {
                return Err(bad("n", format!("must be at least {}", lwmy::verifier::MIN_CHECK_SIZE)));
            }
            if bins < 5 || bins * bins > n {
                return Err(bad("bins", "need 5 ≤ bins and bins² ≤ n"));
            }
        }
        let timing = match global("timing").to_ascii_lowercase().as_str() {
            "true" | "1" | "yes" => true,
            "false" | "0" | "no" => false,
            other => return Err(bad("timing", format!("`{other}` is not a boolean"))),
        };

        let mut parameters = BTreeMap::new();
        for p in params {
            let raw = map.get(p.key).copied().unwrap_or(p.default);
            parameters.insert(p.key.to_string(), canonical(p, raw)?);
        }
        let cfg = ExperimentConfig {
            suite,
            parameters,
            seeds,
            n,
            bins,
            level,
            min_passes,
            output_path: Some(global("out")).filter(|s| !s.is_empty()).map(PathBuf::from),
            jobs: parse_count("jobs", global("jobs"))?,
            timing,
        };
        suite.validate(&cfg).map_err(|e| bad(suite.name(), e.to_string()))?;
        Ok(cfg)
    }

    /// A numeric suite parameter.
    pub fn num(&self, key: &str) -> f64 {
        self.parameters[key].parse().expect("validated at resolve time")
    }

    pub fn count(&self, key: &str) -> usize {
        self.parameters[key].parse().expect("validated at resolve time")
    }

    pub fn text(&self, key: &str) -> &str {
        &self.parameters[key]
    }

    pub fn list(&self, key: &str) -> Vec<f64> {
        let v = self.text(key);
        if v.is_empty() {
            Vec::new()
        } else {
            v.split(',')
                .map(|s| s.parse().expect("validated at resolve time"))
                .collect()
        }
    }
}

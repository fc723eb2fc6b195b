//! Sweep configuration and its flat `key = value` file format.
//!
//! ```text
//! # comment
//! count = 500
//! items = 1..8
//! weight_model = category-mix
//! category_weights = 1, 2, 2, 2
//! algorithms = simple, randchoice
//! ```
//!
//! Command-line flags use the same keys (with `-` for `_`) and are applied on
//! top of the file.

use std::collections::BTreeMap;
use std::path::PathBuf;

use num_traits::Signed;

use super::HarnessError;
use crate::algorithms::AlgorithmId;
use crate::oracle::OracleConfig;
use crate::rat::{parse_rat, rat, Rat};

pub type Settings = BTreeMap<String, String>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WeightModel {
    /// `k/D` with `k` uniform in `1..=D`.
    UniformRational { max_denominator: u64 },
    /// Picks a RandChoice category with the given relative frequencies
    /// (G, S, M, L), then a uniform point `k/D` inside it.
    CategoryMix {
        frequencies: [u32; 4],
        max_denominator: u64,
    },
    /// `1/a_i + k ε` with `i` uniform in `1..=levels` and `k` in `-2..=2`.
    SylvesterAdjacent { eps: Rat, levels: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValueModel {
    Proportional,
    /// `k/D` with `k` uniform in `1..=D`.
    UniformRational {
        max_denominator: u64,
    },
    /// `weight · ρ_max · k/100` with `k` uniform in `1..=100`.
    DensityBounded {
        rho_max: Rat,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepConfig {
    pub count: u64,
    pub items_min: usize,
    pub items_max: usize,
    pub weight_model: WeightModel,
    pub value_model: ValueModel,
    pub seed: u64,
    pub oracle: OracleConfig,
    /// Worker threads; `None` falls back to `UKR_THREADS`, then to rayon's
    /// default.
    pub threads: Option<usize>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            count: 500,
            items_min: 1,
            items_max: 8,
            weight_model: WeightModel::UniformRational { max_denominator: 360 },
            value_model: ValueModel::Proportional,
            seed: 0,
            oracle: OracleConfig::default(),
            threads: None,
        }
    }
}

impl SweepConfig {
    pub fn is_proportional(&self) -> bool {
        self.value_model == ValueModel::Proportional
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if self.items_min == 0 || self.items_min > self.items_max {
            return bad(format!("empty item range {}..{}", self.items_min, self.items_max));
        }
        match &self.weight_model {
            WeightModel::UniformRational { max_denominator } if *max_denominator == 0 => {
                return bad("max_denominator must be positive".into())
            }
            WeightModel::CategoryMix { frequencies, .. } if frequencies.iter().all(|f| *f == 0) => {
                return bad("category_weights are all zero".into())
            }
            WeightModel::SylvesterAdjacent { eps, levels } => {
                if *levels == 0 || *levels > 6 {
                    return bad(format!("sylvester_levels must be in 1..=6, got {levels}"));
                }
                let a = crate::bounds::sylvester(*levels);
                let limit = Rat::new(1.into(), a * 2u32);
                if !eps.is_positive() || *eps >= limit {
                    return bad(format!("eps must satisfy 0 < eps < {limit}"));
                }
            }
            _ => {}
        }
        match &self.value_model {
            ValueModel::UniformRational { max_denominator } if *max_denominator == 0 => {
                bad("value_denominator must be positive".into())
            }
            ValueModel::DensityBounded { rho_max } if !rho_max.is_positive() => bad("rho_max must be positive".into()),
            _ => Ok(()),
        }
    }
}

/// A sweep plus what to run on it and where to write rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepPlan {
    pub config: SweepConfig,
    pub algorithms: Vec<AlgorithmId>,
    pub output: Option<PathBuf>,
}

/// Parses `key = value` lines; `#` starts a comment, blank lines are
/// ignored, later keys override earlier ones.
pub fn parse_settings(text: &str) -> Result<Settings, HarnessError> {
    let mut out = Settings::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| HarnessError::Config(format!("line {}: expected key = value", n + 1)))?;
        out.insert(normalize_key(k), v.trim().to_string());
    }
    Ok(out)
}

pub fn normalize_key(k: &str) -> String {
    k.trim().replace('-', "_")
}

pub const KNOWN_KEYS: [&str; 17] = [
    "count",
    "items",
    "items_min",
    "items_max",
    "weight_model",
    "max_denominator",
    "category_weights",
    "eps",
    "sylvester_levels",
    "value_model",
    "value_denominator",
    "rho_max",
    "seed",
    "algorithms",
    "output",
    "threads",
    "node_budget",
];

fn get<T: std::str::FromStr>(s: &Settings, key: &str, default: T) -> Result<T, HarnessError> {
    match s.get(key) {
        None => Ok(default),
        Some(v) => v
            .parse()
            .map_err(|_| HarnessError::Config(format!("{key}: cannot parse {v:?}"))),
    }
}

fn get_rat(s: &Settings, key: &str, default: Rat) -> Result<Rat, HarnessError> {
    match s.get(key) {
        None => Ok(default),
        Some(v) => parse_rat(v).map_err(|e| HarnessError::Config(format!("{key}: {e}"))),
    }
}

fn parse_range(v: &str) -> Option<(usize, usize)> {
    match v.split_once("..") {
        Some((a, b)) => Some((a.trim().parse().ok()?, b.trim().trim_start_matches('=').parse().ok()?)),
        None => {
            let n = v.trim().parse().ok()?;
            Some((n, n))
        }
    }
}

impl SweepPlan {
    /// Builds a plan from settings, with defaults for missing keys.
    pub fn from_settings(s: &Settings) -> Result<Self, HarnessError> {
        if let Some(k) = s.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
            return Err(HarnessError::Config(format!("unknown key {k:?}")));
        }
        let d = SweepConfig::default();
        let (mut items_min, mut items_max) = (d.items_min, d.items_max);
        if let Some(v) = s.get("items") {
            (items_min, items_max) =
                parse_range(v).ok_or_else(|| HarnessError::Config(format!("items: cannot parse range {v:?}")))?;
        }
        items_min = get(s, "items_min", items_min)?;
        items_max = get(s, "items_max", items_max)?;

        let max_denominator = get(s, "max_denominator", 360u64)?;
        let weight_model = match s.get("weight_model").map(String::as_str).unwrap_or("uniform") {
            "uniform" | "uniform-rational" => WeightModel::UniformRational { max_denominator },
            "category-mix" => {
                let raw = s.get("category_weights").map(String::as_str).unwrap_or("1,1,1,1");
                let parts: Vec<u32> = raw
                    .split(',')
                    .map(|p| p.trim().parse())
                    .collect::<Result<_, _>>()
                    .map_err(|_| HarnessError::Config(format!("category_weights: cannot parse {raw:?}")))?;
                let frequencies: [u32; 4] = parts
                    .try_into()
                    .map_err(|_| HarnessError::Config("category_weights needs four entries (G, S, M, L)".into()))?;
                WeightModel::CategoryMix {
                    frequencies,
                    max_denominator,
                }
            }
            "sylvester-adjacent" => WeightModel::SylvesterAdjacent {
                eps: get_rat(s, "eps", rat(1, 180_600))?,
                levels: get(s, "sylvester_levels", 4usize)?,
            },
            other => return Err(HarnessError::Config(format!("unknown weight_model {other:?}"))),
        };
        let value_model = match s.get("value_model").map(String::as_str).unwrap_or("proportional") {
            "proportional" => ValueModel::Proportional,
            "uniform" | "uniform-rational" => ValueModel::UniformRational {
                max_denominator: get(s, "value_denominator", 360u64)?,
            },
            "density-bounded" => ValueModel::DensityBounded {
                rho_max: get_rat(s, "rho_max", rat(2, 1))?,
            },
            other => return Err(HarnessError::Config(format!("unknown value_model {other:?}"))),
        };
        let threads = match s.get("threads") {
            None => None,
            Some(_) => Some(get(s, "threads", 0usize)?).filter(|t| *t > 0),
        };
        let config = SweepConfig {
            count: get(s, "count", d.count)?,
            items_min,
            items_max,
            weight_model,
            value_model,
            seed: get(s, "seed", d.seed)?,
            oracle: OracleConfig {
                node_budget: get(s, "node_budget", d.oracle.node_budget)?,
                ..d.oracle
            },
            threads,
        };
        config.validate()?;

        let algorithms = s
            .get("algorithms")
            .map(String::as_str)
            .unwrap_or("simple")
            .split(',')
            .map(str::trim)
            .filter(|a| !a.is_empty())
            .map(|a| {
                a.parse::<AlgorithmId>()
                    .map_err(|e| HarnessError::Config(e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let output = s.get("output").filter(|o| !o.is_empty()).map(PathBuf::from);
        Ok(Self {
            config,
            algorithms,
            output,
        })
    }
}

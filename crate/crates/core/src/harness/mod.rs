//! Seeded random sweeps: instance generation, per-row ratios and margins,
//! CSV output.
//!
//! Instance `i` of a sweep is drawn from a ChaCha8 stream selected by `i`
//! under the configured seed, so every instance depends only on
//! `(config, seed, i)` and rows can be computed in any order.

mod config;
pub mod verify;

use std::collections::BTreeMap;
use std::fmt;
use std::io;

use num_traits::{Signed, Zero};
use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use config::{
    normalize_key, parse_settings, Settings, SweepConfig, SweepPlan, ValueModel, WeightModel, KNOWN_KEYS,
};

use crate::algorithms::{AlgorithmId, SizeCategory};
use crate::bounds::{sylvester, t_value};
use crate::model::{Instance, Item, ModelError};
use crate::oracle::{self, OracleError, RatioError};
use crate::rat::{format_rat, parse_rat, rat, to_decimal, Rat};
use crate::replay::ReplayError;

/// Environment variable read for the default worker count.
pub const THREADS_ENV: &str = "UKR_THREADS";

/// Depth of the finite surrogate `T_N ≥ S_∞` used as Focus's bound.
pub const FOCUS_BOUND_DEPTH: usize = 6;

/// Digits of the convenience decimal column.
pub const DECIMAL_DIGITS: usize = 20;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{algorithm} only accepts proportional instances, but the sweep generates general ones")]
    ProportionalMismatch { algorithm: AlgorithmId },
    #[error("instance {index}: {source}")]
    Replay { index: u64, source: ReplayError },
    #[error("instance {index}, {algorithm}: {source}")]
    Ratio {
        index: u64,
        algorithm: AlgorithmId,
        source: RatioError,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("csv row {row}: {message}")]
    CsvField { row: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("thread pool: {0}")]
    Threads(String),
}

/// Numerators `k` with `k/D` in each category, in `G, S, M, L` order.
fn category_grid(d: u64) -> [Vec<u64>; 4] {
    let mut grid: [Vec<u64>; 4] = Default::default();
    for k in 1..=d {
        let slot = match SizeCategory::of(&rat(k as i64, d as i64)) {
            SizeCategory::G => 0,
            SizeCategory::S => 1,
            SizeCategory::M => 2,
            SizeCategory::L => 3,
        };
        grid[slot].push(k);
    }
    grid
}

enum WeightSampler {
    Uniform(u64),
    Mix {
        pick: WeightedIndex<u32>,
        grid: [Vec<u64>; 4],
        d: u64,
    },
    Sylvester {
        eps: Rat,
        reciprocals: Vec<Rat>,
    },
}

impl WeightSampler {
    fn new(model: &WeightModel) -> Result<Self, HarnessError> {
        Ok(match model {
            WeightModel::UniformRational { max_denominator } => Self::Uniform(*max_denominator),
            WeightModel::CategoryMix {
                frequencies,
                max_denominator,
            } => {
                let grid = category_grid(*max_denominator);
                for (f, (pts, name)) in frequencies.iter().zip(grid.iter().zip(["G", "S", "M", "L"])) {
                    if *f > 0 && pts.is_empty() {
                        return Err(HarnessError::Config(format!(
                            "category {name} has no weights k/{max_denominator}"
                        )));
                    }
                }
                let pick = WeightedIndex::new(frequencies.iter().copied())
                    .map_err(|e| HarnessError::Config(format!("category_weights: {e}")))?;
                Self::Mix {
                    pick,
                    grid,
                    d: *max_denominator,
                }
            }
            WeightModel::SylvesterAdjacent { eps, levels } => Self::Sylvester {
                eps: eps.clone(),
                reciprocals: (1..=*levels).map(|i| Rat::new(1.into(), sylvester(i))).collect(),
            },
        })
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> Rat {
        match self {
            Self::Uniform(d) => rat(rng.gen_range(1..=*d) as i64, *d as i64),
            Self::Mix { pick, grid, d } => {
                let pts = &grid[pick.sample(rng)];
                rat(pts[rng.gen_range(0..pts.len())] as i64, *d as i64)
            }
            Self::Sylvester { eps, reciprocals } => {
                let base = &reciprocals[rng.gen_range(0..reciprocals.len())];
                let k: i64 = rng.gen_range(-2..=2);
                base + eps * rat(k, 1)
            }
        }
    }
}

fn draw_value(model: &ValueModel, weight: &Rat, rng: &mut ChaCha8Rng) -> Rat {
    match model {
        ValueModel::Proportional => weight.clone(),
        ValueModel::UniformRational { max_denominator: d } => rat(rng.gen_range(1..=*d) as i64, *d as i64),
        ValueModel::DensityBounded { rho_max } => weight * rho_max * rat(rng.gen_range(1..=100), 100),
    }
}

fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn generate_with(cfg: &SweepConfig, sampler: &WeightSampler, index: u64) -> Result<Instance, HarnessError> {
    let mut rng = instance_rng(cfg.seed, index);
    let len = rng.gen_range(cfg.items_min..=cfg.items_max);
    let mut items = Vec::with_capacity(len);
    for _ in 0..len {
        let w = sampler.draw(&mut rng);
        let v = draw_value(&cfg.value_model, &w, &mut rng);
        items.push(Item::new(w, v)?);
    }
    Ok(Instance::new(items, cfg.is_proportional())?)
}

/// The `index`-th instance of the sweep described by `cfg`.
pub fn generate_random_instance(cfg: &SweepConfig, index: u64) -> Result<Instance, HarnessError> {
    cfg.validate()?;
    generate_with(cfg, &WeightSampler::new(&cfg.weight_model)?, index)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentRow {
    pub instance_id: u64,
    pub algorithm: String,
    /// Final gain, or exact expected gain for a mixture.
    pub gain: Rat,
    /// `None` when the oracle ran out of budget.
    pub opt: Option<Rat>,
    pub ratio: Option<Rat>,
    /// The proven bound for this algorithm, where one applies.
    pub bound: Option<Rat>,
    /// `bound − ratio`.
    pub margin: Option<Rat>,
    pub skipped: bool,
}

impl ExperimentRow {
    pub fn violates_bound(&self) -> bool {
        self.margin.as_ref().is_some_and(Signed::is_negative)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgorithmSummary {
    pub algorithm: String,
    pub rows: usize,
    pub skipped: usize,
    pub max_ratio: Option<Rat>,
    pub bound: Option<Rat>,
    pub min_margin: Option<Rat>,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SweepSummary {
    pub instances: u64,
    pub per_algorithm: Vec<AlgorithmSummary>,
}

impl SweepSummary {
    pub fn violations(&self) -> usize {
        self.per_algorithm.iter().map(|a| a.violations).sum()
    }

    fn from_rows(instances: u64, algorithms: &[AlgorithmId], rows: &[ExperimentRow]) -> Self {
        let mut by_alg: BTreeMap<&str, Vec<&ExperimentRow>> = BTreeMap::new();
        for r in rows {
            by_alg.entry(r.algorithm.as_str()).or_default().push(r);
        }
        let per_algorithm = algorithms
            .iter()
            .map(|id| {
                let rs = by_alg.remove(id.as_str()).unwrap_or_default();
                AlgorithmSummary {
                    algorithm: id.to_string(),
                    rows: rs.len(),
                    skipped: rs.iter().filter(|r| r.skipped).count(),
                    max_ratio: rs.iter().filter_map(|r| r.ratio.clone()).max(),
                    bound: rs.iter().find_map(|r| r.bound.clone()),
                    min_margin: rs.iter().filter_map(|r| r.margin.clone()).min(),
                    violations: rs.iter().filter(|r| r.violates_bound()).count(),
                }
            })
            .collect();
        Self {
            instances,
            per_algorithm,
        }
    }
}

impl fmt::Display for SweepSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "instances: {}", self.instances)?;
        let show = |r: &Option<Rat>| match r {
            Some(r) => format!("{} ({})", format_rat(r), to_decimal(r, 6)),
            None => "-".into(),
        };
        for a in &self.per_algorithm {
            writeln!(
                f,
                "{:<15} rows {:>6}  skipped {:>4}  max ratio {}  bound {}  min margin {}  violations {}",
                a.algorithm,
                a.rows,
                a.skipped,
                show(&a.max_ratio),
                show(&a.bound),
                show(&a.min_margin),
                a.violations
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SweepResult {
    pub rows: Vec<ExperimentRow>,
    pub summary: SweepSummary,
}

fn rows_for(
    cfg: &SweepConfig,
    sampler: &WeightSampler,
    algorithms: &[AlgorithmId],
    focus_bound: &Rat,
    index: u64,
) -> Result<Vec<ExperimentRow>, HarnessError> {
    let inst = generate_with(cfg, sampler, index)?;
    let opt = match oracle::optimal_with(&inst, &cfg.oracle) {
        Ok(r) => Some(r.optimum),
        Err(OracleError::ResourceLimit { .. }) => None,
    };
    let proportional = inst.is_proportional();
    let mut rows = Vec::with_capacity(algorithms.len());
    for &id in algorithms {
        let gain = id
            .strategy()
            .gain(&inst)
            .map_err(|source| HarnessError::Replay { index, source })?;
        let bound = id.ratio_bound(proportional, focus_bound);
        let ratio = match &opt {
            Some(opt) => Some(oracle::ratio_of(opt, &gain).map_err(|source| HarnessError::Ratio {
                index,
                algorithm: id,
                source,
            })?),
            None => None,
        };
        let margin = match (&bound, &ratio) {
            (Some(b), Some(r)) => Some(b - r),
            _ => None,
        };
        rows.push(ExperimentRow {
            instance_id: index,
            algorithm: id.to_string(),
            gain,
            opt: opt.clone(),
            ratio,
            bound,
            margin,
            skipped: opt.is_none(),
        });
    }
    Ok(rows)
}

fn thread_count(cfg: &SweepConfig) -> Option<usize> {
    cfg.threads.or_else(|| {
        std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .filter(|n: &usize| *n > 0)
    })
}

/// Runs every algorithm on every instance. Rows come out ordered by
/// instance, then by the order of `algorithms`, whatever the thread count.
pub fn run_sweep(cfg: &SweepConfig, algorithms: &[AlgorithmId]) -> Result<SweepResult, HarnessError> {
    cfg.validate()?;
    if !cfg.is_proportional() {
        if let Some(&algorithm) = algorithms.iter().find(|a| a.proportional_only()) {
            return Err(HarnessError::ProportionalMismatch { algorithm });
        }
    }
    let sampler = WeightSampler::new(&cfg.weight_model)?;
    let focus_bound = t_value(FOCUS_BOUND_DEPTH);
    let work = || -> Result<Vec<ExperimentRow>, HarnessError> {
        let chunks: Vec<Vec<ExperimentRow>> = (0..cfg.count)
            .into_par_iter()
            .map(|i| rows_for(cfg, &sampler, algorithms, &focus_bound, i))
            .collect::<Result<_, _>>()?;
        Ok(chunks.into_iter().flatten().collect())
    };
    let rows = match thread_count(cfg) {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| HarnessError::Threads(e.to_string()))?
            .install(work)?,
        None => work()?,
    };
    let summary = SweepSummary::from_rows(cfg.count, algorithms, &rows);
    Ok(SweepResult { rows, summary })
}

pub const CSV_HEADER: [&str; 9] = [
    "instance_id",
    "algorithm",
    "gain",
    "opt",
    "ratio",
    "bound",
    "margin",
    "skipped",
    "ratio_decimal",
];

fn opt_field(r: &Option<Rat>) -> String {
    r.as_ref().map(format_rat).unwrap_or_default()
}

/// Writes rows with rationals as `p/q`; `ratio_decimal` is a rounded
/// convenience copy of `ratio`.
pub fn write_csv<W: io::Write>(rows: &[ExperimentRow], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.instance_id.to_string(),
            r.algorithm.clone(),
            format_rat(&r.gain),
            opt_field(&r.opt),
            opt_field(&r.ratio),
            opt_field(&r.bound),
            opt_field(&r.margin),
            r.skipped.to_string(),
            r.ratio
                .as_ref()
                .map(|x| to_decimal(x, DECIMAL_DIGITS))
                .unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: io::Read>(input: R) -> Result<Vec<ExperimentRow>, HarnessError> {
    let mut rd = csv::Reader::from_reader(input);
    let header = rd.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(HarnessError::CsvField {
            row: 0,
            message: format!("unexpected header {:?}", header.iter().collect::<Vec<_>>()),
        });
    }
    let mut rows = Vec::new();
    for (n, rec) in rd.records().enumerate() {
        let rec = rec?;
        let row = n + 1;
        let bad = |message: String| HarnessError::CsvField { row, message };
        let field = |i: usize| rec.get(i).unwrap_or("");
        let rat_field = |i: usize| parse_rat(field(i)).map_err(|e| bad(e.to_string()));
        let opt_rat = |i: usize| {
            if field(i).is_empty() {
                Ok(None)
            } else {
                rat_field(i).map(Some)
            }
        };
        rows.push(ExperimentRow {
            instance_id: field(0)
                .parse()
                .map_err(|_| bad(format!("instance_id {:?}", field(0))))?,
            algorithm: field(1).to_string(),
            gain: rat_field(2)?,
            opt: opt_rat(3)?,
            ratio: opt_rat(4)?,
            bound: opt_rat(5)?,
            margin: opt_rat(6)?,
            skipped: field(7).parse().map_err(|_| bad(format!("skipped {:?}", field(7))))?,
        });
    }
    Ok(rows)
}

/// Exact expected gain of every row is non-negative; used as a cheap sanity
/// check by callers that only read CSV files.
pub fn rows_are_consistent(rows: &[ExperimentRow]) -> bool {
    rows.iter().all(|r| {
        !r.gain.is_negative()
            && r.skipped == r.opt.is_none()
            && match (&r.opt, &r.ratio) {
                (Some(o), Some(x)) => r.gain.is_zero() || *x == o / &r.gain,
                (None, None) => true,
                _ => false,
            }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::Branch;
    use crate::replay::replay;

    fn small(cfg: SweepConfig) -> SweepConfig {
        SweepConfig { count: 40, ..cfg }
    }

    #[test]
    fn generation_is_deterministic() {
        let cfg = SweepConfig::default();
        assert_eq!(
            generate_random_instance(&cfg, 7).unwrap(),
            generate_random_instance(&cfg, 7).unwrap()
        );
        assert_ne!(
            generate_random_instance(&cfg, 7).unwrap(),
            generate_random_instance(&cfg, 8).unwrap()
        );
        let other = SweepConfig { seed: 1, ..cfg.clone() };
        assert_ne!(
            generate_random_instance(&cfg, 7).unwrap(),
            generate_random_instance(&other, 7).unwrap()
        );
    }

    #[test]
    fn proportional_values_equal_weights() {
        let cfg = SweepConfig::default();
        for i in 0..20 {
            let inst = generate_random_instance(&cfg, i).unwrap();
            assert!(inst.items().iter().all(Item::is_proportional));
            assert!((1..=8).contains(&inst.len()));
            assert!(inst
                .items()
                .iter()
                .all(|x| (num_bigint::BigInt::from(360) % x.weight().denom()).is_zero()));
        }
    }

    #[test]
    fn only_good_items_halt_randchoice_at_once() {
        let cfg = SweepConfig {
            weight_model: WeightModel::CategoryMix {
                frequencies: [1, 0, 0, 0],
                max_denominator: 360,
            },
            ..SweepConfig::default()
        };
        for i in 0..20 {
            let inst = generate_random_instance(&cfg, i).unwrap();
            for b in [Branch::A1, Branch::A2] {
                let (_, trace) = replay(&mut crate::algorithms::randchoice_strategy(b), &inst).unwrap();
                let first = &trace.steps[0].knapsack_after;
                assert!(trace.steps.iter().all(|s| &s.knapsack_after == first));
            }
        }
    }

    #[test]
    fn category_mix_covers_categories() {
        let grid = category_grid(360);
        assert!(grid.iter().all(|g| !g.is_empty()));
        assert_eq!(grid[1].first(), Some(&121));
        let cfg = SweepConfig {
            weight_model: WeightModel::CategoryMix {
                frequencies: [0, 1, 0, 0],
                max_denominator: 8,
            },
            ..SweepConfig::default()
        };
        assert!(matches!(
            generate_random_instance(&cfg, 0),
            Err(HarnessError::Config(_))
        ));
    }

    #[test]
    fn sylvester_adjacent_weights() {
        let cfg = SweepConfig {
            weight_model: WeightModel::SylvesterAdjacent {
                eps: rat(1, 180_600),
                levels: 4,
            },
            value_model: ValueModel::UniformRational { max_denominator: 100 },
            ..SweepConfig::default()
        };
        let inst = generate_random_instance(&cfg, 3).unwrap();
        for x in inst.items() {
            assert!((num_bigint::BigInt::from(180_600) % x.weight().denom()).is_zero());
        }
    }

    #[test]
    fn sweep_rows_are_ordered_and_within_bounds() {
        let algs = [AlgorithmId::Simple, AlgorithmId::RandChoice, AlgorithmId::Focus];
        let res = run_sweep(&small(SweepConfig::default()), &algs).unwrap();
        assert_eq!(res.rows.len(), 120);
        for (k, r) in res.rows.iter().enumerate() {
            assert_eq!(r.instance_id, (k / 3) as u64);
            assert_eq!(r.algorithm, algs[k % 3].as_str());
        }
        assert_eq!(res.summary.violations(), 0);
        assert!(rows_are_consistent(&res.rows));
        assert!(res.summary.per_algorithm[0].max_ratio.clone().unwrap() <= rat(3, 2));
    }

    #[test]
    fn general_sweep_for_focus() {
        let cfg = small(SweepConfig {
            value_model: ValueModel::UniformRational { max_denominator: 360 },
            ..SweepConfig::default()
        });
        let res = run_sweep(&cfg, &[AlgorithmId::Focus, AlgorithmId::GreedyDensity]).unwrap();
        assert_eq!(res.summary.violations(), 0);
        assert_eq!(res.summary.per_algorithm[1].bound, None);
        assert!(matches!(
            run_sweep(&cfg, &[AlgorithmId::Simple]),
            Err(HarnessError::ProportionalMismatch { .. })
        ));
    }

    #[test]
    fn empty_algorithm_list() {
        let res = run_sweep(&small(SweepConfig::default()), &[]).unwrap();
        assert!(res.rows.is_empty());
        assert!(res.summary.per_algorithm.is_empty());
        assert_eq!(res.summary.instances, 40);
    }

    #[test]
    fn thread_count_does_not_change_output() {
        let algs = [AlgorithmId::Focus, AlgorithmId::KeepFirst];
        let one = run_sweep(
            &SweepConfig {
                threads: Some(1),
                ..small(SweepConfig::default())
            },
            &algs,
        )
        .unwrap();
        let four = run_sweep(
            &SweepConfig {
                threads: Some(4),
                ..small(SweepConfig::default())
            },
            &algs,
        )
        .unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn skipped_rows_when_budget_is_tiny() {
        let cfg = SweepConfig {
            count: 10,
            weight_model: WeightModel::SylvesterAdjacent {
                eps: rat(1, 10_000_000),
                levels: 5,
            },
            value_model: ValueModel::UniformRational { max_denominator: 7 },
            oracle: oracle::OracleConfig {
                node_budget: 1,
                ..Default::default()
            },
            ..SweepConfig::default()
        };
        let res = run_sweep(&cfg, &[AlgorithmId::Focus]).unwrap();
        assert!(res.rows.iter().any(|r| r.skipped));
        assert!(res
            .rows
            .iter()
            .filter(|r| r.skipped)
            .all(|r| r.ratio.is_none() && r.margin.is_none()));
        assert_eq!(
            res.summary.per_algorithm[0].skipped,
            res.rows.iter().filter(|r| r.skipped).count()
        );
    }

    #[test]
    fn csv_round_trip() {
        let algs = [AlgorithmId::Simple, AlgorithmId::KeepFirst];
        let res = run_sweep(&small(SweepConfig::default()), &algs).unwrap();
        let mut buf = Vec::new();
        write_csv(&res.rows, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("instance_id,algorithm,gain,opt,ratio,bound,margin,skipped,ratio_decimal\n"));
        assert_eq!(read_csv(buf.as_slice()).unwrap(), res.rows);
        assert!(read_csv("a,b\n1,2\n".as_bytes()).is_err());
    }
}

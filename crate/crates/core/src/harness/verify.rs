//! The built-in verification suite behind `ukr verify`.
//!
//! Twelve checks: sequence and identity facts, the `S_∞` bracket, `c_5`,
//! the upper bounds over seeded sweeps, the adversary games, oracle
//! soundness and sweep determinism. Every comparison is exact.

use std::fmt;

use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{run_sweep, write_csv, SweepConfig, ValueModel, WeightModel};
use crate::adversary::{
    epsilon_ladder, general_adversary, proportional_det_adversary, proportional_pair, tightness_game, yao_experiment,
};
use crate::algorithms::AlgorithmId;
use crate::bounds::{
    check_identities, default_precision, lower_bound_cn, partial_sum_s, s_infinity_bracket, sylvester, DEFAULT_DEPTH,
};
use crate::model::{Instance, Item};
use crate::oracle::{self, OracleConfig};
use crate::rat::{format_rat, rat, to_decimal, Rat};
use crate::replay::replay;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} [{:>2}] {}: {}", self.id, self.name, self.detail)
    }
}

/// Sizes of the sweeps the suite runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyOptions {
    pub sweep_count: u64,
    pub oracle_instances: u64,
    pub seed: u64,
    pub threads: Option<usize>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            sweep_count: 500,
            oracle_instances: 200,
            seed: 0,
            threads: None,
        }
    }
}

type Outcome = Result<String, String>;
type Runner<'a> = Box<dyn Fn() -> Outcome + 'a>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn show(r: &Rat) -> String {
    format!("{} ≈ {}", format_rat(r), to_decimal(r, 8))
}

pub fn sylvester_facts() -> Outcome {
    let first: Vec<String> = (1..=5).map(|n| sylvester(n).to_string()).collect();
    ensure(first == ["2", "3", "7", "43", "1807"], || {
        format!("a_1..a_5 = {first:?}")
    })?;
    let r = check_identities(DEFAULT_DEPTH);
    let bad: Vec<String> = r
        .failures()
        .filter(|c| !c.name.contains("T_"))
        .map(|c| c.name.clone())
        .collect();
    ensure(bad.is_empty(), || format!("failed: {bad:?}"))?;
    Ok(format!(
        "a_1..a_5 = {}; recursion and 1/(a_n − 1) = 1 − Σ 1/a_j for n ≤ {DEFAULT_DEPTH}",
        first.join(", ")
    ))
}

pub fn s_infinity() -> Outcome {
    let (lo, hi) = s_infinity_bracket(5);
    ensure(lo > rat(169_103, 100_000) && hi < rat(169_104, 100_000), || {
        format!("bracket [{}, {}]", show(&lo), show(&hi))
    })?;
    Ok(format!(
        "1.69103 < {} < S_∞ < {} < 1.69104",
        to_decimal(&lo, 10),
        to_decimal(&hi, 10)
    ))
}

pub fn t_identities() -> Outcome {
    let mut checks = 0;
    for n in 1..=DEFAULT_DEPTH {
        let r = check_identities(n);
        let bad: Vec<String> = r.failures().map(|c| c.name.clone()).collect();
        ensure(bad.is_empty(), || format!("N = {n}: {bad:?}"))?;
        checks += r.checks.len();
    }
    Ok(format!("{checks} exact checks for N ≤ {DEFAULT_DEPTH}"))
}

/// `c_N` for `N = 3` by a plain scan of `P` at step `1/10^6` from 2 down,
/// independent of the bracketing solver.
fn dense_scan_c3() -> Rat {
    let poly = crate::bounds::polynomial(3);
    let step = rat(1, 1_000_000);
    let mut c = rat(2, 1);
    while !poly.eval(&c).is_negative() {
        c -= &step;
    }
    c
}

pub fn lower_bound_constant() -> Outcome {
    let c5 = lower_bound_cn(5, &default_precision()).map_err(|e| e.to_string())?;
    ensure(c5.c_lo > rat(15_877, 10_000), || {
        format!("c_5 bracket starts at {}", show(&c5.c_lo))
    })?;
    ensure(c5.residuals_within_tolerance(), || {
        format!(
            "max residual {} above tolerance {}",
            show(&c5.max_residual()),
            show(&c5.tolerance)
        )
    })?;
    let c3 = lower_bound_cn(3, &default_precision()).map_err(|e| e.to_string())?;
    let scan = dense_scan_c3();
    let gap = if scan > c3.c { &scan - &c3.c } else { &c3.c - &scan };
    ensure(gap <= rat(1, 1_000_000), || {
        format!("c_3 = {} but the scan gives {}", show(&c3.c), show(&scan))
    })?;
    Ok(format!(
        "c_5 ∈ [{}, {}], c_3 matches a dense scan",
        to_decimal(&c5.c_lo, 10),
        to_decimal(&c5.c_hi, 10)
    ))
}

fn sweep(cfg: SweepConfig, algs: &[AlgorithmId]) -> Result<(u64, Option<Rat>), String> {
    let res = run_sweep(&cfg, algs).map_err(|e| e.to_string())?;
    if let Some(r) = res.rows.iter().find(|r| r.violates_bound()) {
        return Err(format!(
            "instance {} ({}): ratio {} above bound {}",
            r.instance_id,
            r.algorithm,
            show(r.ratio.as_ref().expect("a violation has a ratio")),
            show(r.bound.as_ref().expect("a violation has a bound"))
        ));
    }
    if res.rows.iter().any(|r| r.skipped) {
        return Err("some rows were skipped by the oracle".into());
    }
    Ok((
        res.rows.len() as u64,
        res.rows.into_iter().filter_map(|r| r.ratio).max(),
    ))
}

fn base(opts: &VerifyOptions) -> SweepConfig {
    SweepConfig {
        count: opts.sweep_count,
        seed: opts.seed,
        threads: opts.threads,
        ..SweepConfig::default()
    }
}

/// `3/2 · gain(Simple) ≥ OPT` on a proportional sweep and on both
/// completions of the adversarial pair.
pub fn simple_upper_bound(opts: &VerifyOptions) -> Outcome {
    let (rows, max) = sweep(base(opts), &[AlgorithmId::Simple])?;
    for eps in epsilon_ladder() {
        let (i1, i2) = proportional_pair(&eps).map_err(|e| e.to_string())?;
        for inst in [i1, i2] {
            let gain = AlgorithmId::Simple.strategy().gain(&inst).map_err(|e| e.to_string())?;
            let opt = oracle::optimal(&inst).map_err(|e| e.to_string())?.optimum;
            ensure(rat(3, 2) * &gain >= opt, || {
                format!("adversarial pair at ε = {eps}: gain {gain}, OPT {opt}")
            })?;
        }
    }
    Ok(format!(
        "{rows} rows plus 6 adversarial instances; max ratio {}",
        max.as_ref().map_or("-".into(), show)
    ))
}

fn proportional_zoo() -> impl Iterator<Item = AlgorithmId> {
    AlgorithmId::ALL.into_iter().filter(|a| a.is_deterministic())
}

pub fn proportional_lower_bound() -> Outcome {
    let mut worst: Option<Rat> = None;
    for eps in epsilon_ladder() {
        let bound = (rat(2, 3) + &eps * rat(4, 1)).recip();
        for id in proportional_zoo() {
            let mut alg = match id.strategy() {
                crate::algorithms::Strategy::Deterministic(make) => make(),
                crate::algorithms::Strategy::Mixed(_) => unreachable!("zoo is deterministic"),
            };
            let rep = proportional_det_adversary(alg.as_mut(), &eps).map_err(|e| format!("{id}: {e}"))?;
            ensure(rep.ratio_at_least(&bound), || {
                format!(
                    "{id} at ε = {eps}: ratio {:?} below {}",
                    rep.ratio.as_ref().map(show),
                    show(&bound)
                )
            })?;
            if eps == rat(1, 1_000_000) {
                ensure(rep.ratio.as_ref().is_none_or(|r| *r > rat(14_999, 10_000)), || {
                    format!("{id} at ε = 1e-6: ratio not above 1.4999")
                })?;
                if let Some(r) = rep.ratio {
                    worst = Some(worst.map_or(r.clone(), |w: Rat| w.min(r)));
                }
            }
        }
    }
    Ok(format!(
        "every deterministic algorithm reaches 1/(2/3 + 4ε); smallest ratio at ε = 1e-6 is {}",
        worst.as_ref().map_or("unbounded".into(), show)
    ))
}

pub fn randomized_bounds(opts: &VerifyOptions) -> Outcome {
    for eps in epsilon_ladder() {
        for id in std::iter::once(AlgorithmId::RandChoice).chain(proportional_zoo()) {
            let rep = yao_experiment(&id.strategy(), &eps).map_err(|e| e.to_string())?;
            ensure(rep.all_within_bound(), || {
                format!("{id} at ε = {eps}: some expected gain above 5/6 + 2ε")
            })?;
        }
    }
    let mut total = 0;
    let mut worst: Option<Rat> = None;
    let mixes: [Option<[u32; 4]>; 4] = [None, Some([1, 1, 1, 1]), Some([0, 1, 1, 2]), Some([0, 2, 1, 0])];
    for (k, mix) in mixes.into_iter().enumerate() {
        let mut cfg = base(opts);
        cfg.seed = opts.seed.wrapping_add(k as u64);
        if let Some(frequencies) = mix {
            cfg.weight_model = WeightModel::CategoryMix {
                frequencies,
                max_denominator: 360,
            };
        }
        let (rows, max) = sweep(cfg, &[AlgorithmId::RandChoice])?;
        total += rows;
        worst = worst.max(max);
    }
    Ok(format!(
        "Yao gains within 5/6 + 2ε; {total} RandChoice rows, max ratio {}",
        worst.as_ref().map_or("-".into(), show)
    ))
}

pub fn focus_upper_bound(opts: &VerifyOptions) -> Outcome {
    let cfg = SweepConfig {
        value_model: ValueModel::UniformRational { max_denominator: 360 },
        ..base(opts)
    };
    let (rows, max) = sweep(cfg, &[AlgorithmId::Focus])?;
    Ok(format!(
        "{rows} general rows within T_6; max ratio {}",
        max.as_ref().map_or("-".into(), show)
    ))
}

pub fn focus_tightness() -> Outcome {
    let eps = rat(1, 10_000);
    for n in 1..=4 {
        let mut alg = crate::algorithms::focus();
        let rep = tightness_game(&mut alg, n, &eps).map_err(|e| e.to_string())?;
        let s = partial_sum_s(n);
        ensure(rep.ratio.as_ref() == Some(&s), || {
            format!("N = {n}: ratio {:?}, S_N = {s}", rep.ratio)
        })?;
    }
    ensure(partial_sum_s(4) == rat(71, 42), || "S_4 ≠ 71/42".into())?;
    Ok("ratio = S_N exactly for N = 1..4; 71/42 at N = 4".into())
}

pub const GENERAL_ZOO: [AlgorithmId; 4] = [
    AlgorithmId::Focus,
    AlgorithmId::KeepFirst,
    AlgorithmId::GreedyDensity,
    AlgorithmId::Heaviest,
];

pub fn general_lower_bound() -> Outcome {
    let lbs = lower_bound_cn(5, &default_precision()).map_err(|e| e.to_string())?;
    let eps = rat(1, 1_000_000);
    let threshold = rat(158, 100);
    let mut parts = Vec::new();
    for id in GENERAL_ZOO {
        let crate::algorithms::Strategy::Deterministic(make) = id.strategy() else {
            unreachable!("zoo is deterministic")
        };
        let rep = general_adversary(make().as_mut(), 5, &eps, &lbs).map_err(|e| format!("{id}: {e}"))?;
        // Independent re-check: replay the emitted instance and re-run the oracle.
        let gain = replay(make().as_mut(), &rep.instance_emitted)
            .map_err(|e| e.to_string())?
            .0;
        let opt = oracle::optimal(&rep.instance_emitted)
            .map_err(|e| e.to_string())?
            .optimum;
        ensure(gain == rep.alg_gain && opt == rep.opt, || {
            format!("{id}: replay disagrees with the game")
        })?;
        let ratio = oracle::ratio_of(&opt, &gain).ok();
        ensure(ratio.as_ref().is_none_or(|r| *r > threshold), || {
            format!("{id}: ratio {} not above 1.58", ratio.as_ref().map_or("-".into(), show))
        })?;
        parts.push(format!(
            "{id} {}",
            ratio.as_ref().map_or("unbounded".into(), |r| to_decimal(r, 6))
        ));
    }
    Ok(parts.join(", "))
}

/// `k` instances with up to four items of weight above `1/7` (so at most six
/// copies each), drawn on a `1/360` grid.
pub fn small_instances(seed: u64, k: u64) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..k)
        .map(|_| {
            let len = rng.gen_range(1..=4);
            let items = (0..len)
                .map(|_| {
                    let w = rat(rng.gen_range(52..=360), 360);
                    let v = rat(rng.gen_range(1..=360), 360);
                    Item::new(w, v).expect("grid points are valid items")
                })
                .collect();
            Instance::general(items)
        })
        .collect()
}

pub fn oracle_soundness(opts: &VerifyOptions) -> Outcome {
    let cfg = OracleConfig::default();
    let mut both = 0;
    for (k, inst) in small_instances(opts.seed, opts.oracle_instances).iter().enumerate() {
        let brute = oracle::exhaustive(inst.items(), 1 << 20).ok_or("exhaustive enumeration too large")?;
        let opt = oracle::optimal_with(inst, &cfg).map_err(|e| e.to_string())?.optimum;
        ensure(brute == opt, || {
            format!("instance {k}: exhaustive {brute}, oracle {opt}")
        })?;
        let bb = oracle::branch_and_bound(inst.items(), cfg.node_budget).map_err(|e| e.to_string())?;
        if let Some(dp) = oracle::scaled_dp(inst.items(), cfg.dp_capacity_limit) {
            ensure(dp.optimum == bb.optimum, || {
                format!("instance {k}: dp {} vs branch and bound {}", dp.optimum, bb.optimum)
            })?;
            both += 1;
        }
    }
    Ok(format!(
        "{} instances match exhaustive search; dp and branch and bound agree on {both}",
        opts.oracle_instances
    ))
}

pub fn sweep_csv(cfg: &SweepConfig, algs: &[AlgorithmId]) -> Result<Vec<u8>, String> {
    let res = run_sweep(cfg, algs).map_err(|e| e.to_string())?;
    let mut buf = Vec::new();
    write_csv(&res.rows, &mut buf).map_err(|e| e.to_string())?;
    Ok(buf)
}

pub fn determinism(opts: &VerifyOptions) -> Outcome {
    let cfg = SweepConfig {
        count: opts.sweep_count.min(100),
        ..base(opts)
    };
    let algs = [AlgorithmId::Simple, AlgorithmId::RandChoice, AlgorithmId::Focus];
    let a = sweep_csv(&cfg, &algs)?;
    let b = sweep_csv(
        &SweepConfig {
            threads: Some(1),
            ..cfg.clone()
        },
        &algs,
    )?;
    ensure(a == b, || "two runs wrote different CSV".into())?;
    Ok(format!("{} identical bytes from two runs", a.len()))
}

/// Runs the twelve checks in order, calling `each` as soon as a check ends.
pub fn run_all(opts: &VerifyOptions, mut each: impl FnMut(&Check)) -> Vec<Check> {
    let suite: [(&'static str, Runner<'_>); 12] = [
        ("Sylvester sequence", Box::new(sylvester_facts)),
        ("S_∞ bracket", Box::new(s_infinity)),
        ("T_N identities", Box::new(t_identities)),
        ("lower-bound constant", Box::new(lower_bound_constant)),
        ("Simple upper bound", Box::new(|| simple_upper_bound(opts))),
        ("proportional lower bound", Box::new(proportional_lower_bound)),
        ("randomized bounds", Box::new(|| randomized_bounds(opts))),
        ("Focus upper bound", Box::new(|| focus_upper_bound(opts))),
        ("Focus tightness", Box::new(focus_tightness)),
        ("general lower bound", Box::new(general_lower_bound)),
        ("oracle soundness", Box::new(|| oracle_soundness(opts))),
        ("sweep determinism", Box::new(|| determinism(opts))),
    ];
    suite
        .iter()
        .enumerate()
        .map(|(k, (name, run))| {
            let (passed, detail) = match run() {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            let c = Check {
                id: k as u8 + 1,
                name,
                passed,
                detail,
            };
            each(&c);
            c
        })
        .collect()
}

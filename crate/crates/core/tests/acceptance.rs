//! The twelve acceptance criteria. Each test prints one `PASS`/`FAIL` line
//! and then asserts. Thresholds and sizes are the constants below.

use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ukr::adversary::{
    epsilon_ladder, general_adversary, proportional_det_adversary, proportional_pair, tightness_game, yao_experiment,
};
use ukr::algorithms::{AlgorithmId, Strategy};
use ukr::bounds::{check_identities, lower_bound_cn, partial_sum_s, s_infinity_bracket, sylvester, t_value};
use ukr::harness::{run_sweep, write_csv, SweepConfig, ValueModel, WeightModel};
use ukr::model::{Instance, Item};
use ukr::oracle::{self, OracleConfig};
use ukr::rat::{inv_pow10, rat, to_decimal, Rat};
use ukr::replay::{replay, OnlineAlgorithm};

const SWEEP_SIZE: u64 = 500;
const SWEEP_SEED: u64 = 20_240_601;
const IDENTITY_DEPTH: usize = 8;
const C5_FLOOR: (i64, i64) = (15_877, 10_000);
const C_PRECISION_EXP: u32 = 9;
/// Agreement required between the solver's `c_3` and the f64 dense scan.
const SCAN_STEP: f64 = 1e-6;
const SCAN_AGREEMENT: f64 = 1e-5;
const PROP_DET_FLOOR: (i64, i64) = (14_999, 10_000);
const GENERAL_FLOOR: (i64, i64) = (158, 100);
const TIGHTNESS_EPS_EXP: u32 = 4;
const ORACLE_INSTANCES: u64 = 200;
const ORACLE_MAX_DISTINCT: usize = 4;
const ORACLE_MAX_COPIES: u64 = 6;
const CATEGORY_MIXES: [[u32; 4]; 3] = [[1, 1, 1, 1], [0, 1, 1, 2], [0, 2, 1, 1]];

fn report(id: u8, ok: bool, what: &str, detail: String, started: Instant) {
    let status = if ok { "PASS" } else { "FAIL" };
    println!(
        "{status} criterion {id:>2}: {what} | {detail} | {:.2}s",
        started.elapsed().as_secs_f64()
    );
    assert!(ok, "criterion {id} failed: {detail}");
}

fn deterministic(id: AlgorithmId) -> Box<dyn OnlineAlgorithm> {
    match id.strategy() {
        Strategy::Deterministic(make) => make(),
        Strategy::Mixed(_) => panic!("{id} is randomized"),
    }
}

fn proportional_sweep(seed: u64, weight_model: WeightModel) -> SweepConfig {
    SweepConfig {
        count: SWEEP_SIZE,
        seed,
        weight_model,
        ..SweepConfig::default()
    }
}

/// `bound · gain ≥ OPT` on every row, checked from the raw gain and OPT
/// rather than the margin column; the margin must also be non-negative.
fn sweep_holds(cfg: &SweepConfig, alg: AlgorithmId, bound: &Rat) -> (bool, usize, Rat) {
    let res = run_sweep(cfg, &[alg]).expect("sweep runs");
    let mut worst = Rat::zero();
    let mut ok = true;
    for r in &res.rows {
        let Some(opt) = &r.opt else {
            ok = false;
            continue;
        };
        ok &= bound * &r.gain >= *opt;
        ok &= r.margin.as_ref().is_some_and(|m| !m.is_negative());
        ok &= r.bound.as_ref() == Some(bound);
        if let Some(x) = &r.ratio {
            worst = worst.max(x.clone());
        }
    }
    (ok, res.rows.len(), worst)
}

#[test]
fn criterion_01_sylvester_sequence() {
    let t = Instant::now();
    let first: Vec<BigInt> = (1..=5).map(sylvester).collect();
    let expected: Vec<BigInt> = [2, 3, 7, 43, 1807].into_iter().map(BigInt::from).collect();
    let mut ok = first == expected;
    // a_n = 1 + a_1⋯a_{n−1} and 1/(a_n − 1) = 1 − Σ_{j<n} 1/a_j, computed here
    // from the product definition only.
    let mut product = BigInt::one();
    let mut unit = Rat::zero();
    for n in 1..=IDENTITY_DEPTH {
        let a = sylvester(n);
        ok &= a == &product + 1u32;
        ok &= Rat::new(BigInt::one(), &a - 1u32) == Rat::one() - &unit;
        product *= &a;
        unit += Rat::new(BigInt::one(), a);
    }
    report(
        1,
        ok,
        "Sylvester sequence",
        format!("a_1..a_5 = {first:?}, identities for n ≤ {IDENTITY_DEPTH}"),
        t,
    );
}

#[test]
fn criterion_02_s_infinity_bracket() {
    let t = Instant::now();
    let (lo, hi) = s_infinity_bracket(5);
    let ok = rat(169_103, 100_000) < lo && lo < hi && hi < rat(169_104, 100_000);
    report(
        2,
        ok,
        "S_∞ bracket",
        format!("{} < S_∞ < {}", to_decimal(&lo, 12), to_decimal(&hi, 12)),
        t,
    );
}

#[test]
fn criterion_03_t_identities() {
    let t = Instant::now();
    let mut ok = true;
    let mut count = 0;
    for n in 1..=IDENTITY_DEPTH {
        let r = check_identities(n);
        ok &= r.all_passed();
        count += r.checks.len();
        // Restate the equality directly as well.
        let a = Rat::from_integer(sylvester(n));
        let tn = t_value(n);
        let lhs = (&a - Rat::one()).pow(2) / &a * (Rat::one() - partial_sum_s(n - 1) / &tn);
        ok &= lhs == tn.recip();
    }
    report(
        3,
        ok,
        "T_N identities",
        format!("{count} exact checks, N ≤ {IDENTITY_DEPTH}"),
        t,
    );
}

/// `P(c)` for `N = 3` in f64 from the product form, with `r = (1, 1/2, 1/6)`.
fn p3(c: f64) -> f64 {
    let r = [1.0, 0.5, 1.0 / 6.0];
    (c - r[0]) * (c - r[1]) * (c - r[2]) - 0.5 * (c - r[2]) - (c - 0.5) * r[2]
}

#[test]
fn criterion_04_lower_bound_constant() {
    let t = Instant::now();
    let precision = inv_pow10(C_PRECISION_EXP);
    let c5 = lower_bound_cn(5, &precision).expect("c_5");
    let mut ok = c5.c_lo > rat(C5_FLOOR.0, C5_FLOOR.1) && c5.c_lo <= c5.c && c5.c <= c5.c_hi;
    ok &= c5.width() <= precision * rat(2, 1);
    ok &= c5.residuals_within_tolerance();

    let c3 = lower_bound_cn(3, &inv_pow10(C_PRECISION_EXP)).expect("c_3");
    let mut c = 2.0;
    while p3(c) > 0.0 {
        c -= SCAN_STEP;
    }
    let agree = (c - ukr::rat::to_f64(&c3.c)).abs() < SCAN_AGREEMENT;
    ok &= agree;
    report(
        4,
        ok,
        "lower-bound constant",
        format!(
            "c_5 ∈ [{}, {}], max residual {}, c_3 = {} vs scan {c:.6}",
            to_decimal(&c5.c_lo, 10),
            to_decimal(&c5.c_hi, 10),
            to_decimal(&c5.max_residual(), 14),
            to_decimal(&c3.c, 8)
        ),
        t,
    );
}

#[test]
fn criterion_05_simple_upper_bound() {
    let t = Instant::now();
    let bound = rat(3, 2);
    let cfg = proportional_sweep(SWEEP_SEED, WeightModel::UniformRational { max_denominator: 360 });
    let (mut ok, rows, worst) = sweep_holds(&cfg, AlgorithmId::Simple, &bound);
    for eps in epsilon_ladder() {
        let (i1, i2) = proportional_pair(&eps).expect("pair");
        for inst in [i1, i2] {
            let gain = replay(deterministic(AlgorithmId::Simple).as_mut(), &inst).unwrap().0;
            ok &= &bound * gain >= oracle::optimal(&inst).unwrap().optimum;
        }
    }
    report(
        5,
        ok,
        "Simple ≤ 3/2",
        format!("{rows} sweep rows + 6 adversarial, max ratio {}", to_decimal(&worst, 6)),
        t,
    );
}

#[test]
fn criterion_06_proportional_lower_bound() {
    let t = Instant::now();
    let mut ok = true;
    let mut smallest: Option<Rat> = None;
    let zoo: Vec<AlgorithmId> = AlgorithmId::ALL.into_iter().filter(|a| a.is_deterministic()).collect();
    for eps in epsilon_ladder() {
        let floor = (rat(2, 3) + &eps * rat(4, 1)).recip();
        for &id in &zoo {
            let rep = proportional_det_adversary(deterministic(id).as_mut(), &eps).expect("game");
            // Unbounded ratio (gain 0, OPT > 0) counts as reaching the floor.
            ok &= rep.ratio.as_ref().is_none_or(|r| *r >= floor);
            if eps == inv_pow10(6) {
                ok &= rep
                    .ratio
                    .as_ref()
                    .is_none_or(|r| *r > rat(PROP_DET_FLOOR.0, PROP_DET_FLOOR.1));
                if let Some(r) = rep.ratio {
                    smallest = Some(smallest.map_or(r.clone(), |s| s.min(r)));
                }
            }
        }
    }
    report(
        6,
        ok,
        "deterministic proportional ≥ 1/(2/3 + 4ε)",
        format!(
            "{} algorithms × 3 ε, smallest ratio at 1e-6 {}",
            zoo.len(),
            smallest.map_or("∞".into(), |s| to_decimal(&s, 8))
        ),
        t,
    );
}

#[test]
fn criterion_07_randomized_bounds() {
    let t = Instant::now();
    let mut ok = true;
    let mut yao_rows = 0;
    for eps in epsilon_ladder() {
        let cap = rat(5, 6) + &eps * rat(2, 1);
        for id in AlgorithmId::ALL {
            let rep = yao_experiment(&id.strategy(), &eps).expect("yao");
            ok &= rep.opt_i1 == Rat::one() && rep.opt_i2 == Rat::one();
            for row in &rep.rows {
                ok &= row.expected_gain <= cap;
                yao_rows += 1;
            }
        }
    }
    let bound = rat(4, 3);
    let mut rows = 0;
    let mut worst = Rat::zero();
    let mut configs = vec![proportional_sweep(
        SWEEP_SEED,
        WeightModel::UniformRational { max_denominator: 360 },
    )];
    for (k, frequencies) in CATEGORY_MIXES.into_iter().enumerate() {
        configs.push(proportional_sweep(
            SWEEP_SEED + 1 + k as u64,
            WeightModel::CategoryMix {
                frequencies,
                max_denominator: 360,
            },
        ));
    }
    for cfg in &configs {
        let (good, n, w) = sweep_holds(cfg, AlgorithmId::RandChoice, &bound);
        ok &= good;
        rows += n;
        worst = worst.max(w);
    }
    report(
        7,
        ok,
        "Yao ≤ 5/6 + 2ε and RandChoice ≤ 4/3",
        format!(
            "{yao_rows} Yao rows, {rows} sweep rows, max ratio {}",
            to_decimal(&worst, 6)
        ),
        t,
    );
}

#[test]
fn criterion_08_focus_upper_bound() {
    let t = Instant::now();
    let t6 = t_value(6);
    let cfg = SweepConfig {
        count: SWEEP_SIZE,
        seed: SWEEP_SEED,
        value_model: ValueModel::UniformRational { max_denominator: 360 },
        ..SweepConfig::default()
    };
    let (ok, rows, worst) = sweep_holds(&cfg, AlgorithmId::Focus, &t6);
    // T_6 is a valid surrogate: it sits above a certified lower end for S_∞.
    let ok = ok && t6 > s_infinity_bracket(8).0;
    report(
        8,
        ok,
        "Focus ≤ T_6",
        format!("{rows} general rows, max ratio {}", to_decimal(&worst, 6)),
        t,
    );
}

#[test]
fn criterion_09_focus_tightness() {
    let t = Instant::now();
    let eps = inv_pow10(TIGHTNESS_EPS_EXP);
    let mut ok = true;
    let mut got = Vec::new();
    for n in 1..=4 {
        let rep = tightness_game(deterministic(AlgorithmId::Focus).as_mut(), n, &eps).expect("game");
        ok &= rep.ratio.as_ref() == Some(&partial_sum_s(n));
        got.push(rep.ratio.map_or("∞".into(), |r| r.to_string()));
    }
    ok &= got.last().map(String::as_str) == Some("71/42");
    report(
        9,
        ok,
        "Focus ratio = S_N on tightness instances",
        format!("N = 1..4: {}", got.join(", ")),
        t,
    );
}

#[test]
fn criterion_10_general_lower_bound() {
    let t = Instant::now();
    let lbs = lower_bound_cn(5, &inv_pow10(C_PRECISION_EXP)).expect("c_5");
    let eps = inv_pow10(6);
    let floor = rat(GENERAL_FLOOR.0, GENERAL_FLOOR.1);
    let mut ok = true;
    let mut parts = Vec::new();
    for id in [
        AlgorithmId::Heaviest,
        AlgorithmId::Focus,
        AlgorithmId::GreedyDensity,
        AlgorithmId::KeepFirst,
    ] {
        let rep = general_adversary(deterministic(id).as_mut(), 5, &eps, &lbs).expect("game");
        // Re-verify from scratch: fresh replay of the emitted instance, fresh oracle.
        let gain = replay(deterministic(id).as_mut(), &rep.instance_emitted).unwrap().0;
        let opt = oracle::optimal(&rep.instance_emitted).unwrap().optimum;
        ok &= gain == rep.alg_gain && opt == rep.opt;
        let above = gain.is_zero() || opt.clone() / &gain > floor;
        ok &= above;
        parts.push(format!(
            "{id} {}",
            if gain.is_zero() {
                "∞".into()
            } else {
                to_decimal(&(opt / gain), 6)
            }
        ));
    }
    report(10, ok, "general game N = 5, ε = 1e-6 > 1.58", parts.join(", "), t);
}

fn random_small_instance(rng: &mut ChaCha8Rng) -> Instance {
    let k = rng.gen_range(1..=ORACLE_MAX_DISTINCT);
    // weight in (1/(MAX+1), 1] so that at most MAX copies fit
    let d = 420i64;
    let min_num = d / (ORACLE_MAX_COPIES as i64 + 1) + 1;
    let items = (0..k)
        .map(|_| {
            let w = rat(rng.gen_range(min_num..=d), d);
            let v = rat(rng.gen_range(1..=50), rng.gen_range(1..=12));
            Item::new(w, v).unwrap()
        })
        .collect();
    Instance::general(items)
}

/// Plain enumeration over count vectors, independent of the library's.
fn brute_force(items: &[Item]) -> Rat {
    let mut best = Rat::zero();
    let mut counts = vec![0u64; items.len()];
    loop {
        let w: Rat = items
            .iter()
            .zip(&counts)
            .map(|(x, &c)| x.weight() * rat(c as i64, 1))
            .sum();
        if w <= Rat::one() {
            let v: Rat = items
                .iter()
                .zip(&counts)
                .map(|(x, &c)| x.value() * rat(c as i64, 1))
                .sum();
            best = best.max(v);
        }
        let mut i = 0;
        loop {
            if i == counts.len() {
                return best;
            }
            if counts[i] < ORACLE_MAX_COPIES {
                counts[i] += 1;
                break;
            }
            counts[i] = 0;
            i += 1;
        }
    }
}

#[test]
fn criterion_11_oracle_soundness() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SWEEP_SEED);
    let cfg = OracleConfig::default();
    let mut ok = true;
    let mut both = 0;
    for _ in 0..ORACLE_INSTANCES {
        let inst = random_small_instance(&mut rng);
        ok &= inst.items().iter().all(|x| x.multiplicity() <= ORACLE_MAX_COPIES);
        let brute = brute_force(inst.items());
        ok &= oracle::optimal_with(&inst, &cfg).unwrap().optimum == brute;
        ok &= oracle::exhaustive(inst.items(), 1 << 20) == Some(brute.clone());
        let bb = oracle::branch_and_bound(inst.items(), cfg.node_budget).unwrap();
        ok &= bb.optimum == brute;
        if let Some(dp) = oracle::scaled_dp(inst.items(), cfg.dp_capacity_limit) {
            ok &= dp.optimum == bb.optimum;
            both += 1;
        }
    }
    report(
        11,
        ok,
        "oracle = exhaustive",
        format!("{ORACLE_INSTANCES} instances; dp and branch and bound both ran on {both}"),
        t,
    );
}

#[test]
fn criterion_12_determinism() {
    let t = Instant::now();
    let algs = [AlgorithmId::Simple, AlgorithmId::RandChoice, AlgorithmId::Focus];
    let csv = |threads| {
        let cfg = SweepConfig {
            threads,
            ..proportional_sweep(SWEEP_SEED, WeightModel::UniformRational { max_denominator: 360 })
        };
        let mut buf = Vec::new();
        write_csv(&run_sweep(&cfg, &algs).unwrap().rows, &mut buf).unwrap();
        buf
    };
    let a = csv(None);
    let b = csv(Some(1));
    let c = csv(Some(3));
    let ok = a == b && b == c && !a.is_empty();
    report(
        12,
        ok,
        "byte-identical sweep CSV",
        format!("{} bytes, 3 runs", a.len()),
        t,
    );
}

//! `ukr`: replay algorithms, query the oracle, print the Sylvester bounds,
//! play the lower-bound games and run seeded sweeps.
//!
//! Exit status is 0 on success, 1 when a check fails (a `verify` criterion or
//! a bound violated in a sweep), and 2 for usage errors and unreadable input.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use ukr::adversary::{
    general_adversary, proportional_det_adversary, tightness_game, yao_experiment, AdversaryReport, GameItems,
};
use ukr::algorithms::{AlgorithmId, Strategy};
use ukr::bounds::{check_identities, lower_bound_cn, s_infinity_bracket, BoundSet, SylvesterTable};
use ukr::format::{read_instance, write_instance};
use ukr::harness::verify::{run_all, VerifyOptions};
use ukr::harness::{normalize_key, parse_settings, run_sweep, write_csv, Settings, SweepPlan};
use ukr::model::Instance;
use ukr::oracle;
use ukr::rat::{format_rat, parse_rat, to_decimal, Rat};
use ukr::replay::{replay, Trace};

#[derive(Parser)]
#[command(
    name = "ukr",
    version,
    about = "Online unbounded knapsack with removal, in exact arithmetic"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Cmd {
    /// Replay one algorithm on an instance file and score it against OPT.
    Run {
        #[arg(long)]
        alg: AlgorithmId,
        #[arg(long)]
        instance: PathBuf,
        /// Skip the step-by-step trace.
        #[arg(long)]
        quiet: bool,
    },
    /// Offline optimum of an instance file.
    Ratio {
        #[arg(long)]
        instance: PathBuf,
        /// Also score this gain against OPT.
        #[arg(long, value_parser = parse_rat)]
        gain: Option<Rat>,
    },
    /// Sylvester terms, S_N, T_N, the S_∞ bracket and c_N.
    Bounds {
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        digits: usize,
        /// Half-width target for c_N.
        #[arg(long, default_value = "1/1000000000", value_parser = parse_rat)]
        precision: Rat,
        /// Print every identity check.
        #[arg(long)]
        identities: bool,
    },
    /// Play a lower-bound game.
    Adversary {
        #[arg(long, value_enum)]
        game: GameArg,
        #[arg(long, default_value = "focus")]
        alg: AlgorithmId,
        #[arg(long, default_value = "1/10000", value_parser = parse_rat)]
        eps: Rat,
        #[arg(long, default_value_t = 4)]
        n: usize,
        /// Write the emitted instance here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        digits: usize,
    },
    /// Seeded random sweep; flags override keys from the config file.
    Sweep(SweepArgs),
    /// Run the built-in verification suite.
    Verify {
        #[arg(long, default_value_t = 500)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        threads: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GameArg {
    PropDet,
    Yao,
    Tightness,
    General,
}

#[derive(clap::Args)]
struct SweepArgs {
    /// Flat `key = value` file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    count: Option<String>,
    /// `a..b` or a single length.
    #[arg(long)]
    items: Option<String>,
    #[arg(long)]
    weight_model: Option<String>,
    #[arg(long)]
    max_denominator: Option<String>,
    /// Four relative frequencies for G, S, M, L.
    #[arg(long)]
    category_weights: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    sylvester_levels: Option<String>,
    #[arg(long)]
    value_model: Option<String>,
    #[arg(long)]
    value_denominator: Option<String>,
    #[arg(long)]
    rho_max: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Comma-separated algorithm ids.
    #[arg(long)]
    algorithms: Option<String>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    output: Option<String>,
    #[arg(long)]
    threads: Option<String>,
    #[arg(long)]
    node_budget: Option<String>,
}

impl SweepArgs {
    fn settings(&self) -> Result<Settings> {
        let mut s = match &self.config {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                parse_settings(&text)?
            }
            None => Settings::new(),
        };
        let flags = [
            ("count", &self.count),
            ("items", &self.items),
            ("weight-model", &self.weight_model),
            ("max-denominator", &self.max_denominator),
            ("category-weights", &self.category_weights),
            ("eps", &self.eps),
            ("sylvester-levels", &self.sylvester_levels),
            ("value-model", &self.value_model),
            ("value-denominator", &self.value_denominator),
            ("rho-max", &self.rho_max),
            ("seed", &self.seed),
            ("algorithms", &self.algorithms),
            ("output", &self.output),
            ("threads", &self.threads),
            ("node-budget", &self.node_budget),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                s.insert(normalize_key(k), v.clone());
            }
        }
        Ok(s)
    }
}

/// A check ran and failed; maps to exit status 1.
#[derive(Debug)]
struct Failed(String);

impl std::fmt::Display for Failed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Failed {}

fn dec(r: &Rat, digits: usize) -> String {
    format!("{} ({})", to_decimal(r, digits), format_rat(r))
}

fn load(path: &Path) -> Result<Instance> {
    read_instance(path).with_context(|| format!("reading {}", path.display()))
}

fn print_trace(out: &mut impl Write, trace: &Trace) -> io::Result<()> {
    for s in &trace.steps {
        write!(out, "  {:>3}  {}  packed {}", s.item_index + 1, s.item, s.copies_packed)?;
        for (x, c) in &s.removed {
            write!(out, ", removed {c}×{x}")?;
        }
        writeln!(out, "  → {}", s.knapsack_after)?;
    }
    Ok(())
}

fn cmd_run(alg: AlgorithmId, path: &Path, quiet: bool) -> Result<()> {
    let inst = load(path)?;
    let mut out = io::stdout().lock();
    writeln!(out, "algorithm: {alg}")?;
    let gain = match alg.strategy() {
        Strategy::Deterministic(make) => {
            let (gain, trace) = replay(make().as_mut(), &inst)?;
            if !quiet {
                writeln!(out, "trace:")?;
                print_trace(&mut out, &trace)?;
            }
            gain
        }
        Strategy::Mixed(m) => {
            for (make, p) in m.components() {
                let g = replay(make().as_mut(), &inst)?.0;
                writeln!(
                    out,
                    "  {} with probability {}: gain {}",
                    make().name(),
                    p,
                    format_rat(&g)
                )?;
            }
            m.expected_gain(&inst)?
        }
    };
    let opt = oracle::optimal(&inst)?;
    writeln!(out, "gain: {}", dec(&gain, 10))?;
    writeln!(out, "opt: {} [{}]", dec(&opt.optimum, 10), opt.method)?;
    match oracle::ratio_of(&opt.optimum, &gain) {
        Ok(r) => writeln!(out, "ratio: {}", dec(&r, 10))?,
        Err(e) => writeln!(out, "ratio: unbounded ({e})")?,
    }
    Ok(())
}

fn cmd_ratio(path: &Path, gain: Option<Rat>) -> Result<()> {
    let inst = load(path)?;
    let opt = oracle::optimal(&inst)?;
    println!("opt: {} [{}]", dec(&opt.optimum, 10), opt.method);
    println!("witness: {}", opt.witness);
    if let Some(g) = gain {
        match oracle::ratio_of(&opt.optimum, &g) {
            Ok(r) => println!("ratio: {}", dec(&r, 10)),
            Err(e) => println!("ratio: unbounded ({e})"),
        }
    }
    Ok(())
}

fn cmd_bounds(n: usize, digits: usize, precision: &Rat, identities: bool) -> Result<()> {
    if n == 0 {
        bail!("--n must be at least 1");
    }
    let table = SylvesterTable::new(n);
    let terms: Vec<String> = table.terms().iter().map(ToString::to_string).collect();
    println!("a_1..a_{n}: {}", terms.join(", "));
    let b = BoundSet::new(n);
    println!("S_{n} = {}", dec(&b.s_n, digits));
    println!("T_{n} = {}", dec(&b.t_n, digits));
    let (lo, hi) = s_infinity_bracket(n);
    println!("S_∞ ∈ [{}, {}]", to_decimal(&lo, digits), to_decimal(&hi, digits));
    if n >= 3 {
        let c = lower_bound_cn(n, precision)?;
        println!("c_{n} = {}", to_decimal(&c.c, digits));
        println!(
            "c_{n} ∈ [{}, {}]",
            to_decimal(&c.c_lo, digits),
            to_decimal(&c.c_hi, digits)
        );
        println!(
            "residuals: max {} (tolerance {})",
            to_decimal(&c.max_residual(), 3 + digits),
            to_decimal(&c.tolerance, 3 + digits)
        );
    } else {
        println!("c_{n}: the polynomial system needs N ≥ 3");
    }
    let r = check_identities(n);
    println!(
        "identities: {}/{} hold",
        r.checks.len() - r.failures().count(),
        r.checks.len()
    );
    if identities {
        for c in &r.checks {
            println!("{c}");
        }
    }
    if !r.all_passed() {
        return Err(Failed("identity check failed".into()).into());
    }
    Ok(())
}

fn print_report(rep: &AdversaryReport, digits: usize) {
    println!(
        "game: {}  algorithm: {}  eps: {}",
        rep.game,
        rep.algorithm,
        format_rat(&rep.eps)
    );
    println!("emitted {} items:", rep.instance_emitted.len());
    print!("{}", ukr::format::serialize_instance(&rep.instance_emitted));
    for line in &rep.branch_log {
        println!("  {line}");
    }
    println!("gain: {}", dec(&rep.alg_gain, digits));
    println!("opt: {} [{}]", dec(&rep.opt, digits), rep.opt_method);
    match &rep.ratio {
        Some(r) => println!("ratio: {}", dec(r, digits)),
        None => println!("ratio: unbounded"),
    }
    println!("guarantee: {}", dec(&rep.guarantee, digits));
    for f in &rep.flags {
        println!("note: {f}");
    }
}

fn deterministic(alg: AlgorithmId) -> Result<Box<dyn ukr::replay::OnlineAlgorithm>> {
    match alg.strategy() {
        Strategy::Deterministic(make) => Ok(make()),
        Strategy::Mixed(_) => bail!("{alg} is randomized; this game needs a deterministic algorithm (try --game yao)"),
    }
}

fn cmd_adversary(
    game: GameArg,
    alg: AlgorithmId,
    eps: &Rat,
    n: usize,
    out: Option<&Path>,
    digits: usize,
) -> Result<()> {
    let rep = match game {
        GameArg::Yao => {
            let y = yao_experiment(&alg.strategy(), eps)?;
            println!("I1: {}", ukr::format::serialize_instance(&y.i1).replace('\n', " "));
            println!("I2: {}", ukr::format::serialize_instance(&y.i2).replace('\n', " "));
            println!(
                "opt(I1) = {}, opt(I2) = {}",
                format_rat(&y.opt_i1),
                format_rat(&y.opt_i2)
            );
            for r in &y.rows {
                println!(
                    "{:<24} p = {:<5} gain(I1) = {:<10} gain(I2) = {:<10} expected = {}",
                    r.algorithm,
                    format_rat(&r.probability),
                    format_rat(&r.gain_i1),
                    format_rat(&r.gain_i2),
                    dec(&r.expected_gain, digits)
                );
            }
            println!("mixture expected gain: {}", dec(&y.mixture_expected_gain, digits));
            println!("bound 5/6 + 2ε: {}", dec(&y.gain_bound, digits));
            if !y.all_within_bound() {
                return Err(Failed("an expected gain exceeds 5/6 + 2ε".into()).into());
            }
            return Ok(());
        }
        GameArg::PropDet => proportional_det_adversary(deterministic(alg)?.as_mut(), eps)?,
        GameArg::Tightness => tightness_game(deterministic(alg)?.as_mut(), n, eps)?,
        GameArg::General => {
            let lbs = lower_bound_cn(n, &ukr::bounds::default_precision())?;
            let items = GameItems::new(n, eps, &lbs)?;
            println!(
                "c_{n} ∈ [{}, {}]",
                to_decimal(&lbs.c_lo, digits),
                to_decimal(&lbs.c_hi, digits)
            );
            println!("slack δ = {}", to_decimal(&items.slack(&lbs.c_lo), digits));
            general_adversary(deterministic(alg)?.as_mut(), n, eps, &lbs)?
        }
    };
    print_report(&rep, digits);
    if let Some(p) = out {
        write_instance(p, &rep.instance_emitted).with_context(|| format!("writing {}", p.display()))?;
        println!("instance written to {}", p.display());
    }
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    let plan = SweepPlan::from_settings(&args.settings()?)?;
    let res = run_sweep(&plan.config, &plan.algorithms)?;
    match &plan.output {
        Some(p) => {
            let f = File::create(p).with_context(|| format!("creating {}", p.display()))?;
            write_csv(&res.rows, BufWriter::new(f))?;
        }
        None => write_csv(&res.rows, io::stdout().lock())?,
    }
    eprint!("{}", res.summary);
    let v = res.summary.violations();
    if v > 0 {
        return Err(Failed(format!("{v} rows exceed their proven bound")).into());
    }
    Ok(())
}

fn cmd_verify(count: u64, seed: u64, threads: Option<usize>) -> Result<()> {
    let opts = VerifyOptions {
        sweep_count: count,
        seed,
        threads,
        ..VerifyOptions::default()
    };
    let checks = run_all(&opts, |c| println!("{c}"));
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!("{} of {} checks passed", checks.len() - failed, checks.len());
    if failed > 0 {
        return Err(Failed(format!("{failed} checks failed")).into());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.cmd {
        Cmd::Run { alg, instance, quiet } => cmd_run(*alg, instance, *quiet),
        Cmd::Ratio { instance, gain } => cmd_ratio(instance, gain.clone()),
        Cmd::Bounds {
            n,
            digits,
            precision,
            identities,
        } => cmd_bounds(*n, *digits, precision, *identities),
        Cmd::Adversary {
            game,
            alg,
            eps,
            n,
            out,
            digits,
        } => cmd_adversary(*game, *alg, eps, *n, out.as_deref(), *digits),
        Cmd::Sweep(args) => cmd_sweep(args),
        Cmd::Verify { count, seed, threads } => cmd_verify(*count, *seed, *threads),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<Failed>() => {
            eprintln!("ukr: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("ukr: {e:#}");
            ExitCode::from(2)
        }
    }
}

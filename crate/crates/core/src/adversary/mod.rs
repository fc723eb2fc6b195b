//! Adaptive lower-bound games.
//!
//! Each game feeds items to an algorithm one at a time, looks at the
//! knapsack to decide what to send next, and finally scores the emitted
//! instance with the oracle. The game's own reasoning only picks the items;
//! the reported ratio is always `OPT / gain` on what was actually emitted.

mod general;

use std::fmt;

use num_traits::{One, Signed};

use crate::algorithms::Strategy;
use crate::bounds::{sylvester, LowerBoundError};
use crate::model::{Instance, Item, ModelError};
use crate::oracle::{self, Method, OracleError};
use crate::rat::{rat, Rat};
use crate::replay::{replay, OnlineAlgorithm, ReplayError, Session, Trace};

pub use general::{general_adversary, BranchBound, GameBranch, GameItems};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AdversaryError {
    #[error("epsilon {eps} outside the admissible range: {reason}")]
    Epsilon { eps: Rat, reason: String },
    #[error("{0}")]
    Domain(String),
    #[error(transparent)]
    Replay(#[from] ReplayError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    LowerBound(#[from] LowerBoundError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Game {
    ProportionalDet,
    Tightness,
    General,
}

impl fmt::Display for Game {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::ProportionalDet => "prop-det",
            Self::Tightness => "tightness",
            Self::General => "general",
        })
    }
}

#[derive(Debug, Clone)]
pub struct AdversaryReport {
    pub game: Game,
    pub algorithm: String,
    pub eps: Rat,
    pub instance_emitted: Instance,
    pub trace: Trace,
    pub alg_gain: Rat,
    pub opt: Rat,
    pub opt_method: Method,
    /// `opt / alg_gain`; `None` when the algorithm ends empty-handed against
    /// a positive optimum.
    pub ratio: Option<Rat>,
    /// The ratio the construction certifies for the branch that was taken.
    pub guarantee: Rat,
    pub branch_log: Vec<String>,
    /// Anything unusual about the run that does not invalidate it.
    pub flags: Vec<String>,
}

impl AdversaryReport {
    /// Whether the realized ratio reaches `bound` (an unbounded ratio
    /// always does).
    pub fn ratio_at_least(&self, bound: &Rat) -> bool {
        self.ratio.as_ref().is_none_or(|r| r >= bound)
    }

    #[allow(clippy::too_many_arguments)]
    fn score(
        game: Game,
        algorithm: String,
        eps: &Rat,
        instance: Instance,
        (alg_gain, trace): (Rat, Trace),
        guarantee: Rat,
        branch_log: Vec<String>,
        flags: Vec<String>,
    ) -> Result<Self, AdversaryError> {
        let opt = oracle::optimal(&instance)?;
        let ratio = oracle::ratio_of(&opt.optimum, &alg_gain).ok();
        Ok(Self {
            game,
            algorithm,
            eps: eps.clone(),
            instance_emitted: instance,
            trace,
            alg_gain,
            opt: opt.optimum,
            opt_method: opt.method,
            ratio,
            guarantee,
            branch_log,
            flags,
        })
    }
}

/// `1/10^2, 1/10^4, 1/10^6`.
pub fn epsilon_ladder() -> [Rat; 3] {
    [rat(1, 100), rat(1, 10_000), rat(1, 1_000_000)]
}

fn check_small_eps(eps: &Rat) -> Result<(), AdversaryError> {
    if !eps.is_positive() || *eps >= rat(1, 24) {
        return Err(AdversaryError::Epsilon {
            eps: eps.clone(),
            reason: "need 0 < ε < 1/24".into(),
        });
    }
    Ok(())
}

/// The two proportional instances sharing the prefix `(1/3 + 2ε, 2/3 − ε)`:
/// `I₁` ends with `1/3 + ε`, `I₂` with `2/3 − 2ε`.
pub fn proportional_pair(eps: &Rat) -> Result<(Instance, Instance), AdversaryError> {
    check_small_eps(eps)?;
    let third = rat(1, 3);
    let two_thirds = rat(2, 3);
    let prefix = [&third + eps * rat(2, 1), &two_thirds - eps];
    let i1 = prefix.iter().cloned().chain([&third + eps]);
    let i2 = prefix.iter().cloned().chain([&two_thirds - eps * rat(2, 1)]);
    Ok((Instance::from_weights(i1)?, Instance::from_weights(i2)?))
}

/// Deterministic proportional game: after the common prefix, send `I₂`'s
/// tail if the algorithm holds `2/3 − ε`, else `I₁`'s. Every algorithm ends
/// with ratio at least `1/(2/3 + 4ε)`.
pub fn proportional_det_adversary(alg: &mut dyn OnlineAlgorithm, eps: &Rat) -> Result<AdversaryReport, AdversaryError> {
    let (i1, i2) = proportional_pair(eps)?;
    let name = alg.name();
    let mut session = Session::new(alg);
    for x in &i1.items()[..2] {
        session.feed(x)?;
    }
    let big = &i1.items()[1];
    let (tail_from, log) = if session.holds(big) {
        (&i2, format!("holds {big} → I₂ tail"))
    } else {
        (&i1, format!("does not hold {big} → I₁ tail"))
    };
    session.feed(&tail_from.items()[2])?;
    let guarantee = (rat(2, 3) + eps * rat(4, 1)).recip();
    AdversaryReport::score(
        Game::ProportionalDet,
        name,
        eps,
        tail_from.clone(),
        session.finish(),
        guarantee,
        vec![log],
        Vec::new(),
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct YaoRow {
    pub algorithm: String,
    pub probability: Rat,
    pub gain_i1: Rat,
    pub gain_i2: Rat,
    pub expected_gain: Rat,
}

impl YaoRow {
    /// `E[OPT]/E[gain]` with `E[OPT] = 1`.
    pub fn implied_ratio(&self) -> Option<Rat> {
        oracle::ratio_of(&Rat::one(), &self.expected_gain).ok()
    }
}

#[derive(Debug, Clone)]
pub struct YaoReport {
    pub eps: Rat,
    pub i1: Instance,
    pub i2: Instance,
    pub opt_i1: Rat,
    pub opt_i2: Rat,
    /// One row per deterministic strategy in the mixture.
    pub rows: Vec<YaoRow>,
    /// `Σ p · E[gain]` over the rows.
    pub mixture_expected_gain: Rat,
    /// `5/6 + 2ε`.
    pub gain_bound: Rat,
}

impl YaoReport {
    pub fn all_within_bound(&self) -> bool {
        self.rows.iter().all(|r| r.expected_gain <= self.gain_bound)
    }
}

/// Plays every deterministic strategy of `strategy` on `I₁` and `I₂` with
/// probability 1/2 each.
pub fn yao_experiment(strategy: &Strategy, eps: &Rat) -> Result<YaoReport, AdversaryError> {
    let (i1, i2) = proportional_pair(eps)?;
    let half = rat(1, 2);
    let mut rows = Vec::new();
    let mut mixture = Rat::default();
    for (make, p) in strategy.components() {
        let gain_i1 = replay(make().as_mut(), &i1)?.0;
        let gain_i2 = replay(make().as_mut(), &i2)?.0;
        let expected_gain = (&gain_i1 + &gain_i2) * &half;
        mixture += &p * &expected_gain;
        rows.push(YaoRow {
            algorithm: make().name(),
            probability: p,
            gain_i1,
            gain_i2,
            expected_gain,
        });
    }
    Ok(YaoReport {
        opt_i1: oracle::optimal(&i1)?.optimum,
        opt_i2: oracle::optimal(&i2)?.optimum,
        gain_bound: rat(5, 6) + eps * rat(2, 1),
        eps: eps.clone(),
        i1,
        i2,
        rows,
        mixture_expected_gain: mixture,
    })
}

/// `N` items `(1/a_i + ε, 1/(a_i − 1))`, each with cumulative value 1, while
/// one copy of each fits together. Requires `0 < ε < 1/(N (a_{N+1} − 1))`.
pub fn tightness_instance(n: usize, eps: &Rat) -> Result<Instance, AdversaryError> {
    if n == 0 {
        return Err(AdversaryError::Domain("the tightness instance needs N >= 1".into()));
    }
    let limit = Rat::new(1.into(), (sylvester(n + 1) - 1u32) * n);
    if !eps.is_positive() || *eps >= limit {
        return Err(AdversaryError::Epsilon {
            eps: eps.clone(),
            reason: format!("need 0 < ε < 1/(N(a_{{N+1}} − 1)) = {limit}"),
        });
    }
    let items = (1..=n)
        .map(|i| {
            let a = sylvester(i);
            let w = Rat::new(1.into(), a.clone()) + eps;
            Item::new(w, Rat::new(1.into(), a - 1u32))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Instance::general(items))
}

/// Replays `alg` on the tightness instance. The guarantee is `S_N`, which
/// Focus meets exactly.
pub fn tightness_game(alg: &mut dyn OnlineAlgorithm, n: usize, eps: &Rat) -> Result<AdversaryReport, AdversaryError> {
    let inst = tightness_instance(n, eps)?;
    let name = alg.name();
    let played = replay(alg, &inst)?;
    AdversaryReport::score(
        Game::Tightness,
        name,
        eps,
        inst,
        played,
        crate::bounds::partial_sum_s(n),
        vec![format!("static instance, N = {n}")],
        Vec::new(),
    )
}

//! Online algorithms and their string identifiers.

mod baselines;
mod focus;
mod randchoice;
mod simple;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use rand::Rng;

pub use baselines::{GreedyDensity, KeepFirst};
pub use focus::Focus;
pub use randchoice::{Branch, RandChoiceStrategy, SizeCategory};
pub use simple::Simple;

use crate::model::Instance;
use crate::rat::{rat, Rat};
use crate::replay::{replay_gain, OnlineAlgorithm, ReplayError};

pub fn simple() -> Simple {
    Simple::new()
}

pub fn focus() -> Focus {
    Focus::new()
}

pub fn randchoice_strategy(which: Branch) -> RandChoiceStrategy {
    RandChoiceStrategy::new(which)
}

/// The uniform mixture of A1 and A2.
pub fn randchoice() -> MixedStrategy {
    MixedStrategy::uniform(vec![
        factory(|| randchoice_strategy(Branch::A1)),
        factory(|| randchoice_strategy(Branch::A2)),
    ])
}

/// Builds fresh algorithm instances; algorithms carry per-run state.
pub type AlgFactory = Arc<dyn Fn() -> Box<dyn OnlineAlgorithm> + Send + Sync>;

pub fn factory<A, F>(f: F) -> AlgFactory
where
    A: OnlineAlgorithm + 'static,
    F: Fn() -> A + Send + Sync + 'static,
{
    Arc::new(move || Box::new(f()) as Box<dyn OnlineAlgorithm>)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MixtureError {
    #[error("a mixture needs at least one strategy")]
    Empty,
    #[error("negative probability {0}")]
    Negative(Rat),
    #[error("probabilities sum to {0}, not 1")]
    Sum(Rat),
}

/// A finite probability distribution over deterministic strategies.
#[derive(Clone)]
pub struct MixedStrategy {
    components: Vec<(AlgFactory, Rat)>,
}

impl MixedStrategy {
    pub fn new(components: Vec<(AlgFactory, Rat)>) -> Result<Self, MixtureError> {
        if components.is_empty() {
            return Err(MixtureError::Empty);
        }
        if let Some((_, p)) = components.iter().find(|(_, p)| p.is_negative()) {
            return Err(MixtureError::Negative(p.clone()));
        }
        let total: Rat = components.iter().map(|(_, p)| p).sum();
        if !total.is_one() {
            return Err(MixtureError::Sum(total));
        }
        Ok(Self { components })
    }

    pub fn uniform(strategies: Vec<AlgFactory>) -> Self {
        let p = Rat::one() / Rat::from_integer(strategies.len().into());
        Self::new(strategies.into_iter().map(|f| (f, p.clone())).collect())
            .expect("uniform weights over a non-empty list sum to 1")
    }

    pub fn components(&self) -> &[(AlgFactory, Rat)] {
        &self.components
    }

    pub fn names(&self) -> Vec<String> {
        self.components.iter().map(|(f, _)| f().name()).collect()
    }

    /// Exact expectation of the final gain: one replay per strategy.
    pub fn expected_gain(&self, inst: &Instance) -> Result<Rat, ReplayError> {
        let mut total = Rat::zero();
        for (make, p) in &self.components {
            if p.is_zero() {
                continue;
            }
            total += p * replay_gain(make().as_mut(), inst)?;
        }
        Ok(total)
    }

    /// Draws one deterministic strategy. Only for demonstration runs; every
    /// correctness check uses [`expected_gain`](Self::expected_gain).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Box<dyn OnlineAlgorithm> {
        // Inverse CDF on a 2^-32 grid; exact enough for a demo draw.
        let u = Rat::new(rng.gen::<u32>().into(), (1u64 << 32).into());
        let mut acc = Rat::zero();
        for (make, p) in &self.components {
            acc += p;
            if u < acc {
                return make();
            }
        }
        (self.components.last().expect("non-empty").0)()
    }
}

impl fmt::Debug for MixedStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .components
            .iter()
            .map(|(make, p)| format!("{}@{}", make().name(), p))
            .collect();
        write!(f, "MixedStrategy[{}]", parts.join(", "))
    }
}

pub fn expected_gain(m: &MixedStrategy, inst: &Instance) -> Result<Rat, ReplayError> {
    m.expected_gain(inst)
}

/// Algorithm identifiers accepted by the CLI and config files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AlgorithmId {
    Simple,
    Focus,
    RandChoice,
    RandChoiceA1,
    RandChoiceA2,
    KeepFirst,
    GreedyDensity,
    Heaviest,
}

impl AlgorithmId {
    pub const ALL: [AlgorithmId; 8] = [
        Self::Simple,
        Self::Focus,
        Self::RandChoice,
        Self::RandChoiceA1,
        Self::RandChoiceA2,
        Self::KeepFirst,
        Self::GreedyDensity,
        Self::Heaviest,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Simple => "simple",
            Self::Focus => "focus",
            Self::RandChoice => "randchoice",
            Self::RandChoiceA1 => "randchoice:a1",
            Self::RandChoiceA2 => "randchoice:a2",
            Self::KeepFirst => "keep-first",
            Self::GreedyDensity => "greedy-density",
            Self::Heaviest => "heaviest",
        }
    }

    pub fn proportional_only(self) -> bool {
        matches!(
            self,
            Self::Simple | Self::RandChoice | Self::RandChoiceA1 | Self::RandChoiceA2
        )
    }

    pub fn is_deterministic(self) -> bool {
        self != Self::RandChoice
    }

    pub fn strategy(self) -> Strategy {
        match self {
            Self::Simple => Strategy::Deterministic(factory(simple)),
            Self::Focus => Strategy::Deterministic(factory(focus)),
            Self::RandChoice => Strategy::Mixed(randchoice()),
            Self::RandChoiceA1 => Strategy::Deterministic(factory(|| randchoice_strategy(Branch::A1))),
            Self::RandChoiceA2 => Strategy::Deterministic(factory(|| randchoice_strategy(Branch::A2))),
            Self::KeepFirst => Strategy::Deterministic(factory(KeepFirst::default)),
            Self::GreedyDensity => Strategy::Deterministic(factory(|| GreedyDensity)),
            Self::Heaviest => Strategy::Deterministic(factory(Simple::heaviest)),
        }
    }

    /// The proven upper bound on the competitive ratio, where one applies:
    /// 3/2 for Simple (and for Focus on proportional instances), 4/3 for
    /// RandChoice, and `focus_bound` (a finite `T_N ≥ S_∞`) for Focus.
    pub fn ratio_bound(self, proportional: bool, focus_bound: &Rat) -> Option<Rat> {
        match self {
            Self::Simple => Some(rat(3, 2)),
            Self::RandChoice => Some(rat(4, 3)),
            Self::Focus if proportional => Some(rat(3, 2)),
            Self::Focus => Some(focus_bound.clone()),
            _ => None,
        }
    }
}

impl fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown algorithm {0:?}; expected one of simple, focus, randchoice, randchoice:a1, randchoice:a2, keep-first, greedy-density, heaviest")]
pub struct UnknownAlgorithm(pub String);

impl FromStr for AlgorithmId {
    type Err = UnknownAlgorithm;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|id| id.as_str() == s.trim())
            .ok_or_else(|| UnknownAlgorithm(s.to_string()))
    }
}

/// A deterministic algorithm or a mixture, evaluated exactly.
#[derive(Clone)]
pub enum Strategy {
    Deterministic(AlgFactory),
    Mixed(MixedStrategy),
}

impl Strategy {
    /// Final gain, or exact expected gain for a mixture.
    pub fn gain(&self, inst: &Instance) -> Result<Rat, ReplayError> {
        match self {
            Self::Deterministic(make) => replay_gain(make().as_mut(), inst),
            Self::Mixed(m) => m.expected_gain(inst),
        }
    }

    /// The deterministic strategies with their probabilities.
    pub fn components(&self) -> Vec<(AlgFactory, Rat)> {
        match self {
            Self::Deterministic(make) => vec![(make.clone(), Rat::one())],
            Self::Mixed(m) => m.components().to_vec(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Item;
    use crate::rat::int;
    use crate::replay::replay;
    use crate::replay::Action;

    /// Packs one copy of the item at a fixed arrival index.
    struct PickAt(usize, usize);

    impl OnlineAlgorithm for PickAt {
        fn name(&self) -> String {
            format!("pick-{}", self.0)
        }

        fn step(&mut self, x: &Item, _: &crate::model::Solution) -> Action {
            let i = self.1;
            self.1 += 1;
            if i == self.0 {
                Action::pack(x, 1)
            } else {
                Action::keep()
            }
        }
    }

    fn two_values(a: Rat, b: Rat) -> Instance {
        Instance::general(vec![Item::new(int(1), a).unwrap(), Item::new(int(1), b).unwrap()])
    }

    #[test]
    fn ids_round_trip() {
        for id in AlgorithmId::ALL {
            assert_eq!(id.as_str().parse::<AlgorithmId>().unwrap(), id);
        }
        assert!("nope".parse::<AlgorithmId>().is_err());
    }

    #[test]
    fn single_strategy_mixture_equals_replay() {
        let inst = Instance::from_weights([rat(3, 4), rat(2, 5)]).unwrap();
        let m = MixedStrategy::new(vec![(factory(simple), int(1))]).unwrap();
        let (g, _) = replay(&mut simple(), &inst).unwrap();
        assert_eq!(expected_gain(&m, &inst).unwrap(), g);
    }

    #[test]
    fn uniform_mixture_averages_gains() {
        let inst = two_values(rat(2, 3), rat(23, 24));
        let m = MixedStrategy::uniform(vec![factory(|| PickAt(0, 0)), factory(|| PickAt(1, 0))]);
        assert_eq!(m.expected_gain(&inst).unwrap(), rat(13, 16));
        let inst = two_values(rat(5, 8), rat(20, 21));
        assert_eq!(m.expected_gain(&inst).unwrap(), rat(265, 336));
    }

    #[test]
    fn randchoice_examples() {
        let m = randchoice();
        let inst = Instance::from_weights([rat(2, 5)]).unwrap();
        assert_eq!(m.expected_gain(&inst).unwrap(), rat(4, 5));
        let inst = Instance::from_weights([rat(7, 20), rat(63, 100)]).unwrap();
        assert_eq!(m.expected_gain(&inst).unwrap(), rat(49, 50));
        assert_eq!(m.names(), vec!["randchoice:a1", "randchoice:a2"]);
    }

    #[test]
    fn mixture_validation() {
        assert_eq!(MixedStrategy::new(vec![]).unwrap_err(), MixtureError::Empty);
        let f = factory(simple);
        assert!(matches!(
            MixedStrategy::new(vec![(f.clone(), rat(1, 2))]),
            Err(MixtureError::Sum(_))
        ));
        assert!(matches!(
            MixedStrategy::new(vec![(f.clone(), rat(3, 2)), (f, rat(-1, 2))]),
            Err(MixtureError::Negative(_))
        ));
    }

    #[test]
    fn sampling_is_seeded() {
        use rand::SeedableRng;
        let m = randchoice();
        let draw = |seed| {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            (0..16).map(|_| m.sample(&mut rng).name()).collect::<Vec<_>>()
        };
        assert_eq!(draw(7), draw(7));
        assert!(draw(7).iter().any(|n| n.ends_with("a1")));
        assert!(draw(7).iter().any(|n| n.ends_with("a2")));
    }
}

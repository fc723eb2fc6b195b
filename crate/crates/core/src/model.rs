//! Items, instances and solutions of the unbounded knapsack with capacity 1.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::rat::{floor_u64, Rat};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("weight {0} is outside (0, 1]")]
    Weight(Rat),
    #[error("weight {0} is too small: its multiplicity does not fit in 64 bits")]
    WeightTooSmall(Rat),
    #[error("value {0} is negative")]
    Value(Rat),
    #[error("item {index} has weight {weight} and value {value} in a proportional instance")]
    NotProportional { index: usize, weight: Rat, value: Rat },
    #[error("total weight {0} exceeds the capacity 1")]
    Overweight(Rat),
    #[error("solution entry {0} has count zero")]
    ZeroCount(Item),
}

/// Number of copies of an item of weight `w` that fit together: `floor(1/w)`.
pub fn multiplicity(w: &Rat) -> Result<u64, ModelError> {
    if !w.is_positive() || *w > Rat::one() {
        return Err(ModelError::Weight(w.clone()));
    }
    floor_u64(&w.recip()).ok_or_else(|| ModelError::WeightTooSmall(w.clone()))
}

/// An item `(weight, value)`. Items compare by `(weight, value)`; two items
/// with the same pair are the same item.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Item {
    weight: Rat,
    value: Rat,
    multiplicity: u64,
}

impl Item {
    pub fn new(weight: Rat, value: Rat) -> Result<Self, ModelError> {
        let multiplicity = multiplicity(&weight)?;
        if value.is_negative() {
            return Err(ModelError::Value(value));
        }
        Ok(Self {
            weight,
            value,
            multiplicity,
        })
    }

    /// An item whose value equals its weight.
    pub fn proportional(weight: Rat) -> Result<Self, ModelError> {
        Self::new(weight.clone(), weight)
    }

    pub fn weight(&self) -> &Rat {
        &self.weight
    }

    pub fn value(&self) -> &Rat {
        &self.value
    }

    pub fn density(&self) -> Rat {
        &self.value / &self.weight
    }

    pub fn multiplicity(&self) -> u64 {
        self.multiplicity
    }

    /// `value * floor(1/weight)`: the best gain achievable with this item alone.
    pub fn cumulative_value(&self) -> Rat {
        &self.value * Rat::from_integer(self.multiplicity.into())
    }

    pub fn is_proportional(&self) -> bool {
        self.weight == self.value
    }
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.weight, self.value)
    }
}

pub fn cumulative_value(x: &Item) -> Rat {
    x.cumulative_value()
}

/// An ordered item sequence. When `proportional` is set every item has
/// weight equal to value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    items: Vec<Item>,
    proportional: bool,
}

impl Instance {
    pub fn new(items: Vec<Item>, proportional: bool) -> Result<Self, ModelError> {
        if proportional {
            if let Some((index, x)) = items.iter().enumerate().find(|(_, x)| !x.is_proportional()) {
                return Err(ModelError::NotProportional {
                    index,
                    weight: x.weight.clone(),
                    value: x.value.clone(),
                });
            }
        }
        Ok(Self { items, proportional })
    }

    pub fn general(items: Vec<Item>) -> Self {
        Self {
            items,
            proportional: false,
        }
    }

    /// A proportional instance from a list of weights.
    pub fn from_weights<I: IntoIterator<Item = Rat>>(weights: I) -> Result<Self, ModelError> {
        let items = weights
            .into_iter()
            .map(Item::proportional)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            items,
            proportional: true,
        })
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// The flag as declared.
    pub fn is_flagged_proportional(&self) -> bool {
        self.proportional
    }

    /// True when every item has weight equal to value, flagged or not.
    pub fn is_proportional(&self) -> bool {
        self.proportional || self.items.iter().all(Item::is_proportional)
    }

    /// First item whose value differs from its weight.
    pub(crate) fn first_non_proportional(&self) -> Option<(usize, &Item)> {
        self.items.iter().enumerate().find(|(_, x)| !x.is_proportional())
    }
}

/// A multiset of item copies with total weight at most 1.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Solution {
    entries: BTreeMap<Item, u64>,
    weight: Rat,
}

impl Solution {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_entries<I: IntoIterator<Item = (Item, u64)>>(entries: I) -> Result<Self, ModelError> {
        let mut s = Self::empty();
        for (x, count) in entries {
            if count == 0 {
                return Err(ModelError::ZeroCount(x));
            }
            s.add(&x, count);
        }
        s.check_capacity()?;
        Ok(s)
    }

    /// `⟨x⟩`: `floor(1/w)` copies of `x`.
    pub fn filled_with(x: &Item) -> Self {
        let mut s = Self::empty();
        s.add(x, x.multiplicity());
        s
    }

    pub fn gain(&self) -> Rat {
        self.entries
            .iter()
            .map(|(x, &c)| x.value() * Rat::from_integer(c.into()))
            .sum()
    }

    pub fn total_weight(&self) -> &Rat {
        &self.weight
    }

    pub fn count(&self, x: &Item) -> u64 {
        self.entries.get(x).copied().unwrap_or(0)
    }

    pub fn contains(&self, x: &Item) -> bool {
        self.count(x) > 0
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of distinct items.
    pub fn distinct(&self) -> usize {
        self.entries.len()
    }

    pub fn copies(&self) -> u64 {
        self.entries.values().sum()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Item, u64)> {
        self.entries.iter().map(|(x, &c)| (x, c))
    }

    /// The single item held, if the knapsack holds copies of exactly one item.
    pub fn sole_item(&self) -> Option<&Item> {
        match self.entries.len() {
            1 => self.entries.keys().next(),
            _ => None,
        }
    }

    pub(crate) fn add(&mut self, x: &Item, count: u64) {
        if count == 0 {
            return;
        }
        *self.entries.entry(x.clone()).or_insert(0) += count;
        self.weight += x.weight() * Rat::from_integer(count.into());
    }

    /// Removes `count` copies; returns false (and changes nothing) when fewer
    /// are present.
    pub(crate) fn remove(&mut self, x: &Item, count: u64) -> bool {
        let Some(held) = self.entries.get_mut(x) else {
            return count == 0;
        };
        if *held < count {
            return false;
        }
        *held -= count;
        if *held == 0 {
            self.entries.remove(x);
        }
        self.weight -= x.weight() * Rat::from_integer(count.into());
        if self.entries.is_empty() {
            self.weight = Rat::zero();
        }
        true
    }

    pub(crate) fn check_capacity(&self) -> Result<(), ModelError> {
        if self.weight > Rat::one() {
            Err(ModelError::Overweight(self.weight.clone()))
        } else {
            Ok(())
        }
    }
}

impl fmt::Display for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (x, c)) in self.entries().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}×{x}")?;
        }
        f.write_str("}")
    }
}

pub fn gain(s: &Solution) -> Rat {
    s.gain()
}

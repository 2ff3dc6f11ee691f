//! Hyperdistributions over (visible state, hidden posterior) pairs.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::prob::{fmt_rat, Rat};
use crate::value::Value;

/// A full distribution over hidden-state tuples.
pub type Inner = Dist<Value>;

/// An initial state: a visible tuple and the prior over hidden tuples.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InitState {
    pub vis: Value,
    pub hid: Inner,
}

impl InitState {
    pub fn new(vis: Value, hid: Inner) -> Result<Self> {
        if !hid.is_full() {
            return Err(Error::InvalidDist(format!("prior has weight {}", fmt_rat(&hid.weight()))));
        }
        Ok(InitState { vis, hid })
    }

    /// Joint form `{{v}} × δ`.
    pub fn joint(&self) -> Dist<(Value, Value)> {
        self.hid.map(|h| (self.vis.clone(), h.clone()))
    }
}

/// A partial distribution over `(v, δ)` pairs, each `δ` a full inner.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Hyper(Dist<(Value, Inner)>);

impl Hyper {
    pub fn empty() -> Self {
        Hyper(Dist::empty())
    }

    pub fn point(s: &InitState) -> Self {
        Hyper(Dist::point((s.vis.clone(), s.hid.clone())))
    }

    /// Builds a hyper from weighted `(v, δ)` entries, merging equal keys.
    pub fn from_entries<I: IntoIterator<Item = (Value, Inner, Rat)>>(entries: I) -> Result<Self> {
        let mut pairs = Vec::new();
        for (v, d, p) in entries {
            if !d.is_full() {
                return Err(Error::InvalidDist(format!("inner {d} is not full")));
            }
            pairs.push(((v, d), p));
        }
        Ok(Hyper(Dist::from_pairs(pairs)?))
    }

    pub(crate) fn from_dist(d: Dist<(Value, Inner)>) -> Self {
        Hyper(d)
    }

    pub fn as_dist(&self) -> &Dist<(Value, Inner)> {
        &self.0
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Value, &Inner, &Rat)> {
        self.0.iter().map(|((v, d), p)| (v, d, p))
    }

    pub fn states(&self) -> impl Iterator<Item = (InitState, &Rat)> {
        self.0.iter().map(|((v, d), p)| (InitState { vis: v.clone(), hid: d.clone() }, p))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> Rat {
        self.0.weight()
    }

    /// Probability of nontermination, `1 − weight`.
    pub fn deficit(&self) -> Rat {
        Rat::one() - self.weight()
    }

    pub fn get(&self, v: &Value, d: &Inner) -> Rat {
        self.0.get(&(v.clone(), d.clone()))
    }

    /// Kleisli extension over initial states.
    pub fn bind<F: FnMut(&InitState) -> Result<Hyper>>(&self, mut f: F) -> Result<Hyper> {
        let mut out = Dist::empty();
        for ((v, d), p) in self.0.iter() {
            let s = InitState { vis: v.clone(), hid: d.clone() };
            out.add_scaled(&f(&s)?.0, p);
        }
        Ok(Hyper(out))
    }

    pub(crate) fn add_scaled(&mut self, other: &Hyper, k: &Rat) {
        self.0.add_scaled(&other.0, k);
    }

    /// Pointwise sum; fails if the result weighs more than 1.
    pub fn sum(&self, other: &Hyper) -> Result<Hyper> {
        Ok(Hyper(self.0.sum(&other.0)?))
    }

    /// Distribution of the final visible state.
    pub fn vis_marginal(&self) -> Dist<Value> {
        self.0.map(|(v, _)| v.clone())
    }

    /// The joint distribution over `(v, h)` obtained by averaging inners.
    pub fn joint(&self) -> Dist<(Value, Value)> {
        self.0.bind(|(v, d)| d.map(|h| (v.clone(), h.clone())))
    }

    /// Average of the inners, ignoring the visible part.
    pub fn hidden_average(&self) -> Dist<Value> {
        self.0.bind(|(_, d)| d.clone())
    }

    /// Partitions a joint distribution by its visible component; each cell
    /// becomes one entry carrying the conditional over hidden values.
    pub fn rv(joint: &Dist<(Value, Value)>) -> Hyper {
        type Cell = (Rat, Vec<(Value, Rat)>);
        let mut cells: BTreeMap<&Value, Cell> = BTreeMap::new();
        for ((v, h), p) in joint.iter() {
            let cell = cells.entry(v).or_insert_with(|| (Rat::zero(), Vec::new()));
            cell.0 += p;
            cell.1.push((h.clone(), p.clone()));
        }
        let mut out = Dist::empty();
        for (v, (m, hs)) in cells {
            let inv = m.recip();
            let inner = Dist::accumulate(hs.into_iter().map(|(h, p)| (h, p * &inv)));
            out.add_mass((v.clone(), inner), m);
        }
        Hyper(out)
    }

    /// Pointwise `self ≤ other`.
    pub fn le(&self, other: &Hyper) -> bool {
        self.0.le(&other.0)
    }
}

impl fmt::Debug for Hyper {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Hyper {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{{")?;
        for (i, (v, d, p)) in self.entries().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({v}, {d}) @ {}", fmt_rat(p))?;
        }
        write!(f, "}}}}")
    }
}

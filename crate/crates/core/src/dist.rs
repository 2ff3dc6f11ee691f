//! Finite discrete (sub-)distributions with exact rational weights.
//!
//! A [`Dist`] is stored canonically: zero entries are never kept and keys
//! are held in their total order, so structural equality coincides with
//! equality of distributions. Weights may sum to less than one; the missing
//! mass is read as nontermination.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::prob::{fmt_rat, Rat};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dist<T: Ord> {
    entries: BTreeMap<T, Rat>,
}

impl<T: Ord> Default for Dist<T> {
    fn default() -> Self {
        Dist { entries: BTreeMap::new() }
    }
}

impl<T: Ord + Clone> Dist<T> {
    /// The zero sub-distribution.
    pub fn empty() -> Self {
        Self::default()
    }

    /// The distribution concentrated on `x`.
    pub fn point(x: T) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert(x, Rat::one());
        Dist { entries }
    }

    /// Uniform over the distinct elements of `xs`.
    pub fn uniform<I: IntoIterator<Item = T>>(xs: I) -> Result<Self> {
        let keys: std::collections::BTreeSet<T> = xs.into_iter().collect();
        if keys.is_empty() {
            return Err(Error::EmptyUniform);
        }
        let p = Rat::new(1.into(), keys.len().into());
        Ok(Dist { entries: keys.into_iter().map(|k| (k, p.clone())).collect() })
    }

    /// Builds a distribution from weighted elements; repeated elements have
    /// their weights added. Rejects negative weights and total weight above 1.
    pub fn from_pairs<I: IntoIterator<Item = (T, Rat)>>(pairs: I) -> Result<Self> {
        let mut d = Self::empty();
        for (x, p) in pairs {
            if p.is_negative() {
                return Err(Error::InvalidDist(format!("negative weight {}", fmt_rat(&p))));
            }
            d.add_mass(x, p);
        }
        if d.weight() > Rat::one() {
            return Err(Error::InvalidDist(format!("weight {} exceeds 1", fmt_rat(&d.weight()))));
        }
        Ok(d)
    }

    /// Like [`Dist::from_pairs`] but without the weight bound; for internal
    /// accumulation where the bound is established by construction.
    pub(crate) fn accumulate<I: IntoIterator<Item = (T, Rat)>>(pairs: I) -> Self {
        let mut d = Self::empty();
        for (x, p) in pairs {
            d.add_mass(x, p);
        }
        d
    }

    pub(crate) fn add_mass(&mut self, x: T, p: Rat) {
        if p.is_zero() {
            return;
        }
        let slot = self.entries.entry(x).or_insert_with(Rat::zero);
        *slot += p;
        if slot.is_zero() {
            // only reachable with negative increments, which callers avoid
            self.entries.retain(|_, v| !v.is_zero());
        }
    }

    pub fn weight(&self) -> Rat {
        self.entries.values().fold(Rat::zero(), |acc, p| acc + p)
    }

    pub fn is_full(&self) -> bool {
        self.weight().is_one()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, x: &T) -> Rat {
        self.entries.get(x).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = &T> {
        self.entries.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&T, &Rat)> {
        self.entries.iter()
    }

    pub fn into_pairs(self) -> impl Iterator<Item = (T, Rat)> {
        self.entries.into_iter()
    }

    pub fn max_prob(&self) -> Rat {
        self.entries.values().max().cloned().unwrap_or_else(Rat::zero)
    }

    /// Push-forward along `f`.
    pub fn map<U: Ord + Clone, F: FnMut(&T) -> U>(&self, mut f: F) -> Dist<U> {
        Dist::accumulate(self.entries.iter().map(|(x, p)| (f(x), p.clone())))
    }

    /// Push-forward along a partial function; fails if `f` fails on any
    /// support element.
    pub fn try_map<U: Ord + Clone, F: FnMut(&T) -> Result<U>>(&self, mut f: F) -> Result<Dist<U>> {
        let mut out = Dist::empty();
        for (x, p) in &self.entries {
            out.add_mass(f(x)?, p.clone());
        }
        Ok(out)
    }

    /// Kleisli extension: `avg ∘ map f` without building the intermediate.
    pub fn bind<U: Ord + Clone, F: FnMut(&T) -> Dist<U>>(&self, mut f: F) -> Dist<U> {
        let mut out = Dist::empty();
        for (x, p) in &self.entries {
            for (y, q) in f(x).entries {
                out.add_mass(y, p * q);
            }
        }
        out
    }

    pub fn try_bind<U: Ord + Clone, F: FnMut(&T) -> Result<Dist<U>>>(&self, mut f: F) -> Result<Dist<U>> {
        let mut out = Dist::empty();
        for (x, p) in &self.entries {
            for (y, q) in f(x)?.entries {
                out.add_mass(y, p * q);
            }
        }
        Ok(out)
    }

    /// `Σ_x d.x × f.x`.
    pub fn expected<F: FnMut(&T) -> Rat>(&self, mut f: F) -> Rat {
        self.entries.iter().fold(Rat::zero(), |acc, (x, p)| acc + p * f(x))
    }

    /// Probability of the event `pred`, i.e. the expectation of `[pred]`.
    pub fn prob_of<F: FnMut(&T) -> bool>(&self, mut pred: F) -> Rat {
        self.expected(|x| if pred(x) { Rat::one() } else { Rat::zero() })
    }

    /// General comprehension `(⊙x: d · r × {{e}}) / (⊙x: d · r)`.
    pub fn comprehend<U, R, E>(&self, mut r: R, mut e: E) -> Result<Dist<U>>
    where
        U: Ord + Clone,
        R: FnMut(&T) -> Rat,
        E: FnMut(&T) -> U,
    {
        let mut num = Dist::empty();
        let mut den = Rat::zero();
        for (x, p) in &self.entries {
            let w = r(x);
            if w.is_negative() {
                return Err(Error::InvalidDist("negative comprehension weight".into()));
            }
            let m = p * w;
            den += &m;
            num.add_mass(e(x), m);
        }
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(num.scaled(&den.recip()))
    }

    /// Bayesian conditioning on the (possibly fractional) likelihood `r`.
    pub fn condition<R: FnMut(&T) -> Rat>(&self, r: R) -> Result<Dist<T>> {
        self.comprehend(r, |x| x.clone())
    }

    /// Rescales to weight one.
    pub fn normalize(&self) -> Result<Dist<T>> {
        let w = self.weight();
        if w.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(self.scaled(&w.recip()))
    }

    pub(crate) fn scaled(&self, k: &Rat) -> Dist<T> {
        if k.is_zero() {
            return Dist::empty();
        }
        Dist { entries: self.entries.iter().map(|(x, p)| (x.clone(), p * k)).collect() }
    }

    pub(crate) fn add_scaled(&mut self, other: &Dist<T>, k: &Rat) {
        for (x, p) in &other.entries {
            self.add_mass(x.clone(), p * k);
        }
    }

    /// Pointwise sum; fails if the result would weigh more than 1.
    pub fn sum(&self, other: &Dist<T>) -> Result<Dist<T>> {
        let mut out = self.clone();
        out.add_scaled(other, &Rat::one());
        if out.weight() > Rat::one() {
            return Err(Error::InvalidDist("sum exceeds weight 1".into()));
        }
        Ok(out)
    }

    /// Independent product.
    pub fn product<U: Ord + Clone>(&self, other: &Dist<U>) -> Dist<(T, U)> {
        let mut out = Dist::empty();
        for (x, p) in &self.entries {
            for (y, q) in &other.entries {
                out.add_mass((x.clone(), y.clone()), p * q);
            }
        }
        out
    }

    /// Pointwise `self ≤ other`.
    pub fn le(&self, other: &Dist<T>) -> bool {
        self.entries.iter().all(|(x, p)| *p <= other.get(x))
    }
}

impl<T: Ord + Clone> Dist<Dist<T>> {
    /// Monad multiplication: average the inner distributions.
    pub fn avg(&self) -> Dist<T> {
        self.bind(|d| d.clone())
    }
}

impl<T: Ord + fmt::Debug> fmt::Debug for Dist<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{{")?;
        for (i, (x, p)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x:?}@{}", fmt_rat(p))?;
        }
        write!(f, "}}}}")
    }
}

impl<T: Ord + fmt::Display> fmt::Display for Dist<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{{")?;
        for (i, (x, p)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x} @ {}", fmt_rat(p))?;
        }
        write!(f, "}}}}")
    }
}

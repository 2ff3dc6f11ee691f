//! Leakage measures on priors and hypers.
//!
//! Shannon entropy uses the natural logarithm and is the only floating-point
//! quantity here; Bayes risk and the gauge are exact.

use num_traits::{One, Zero};

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::hyper::{Hyper, InitState};
use crate::prob::{to_f64, Rat};
use crate::refine::gauge;
use crate::value::Value;

fn require_full_dist<T: Ord + Clone>(d: &Dist<T>) -> Result<()> {
    if d.is_full() {
        Ok(())
    } else {
        Err(Error::InvalidDist("measure of a partial distribution".into()))
    }
}

fn require_full(h: &Hyper) -> Result<()> {
    if h.weight().is_one() {
        Ok(())
    } else {
        Err(Error::InvalidDist("measure of a partial hyper".into()))
    }
}

/// `−Σ p ln p`.
pub fn shannon<T: Ord + Clone>(d: &Dist<T>) -> Result<f64> {
    require_full_dist(d)?;
    Ok(entropy_unchecked(d))
}

fn entropy_unchecked<T: Ord + Clone>(d: &Dist<T>) -> f64 {
    d.iter()
        .map(|(_, p)| to_f64(p))
        .filter(|p| *p > 0.0)
        .map(|p| -p * p.ln())
        .sum()
}

/// Expected posterior entropy.
pub fn cond_shannon(h: &Hyper) -> Result<f64> {
    require_full(h)?;
    Ok(h.entries().map(|(_, d, p)| to_f64(p) * entropy_unchecked(d)).sum())
}

/// Chance that a single best guess is wrong.
pub fn bayes_risk<T: Ord + Clone>(d: &Dist<T>) -> Result<Rat> {
    require_full_dist(d)?;
    Ok(Rat::one() - d.max_prob())
}

pub fn cond_bayes_risk(h: &Hyper) -> Result<Rat> {
    require_full(h)?;
    Ok(h.entries().fold(Rat::zero(), |acc, (_, d, p)| acc + p * (Rat::one() - d.max_prob())))
}

#[derive(Debug, Clone, PartialEq)]
pub struct InnerReport {
    pub vis: Value,
    pub inner: Dist<Value>,
    pub weight: Rat,
    pub entropy: f64,
    pub risk: Rat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeakReport {
    pub prior_entropy: f64,
    /// Absent when the output hyper is partial.
    pub posterior_entropy: Option<f64>,
    pub prior_risk: Rat,
    pub posterior_risk: Option<Rat>,
    pub gauge_before: Rat,
    pub gauge_after: Rat,
    pub weight: Rat,
    pub deficit: Rat,
    pub inners: Vec<InnerReport>,
}

impl LeakReport {
    pub fn entropy_leak(&self) -> Option<f64> {
        self.posterior_entropy.map(|h| self.prior_entropy - h)
    }
}

/// Measures before (`s`) and after (`out`, the program's hyper at `s`).
pub fn report(s: &InitState, out: &Hyper) -> Result<LeakReport> {
    let full = out.weight().is_one();
    let inners = out
        .entries()
        .map(|(v, d, p)| InnerReport {
            vis: v.clone(),
            inner: d.clone(),
            weight: p.clone(),
            entropy: entropy_unchecked(d),
            risk: Rat::one() - d.max_prob(),
        })
        .collect();
    Ok(LeakReport {
        prior_entropy: shannon(&s.hid)?,
        posterior_entropy: if full { Some(cond_shannon(out)?) } else { None },
        prior_risk: bayes_risk(&s.hid)?,
        posterior_risk: if full { Some(cond_bayes_risk(out)?) } else { None },
        gauge_before: gauge(&Hyper::point(s)),
        gauge_after: gauge(out),
        weight: out.weight(),
        deficit: out.deficit(),
        inners,
    })
}

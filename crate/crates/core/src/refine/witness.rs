//! Transport tables certifying entropy and secure refinement.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::hyper::{Hyper, Inner};
use crate::prob::{fmt_rat, Rat};
use crate::value::Value;

/// One weighted inner of a hyper, with its visible state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub vis: Value,
    pub inner: Inner,
    pub weight: Rat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessKind {
    /// Columns are met with equality.
    Entropy,
    /// Columns may fall short; the shortfall is recorded as slack.
    Secure,
}

/// `transport[(i, j)]` is the mass of source `i` merged into target `j`.
/// `slack[j]` is the hidden-state mass target `j` receives from the
/// termination step rather than from any source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub kind: WitnessKind,
    pub sources: Vec<Cell>,
    pub targets: Vec<Cell>,
    pub transport: BTreeMap<(usize, usize), Rat>,
    pub slack: Vec<Dist<Value>>,
}

pub(crate) fn cells(h: &Hyper) -> Vec<Cell> {
    h.entries()
        .map(|(v, d, p)| Cell { vis: v.clone(), inner: d.clone(), weight: p.clone() })
        .collect()
}

impl Witness {
    /// The witness of `h ⪯ h` that carries every inner through unchanged.
    pub fn identity(h: &Hyper) -> Witness {
        let cs = cells(h);
        let transport = cs.iter().enumerate().map(|(i, c)| ((i, i), c.weight.clone())).collect();
        Witness {
            kind: WitnessKind::Entropy,
            slack: vec![Dist::empty(); cs.len()],
            sources: cs.clone(),
            targets: cs,
            transport,
        }
    }

    pub fn source_hyper(&self) -> Hyper {
        hyper_of(&self.sources)
    }

    pub fn target_hyper(&self) -> Hyper {
        hyper_of(&self.targets)
    }

    /// Total mass added by the termination step.
    pub fn added_mass(&self) -> Rat {
        self.slack.iter().fold(Rat::zero(), |acc, s| acc + s.weight())
    }

    /// Re-checks every constraint exactly.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidWitness(m));
        if self.slack.len() != self.targets.len() {
            return bad("slack length differs from target count".into());
        }
        let mut rows = vec![Rat::zero(); self.sources.len()];
        let mut cols: Vec<Dist<Value>> = vec![Dist::empty(); self.targets.len()];
        for (&(i, j), x) in &self.transport {
            if i >= self.sources.len() || j >= self.targets.len() {
                return bad(format!("index ({i}, {j}) out of range"));
            }
            if !x.is_positive() {
                return bad(format!("non-positive transport at ({i}, {j})"));
            }
            if self.sources[i].vis != self.targets[j].vis {
                return bad(format!("transport ({i}, {j}) crosses visible states"));
            }
            rows[i] += x;
            cols[j].add_scaled(&self.sources[i].inner, x);
        }
        for (i, (r, c)) in rows.iter().zip(&self.sources).enumerate() {
            if *r != c.weight {
                return bad(format!("row {i} sums to {}, expected {}", fmt_rat(r), fmt_rat(&c.weight)));
            }
        }
        for (j, (col, t)) in cols.iter_mut().zip(&self.targets).enumerate() {
            let s = &self.slack[j];
            if self.kind == WitnessKind::Entropy && !s.is_empty() {
                return bad(format!("entropy witness has slack in column {j}"));
            }
            if s.iter().any(|(_, p)| p.is_negative()) {
                return bad(format!("negative slack in column {j}"));
            }
            col.add_scaled(s, &Rat::from_integer(1.into()));
            let want = t.inner.scaled(&t.weight);
            if *col != want {
                return bad(format!("column {j} is {col}, expected {want}"));
            }
        }
        Ok(())
    }

    /// True if this is a valid witness between exactly `s` and `i`.
    pub fn certifies(&self, s: &Hyper, i: &Hyper) -> bool {
        self.validate().is_ok() && self.sources == cells(s) && self.targets == cells(i)
    }
}

fn hyper_of(cs: &[Cell]) -> Hyper {
    Hyper::from_dist(Dist::accumulate(
        cs.iter().map(|c| ((c.vis.clone(), c.inner.clone()), c.weight.clone())),
    ))
}

/// Chains witnesses for `A → B` and `B → C` into one for `A → C` by
/// splitting each middle inner across its targets in proportion.
pub fn compose_witness(w1: &Witness, w2: &Witness) -> Result<Witness> {
    if w1.targets != w2.sources {
        return Err(Error::InvalidWitness("middle hypers differ".into()));
    }
    let mut by_mid: BTreeMap<usize, Vec<(usize, &Rat)>> = BTreeMap::new();
    for (&(j, k), y) in &w2.transport {
        by_mid.entry(j).or_default().push((k, y));
    }
    let mut transport: BTreeMap<(usize, usize), Rat> = BTreeMap::new();
    for (&(i, j), x) in &w1.transport {
        let bj = &w1.targets[j].weight;
        for (k, y) in by_mid.get(&j).into_iter().flatten() {
            *transport.entry((i, *k)).or_insert_with(Rat::zero) += x * *y / bj;
        }
    }
    transport.retain(|_, v| !v.is_zero());

    let mut slack = w2.slack.clone();
    for (&(j, k), y) in &w2.transport {
        let s1 = &w1.slack[j];
        if !s1.is_empty() {
            slack[k].add_scaled(s1, &(y / &w1.targets[j].weight));
        }
    }
    let kind = if w1.kind == WitnessKind::Entropy && w2.kind == WitnessKind::Entropy {
        WitnessKind::Entropy
    } else {
        WitnessKind::Secure
    };
    let w = Witness { kind, sources: w1.sources.clone(), targets: w2.targets.clone(), transport, slack };
    w.validate()?;
    Ok(w)
}

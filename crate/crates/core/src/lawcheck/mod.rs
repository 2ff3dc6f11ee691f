//! Checking equivalence and refinement between programs by evaluating both
//! at a fixed suite of initial states.
//!
//! Both relations quantify over every prior, which cannot be enumerated; a
//! [`PriorSuite`] samples point priors, the uniform prior and seeded random
//! full-support priors. A passing verdict is evidence, not a proof.

mod catalog;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use catalog::{run_catalog, Catalog, CatalogOptions, CatalogReport, InstanceResult, Law, LawResult};

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::hyper::{Hyper, InitState};
use crate::lang::Program;
use crate::prob::Rat;
use crate::refine::{entropy_refines, secure_refines, Witness};
use crate::semantics::{Evaluator, Space};
use crate::value::Value;

/// Visible states used per prior when the visible space is larger than this.
const MAX_VIS_STATES: usize = 8;

#[derive(Debug, Clone)]
pub struct PriorSuite {
    pub states: Vec<InitState>,
}

impl PriorSuite {
    /// Point priors, the uniform prior and `k` seeded random priors with
    /// integer weights in `1..=10`, each paired with the visible states.
    pub fn new(space: &Space, seed: u64, k: usize) -> PriorSuite {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let hs = space.hid_states();
        let mut priors: Vec<Dist<Value>> = hs.iter().map(|h| Dist::point(h.clone())).collect();
        priors.push(space.uniform_prior());
        for _ in 0..k {
            let ws: Vec<u32> = hs.iter().map(|_| rng.gen_range(1..=10)).collect();
            let total: u32 = ws.iter().sum();
            let d = Dist::from_pairs(hs.iter().zip(&ws).map(|(h, w)| (h.clone(), Rat::new((*w).into(), total.into()))))
                .expect("normalised weights");
            priors.push(d);
        }
        priors.dedup();
        let mut vs = space.vis_states();
        if vs.len() > MAX_VIS_STATES {
            vs.shuffle(&mut rng);
            vs.truncate(MAX_VIS_STATES);
            vs.sort();
        }
        let states = priors
            .into_iter()
            .flat_map(|hid| vs.iter().map(move |v| InitState { vis: v.clone(), hid: hid.clone() }))
            .collect();
        PriorSuite { states }
    }

    pub fn single(s: InitState) -> PriorSuite {
        PriorSuite { states: vec![s] }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Equiv,
    /// Secure refinement `⊑`.
    Refine,
    /// Entropy refinement `⪯`.
    EntropyRefine,
}

impl Relation {
    pub fn name(self) -> &'static str {
        match self {
            Relation::Equiv => "equiv",
            Relation::Refine => "refine",
            Relation::EntropyRefine => "entropy-refine",
        }
    }

    pub fn parse(s: &str) -> Option<Relation> {
        match s {
            "equiv" => Some(Relation::Equiv),
            "refine" => Some(Relation::Refine),
            "entropy-refine" | "entropy" => Some(Relation::EntropyRefine),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PriorResult {
    pub state: InitState,
    pub holds: bool,
    pub lhs: Hyper,
    pub rhs: Hyper,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub relation: Relation,
    pub holds: bool,
    pub results: Vec<PriorResult>,
}

impl Verdict {
    pub fn checked(&self) -> usize {
        self.results.len()
    }

    /// The first state, in suite order, where the relation fails.
    pub fn counterexample(&self) -> Option<&PriorResult> {
        self.results.iter().find(|r| !r.holds)
    }

    pub fn note(&self) -> Option<String> {
        let c = self.counterexample()?;
        Some(match self.relation {
            Relation::Equiv => "hypers differ".to_string(),
            Relation::Refine if c.lhs.weight() > c.rhs.weight() => {
                "implementation terminates less often than the specification".to_string()
            }
            _ => "no transport of the specification's inners onto the implementation's exists".to_string(),
        })
    }
}

fn check_same_space(p1: &Program, p2: &Program) -> Result<()> {
    if p1.decls != p2.decls {
        return Err(Error::SpaceMismatch("programs declare different global variables".into()));
    }
    Ok(())
}

/// Decides `relation` between `spec` and `imp` at every suite state.
pub fn check(ev: &Evaluator, spec: &Program, imp: &Program, suite: &PriorSuite, relation: Relation) -> Result<Verdict> {
    check_same_space(spec, imp)?;
    let results = suite
        .states
        .par_iter()
        .map(|s| {
            let lhs = ev.run(&spec.body, s)?;
            let rhs = ev.run(&imp.body, s)?;
            let (holds, witness) = match relation {
                Relation::Equiv => (lhs == rhs, None),
                Relation::Refine => {
                    let w = secure_refines(&lhs, &rhs)?;
                    (w.is_some(), w)
                }
                Relation::EntropyRefine => {
                    let w = entropy_refines(&lhs, &rhs)?;
                    (w.is_some(), w)
                }
            };
            Ok(PriorResult { state: s.clone(), holds, lhs, rhs, witness })
        })
        .collect::<Result<Vec<_>>>()?;
    let holds = results.iter().all(|r| r.holds);
    Ok(Verdict { relation, holds, results })
}

pub fn check_equiv(ev: &Evaluator, p1: &Program, p2: &Program, suite: &PriorSuite) -> Result<Verdict> {
    check(ev, p1, p2, suite, Relation::Equiv)
}

pub fn check_refine(ev: &Evaluator, spec: &Program, imp: &Program, suite: &PriorSuite) -> Result<Verdict> {
    check(ev, spec, imp, suite, Relation::Refine)
}

/// Suite for a program's declared space.
pub fn suite_for(p: &Program, seed: u64, k: usize) -> PriorSuite {
    PriorSuite::new(&Space::of(p), seed, k)
}

/// A prior with the uniform distribution over the hidden space and the
/// first visible state.
pub fn uniform_state(p: &Program) -> InitState {
    let sp = Space::of(p);
    InitState { vis: sp.vis_states().remove(0), hid: sp.uniform_prior() }
}

impl PriorResult {
    pub fn weight_gap(&self) -> Rat {
        self.rhs.weight() - self.lhs.weight()
    }
}

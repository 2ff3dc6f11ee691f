//! Loops as least fixed points under the termination order.
//!
//! `while p do S od` started in `s` behaves like a chain over loop-head
//! states: from `t` it leaves with hyper `exit(t) = ⟦{1−p}⟧.t` and continues
//! with `cont(t) = ⟦{p}; S⟧.t`, a hyper whose entries are again loop-head
//! states. The k-th approximant from the empty program is the exit mass
//! collected along the first k steps of that chain.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use num_traits::{One, Signed, Zero};

use super::{is_constant, Evaluator};
use crate::error::{Error, Result};
use crate::hyper::{Hyper, InitState};
use crate::lang::{eval_prob, Expr, Stmt};
use crate::prob::Rat;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoopStatus {
    /// Deficit fell to the tolerance.
    Converged,
    /// No further mass can ever exit: the approximant is the fixed point.
    FixedPoint,
    /// Limit solved exactly over the finite set of loop-head states.
    Exact,
    /// Stopped at the iteration bound with deficit above tolerance.
    MaxIterations,
}

#[derive(Debug, Clone)]
pub struct LoopReport {
    pub hyper: Hyper,
    pub iterations: usize,
    pub deficit: Rat,
    pub status: LoopStatus,
    pub converged: bool,
}

struct Node {
    cont: Vec<(usize, Rat)>,
    exit: Hyper,
}

struct Table<'a> {
    ev: &'a Evaluator,
    body: &'a Stmt,
    p: &'a Expr,
    states: Vec<InitState>,
    index: HashMap<InitState, usize>,
    nodes: Vec<Option<Node>>,
}

impl<'a> Table<'a> {
    fn new(ev: &'a Evaluator, body: &'a Stmt, p: &'a Expr, root: &InitState) -> Self {
        let mut t = Table { ev, body, p, states: Vec::new(), index: HashMap::new(), nodes: Vec::new() };
        t.intern(root.clone());
        t
    }

    fn intern(&mut self, s: InitState) -> usize {
        if let Some(&i) = self.index.get(&s) {
            return i;
        }
        let i = self.states.len();
        self.index.insert(s.clone(), i);
        self.states.push(s);
        self.nodes.push(None);
        i
    }

    fn expand(&mut self, i: usize) -> Result<&Node> {
        if self.nodes[i].is_none() {
            let s = self.states[i].clone();
            let p = self.p;
            let enter = self.ev.assert_by(&s, |v, h| eval_prob(p, v, h))?;
            let exit = self.ev.assert_by(&s, |v, h| Ok(Rat::one() - eval_prob(p, v, h)?))?;
            let after = enter.bind(|t| self.ev.run(self.body, t))?;
            let mut cont = Vec::with_capacity(after.len());
            for (t, w) in after.states() {
                let w = w.clone();
                cont.push((self.intern(t), w));
            }
            self.nodes[i] = Some(Node { cont, exit });
        }
        Ok(self.nodes[i].as_ref().expect("expanded"))
    }

    fn all_expanded(&self) -> bool {
        self.nodes.iter().all(Option::is_some)
    }

    /// States from which some positive exit is reachable.
    fn productive(&self) -> BTreeSet<usize> {
        let mut rev: Vec<Vec<usize>> = vec![Vec::new(); self.states.len()];
        let mut queue = VecDeque::new();
        let mut seen = BTreeSet::new();
        for (i, n) in self.nodes.iter().enumerate() {
            let n = n.as_ref().expect("closure expanded");
            for (j, _) in &n.cont {
                rev[*j].push(i);
            }
            if !n.exit.is_empty() {
                seen.insert(i);
                queue.push_back(i);
            }
        }
        while let Some(j) = queue.pop_front() {
            for &i in &rev[j] {
                if seen.insert(i) {
                    queue.push_back(i);
                }
            }
        }
        seen
    }
}

/// Forward propagation of the loop-head distribution.
struct Chain<'a> {
    table: Table<'a>,
    mass: BTreeMap<usize, Rat>,
    acc: Hyper,
    steps: usize,
}

impl<'a> Chain<'a> {
    fn new(ev: &'a Evaluator, body: &'a Stmt, p: &'a Expr, s: &InitState) -> Self {
        let table = Table::new(ev, body, p, s);
        let mut mass = BTreeMap::new();
        mass.insert(0, Rat::one());
        Chain { table, mass, acc: Hyper::empty(), steps: 0 }
    }

    fn step(&mut self) -> Result<()> {
        let mut next: BTreeMap<usize, Rat> = BTreeMap::new();
        let current = std::mem::take(&mut self.mass);
        for (i, m) in current {
            let node = self.table.expand(i)?;
            self.acc.add_scaled(&node.exit, &m);
            for (j, w) in &node.cont {
                *next.entry(*j).or_insert_with(Rat::zero) += &m * w;
            }
        }
        self.mass = next;
        self.steps += 1;
        let cap = self.table.ev.cfg.max_states;
        if self.table.states.len() > cap {
            return Err(Error::LoopStates(cap));
        }
        Ok(())
    }

    /// True when no remaining mass can reach an exit.
    fn finished(&self) -> bool {
        if self.mass.is_empty() {
            return true;
        }
        if !self.mass.keys().all(|i| self.table.nodes[*i].is_some()) || !self.table.all_expanded() {
            return false;
        }
        let prod = self.table.productive();
        self.mass.keys().all(|i| !prod.contains(i))
    }
}

fn report(hyper: Hyper, iterations: usize, status: LoopStatus, tol: &Rat) -> LoopReport {
    let deficit = hyper.deficit();
    let converged = deficit <= *tol;
    LoopReport { hyper, iterations, deficit, status, converged }
}

/// The k-th approximant `𝓛^k(abort)` at `s`.
pub fn loop_approximant(ev: &Evaluator, body: &Stmt, p: &Expr, s: &InitState, k: usize) -> Result<LoopReport> {
    let mut chain = Chain::new(ev, body, p, s);
    for _ in 0..k {
        if chain.mass.is_empty() {
            break;
        }
        chain.step()?;
    }
    let status = if chain.finished() { LoopStatus::FixedPoint } else { LoopStatus::MaxIterations };
    let mut r = report(chain.acc, k, status, &ev.cfg.tol);
    if r.status == LoopStatus::MaxIterations && r.converged {
        r.status = LoopStatus::Converged;
    }
    Ok(r)
}

/// Iterates approximants until the deficit is at most `tol`, an exact fixed
/// point is reached, or `max_k` steps have been taken.
pub fn loop_fixpoint(ev: &Evaluator, body: &Stmt, p: &Expr, s: &InitState, tol: &Rat, max_k: usize) -> Result<LoopReport> {
    let mut chain = Chain::new(ev, body, p, s);
    loop {
        if chain.finished() {
            return Ok(report(chain.acc, chain.steps, LoopStatus::FixedPoint, tol));
        }
        if chain.acc.deficit() <= *tol {
            return Ok(report(chain.acc, chain.steps, LoopStatus::Converged, tol));
        }
        if chain.steps >= max_k {
            return Ok(report(chain.acc, chain.steps, LoopStatus::MaxIterations, tol));
        }
        chain.step()?;
    }
}

/// The exact least fixed point when the reachable loop-head states are
/// finite and within the configured cap; otherwise iterates.
pub fn loop_limit(ev: &Evaluator, body: &Stmt, p: &Expr, s: &InitState) -> Result<LoopReport> {
    let mut table = Table::new(ev, body, p, s);
    let mut i = 0;
    while i < table.states.len() {
        if table.states.len() > ev.cfg.state_cap {
            return loop_fixpoint(ev, body, p, s, &ev.cfg.tol, ev.cfg.max_k);
        }
        table.expand(i)?;
        i += 1;
    }
    let prod: Vec<usize> = table.productive().into_iter().collect();
    let n_states = table.states.len();
    if !prod.contains(&0) {
        return Ok(report(Hyper::empty(), n_states, LoopStatus::Exact, &ev.cfg.tol));
    }
    let pos: HashMap<usize, usize> = prod.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let n = prod.len();
    // expected visits x solve x (I − T) = e_root, i.e. (I − T)ᵀ xᵀ = e_root
    let mut a = vec![vec![Rat::zero(); n + 1]; n];
    for (r, row) in a.iter_mut().enumerate() {
        row[r] = Rat::one();
    }
    for (k, &i) in prod.iter().enumerate() {
        for (j, w) in &table.nodes[i].as_ref().expect("expanded").cont {
            if let Some(&l) = pos.get(j) {
                a[l][k] -= w;
            }
        }
    }
    a[pos[&0]][n] = Rat::one();
    let x = gauss_jordan(a);
    let mut acc = Hyper::empty();
    for (k, &i) in prod.iter().enumerate() {
        if !x[k].is_zero() {
            acc.add_scaled(&table.nodes[i].as_ref().expect("expanded").exit, &x[k]);
        }
    }
    Ok(report(acc, n_states, LoopStatus::Exact, &ev.cfg.tol))
}

/// Solves a nonsingular augmented system in place.
fn gauss_jordan(mut a: Vec<Vec<Rat>>) -> Vec<Rat> {
    let n = a.len();
    for c in 0..n {
        let piv = (c..n).find(|&r| !a[r][c].is_zero()).expect("system is nonsingular on productive states");
        a.swap(c, piv);
        let inv = a[c][c].recip();
        for v in a[c].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let prow = a[c].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r == c || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (k, pv) in prow.iter().enumerate() {
                if !pv.is_zero() {
                    row[k] -= &f * pv;
                }
            }
        }
    }
    a.into_iter().map(|row| row[n].clone()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Termination {
    /// Constant continuation probability strictly below one.
    Certified(Rat),
    Unverified,
}

#[derive(Debug, Clone)]
pub struct LoopEquivReport {
    pub per_state: Vec<(InitState, bool)>,
    pub termination: Termination,
}

impl LoopEquivReport {
    pub fn fixed_point_holds(&self) -> bool {
        self.per_state.iter().all(|(_, ok)| *ok)
    }

    pub fn holds(&self) -> bool {
        self.fixed_point_holds() && matches!(self.termination, Termination::Certified(_))
    }

    pub fn counterexample(&self) -> Option<&InitState> {
        self.per_state.iter().find(|(_, ok)| !ok).map(|(s, _)| s)
    }
}

/// Checks that `w` satisfies the loop's fixed-point equation
/// `(body; w) [p] skip = w` at each given state, and whether the loop
/// certainly terminates.
pub fn check_loop_equiv(ev: &Evaluator, body: &Stmt, p: &Expr, w: &Stmt, states: &[InitState]) -> Result<LoopEquivReport> {
    let unrolled = Stmt::pchoice(p.clone(), Stmt::seq(body.clone(), w.clone()), Stmt::Skip);
    let mut per_state = Vec::with_capacity(states.len());
    for s in states {
        let lhs = ev.run(&unrolled, s)?;
        let rhs = ev.run(w, s)?;
        per_state.push((s.clone(), lhs == rhs));
    }
    let termination = if is_constant(p) {
        match eval_prob(p, &[], &[]) {
            Ok(c) if c < Rat::one() && !c.is_negative() => Termination::Certified(c),
            _ => Termination::Unverified,
        }
    } else {
        Termination::Unverified
    };
    Ok(LoopEquivReport { per_state, termination })
}

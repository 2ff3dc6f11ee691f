//! Denotational evaluator: a command and an initial `(v, δ)` give a hyper.
//!
//! Every state-changing command is run on the joint `{{v}} × δ` and the
//! result is re-split by final visible value (`rv`); revelations split by
//! the emitted value instead and leave `v` alone. Sequencing is Kleisli
//! composition, so earlier splits are never undone.

mod loops;
mod space;

use num_traits::{One, Zero};

pub use loops::{check_loop_equiv, loop_approximant, loop_fixpoint, loop_limit, LoopEquivReport, LoopReport, LoopStatus, Termination};
pub use space::Space;

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::hyper::{Hyper, InitState};
use crate::lang::{eval_dist_expr, eval_expr, eval_prob, Decl, Expr, Program, Stmt, VarRef, Vis};
use crate::prob::Rat;
use crate::value::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoopMode {
    /// Solve for the limit when the loop's reachable states are finite,
    /// falling back to iteration otherwise.
    Exact,
    /// Iterate approximants until the deficit is below tolerance.
    Iterate,
}

#[derive(Debug, Clone)]
pub struct Config {
    pub tol: Rat,
    pub max_k: usize,
    pub loops: LoopMode,
    pub implicit_uniform_locals: bool,
    /// Largest loop-head state set solved exactly.
    pub state_cap: usize,
    /// Iteration gives up with an error beyond this many loop-head states.
    pub max_states: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            tol: Rat::new(1.into(), 1_000_000_000.into()),
            max_k: 1_000_000,
            loops: LoopMode::Exact,
            implicit_uniform_locals: false,
            state_cap: 400,
            max_states: 20_000,
        }
    }
}

/// `⟦p⟧.s` under the default configuration.
pub fn denote(p: &Program, s: &InitState) -> Result<Hyper> {
    Evaluator::default().run(&p.body, s)
}

/// Partitions a joint distribution by visible value.
pub fn rv(joint: &Dist<(Value, Value)>) -> Hyper {
    Hyper::rv(joint)
}

/// Runs `second` on every outcome of `first`, keeping `first`'s splits.
pub fn kleisli_seq<F, G>(first: F, second: G) -> impl Fn(&InitState) -> Result<Hyper>
where
    F: Fn(&InitState) -> Result<Hyper>,
    G: Fn(&InitState) -> Result<Hyper>,
{
    move |s| first(s)?.bind(&second)
}

#[derive(Debug, Clone, Default)]
pub struct Evaluator {
    pub cfg: Config,
}

fn parts(s: &InitState) -> Result<&[Value]> {
    s.vis.as_tuple().ok_or_else(|| Error::runtime(s.vis.to_string(), "visible state is not a tuple"))
}

fn tuple(h: &Value) -> Result<&[Value]> {
    h.as_tuple().ok_or_else(|| Error::runtime(h.to_string(), "hidden state is not a tuple"))
}

fn at(v: &Value, h: &Value, e: Error) -> Error {
    match e {
        Error::Runtime { .. } => e,
        other => Error::runtime(format!("v={v}, h={h}"), other.to_string()),
    }
}

fn with_slot(t: &[Value], i: usize, x: Value) -> Value {
    let mut t = t.to_vec();
    t[i] = x;
    Value::Tuple(t)
}

impl Evaluator {
    pub fn new(cfg: Config) -> Self {
        Evaluator { cfg }
    }

    pub fn run(&self, stmt: &Stmt, s: &InitState) -> Result<Hyper> {
        match stmt {
            Stmt::Skip => Ok(Hyper::point(s)),
            Stmt::Abort => Ok(Hyper::empty()),
            Stmt::Assert(q) => self.assert_by(s, |v, h| eval_prob(q, v, h)),
            Stmt::Assign(x, e) => self.update(s, x, |v, h| Ok(Dist::point(eval_expr(e, v, h)?))),
            Stmt::Choose(x, d) => self.update(s, x, |v, h| eval_dist_expr(d, v, h)),
            Stmt::Reveal(e) => self.reveal(s, |v, h| Ok(Dist::point(eval_expr(e, v, h)?))),
            Stmt::RevealDist(d) => self.reveal(s, |v, h| eval_dist_expr(d, v, h)),
            Stmt::Seq(a, b) => self.run(a, s)?.bind(|t| self.run(b, t)),
            Stmt::PChoice(p, l, r) => self.choice(s, |v, h| eval_prob(p, v, h), l, r),
            Stmt::If(g, l, r) => self.choice(s, |v, h| eval_prob(g, v, h), l, r),
            Stmt::While(p, body) => {
                let report = match self.cfg.loops {
                    LoopMode::Exact => loop_limit(self, body, p, s)?,
                    LoopMode::Iterate => loop_fixpoint(self, body, p, s, &self.cfg.tol, self.cfg.max_k)?,
                };
                Ok(report.hyper)
            }
            Stmt::Scope(decls, body) => {
                let pushed = self.scope_push(decls, s)?;
                let out = pushed.bind(|t| self.run(body, t))?;
                Ok(scope_pop(decls, &out))
            }
        }
    }

    /// `{q}`: survive with probability `q`, conditioning on survival.
    fn assert_by<Q>(&self, s: &InitState, q: Q) -> Result<Hyper>
    where
        Q: Fn(&[Value], &[Value]) -> Result<Rat>,
    {
        let v = parts(s)?;
        let mut total = Rat::zero();
        let mut weights = Vec::with_capacity(s.hid.len());
        for (h, p) in s.hid.iter() {
            let w = q(v, tuple(h)?).map_err(|e| at(&s.vis, h, e))?;
            total += p * &w;
            weights.push(w);
        }
        if total.is_zero() {
            return Ok(Hyper::empty());
        }
        let inv = total.recip();
        let inner = Dist::accumulate(s.hid.iter().zip(weights).map(|((h, p), w)| (h.clone(), p * w * &inv)));
        Ok(Hyper::from_dist(Dist::point((s.vis.clone(), inner)).scaled(&total)))
    }

    fn choice<P>(&self, s: &InitState, p: P, l: &Stmt, r: &Stmt) -> Result<Hyper>
    where
        P: Fn(&[Value], &[Value]) -> Result<Rat>,
    {
        let left = self.assert_by(s, &p)?.bind(|t| self.run(l, t))?;
        let right = self.assert_by(s, |v, h| Ok(Rat::one() - p(v, h)?))?.bind(|t| self.run(r, t))?;
        let mut out = left;
        out.add_scaled(&right, &Rat::one());
        Ok(out)
    }

    /// Assignment or choice to `x`, then a split on the final visible state.
    fn update<D>(&self, s: &InitState, x: &VarRef, d: D) -> Result<Hyper>
    where
        D: Fn(&[Value], &[Value]) -> Result<Dist<Value>>,
    {
        let v = parts(s)?;
        let mut joint = Dist::empty();
        for (h, p) in s.hid.iter() {
            let ht = tuple(h)?;
            let out = d(v, ht).map_err(|e| at(&s.vis, h, e))?;
            for (val, q) in out.iter() {
                if !x.domain.contains(val) {
                    return Err(Error::runtime(
                        format!("v={}, h={h}", s.vis),
                        format!("value {val} is outside the domain {} of '{}'", x.domain, x.name),
                    ));
                }
                let key = match x.vis {
                    Vis::Vis => (with_slot(v, x.index, val.clone()), h.clone()),
                    Vis::Hid => (s.vis.clone(), with_slot(ht, x.index, val.clone())),
                };
                joint.add_mass(key, p * q);
            }
        }
        Ok(Hyper::rv(&joint))
    }

    /// Emits a value drawn per hidden state; splits on what was emitted.
    fn reveal<D>(&self, s: &InitState, d: D) -> Result<Hyper>
    where
        D: Fn(&[Value], &[Value]) -> Result<Dist<Value>>,
    {
        let v = parts(s)?;
        let mut joint = Dist::empty();
        for (h, p) in s.hid.iter() {
            let out = d(v, tuple(h)?).map_err(|e| at(&s.vis, h, e))?;
            for (e, q) in out.iter() {
                joint.add_mass((e.clone(), h.clone()), p * q);
            }
        }
        let split = Hyper::rv(&joint);
        Ok(Hyper::from_dist(split.as_dist().map(|(_, inner)| (s.vis.clone(), inner.clone()))))
    }

    /// Extends the state with the scope's locals, appended in order.
    pub fn scope_push(&self, decls: &[Decl], s: &InitState) -> Result<Hyper> {
        let mut h = Hyper::point(s);
        for d in decls {
            let vals = d.domain.values();
            let init = if self.cfg.implicit_uniform_locals {
                Dist::uniform(vals)?
            } else {
                // never read before the body assigns it
                Dist::point(vals[0].clone())
            };
            h = h.bind(|t| {
                let v = parts(t)?;
                let mut joint = Dist::empty();
                for (hv, p) in t.hid.iter() {
                    let ht = tuple(hv)?;
                    for (x, q) in init.iter() {
                        let key = match d.vis {
                            Vis::Vis => (append(v, x), hv.clone()),
                            Vis::Hid => (t.vis.clone(), append(ht, x)),
                        };
                        joint.add_mass(key, p * q);
                    }
                }
                Ok(Hyper::rv(&joint))
            })?;
        }
        Ok(h)
    }
}

fn append(t: &[Value], x: &Value) -> Value {
    let mut t = t.to_vec();
    t.push(x.clone());
    Value::Tuple(t)
}

fn truncate(t: &Value, k: usize) -> Value {
    let xs = t.as_tuple().expect("state tuples");
    Value::Tuple(xs[..xs.len() - k].to_vec())
}

/// Drops the scope's locals: visible ones leave the key (the split they
/// caused stays), hidden ones are marginalised out of each inner.
pub fn scope_pop(decls: &[Decl], h: &Hyper) -> Hyper {
    let nv = decls.iter().filter(|d| d.vis == Vis::Vis).count();
    let nh = decls.len() - nv;
    if nv == 0 && nh == 0 {
        return h.clone();
    }
    Hyper::from_dist(h.as_dist().map(|(v, inner)| {
        let inner = if nh == 0 { inner.clone() } else { inner.map(|x| truncate(x, nh)) };
        (truncate(v, nv), inner)
    }))
}

/// `⟦S⟧` over the whole program state with an evaluator.
pub fn denote_with(ev: &Evaluator, stmt: &Stmt, s: &InitState) -> Result<Hyper> {
    ev.run(stmt, s)
}

/// True if the expression mentions no variables.
pub fn is_constant(e: &Expr) -> bool {
    match e {
        Expr::Lit(_) => true,
        Expr::Var(_) => false,
        Expr::Neg(a) | Expr::Not(a) => is_constant(a),
        Expr::Bin(_, a, b) => is_constant(a) && is_constant(b),
        Expr::Tuple(xs) => xs.iter().all(is_constant),
    }
}

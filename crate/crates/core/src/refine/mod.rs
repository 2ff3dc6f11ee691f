//! Termination, entropy and secure refinement between hypers.
//!
//! Entropy refinement `S ⪯ I` holds when the inners of `S` can be split and
//! merged, within each visible state, into exactly the inners of `I`. That is
//! a transport problem: find `x_ij ≥ 0` with row sums equal to the source
//! weights and, for every target `j` and hidden value `h`,
//! `Σ_i x_ij δ_i(h) = b_j ε_j(h)`. Secure refinement additionally allows the
//! target to carry extra mass (termination refinement first), which turns the
//! column equalities into inequalities.

mod simplex;
mod witness;

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

pub use simplex::{feasible, Row};
pub use witness::{compose_witness, Cell, Witness, WitnessKind};

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::hyper::Hyper;
use crate::prob::Rat;
use crate::value::Value;

fn arity(v: &Value) -> Option<usize> {
    v.as_tuple().map(|t| t.len())
}

/// Checks that both hypers live over tuples of the same shape.
pub fn check_space(a: &Hyper, b: &Hyper) -> Result<()> {
    let mut shapes = BTreeSet::new();
    for h in [a, b] {
        for (v, d, _) in h.entries() {
            let hs: BTreeSet<_> = d.support().map(arity).collect();
            for ha in hs {
                shapes.insert((arity(v), ha));
            }
        }
    }
    if shapes.len() > 1 {
        return Err(Error::SpaceMismatch(format!("tuple shapes {shapes:?}")));
    }
    Ok(())
}

/// Pointwise order: every entry of `a` weighs at most its weight in `b`.
pub fn terminates_leq(a: &Hyper, b: &Hyper) -> bool {
    a.le(b)
}

/// Decides `s ⪯ i`, returning a certificate when it holds.
pub fn entropy_refines(s: &Hyper, i: &Hyper) -> Result<Option<Witness>> {
    solve(s, i, WitnessKind::Entropy)
}

/// Decides `s ⊑ i`: some `Δ` with `s ≤ Δ ⪯ i`.
pub fn secure_refines(s: &Hyper, i: &Hyper) -> Result<Option<Witness>> {
    solve(s, i, WitnessKind::Secure)
}

/// Sum over entries of weight times the sum of squared inner probabilities.
pub fn gauge(h: &Hyper) -> Rat {
    h.entries().fold(Rat::zero(), |acc, (_, d, p)| {
        acc + p * d.iter().fold(Rat::zero(), |a, (_, q)| a + q * q)
    })
}

fn solve(s: &Hyper, i: &Hyper, kind: WitnessKind) -> Result<Option<Witness>> {
    check_space(s, i)?;
    let src = witness::cells(s);
    let tgt = witness::cells(i);

    if kind == WitnessKind::Entropy && s.weight() != i.weight() {
        return Ok(None);
    }
    if kind == WitnessKind::Secure && s.weight() > i.weight() {
        return Ok(None);
    }

    // transport variables only where visible states agree and supports nest
    let mut vars: Vec<(usize, usize)> = Vec::new();
    for (a, c) in src.iter().enumerate() {
        let before = vars.len();
        for (b, t) in tgt.iter().enumerate() {
            if c.vis == t.vis && c.inner.support().all(|h| !t.inner.get(h).is_zero()) {
                vars.push((a, b));
            }
        }
        if vars.len() == before {
            return Ok(None);
        }
    }

    let mut rows: Vec<Row> = Vec::new();
    let mut row_of_src: Vec<Row> = src.iter().map(|c| Row { coefs: vec![], rhs: c.weight.clone() }).collect();
    let mut col_rows: BTreeMap<(usize, &Value), Row> = BTreeMap::new();
    for (b, t) in tgt.iter().enumerate() {
        for (h, q) in t.inner.iter() {
            col_rows.insert((b, h), Row { coefs: vec![], rhs: &t.weight * q });
        }
    }
    for (k, &(a, b)) in vars.iter().enumerate() {
        row_of_src[a].coefs.push((k, Rat::one()));
        for (h, p) in src[a].inner.iter() {
            if let Some(r) = col_rows.get_mut(&(b, h)) {
                r.coefs.push((k, p.clone()));
            }
        }
    }
    let mut nvars = vars.len();
    let mut slack_vars: Vec<(usize, Value)> = Vec::new();
    if kind == WitnessKind::Secure {
        for ((b, h), r) in col_rows.iter_mut() {
            r.coefs.push((nvars, Rat::one()));
            slack_vars.push((*b, (*h).clone()));
            nvars += 1;
        }
    }
    rows.extend(row_of_src);
    rows.extend(col_rows.into_values());

    let Some(x) = feasible(nvars, &rows) else {
        return Ok(None);
    };

    let mut transport = BTreeMap::new();
    for (k, &(a, b)) in vars.iter().enumerate() {
        if !x[k].is_zero() {
            transport.insert((a, b), x[k].clone());
        }
    }
    let mut slack: Vec<Dist<Value>> = vec![Dist::empty(); tgt.len()];
    for (k, (b, h)) in slack_vars.into_iter().enumerate() {
        slack[b].add_mass(h, x[vars.len() + k].clone());
    }
    let w = Witness { kind, sources: src, targets: tgt, transport, slack };
    w.validate()?;
    Ok(Some(w))
}

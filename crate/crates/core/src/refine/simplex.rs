//! Exact phase-one simplex for `A x = b, x ≥ 0` feasibility.
//!
//! Dense tableau over rationals with one artificial variable per row and
//! Bland's smallest-index rule for both entering and leaving choices, so the
//! method terminates without any perturbation.

use num_traits::{Signed, Zero};

use crate::prob::Rat;

/// A sparse equality row: `Σ coef · x[var] = rhs`.
#[derive(Debug, Clone, Default)]
pub struct Row {
    pub coefs: Vec<(usize, Rat)>,
    pub rhs: Rat,
}

/// Returns a nonnegative solution of the system, or `None` if none exists.
pub fn feasible(nvars: usize, rows: &[Row]) -> Option<Vec<Rat>> {
    let m = rows.len();
    let width = nvars + m;
    let mut tab: Vec<Vec<Rat>> = Vec::with_capacity(m);
    let mut rhs: Vec<Rat> = Vec::with_capacity(m);
    for (r, row) in rows.iter().enumerate() {
        let mut t = vec![Rat::zero(); width];
        let neg = row.rhs.is_negative();
        for (k, c) in &row.coefs {
            debug_assert!(*k < nvars);
            if neg {
                t[*k] -= c;
            } else {
                t[*k] += c;
            }
        }
        t[nvars + r] = Rat::from_integer(1.into());
        rhs.push(if neg { -row.rhs.clone() } else { row.rhs.clone() });
        tab.push(t);
    }
    let mut basis: Vec<usize> = (nvars..width).collect();

    // reduced costs of the phase-one objective Σ artificials
    let mut cost = vec![Rat::zero(); width];
    let mut obj = Rat::zero();
    for r in 0..m {
        for k in 0..nvars {
            if !tab[r][k].is_zero() {
                cost[k] -= &tab[r][k];
            }
        }
        obj -= &rhs[r];
    }

    while let Some(enter) = (0..width).find(|&k| cost[k].is_negative()) {
        let mut leave: Option<(usize, Rat)> = None;
        for r in 0..m {
            if !tab[r][enter].is_positive() {
                continue;
            }
            let ratio = &rhs[r] / &tab[r][enter];
            let better = match &leave {
                None => true,
                Some((lr, best)) => ratio < *best || (ratio == *best && basis[r] < basis[*lr]),
            };
            if better {
                leave = Some((r, ratio));
            }
        }
        // phase one is bounded below by zero, so some row always limits the step
        let (pr, _) = leave?;
        pivot(&mut tab, &mut rhs, &mut cost, &mut obj, pr, enter);
        basis[pr] = enter;
    }

    if !obj.is_zero() {
        return None;
    }
    let mut x = vec![Rat::zero(); nvars];
    for (r, &b) in basis.iter().enumerate() {
        if b < nvars {
            x[b] = rhs[r].clone();
        }
    }
    Some(x)
}

fn pivot(tab: &mut [Vec<Rat>], rhs: &mut [Rat], cost: &mut [Rat], obj: &mut Rat, pr: usize, pc: usize) {
    let inv = tab[pr][pc].recip();
    if inv != Rat::from_integer(1.into()) {
        for c in tab[pr].iter_mut() {
            if !c.is_zero() {
                *c *= &inv;
            }
        }
        rhs[pr] *= &inv;
    }
    let prow = tab[pr].clone();
    let prhs = rhs[pr].clone();
    let nz: Vec<usize> = (0..prow.len()).filter(|&k| !prow[k].is_zero()).collect();
    for (r, row) in tab.iter_mut().enumerate() {
        if r == pr || row[pc].is_zero() {
            continue;
        }
        let f = row[pc].clone();
        for &k in &nz {
            row[k] -= &f * &prow[k];
        }
        rhs[r] -= &f * &prhs;
    }
    if !cost[pc].is_zero() {
        let f = cost[pc].clone();
        for &k in &nz {
            cost[k] -= &f * &prow[k];
        }
        *obj -= &f * &prhs;
    }
}

//! Generators, oracles and property bodies shared by the property suite and
//! the acceptance runner.
#![allow(dead_code)]

use std::collections::BTreeMap;

use hyperflow::analysis::{cond_bayes_risk, cond_shannon};
use hyperflow::lang::{parse, pretty, Stmt};
use hyperflow::refine::{compose_witness, entropy_refines, gauge, secure_refines};
use hyperflow::semantics::{loop_approximant, Evaluator};
use hyperflow::{Dist, Hyper, InitState, Rat, Value};
use num_traits::{One, Zero};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub type Res = Result<(), TestCaseError>;

pub fn r(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

pub fn tup(i: i64) -> Value {
    Value::Tuple(vec![Value::int(i)])
}

// ---------------------------------------------------------------- distributions

/// A distribution over `0..n` from small positive integer weights; when
/// `partial`, total mass is scaled below one.
pub fn arb_dist(n: usize, partial: bool) -> impl Strategy<Value = Dist<u8>> {
    (prop::collection::vec(0u32..5, n), 0u32..4).prop_map(move |(mut ws, deficit)| {
        if ws.iter().all(|w| *w == 0) {
            ws[0] = 1;
        }
        let total: u32 = ws.iter().sum::<u32>() + if partial { deficit } else { 0 };
        Dist::from_pairs(
            ws.iter()
                .enumerate()
                .filter(|(_, w)| **w > 0)
                .map(|(i, w)| (i as u8, Rat::new((*w).into(), total.into()))),
        )
        .unwrap()
    })
}

/// A kernel `u8 -> Dist<u8>` as a lookup table.
pub fn arb_kernel(n: usize) -> impl Strategy<Value = Vec<Dist<u8>>> {
    prop::collection::vec(arb_dist(n, true), n)
}

pub fn apply(k: &[Dist<u8>], x: &u8) -> Dist<u8> {
    k[*x as usize].clone()
}

pub fn dist_monad_laws(d: &Dist<u8>, f: &[Dist<u8>], g: &[Dist<u8>]) -> Res {
    let x = 1u8;
    prop_assert_eq!(Dist::point(x).bind(|y| apply(f, y)), apply(f, &x));
    prop_assert_eq!(d.bind(|y| Dist::point(*y)), d.clone());
    let lhs = d.bind(|y| apply(f, y)).bind(|z| apply(g, z));
    let rhs = d.bind(|y| apply(f, y).bind(|z| apply(g, z)));
    prop_assert_eq!(lhs, rhs);
    // map is bind followed by point
    prop_assert_eq!(d.map(|y| y % 2), d.bind(|y| Dist::point(y % 2)));
    Ok(())
}

// ---------------------------------------------------------------- hypers

/// A cell list: (visible index, inner, positive integer weight).
type RawCells = Vec<(i64, Dist<Value>, u32)>;

fn arb_inner(n_hid: usize) -> impl Strategy<Value = Dist<Value>> {
    arb_dist(n_hid, false).prop_map(|d| d.map(|x| tup(*x as i64)))
}

fn arb_cells(n_vis: i64, n_hid: usize, max: usize) -> impl Strategy<Value = RawCells> {
    prop::collection::vec((0..n_vis, arb_inner(n_hid), 1u32..7), 1..=max)
}

fn to_hyper(cells: &RawCells, scale: &Rat) -> Hyper {
    let total: u32 = cells.iter().map(|c| c.2).sum();
    Hyper::from_entries(
        cells
            .iter()
            .map(|(v, d, w)| (tup(*v), d.clone(), Rat::new((*w).into(), total.into()) * scale)),
    )
    .unwrap()
}

/// Full hyper with at most `max` inners.
pub fn arb_hyper(n_vis: i64, n_hid: usize, max: usize) -> impl Strategy<Value = Hyper> {
    arb_cells(n_vis, n_hid, max).prop_map(|c| to_hyper(&c, &Rat::one()))
}

/// Hyper of weight in `(0, 1]`.
pub fn arb_partial_hyper(n_vis: i64, n_hid: usize, max: usize) -> impl Strategy<Value = Hyper> {
    (arb_cells(n_vis, n_hid, max), 1i64..=4).prop_map(|(c, k)| to_hyper(&c, &r(k, 4)))
}

/// Merges the cells of `h` within each visible class through a random
/// row-stochastic split matrix; the result entropy-refines `h`.
pub fn merge(h: &Hyper, seeds: &[u32], targets: usize) -> Hyper {
    let mut by_vis: BTreeMap<Value, Vec<(Dist<Value>, Rat)>> = BTreeMap::new();
    for (v, d, p) in h.entries() {
        by_vis.entry(v.clone()).or_default().push((d.clone(), p.clone()));
    }
    let mut it = seeds.iter().cycle();
    let mut out = Vec::new();
    for (v, cells) in by_vis {
        let m = targets.clamp(1, cells.len());
        let mut mass: Vec<Rat> = vec![Rat::zero(); m];
        let mut acc: Vec<BTreeMap<Value, Rat>> = vec![BTreeMap::new(); m];
        for (d, w) in &cells {
            let mut row: Vec<u32> = (0..m).map(|_| *it.next().unwrap() % 4).collect();
            if row.iter().all(|x| *x == 0) {
                row[0] = 1;
            }
            let tot: u32 = row.iter().sum();
            for (j, rj) in row.iter().enumerate() {
                if *rj == 0 {
                    continue;
                }
                let x = w * Rat::new((*rj).into(), tot.into());
                mass[j] += &x;
                for (hv, q) in d.iter() {
                    *acc[j].entry(hv.clone()).or_insert_with(Rat::zero) += &x * q;
                }
            }
        }
        for j in 0..m {
            if mass[j].is_zero() {
                continue;
            }
            let inner = Dist::from_pairs(acc[j].iter().map(|(k, x)| (k.clone(), x / &mass[j]))).unwrap();
            out.push((v.clone(), inner, mass[j].clone()));
        }
    }
    Hyper::from_entries(out).unwrap()
}

/// Adds `frac` of the deficit, spread like `extra`: a termination step.
pub fn grow(h: &Hyper, extra: &Hyper, frac: &Rat) -> Hyper {
    let k = h.deficit() * frac;
    let mut entries: Vec<(Value, Dist<Value>, Rat)> = h.entries().map(|(v, d, p)| (v.clone(), d.clone(), p.clone())).collect();
    entries.extend(extra.entries().map(|(v, d, p)| (v.clone(), d.clone(), p * &k)));
    Hyper::from_entries(entries).unwrap()
}

/// A termination step followed by merging: the result secure-refines `h`.
pub fn grow_and_merge(h: &Hyper, extra: &Hyper, frac: &Rat, seeds: &[u32], targets: usize) -> Hyper {
    merge(&grow(h, extra, frac), seeds, targets)
}

pub fn seeds() -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0u32..100, 8..32)
}

// ---------------------------------------------------------------- oracle

/// Independent check of `a ⪯ b` for hypers over a two-point hidden space:
/// within each visible class the posteriors of `b` must be dominated by
/// those of `a` in convex order (equal mass, equal mean and no larger
/// call-option value `E(q - t)+` at every support point `t`).
pub fn convex_order_oracle(a: &Hyper, b: &Hyper, top: &Value) -> bool {
    type Pts = Vec<(Rat, Rat)>;
    fn classes(h: &Hyper, top: &Value) -> BTreeMap<Value, Pts> {
        let mut m: BTreeMap<Value, Pts> = BTreeMap::new();
        for (v, d, p) in h.entries() {
            m.entry(v.clone()).or_default().push((d.get(top), p.clone()));
        }
        m
    }
    let (ca, cb) = (classes(a, top), classes(b, top));
    if ca.keys().ne(cb.keys()) {
        return false;
    }
    for (v, pa) in &ca {
        let pb = &cb[v];
        let mass = |ps: &Pts| ps.iter().fold(Rat::zero(), |s, (_, w)| s + w);
        let mean = |ps: &Pts| ps.iter().fold(Rat::zero(), |s, (q, w)| s + q * w);
        if mass(pa) != mass(pb) || mean(pa) != mean(pb) {
            return false;
        }
        let call = |ps: &Pts, t: &Rat| {
            ps.iter().fold(Rat::zero(), |s, (q, w)| if q > t { s + (q - t) * w } else { s })
        };
        for (t, _) in pa.iter().chain(pb) {
            if call(pb, t) > call(pa, t) {
                return false;
            }
        }
    }
    true
}

/// Hypers over a binary hidden space with at most three inners.
pub fn arb_binary_hyper() -> impl Strategy<Value = Hyper> {
    arb_hyper(2, 2, 3)
}

pub fn oracle_agreement(a: &Hyper, b: &Hyper) -> Res {
    let lp = entropy_refines(a, b).unwrap();
    let oracle = convex_order_oracle(a, b, &tup(0));
    prop_assert_eq!(lp.is_some(), oracle, "a = {}\nb = {}", a, b);
    if let Some(w) = lp {
        prop_assert!(w.validate().is_ok());
        prop_assert!(w.certifies(a, b));
    }
    Ok(())
}

// ---------------------------------------------------------------- order axioms

pub fn order_axioms(a: &Hyper, b: &Hyper, c: &Hyper) -> Res {
    // reflexive
    let w = entropy_refines(a, a).unwrap();
    prop_assert!(w.as_ref().is_some_and(|w| w.validate().is_ok() && w.certifies(a, a)));
    // b merges a, c merges b
    let wab = entropy_refines(a, b).unwrap();
    let wbc = entropy_refines(b, c).unwrap();
    prop_assert!(wab.is_some(), "merge not recognised:\n{}\n{}", a, b);
    prop_assert!(wbc.is_some());
    let (wab, wbc) = (wab.unwrap(), wbc.unwrap());
    prop_assert!(wab.validate().is_ok() && wbc.validate().is_ok());
    // transitive, through the composed certificate and directly
    let wac = compose_witness(&wab, &wbc).unwrap();
    prop_assert!(wac.validate().is_ok());
    prop_assert!(wac.certifies(a, c));
    prop_assert!(entropy_refines(a, c).unwrap().is_some());
    // antisymmetric
    if entropy_refines(b, a).unwrap().is_some() {
        prop_assert_eq!(a, b);
    }
    Ok(())
}

pub fn secure_order_axioms(a: &Hyper, b: &Hyper, c: &Hyper) -> Res {
    let wab = secure_refines(a, b).unwrap();
    let wbc = secure_refines(b, c).unwrap();
    prop_assert!(wab.is_some(), "secure step not recognised:\n{}\n{}", a, b);
    prop_assert!(wbc.is_some());
    let (wab, wbc) = (wab.unwrap(), wbc.unwrap());
    let wac = compose_witness(&wab, &wbc).unwrap();
    prop_assert!(wac.validate().is_ok());
    prop_assert!(wac.certifies(a, c));
    prop_assert!(secure_refines(a, c).unwrap().is_some());
    prop_assert!(secure_refines(a, a).unwrap().is_some());
    if secure_refines(b, a).unwrap().is_some() {
        prop_assert_eq!(a, b);
    }
    Ok(())
}

pub fn gauge_monotone(a: &Hyper, b: &Hyper) -> Res {
    prop_assert!(entropy_refines(a, b).unwrap().is_some());
    let (ga, gb) = (gauge(a), gauge(b));
    if a == b {
        prop_assert_eq!(ga, gb);
    } else {
        prop_assert!(ga > gb, "gauge {} vs {} for\n{}\n{}", ga, gb, a, b);
    }
    Ok(())
}

pub fn marginals_preserved(a: &Hyper, b: &Hyper) -> Res {
    prop_assert_eq!(a.vis_marginal(), b.vis_marginal());
    prop_assert_eq!(a.weight(), b.weight());
    prop_assert_eq!(a.joint(), b.joint());
    Ok(())
}

pub fn measures_monotone(a: &Hyper, b: &Hyper) -> Res {
    prop_assert!(secure_refines(a, b).unwrap().is_some());
    if a.weight().is_one() && b.weight().is_one() {
        prop_assert!(cond_shannon(a).unwrap() <= cond_shannon(b).unwrap() + 1e-12);
        prop_assert!(cond_bayes_risk(a).unwrap() <= cond_bayes_risk(b).unwrap());
    }
    Ok(())
}

// ---------------------------------------------------------------- programs

pub const DECLS: &str = "vis v:{0..1}; hid h:{0..2};";

fn leaf(with_partial: bool) -> BoxedStrategy<String> {
    let mut xs: Vec<&'static str> = vec![
        "skip",
        "h := (h + 1) mod 3",
        "h := (h + v) mod 3",
        "h := 2 - h",
        "v := h mod 2",
        "v := h div 2",
        "v := 1 - v",
        "h :in uniform{h, (h + 1) mod 3}",
        "h :in uniform{0..2}",
        "v :in {{ h mod 2 @ 1/3, 1 @ 2/3 }}",
        "reveal h mod 2",
        "reveal h",
        "reveal (h + v) mod 3",
        "reveal {{ h @ 1/2, 0 @ 1/2 }}",
        "reveal h = v",
        "[[ hid t:{0..2}; t :in uniform{0..2}; h := (h + t) mod 3 ]]",
        "[[ vis g:{0..2}; g :in uniform{0..2}; reveal g = h ]]",
    ];
    if with_partial {
        xs.extend(["{h / 2}", "{1/2}", "abort", "{v = 0}"]);
    }
    prop::sample::select(xs).prop_map(str::to_string).boxed()
}

const PROBS: &[&str] = &["1/3", "1/2", "h / 2", "(v + 1) / 3"];
const GUARDS: &[&str] = &["h = 0", "h > v", "v = 1"];

/// Loop-free program bodies over `DECLS`.
pub fn arb_body(with_partial: bool) -> BoxedStrategy<String> {
    leaf(with_partial)
        .prop_recursive(3, 12, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a}; {b}")),
                (inner.clone(), prop::sample::select(PROBS), inner.clone())
                    .prop_map(|(a, p, b)| format!("({a}) [{p}] ({b})")),
                (prop::sample::select(GUARDS), inner.clone(), inner)
                    .prop_map(|(g, a, b)| format!("if {g} then {a} else {b} fi")),
            ]
        })
        .boxed()
}

pub fn arb_state() -> impl Strategy<Value = InitState> {
    (0i64..2, arb_dist(3, false)).prop_map(|(v, d)| InitState::new(tup(v), d.map(|x| tup(*x as i64))).unwrap())
}

pub fn run(src: &str, s: &InitState) -> Hyper {
    let p = parse(&format!("{DECLS} {src}")).unwrap_or_else(|e| panic!("{e}: {src}"));
    Evaluator::default().run(&p.body, s).unwrap_or_else(|e| panic!("{e}: {src}"))
}

pub fn kleisli_laws(a: &str, b: &str, c: &str, s: &InitState) -> Res {
    prop_assert_eq!(run(&format!("({a}; {b}); {c}"), s), run(&format!("{a}; ({b}; {c})"), s));
    prop_assert_eq!(run(&format!("skip; {a}"), s), run(a, s));
    prop_assert_eq!(run(&format!("{a}; skip"), s), run(a, s));
    // sequencing is binding the first result through the second
    let first = run(a, s);
    let p = parse(&format!("{DECLS} {b}")).unwrap();
    let ev = Evaluator::default();
    let bound = first.bind(|t| ev.run(&p.body, t)).unwrap();
    prop_assert_eq!(bound, run(&format!("{a}; {b}"), s));
    Ok(())
}

/// `while c do body od` approximants are a termination chain whose deficit
/// is exactly `c^k` when the body always terminates.
pub fn loop_chain(body: &str, c: (i64, i64), s: &InitState) -> Res {
    let src = format!("{DECLS} while {}/{} do {body} od", c.0, c.1);
    let p = parse(&src).unwrap();
    let Stmt::While(guard, b) = &p.body else { unreachable!() };
    let ev = Evaluator::default();
    let cr = r(c.0, c.1);
    let mut prev = Hyper::empty();
    let mut pow = Rat::one();
    for k in 0..6 {
        let a = loop_approximant(&ev, b, guard, s, k).unwrap();
        prop_assert!(prev.le(&a.hyper), "approximant {} not above {}", k, k.saturating_sub(1));
        prop_assert_eq!(&a.deficit, &pow);
        prop_assert_eq!(a.hyper.deficit(), pow.clone());
        pow *= &cr;
        prev = a.hyper;
    }
    Ok(())
}

pub fn parse_pretty_roundtrip(body: &str) -> Res {
    let p = parse(&format!("{DECLS} {body}")).unwrap();
    let printed = pretty(&p);
    let q = parse(&printed).map_err(|e| TestCaseError::fail(format!("{e}\n{printed}")))?;
    prop_assert_eq!(&p, &q);
    prop_assert_eq!(printed.clone(), pretty(&q));
    Ok(())
}

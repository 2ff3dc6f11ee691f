//! JSON and text renderings. JSON objects use serde_json's default map,
//! which keeps keys sorted, so output is canonical.

use hyperflow::analysis::LeakReport;
use hyperflow::lawcheck::{CatalogReport, PriorResult, Verdict};
use hyperflow::prob::fmt_rat;
use hyperflow::refine::{Cell, Witness, WitnessKind};
use hyperflow::semantics::{LoopReport, LoopStatus};
use hyperflow::{Dist, Hyper, InitState, Value};
use serde_json::{json, Value as Json};

pub fn inner(d: &Dist<Value>) -> Json {
    Json::Array(d.iter().map(|(h, p)| json!({ "hid": h.to_string(), "prob": fmt_rat(p) })).collect())
}

pub fn hyper(h: &Hyper) -> Json {
    let entries: Vec<Json> = h
        .entries()
        .map(|(v, d, p)| json!({ "vis": v.to_string(), "inner": inner(d), "prob": fmt_rat(p) }))
        .collect();
    json!({ "weight": fmt_rat(&h.weight()), "deficit": fmt_rat(&h.deficit()), "entries": entries })
}

pub fn state(s: &InitState) -> Json {
    json!({ "vis": s.vis.to_string(), "hid": inner(&s.hid) })
}

fn cell(c: &Cell) -> Json {
    json!({ "vis": c.vis.to_string(), "inner": inner(&c.inner), "weight": fmt_rat(&c.weight) })
}

pub fn witness(w: &Witness) -> Json {
    let transport: Vec<Json> = w
        .transport
        .iter()
        .map(|((i, j), m)| json!({ "from": i, "to": j, "mass": fmt_rat(m) }))
        .collect();
    json!({
        "kind": match w.kind { WitnessKind::Entropy => "entropy", WitnessKind::Secure => "secure" },
        "sources": w.sources.iter().map(cell).collect::<Vec<_>>(),
        "targets": w.targets.iter().map(cell).collect::<Vec<_>>(),
        "transport": transport,
        "slack": w.slack.iter().map(inner).collect::<Vec<_>>(),
        "added_mass": fmt_rat(&w.added_mass()),
    })
}

fn prior_result(r: &PriorResult, explain: bool) -> Json {
    let mut o = json!({
        "prior": state(&r.state),
        "holds": r.holds,
        "spec": hyper(&r.lhs),
        "impl": hyper(&r.rhs),
    });
    if explain {
        o["witness"] = r.witness.as_ref().map(witness).unwrap_or(Json::Null);
    }
    o
}

pub fn verdict(v: &Verdict, explain: bool) -> Json {
    let mut o = json!({
        "relation": v.relation.name(),
        "holds": v.holds,
        "checked": v.checked(),
        "summary": format!("{} on {} priors", if v.holds { "verified" } else { "refuted" }, v.checked()),
        "counterexample": v.counterexample().map(|c| prior_result(c, explain)).unwrap_or(Json::Null),
        "note": v.note().map(Json::String).unwrap_or(Json::Null),
    });
    if explain {
        o["results"] = Json::Array(v.results.iter().map(|r| prior_result(r, true)).collect());
    }
    o
}

fn float(x: f64, scale: f64) -> Json {
    json!(x * scale)
}

/// `scale` is 1 for nats, `1/ln 2` for bits.
pub fn leak(r: &LeakReport, scale: f64) -> Json {
    let opt = |x: Option<f64>| x.map(|x| float(x, scale)).unwrap_or(Json::Null);
    json!({
        "unit": if scale == 1.0 { "nats" } else { "bits" },
        "prior_entropy_float": float(r.prior_entropy, scale),
        "posterior_entropy_float": opt(r.posterior_entropy),
        "entropy_leak_float": opt(r.entropy_leak()),
        "prior_risk": fmt_rat(&r.prior_risk),
        "posterior_risk": r.posterior_risk.as_ref().map(|x| Json::String(fmt_rat(x))).unwrap_or(Json::Null),
        "gauge_before": fmt_rat(&r.gauge_before),
        "gauge_after": fmt_rat(&r.gauge_after),
        "weight": fmt_rat(&r.weight),
        "deficit": fmt_rat(&r.deficit),
        "inners": r.inners.iter().map(|i| json!({
            "vis": i.vis.to_string(),
            "inner": inner(&i.inner),
            "weight": fmt_rat(&i.weight),
            "entropy_float": float(i.entropy, scale),
            "risk": fmt_rat(&i.risk),
        })).collect::<Vec<_>>(),
    })
}

pub fn status_name(s: LoopStatus) -> &'static str {
    match s {
        LoopStatus::Converged => "converged",
        LoopStatus::FixedPoint => "fixed_point",
        LoopStatus::Exact => "exact",
        LoopStatus::MaxIterations => "max_iterations",
    }
}

pub fn loop_report(r: &LoopReport) -> Json {
    json!({
        "hyper": hyper(&r.hyper),
        "iterations": r.iterations,
        "deficit": fmt_rat(&r.deficit),
        "status": status_name(r.status),
        "converged": r.converged,
    })
}

pub fn catalog(r: &CatalogReport) -> Json {
    let laws: Vec<Json> = r
        .laws
        .iter()
        .map(|l| {
            json!({
                "name": l.name,
                "statement": l.statement,
                "relation": l.relation.name(),
                "strict": l.strict,
                "passed": l.passed,
                "instances": l.instances.iter().map(|i| json!({
                    "lhs": i.lhs,
                    "rhs": i.rhs,
                    "holds": i.holds,
                    "reverse_fails": i.reverse_fails,
                    "mutual": i.mutual,
                    "priors": i.priors,
                    "error": i.error,
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "passed": r.passed(),
        "total": r.laws.len(),
        "failed": r.failures().count(),
        "laws": laws,
    })
}

// ---- text ----

pub fn hyper_text(h: &Hyper) -> String {
    let mut s = format!("weight {}  deficit {}\n", fmt_rat(&h.weight()), fmt_rat(&h.deficit()));
    for (v, d, p) in h.entries() {
        s.push_str(&format!("  {:>10}  v={}  {}\n", fmt_rat(p), v, d));
    }
    s
}

pub fn verdict_text(v: &Verdict, explain: bool) -> String {
    let mut s = format!(
        "{}: {} on {} priors\n",
        v.relation.name(),
        if v.holds { "holds" } else { "FAILS" },
        v.checked()
    );
    if let Some(c) = v.counterexample() {
        s.push_str(&format!("counterexample prior: v={}  {}\n", c.state.vis, c.state.hid));
        if let Some(n) = v.note() {
            s.push_str(&format!("note: {n}\n"));
        }
        s.push_str(&format!("spec:\n{}impl:\n{}", hyper_text(&c.lhs), hyper_text(&c.rhs)));
    }
    if explain {
        for r in v.results.iter().filter(|r| r.witness.is_some()).take(1) {
            let w = r.witness.as_ref().expect("filtered");
            s.push_str(&format!("witness at v={} {}:\n", r.state.vis, r.state.hid));
            for ((i, j), m) in &w.transport {
                s.push_str(&format!("  spec inner {i} -> impl inner {j}: {}\n", fmt_rat(m)));
            }
            s.push_str(&format!("  added mass {}\n", fmt_rat(&w.added_mass())));
        }
    }
    s
}

pub fn leak_text(r: &LeakReport, scale: f64) -> String {
    let unit = if scale == 1.0 { "nats" } else { "bits" };
    let f = |x: Option<f64>| x.map(|x| format!("{:.6} {unit}", x * scale)).unwrap_or_else(|| "undefined (partial)".into());
    let risk = r.posterior_risk.as_ref().map(fmt_rat).unwrap_or_else(|| "undefined (partial)".into());
    format!(
        "entropy  prior {:.6} {unit}  posterior {}\nrisk     prior {}  posterior {}\ngauge    prior {}  posterior {}\nweight   {}  deficit {}\n",
        r.prior_entropy * scale,
        f(r.posterior_entropy),
        fmt_rat(&r.prior_risk),
        risk,
        fmt_rat(&r.gauge_before),
        fmt_rat(&r.gauge_after),
        fmt_rat(&r.weight),
        fmt_rat(&r.deficit),
    )
}

pub fn loop_text(r: &LoopReport) -> String {
    format!(
        "status {}  iterations {}  deficit {}  converged {}\n{}",
        status_name(r.status),
        r.iterations,
        fmt_rat(&r.deficit),
        r.converged,
        hyper_text(&r.hyper)
    )
}

pub fn catalog_text(r: &CatalogReport) -> String {
    let mut s = String::new();
    for l in &r.laws {
        s.push_str(&format!(
            "{} {:<36} {:<7} {}\n",
            if l.passed { "ok  " } else { "FAIL" },
            l.name,
            l.relation.name(),
            l.statement
        ));
        if !l.passed {
            for i in &l.instances {
                s.push_str(&format!("       {} vs {}: holds={}", i.lhs, i.rhs, i.holds));
                if let Some(e) = &i.error {
                    s.push_str(&format!(" error={e}"));
                }
                s.push('\n');
            }
        }
    }
    s.push_str(&format!("{} of {} laws passed\n", r.laws.len() - r.failures().count(), r.laws.len()));
    s
}

//! The bundled law catalog: program templates with `$NAME` holes and
//! concrete instantiations, each checked over a prior suite.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Deserialize;

use super::{check, suite_for, Relation};
use crate::error::{Error, Result};
use crate::lang::{parse, Program};
use crate::semantics::Evaluator;

const BUNDLED: &str = include_str!("laws.toml");

#[derive(Debug, Clone, Deserialize)]
pub struct Law {
    pub name: String,
    pub statement: String,
    pub relation: String,
    /// The reverse direction must fail on some instance.
    #[serde(default)]
    pub strict: bool,
    #[serde(default)]
    pub decls: Option<String>,
    pub lhs: String,
    pub rhs: String,
    #[serde(rename = "instance")]
    pub instances: Vec<BTreeMap<String, String>>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Catalog {
    #[serde(rename = "law")]
    pub laws: Vec<Law>,
}

impl Catalog {
    pub fn bundled() -> Result<Catalog> {
        Catalog::from_toml(BUNDLED)
    }

    pub fn from_toml(src: &str) -> Result<Catalog> {
        let c: Catalog = toml::from_str(src).map_err(|e| Error::Catalog(e.to_string()))?;
        for law in &c.laws {
            if Relation::parse(&law.relation).is_none() {
                return Err(Error::Catalog(format!("{}: unknown relation '{}'", law.name, law.relation)));
            }
        }
        Ok(c)
    }
}

#[derive(Debug, Clone)]
pub struct CatalogOptions {
    pub seed: u64,
    pub k: usize,
    /// Only laws whose name contains this string.
    pub filter: Option<String>,
    /// Also check equalities as refinement in both directions.
    pub mutual: bool,
}

impl Default for CatalogOptions {
    fn default() -> Self {
        CatalogOptions { seed: 0, k: 16, filter: None, mutual: true }
    }
}

#[derive(Debug, Clone)]
pub struct InstanceResult {
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
    /// For strict laws: whether the reverse direction failed.
    pub reverse_fails: Option<bool>,
    /// For equalities: whether both refinements held.
    pub mutual: Option<bool>,
    pub priors: usize,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct LawResult {
    pub name: String,
    pub statement: String,
    pub relation: Relation,
    pub strict: bool,
    pub instances: Vec<InstanceResult>,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct CatalogReport {
    pub laws: Vec<LawResult>,
}

impl CatalogReport {
    pub fn passed(&self) -> bool {
        self.laws.iter().all(|l| l.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &LawResult> {
        self.laws.iter().filter(|l| !l.passed)
    }
}

/// Replaces `$NAME` holes; names are ASCII alphanumerics and `_`.
fn substitute(template: &str, binds: &BTreeMap<String, String>) -> Result<String> {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    while let Some(i) = rest.find('$') {
        out.push_str(&rest[..i]);
        let after = &rest[i + 1..];
        let len = after.find(|c: char| !(c.is_ascii_alphanumeric() || c == '_')).unwrap_or(after.len());
        let name = &after[..len];
        let val = binds.get(name).ok_or_else(|| Error::Catalog(format!("unbound hole ${name}")))?;
        out.push_str(val);
        rest = &after[len..];
    }
    out.push_str(rest);
    Ok(out)
}

fn program(decls: &str, body: &str) -> Result<Program> {
    parse(&format!("{decls}\n{body}"))
}

fn run_instance(ev: &Evaluator, law: &Law, rel: Relation, binds: &BTreeMap<String, String>, opts: &CatalogOptions) -> Result<InstanceResult> {
    let decls = binds.get("decls").or(law.decls.as_ref()).cloned().unwrap_or_default();
    let lhs = substitute(&law.lhs, binds)?;
    let rhs = substitute(&law.rhs, binds)?;
    let pl = program(&decls, &lhs)?;
    let pr = program(&decls, &rhs)?;
    let suite = suite_for(&pl, opts.seed, opts.k);
    let fwd = check(ev, &pl, &pr, &suite, rel)?;
    let reverse_fails = if law.strict {
        Some(!check(ev, &pr, &pl, &suite, rel)?.holds)
    } else {
        None
    };
    let mutual = if rel == Relation::Equiv && opts.mutual {
        let a = check(ev, &pl, &pr, &suite, Relation::Refine)?.holds;
        let b = check(ev, &pr, &pl, &suite, Relation::Refine)?.holds;
        Some(a && b)
    } else {
        None
    };
    Ok(InstanceResult { lhs, rhs, holds: fwd.holds, reverse_fails, mutual, priors: suite.len(), error: None })
}

/// Runs every law (or those matching the filter).
pub fn run_catalog(catalog: &Catalog, ev: &Evaluator, opts: &CatalogOptions) -> CatalogReport {
    let laws: Vec<&Law> = catalog
        .laws
        .iter()
        .filter(|l| opts.filter.as_ref().is_none_or(|f| l.name.contains(f.as_str())))
        .collect();
    let results = laws
        .par_iter()
        .map(|law| {
            let rel = Relation::parse(&law.relation).expect("validated on load");
            let instances: Vec<InstanceResult> = law
                .instances
                .iter()
                .map(|b| {
                    run_instance(ev, law, rel, b, opts).unwrap_or_else(|e| InstanceResult {
                        lhs: substitute(&law.lhs, b).unwrap_or_default(),
                        rhs: substitute(&law.rhs, b).unwrap_or_default(),
                        holds: false,
                        reverse_fails: None,
                        mutual: None,
                        priors: 0,
                        error: Some(e.to_string()),
                    })
                })
                .collect();
            let all_hold = !instances.is_empty()
                && instances.iter().all(|i| i.error.is_none() && i.holds && i.mutual != Some(false));
            let strict_ok = !law.strict || instances.iter().any(|i| i.reverse_fails == Some(true));
            LawResult {
                name: law.name.clone(),
                statement: law.statement.clone(),
                relation: rel,
                strict: law.strict,
                passed: all_hold && strict_ok,
                instances,
            }
        })
        .collect();
    CatalogReport { laws: results }
}

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::hyper::InitState;
use crate::lang::{Decl, Program, Vis};
use crate::value::Value;

/// The global state space of a program: visible and hidden declarations in
/// tuple order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Space {
    pub vis: Vec<Decl>,
    pub hid: Vec<Decl>,
}

fn product(decls: &[Decl]) -> Vec<Value> {
    let mut out: Vec<Vec<Value>> = vec![Vec::new()];
    for d in decls {
        let vals = d.domain.values();
        out = out
            .into_iter()
            .flat_map(|prefix| {
                vals.iter().map(move |v| {
                    let mut t = prefix.clone();
                    t.push(v.clone());
                    t
                })
            })
            .collect();
    }
    out.into_iter().map(Value::Tuple).collect()
}

impl Space {
    pub fn of(p: &Program) -> Space {
        Space {
            vis: p.decls.iter().filter(|d| d.vis == Vis::Vis).cloned().collect(),
            hid: p.decls.iter().filter(|d| d.vis == Vis::Hid).cloned().collect(),
        }
    }

    pub fn vis_size(&self) -> usize {
        self.vis.iter().map(|d| d.domain.size()).product()
    }

    pub fn hid_size(&self) -> usize {
        self.hid.iter().map(|d| d.domain.size()).product()
    }

    /// All visible tuples in canonical order.
    pub fn vis_states(&self) -> Vec<Value> {
        product(&self.vis)
    }

    /// All hidden tuples in canonical order.
    pub fn hid_states(&self) -> Vec<Value> {
        product(&self.hid)
    }

    pub fn uniform_prior(&self) -> Dist<Value> {
        Dist::uniform(self.hid_states()).expect("domains are nonempty")
    }

    pub fn contains_vis(&self, v: &Value) -> bool {
        contains(&self.vis, v)
    }

    pub fn contains_hid(&self, h: &Value) -> bool {
        contains(&self.hid, h)
    }

    /// Validates an initial state against the declared domains.
    pub fn check(&self, s: &InitState) -> Result<()> {
        if !self.contains_vis(&s.vis) {
            return Err(Error::SpaceMismatch(format!("visible state {} is not in the declared space", s.vis)));
        }
        if let Some(h) = s.hid.support().find(|h| !self.contains_hid(h)) {
            return Err(Error::SpaceMismatch(format!("hidden state {h} is not in the declared space")));
        }
        if !s.hid.is_full() {
            return Err(Error::InvalidDist("prior must have weight 1".into()));
        }
        Ok(())
    }
}

fn contains(decls: &[Decl], v: &Value) -> bool {
    match v.as_tuple() {
        Some(xs) => xs.len() == decls.len() && xs.iter().zip(decls).all(|(x, d)| d.domain.contains(x)),
        None => false,
    }
}

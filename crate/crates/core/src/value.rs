//! Values of finite-domain program variables.

use std::fmt;

use num_traits::{One, Zero};

use crate::prob::Rat;

/// A program value. Numbers are exact rationals so that probability
/// expressions and integer variables share one arithmetic; variables of an
/// integer range domain only ever hold integral numbers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Bool(bool),
    Num(Rat),
    Sym(String),
    Tuple(Vec<Value>),
}

impl Value {
    pub fn int(n: i64) -> Value {
        Value::Num(crate::prob::int(n))
    }

    pub fn sym(s: &str) -> Value {
        Value::Sym(s.to_string())
    }

    pub fn unit() -> Value {
        Value::Tuple(Vec::new())
    }

    pub fn as_tuple(&self) -> Option<&[Value]> {
        match self {
            Value::Tuple(xs) => Some(xs),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    /// Numeric view with Booleans coerced to 0/1.
    pub fn as_num(&self) -> Option<Rat> {
        match self {
            Value::Num(r) => Some(r.clone()),
            Value::Bool(true) => Some(Rat::one()),
            Value::Bool(false) => Some(Rat::zero()),
            _ => None,
        }
    }

    pub fn is_integer(&self) -> bool {
        matches!(self, Value::Num(r) if r.is_integer())
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(true) => write!(f, "true"),
            Value::Bool(false) => write!(f, "false"),
            Value::Num(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Value::Num(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Value::Sym(s) => write!(f, "{s}"),
            Value::Tuple(xs) => {
                write!(f, "(")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// A declared finite domain.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Domain {
    Bool,
    Range(i64, i64),
    Enum(Vec<String>),
}

impl Domain {
    /// Elements in canonical order.
    pub fn values(&self) -> Vec<Value> {
        match self {
            Domain::Bool => vec![Value::Bool(false), Value::Bool(true)],
            Domain::Range(lo, hi) => (*lo..=*hi).map(Value::int).collect(),
            Domain::Enum(names) => {
                let mut v: Vec<Value> = names.iter().map(|s| Value::sym(s)).collect();
                v.sort();
                v
            }
        }
    }

    pub fn contains(&self, v: &Value) -> bool {
        match (self, v) {
            (Domain::Bool, Value::Bool(_)) => true,
            (Domain::Range(lo, hi), Value::Num(r)) => {
                r.is_integer() && *r >= crate::prob::int(*lo) && *r <= crate::prob::int(*hi)
            }
            (Domain::Enum(names), Value::Sym(s)) => names.iter().any(|n| n == s),
            _ => false,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Domain::Bool => 2,
            Domain::Range(lo, hi) => (hi - lo + 1).max(0) as usize,
            Domain::Enum(names) => names.len(),
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Bool => write!(f, "bool"),
            Domain::Range(lo, hi) => write!(f, "{{{lo}..{hi}}}"),
            Domain::Enum(names) => write!(f, "{{{}}}", names.join(", ")),
        }
    }
}

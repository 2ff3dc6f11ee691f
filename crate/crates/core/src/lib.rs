//! Hyperdistribution semantics for programs with visible and hidden state.
//!
//! A program over declared visible and hidden variables denotes, for every
//! initial visible value and prior over the hidden part, a *hyper*: a
//! (possibly partial) distribution over pairs of a final visible value and
//! the attacker's posterior over the hidden state. On top of that this crate
//! provides
//!
//! * exact rational distributions with the monad operations ([`dist`]),
//! * the termination, entropy and secure refinement orders on hypers,
//!   decided by exact linear feasibility with checkable witnesses ([`refine`]),
//! * a small language with parser and evaluator ([`lang`], [`semantics`]),
//! * leakage measures ([`analysis`]) and an algebraic-law checker
//!   ([`lawcheck`]).
//!
//! All probabilities are exact rationals; nothing in the refinement or
//! semantics layers uses floating point.

pub mod analysis;
pub mod dist;
pub mod error;
pub mod hyper;
pub mod lang;
pub mod lawcheck;
pub mod prob;
pub mod refine;
pub mod semantics;
pub mod value;

pub use dist::Dist;
pub use error::{Error, Result};
pub use hyper::{Hyper, InitState};
pub use prob::Rat;
pub use value::Value;

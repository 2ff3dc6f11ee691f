//! Surface language: declarations of visible and hidden finite-domain
//! variables followed by a command.
//!
//! ```text
//! file   := decl* stmt
//! decl   := ("vis" | "hid") IDENT ":" domain ";"
//! domain := "bool" | "{" INT ".." INT "}" | "{" IDENT ("," IDENT)* "}"
//! stmt   := choice (";" choice)* [";"]
//! choice := atom ("[" expr "]" atom)*
//! atom   := "skip" | "abort" | "{" expr "}" | "(" stmt ")"
//!         | IDENT ":=" expr | IDENT ":in" dexpr
//!         | "reveal" (dexpr | expr)
//!         | "if" expr "then" stmt "else" stmt "fi"
//!         | "while" expr "do" stmt "od"
//!         | "[[" decl* [stmt] "]]"
//! dexpr  := "uniform" "{" expr ("," expr)* "}" | "uniform" "{" expr ".." expr "}"
//!         | "{{" expr "@" expr ("," expr "@" expr)* "}}" | "{{" expr "}}"
//! ```
//!
//! `S [p] T` runs `S` with probability `p`; `while p do S od` enters the body
//! with probability `p`. Expressions have `or`, `and`, `not`, comparisons,
//! `+ -`, `* / div mod` and unary minus, loosest first.

mod ast;
mod eval;
mod lexer;
mod parser;
pub mod pretty;

pub use ast::{BinOp, DExpr, Decl, Expr, Program, Stmt, VarRef, Vis};
pub use eval::{eval_dist_expr, eval_expr, eval_prob};
pub use parser::{parse, parse_value, parse_with, ParseOptions};
pub use pretty::pretty;

//! Concrete syntax printer; `parse(pretty(p)) == p` for parsed programs.

use std::fmt::Write;

use super::ast::{BinOp, DExpr, Decl, Expr, Program, Stmt, Vis};
use crate::value::Value;

pub fn pretty(p: &Program) -> String {
    let mut out = String::new();
    for d in &p.decls {
        out.push_str(&decl(d));
        out.push('\n');
    }
    out.push_str(&stmt(&p.body));
    out.push('\n');
    out
}

pub fn decl(d: &Decl) -> String {
    let kw = match d.vis {
        Vis::Vis => "vis",
        Vis::Hid => "hid",
    };
    format!("{kw} {}: {};", d.name, d.domain)
}

pub fn stmt(s: &Stmt) -> String {
    match s {
        Stmt::Seq(a, b) => format!("{}; {}", choice(a), stmt(b)),
        _ => choice(s),
    }
}

fn choice(s: &Stmt) -> String {
    match s {
        Stmt::PChoice(p, l, r) => format!("{} [{}] {}", choice(l), expr(p), atom(r)),
        _ => atom(s),
    }
}

fn atom(s: &Stmt) -> String {
    match s {
        Stmt::Seq(..) | Stmt::PChoice(..) => format!("({})", stmt(s)),
        Stmt::Skip => "skip".into(),
        Stmt::Abort => "abort".into(),
        Stmt::Assert(e) => format!("{{{}}}", expr(e)),
        Stmt::Assign(v, e) => format!("{} := {}", v.name, expr(e)),
        Stmt::Choose(v, d) => format!("{} :in {}", v.name, dexpr(d)),
        Stmt::Reveal(e) => format!("reveal {}", expr(e)),
        Stmt::RevealDist(d) => format!("reveal {}", dexpr(d)),
        Stmt::If(g, a, b) => format!("if {} then {} else {} fi", expr(g), stmt(a), stmt(b)),
        Stmt::While(p, b) => format!("while {} do {} od", expr(p), stmt(b)),
        Stmt::Scope(ds, b) => {
            let mut out = String::from("[[ ");
            for d in ds {
                let _ = write!(out, "{} ", decl(d));
            }
            let _ = write!(out, "{} ]]", stmt(b));
            out
        }
    }
}

pub fn dexpr(d: &DExpr) -> String {
    match d {
        DExpr::Uniform(xs) => format!("uniform{{{}}}", xs.iter().map(expr).collect::<Vec<_>>().join(", ")),
        DExpr::UniformRange(lo, hi) => format!("uniform{{{}..{}}}", expr(lo), expr(hi)),
        DExpr::Point(e) => format!("{{{{ {} }}}}", expr(e)),
        DExpr::Enumerated(items) => {
            let parts: Vec<String> = items.iter().map(|(e, p)| format!("{} @ {}", expr(e), expr(p))).collect();
            format!("{{{{ {} }}}}", parts.join(", "))
        }
    }
}

fn op_str(op: BinOp) -> &'static str {
    match op {
        BinOp::Add => "+",
        BinOp::Sub => "-",
        BinOp::Mul => "*",
        BinOp::Div => "/",
        BinOp::IntDiv => "div",
        BinOp::Mod => "mod",
        BinOp::Eq => "=",
        BinOp::Ne => "!=",
        BinOp::Lt => "<",
        BinOp::Le => "<=",
        BinOp::Gt => ">",
        BinOp::Ge => ">=",
        BinOp::And => "and",
        BinOp::Or => "or",
    }
}

pub fn expr(e: &Expr) -> String {
    match e {
        Expr::Lit(v) => lit(v),
        Expr::Var(r) => r.name.clone(),
        Expr::Neg(a) => format!("-{}", expr(a)),
        Expr::Not(a) => format!("not {}", expr(a)),
        Expr::Bin(op, a, b) => format!("({} {} {})", expr(a), op_str(*op), expr(b)),
        Expr::Tuple(xs) => format!("({})", xs.iter().map(expr).collect::<Vec<_>>().join(", ")),
    }
}

fn lit(v: &Value) -> String {
    match v {
        Value::Num(r) if r.is_integer() && *r.numer() >= 0.into() => r.numer().to_string(),
        Value::Num(r) if r.is_integer() => format!("(0 - {})", -r.numer()),
        Value::Num(r) => format!("({} / {})", r.numer(), r.denom()),
        Value::Tuple(xs) => format!("({})", xs.iter().map(lit).collect::<Vec<_>>().join(", ")),
        other => other.to_string(),
    }
}

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::ast::{BinOp, DExpr, Expr, Vis};
use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::prob::{fmt_rat, Rat};
use crate::value::Value;

fn undefined<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Undefined(msg.into()))
}

fn num(v: &Value, op: &str) -> Result<Rat> {
    v.as_num().map_or_else(|| undefined(format!("'{op}' expects numbers, got {v}")), Ok)
}

fn int(v: &Value, op: &str) -> Result<Rat> {
    let n = num(v, op)?;
    if !n.is_integer() {
        return undefined(format!("'{op}' expects integers, got {v}"));
    }
    Ok(n)
}

fn boolean(v: &Value, op: &str) -> Result<bool> {
    v.as_bool().map_or_else(|| undefined(format!("'{op}' expects booleans, got {v}")), Ok)
}

/// Equality with Booleans read as 0/1 when compared against numbers.
fn values_eq(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Num(_), Value::Bool(_)) | (Value::Bool(_), Value::Num(_)) => a.as_num() == b.as_num(),
        (Value::Tuple(xs), Value::Tuple(ys)) => xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| values_eq(x, y)),
        _ => a == b,
    }
}

/// Evaluates `e` at visible tuple `vis` and hidden tuple `hid`.
pub fn eval_expr(e: &Expr, vis: &[Value], hid: &[Value]) -> Result<Value> {
    match e {
        Expr::Lit(v) => Ok(v.clone()),
        Expr::Var(r) => {
            let slot = match r.vis {
                Vis::Vis => vis.get(r.index),
                Vis::Hid => hid.get(r.index),
            };
            slot.cloned().map_or_else(|| undefined(format!("variable '{}' has no value", r.name)), Ok)
        }
        Expr::Neg(a) => Ok(Value::Num(-num(&eval_expr(a, vis, hid)?, "-")?)),
        Expr::Not(a) => Ok(Value::Bool(!boolean(&eval_expr(a, vis, hid)?, "not")?)),
        Expr::Tuple(xs) => Ok(Value::Tuple(xs.iter().map(|x| eval_expr(x, vis, hid)).collect::<Result<_>>()?)),
        Expr::Bin(op, a, b) => {
            let x = eval_expr(a, vis, hid)?;
            // short-circuit keeps guards like `h > 0 and 4 / h < 2` total
            match op {
                BinOp::And if !boolean(&x, "and")? => return Ok(Value::Bool(false)),
                BinOp::Or if boolean(&x, "or")? => return Ok(Value::Bool(true)),
                _ => {}
            }
            let y = eval_expr(b, vis, hid)?;
            binop(*op, &x, &y)
        }
    }
}

fn binop(op: BinOp, x: &Value, y: &Value) -> Result<Value> {
    Ok(match op {
        BinOp::Add => Value::Num(num(x, "+")? + num(y, "+")?),
        BinOp::Sub => Value::Num(num(x, "-")? - num(y, "-")?),
        BinOp::Mul => Value::Num(num(x, "*")? * num(y, "*")?),
        BinOp::Div => {
            let d = num(y, "/")?;
            if d.is_zero() {
                return undefined("division by zero");
            }
            Value::Num(num(x, "/")? / d)
        }
        BinOp::IntDiv | BinOp::Mod => {
            let name = if op == BinOp::Mod { "mod" } else { "div" };
            let (a, b) = (int(x, name)?.to_integer(), int(y, name)?.to_integer());
            if b.is_zero() {
                return undefined(format!("'{name}' by zero"));
            }
            let (q, r) = a.div_mod_floor(&b);
            Value::Num(Rat::from_integer(if op == BinOp::Mod { r } else { q }))
        }
        BinOp::Eq => Value::Bool(values_eq(x, y)),
        BinOp::Ne => Value::Bool(!values_eq(x, y)),
        BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
            let ord = match (x.as_num(), y.as_num()) {
                (Some(a), Some(b)) => a.cmp(&b),
                _ if std::mem::discriminant(x) == std::mem::discriminant(y) => x.cmp(y),
                _ => return undefined(format!("cannot compare {x} with {y}")),
            };
            Value::Bool(match op {
                BinOp::Lt => ord.is_lt(),
                BinOp::Le => ord.is_le(),
                BinOp::Gt => ord.is_gt(),
                _ => ord.is_ge(),
            })
        }
        BinOp::And => Value::Bool(boolean(x, "and")? && boolean(y, "and")?),
        BinOp::Or => Value::Bool(boolean(x, "or")? || boolean(y, "or")?),
    })
}

/// Evaluates a probability expression, requiring a value in `[0, 1]`.
pub fn eval_prob(e: &Expr, vis: &[Value], hid: &[Value]) -> Result<Rat> {
    let v = eval_expr(e, vis, hid)?;
    let p = v.as_num().map_or_else(|| undefined(format!("probability expected, got {v}")), Ok)?;
    if p.is_negative() || p > Rat::one() {
        return undefined(format!("probability {} outside [0, 1]", fmt_rat(&p)));
    }
    Ok(p)
}

/// Evaluates a distribution expression, validating its weights.
pub fn eval_dist_expr(d: &DExpr, vis: &[Value], hid: &[Value]) -> Result<Dist<Value>> {
    match d {
        DExpr::Point(e) => Ok(Dist::point(eval_expr(e, vis, hid)?)),
        DExpr::Uniform(xs) => {
            let vals = xs.iter().map(|x| eval_expr(x, vis, hid)).collect::<Result<Vec<_>>>()?;
            Dist::uniform(vals)
        }
        DExpr::UniformRange(lo, hi) => {
            let (lo, hi) = (int(&eval_expr(lo, vis, hid)?, "..")?, int(&eval_expr(hi, vis, hid)?, "..")?);
            let mut vals = Vec::new();
            let mut k = lo;
            while k <= hi {
                vals.push(Value::Num(k.clone()));
                k += Rat::one();
            }
            Dist::uniform(vals)
        }
        DExpr::Enumerated(items) => {
            let mut pairs = Vec::with_capacity(items.len());
            for (e, p) in items {
                let w = num(&eval_expr(p, vis, hid)?, "@")?;
                if w.is_negative() {
                    return undefined(format!("negative weight {}", fmt_rat(&w)));
                }
                pairs.push((eval_expr(e, vis, hid)?, w));
            }
            Dist::from_pairs(pairs).map_err(|e| Error::Undefined(e.to_string()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parser::parse;
    use crate::lang::Stmt;
    use crate::prob::rat;

    fn expr_of(decls: &str, e: &str) -> Expr {
        match parse(&format!("{decls} reveal {e}")).unwrap().body {
            Stmt::Reveal(e) => e,
            s => panic!("{s:?}"),
        }
    }

    #[test]
    fn integer_division() {
        let e = expr_of("hid h:{0..7};", "h div 2");
        assert_eq!(eval_expr(&e, &[], &[Value::int(3)]).unwrap(), Value::int(1));
        let e = expr_of("hid h:{0..7};", "h div 4");
        assert_eq!(eval_expr(&e, &[], &[Value::int(7)]).unwrap(), Value::int(1));
        let e = expr_of("hid h:{-4..4};", "(h div 3, h mod 3)");
        assert_eq!(
            eval_expr(&e, &[], &[Value::int(-4)]).unwrap(),
            Value::Tuple(vec![Value::int(-2), Value::int(2)])
        );
    }

    #[test]
    fn symbol_equality() {
        let e = expr_of("vis g:{p1,p2,p3}; hid p:{p1,p2,p3};", "g = p");
        assert_eq!(eval_expr(&e, &[Value::sym("p1")], &[Value::sym("p1")]).unwrap(), Value::Bool(true));
        assert_eq!(eval_expr(&e, &[Value::sym("p1")], &[Value::sym("p2")]).unwrap(), Value::Bool(false));
    }

    #[test]
    fn dist_rows() {
        let prog = parse("hid h:bool; reveal {{ true @ 1/4, false @ 3/4 }}").unwrap();
        let Stmt::RevealDist(d) = prog.body else { panic!() };
        let got = eval_dist_expr(&d, &[], &[Value::Bool(true)]).unwrap();
        assert_eq!(got.get(&Value::Bool(true)), rat(1, 4));
        assert_eq!(got.get(&Value::Bool(false)), rat(3, 4));

        let prog = parse("hid h:{0..7}; reveal {{ h mod 2 }}").unwrap();
        let Stmt::RevealDist(d) = prog.body else { panic!() };
        assert_eq!(eval_dist_expr(&d, &[], &[Value::int(5)]).unwrap(), Dist::point(Value::int(1)));

        let prog = parse("hid h:{0..3}; reveal {{ 0 @ 3/4, 1 @ 1/2 }}").unwrap();
        let Stmt::RevealDist(d) = prog.body else { panic!() };
        assert!(eval_dist_expr(&d, &[], &[Value::int(0)]).is_err());
    }

    #[test]
    fn coercions_and_errors() {
        let e = expr_of("hid h:bool;", "h + 1");
        assert_eq!(eval_expr(&e, &[], &[Value::Bool(true)]).unwrap(), Value::int(2));
        let e = expr_of("hid h:{0..3};", "1 / h");
        assert!(eval_expr(&e, &[], &[Value::int(0)]).is_err());
        let e = expr_of("hid h:{0..3};", "h > 0 and 4 / h < 2");
        assert_eq!(eval_expr(&e, &[], &[Value::int(0)]).unwrap(), Value::Bool(false));
        let e = expr_of("hid h:{0..3};", "h + 1");
        assert!(eval_prob(&e, &[], &[Value::int(1)]).is_err());
    }
}

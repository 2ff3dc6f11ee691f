use std::collections::BTreeSet;

use num_traits::ToPrimitive;

use super::ast::{BinOp, DExpr, Decl, Expr, Program, Stmt, VarRef, Vis};
use super::lexer::{lex, Spanned, Tok};
use crate::error::{Error, Result};
use crate::prob::Rat;
use crate::value::{Domain, Value};

const KEYWORDS: &[&str] = &[
    "vis", "hid", "bool", "skip", "abort", "reveal", "if", "then", "else", "fi", "while", "do", "od", "uniform",
    "true", "false", "div", "mod", "and", "or", "not",
];

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Locals start uniformly distributed instead of requiring an explicit
    /// first assignment.
    pub implicit_uniform_locals: bool,
}

pub fn parse(src: &str) -> Result<Program> {
    parse_with(src, ParseOptions::default())
}

pub fn parse_with(src: &str, opts: ParseOptions) -> Result<Program> {
    let toks = lex(src)?;
    let symbols = scan_symbols(&toks);
    let mut p = Parser { toks, pos: 0, scope: Vec::new(), symbols, locals: BTreeSet::new(), defined: BTreeSet::new(), opts };
    let mut decls = Vec::new();
    while let Some(d) = p.decl()? {
        p.declare(d.clone())?;
        decls.push(d);
    }
    let body = p.stmt()?;
    p.expect(Tok::Eof, "end of input")?;
    Ok(Program { decls, body })
}

/// Parses a closed value literal such as `(1, p2)` in the context of the
/// program's enumeration symbols.
pub fn parse_value(src: &str, prog: &Program) -> Result<Value> {
    let toks = lex(src)?;
    let mut symbols = scan_symbols(&toks);
    for d in &prog.decls {
        if let Domain::Enum(names) = &d.domain {
            symbols.extend(names.iter().cloned());
        }
    }
    let mut p = Parser {
        toks,
        pos: 0,
        scope: Vec::new(),
        symbols,
        locals: BTreeSet::new(),
        defined: BTreeSet::new(),
        opts: ParseOptions::default(),
    };
    let e = p.expr()?;
    p.expect(Tok::Eof, "end of value")?;
    super::eval::eval_expr(&e, &[], &[])
}

/// Every identifier that occurs inside an enumeration domain, wherever it is
/// declared, is usable as a symbol literal.
fn scan_symbols(toks: &[Spanned]) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut i = 0;
    while i + 2 < toks.len() {
        if toks[i].tok == Tok::Colon && toks[i + 1].tok == Tok::LBrace {
            if let Tok::Ident(_) = toks[i + 2].tok {
                let mut j = i + 2;
                while let Some(Spanned { tok: Tok::Ident(s), .. }) = toks.get(j) {
                    out.insert(s.clone());
                    if toks.get(j + 1).map(|t| &t.tok) == Some(&Tok::Comma) {
                        j += 2;
                    } else {
                        break;
                    }
                }
            }
        }
        i += 1;
    }
    out
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    scope: Vec<Decl>,
    symbols: BTreeSet<String>,
    locals: BTreeSet<String>,
    defined: BTreeSet<String>,
    opts: ParseOptions,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        let t = &self.toks[self.pos];
        Err(Error::Parse { line: t.line, col: t.col, msg: msg.into() })
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_kw(&mut self, kw: &str) -> Result<()> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            self.err(format!("expected '{kw}'"))
        }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            _ => self.err("expected identifier"),
        }
    }

    fn int(&mut self) -> Result<i64> {
        let neg = self.eat(&Tok::Minus);
        match self.bump() {
            Tok::Int(n) => {
                let n = if neg { -n } else { n };
                match n.to_i64() {
                    Some(v) => Ok(v),
                    None => {
                        self.pos -= 1;
                        self.err("integer out of range")
                    }
                }
            }
            _ => {
                self.pos -= 1;
                self.err("expected integer")
            }
        }
    }

    // ---- declarations ----

    fn decl(&mut self) -> Result<Option<Decl>> {
        let vis = if self.is_kw("vis") {
            Vis::Vis
        } else if self.is_kw("hid") {
            Vis::Hid
        } else {
            return Ok(None);
        };
        self.bump();
        let name = self.ident()?;
        self.expect(Tok::Colon, "':'")?;
        let domain = self.domain()?;
        // `[[ vis t:{0..3} ]]` may omit the separator before the closer
        if *self.peek() != Tok::RDBrack {
            self.expect(Tok::Semi, "';' after declaration")?;
        }
        Ok(Some(Decl { name, vis, domain }))
    }

    fn domain(&mut self) -> Result<Domain> {
        if self.eat_kw("bool") {
            return Ok(Domain::Bool);
        }
        self.expect(Tok::LBrace, "domain")?;
        if matches!(self.peek(), Tok::Int(_) | Tok::Minus) {
            let lo = self.int()?;
            self.expect(Tok::DotDot, "'..'")?;
            let hi = self.int()?;
            if hi < lo {
                return self.err("empty range");
            }
            self.expect(Tok::RBrace, "'}'")?;
            return Ok(Domain::Range(lo, hi));
        }
        let mut names = vec![self.ident()?];
        while self.eat(&Tok::Comma) {
            let n = self.ident()?;
            if names.contains(&n) {
                return self.err(format!("duplicate symbol '{n}'"));
            }
            names.push(n);
        }
        self.expect(Tok::RBrace, "'}'")?;
        Ok(Domain::Enum(names))
    }

    fn declare(&mut self, d: Decl) -> Result<()> {
        if self.scope.iter().any(|e| e.name == d.name) {
            return self.err(format!("'{}' is already declared", d.name));
        }
        self.scope.push(d);
        Ok(())
    }

    fn resolve(&self, name: &str) -> Option<VarRef> {
        let (pos, d) = self.scope.iter().enumerate().rev().find(|(_, d)| d.name == name)?;
        let index = self.scope[..pos].iter().filter(|e| e.vis == d.vis).count();
        Some(VarRef { name: d.name.clone(), vis: d.vis, index, domain: d.domain.clone() })
    }

    // ---- statements ----

    fn at_stmt_end(&self) -> bool {
        matches!(self.peek(), Tok::Eof | Tok::RDBrack | Tok::RParen)
            || ["fi", "else", "od"].iter().any(|k| self.is_kw(k))
    }

    fn stmt(&mut self) -> Result<Stmt> {
        let mut parts = vec![self.pchoice()?];
        while self.eat(&Tok::Semi) {
            if self.at_stmt_end() {
                break;
            }
            parts.push(self.pchoice()?);
        }
        let mut it = parts.into_iter().rev();
        let last = it.next().expect("nonempty");
        Ok(it.fold(last, |acc, s| Stmt::seq(s, acc)))
    }

    fn pchoice(&mut self) -> Result<Stmt> {
        let before = self.defined.clone();
        let mut left = self.atom()?;
        while self.eat(&Tok::LBrack) {
            let p = self.expr()?;
            self.expect(Tok::RBrack, "']'")?;
            let after_left = std::mem::replace(&mut self.defined, before.clone());
            let right = self.atom()?;
            self.defined = after_left.intersection(&self.defined).cloned().collect();
            left = Stmt::pchoice(p, left, right);
        }
        Ok(left)
    }

    fn atom(&mut self) -> Result<Stmt> {
        if self.eat_kw("skip") {
            return Ok(Stmt::Skip);
        }
        if self.eat_kw("abort") {
            return Ok(Stmt::Abort);
        }
        if self.eat(&Tok::LBrace) {
            let e = self.expr()?;
            self.expect(Tok::RBrace, "'}' closing assertion")?;
            return Ok(Stmt::Assert(e));
        }
        if self.eat(&Tok::LParen) {
            let s = self.stmt()?;
            self.expect(Tok::RParen, "')'")?;
            return Ok(s);
        }
        if self.eat_kw("reveal") {
            if self.starts_dexpr() {
                return Ok(Stmt::RevealDist(self.dexpr()?));
            }
            return Ok(Stmt::Reveal(self.expr()?));
        }
        if self.eat_kw("if") {
            let g = self.expr()?;
            self.expect_kw("then")?;
            let before = self.defined.clone();
            let a = self.stmt()?;
            self.expect_kw("else")?;
            let after_a = std::mem::replace(&mut self.defined, before);
            let b = self.stmt()?;
            self.expect_kw("fi")?;
            self.defined = after_a.intersection(&self.defined).cloned().collect();
            return Ok(Stmt::If(g, Box::new(a), Box::new(b)));
        }
        if self.eat_kw("while") {
            let p = self.expr()?;
            self.expect_kw("do")?;
            let before = self.defined.clone();
            let body = self.stmt()?;
            self.expect_kw("od")?;
            self.defined = before;
            return Ok(Stmt::While(p, Box::new(body)));
        }
        if self.eat(&Tok::LDBrack) {
            return self.scope_block();
        }
        if let Tok::Ident(name) = self.peek().clone() {
            if matches!(self.peek_at(1), Tok::Assign | Tok::ColonIn) {
                let name_pos = self.pos;
                self.bump();
                let Some(target) = self.resolve(&name) else {
                    self.pos = name_pos;
                    return self.err(format!("unbound variable '{name}'"));
                };
                let s = if self.eat(&Tok::Assign) {
                    Stmt::Assign(target, self.expr()?)
                } else {
                    self.bump();
                    Stmt::Choose(target, self.dexpr()?)
                };
                self.defined.insert(name);
                return Ok(s);
            }
        }
        self.err("expected statement")
    }

    fn scope_block(&mut self) -> Result<Stmt> {
        let mut decls = Vec::new();
        while let Some(d) = self.decl()? {
            self.declare(d.clone())?;
            if !self.opts.implicit_uniform_locals {
                self.locals.insert(d.name.clone());
            }
            decls.push(d);
        }
        let body = if matches!(self.peek(), Tok::RDBrack) { Stmt::Skip } else { self.stmt()? };
        self.expect(Tok::RDBrack, "']]'")?;
        for d in &decls {
            self.scope.pop();
            self.locals.remove(&d.name);
            self.defined.remove(&d.name);
        }
        Ok(Stmt::Scope(decls, Box::new(body)))
    }

    fn starts_dexpr(&self) -> bool {
        matches!(self.peek(), Tok::LDBrace) || self.is_kw("uniform")
    }

    fn dexpr(&mut self) -> Result<DExpr> {
        if self.eat_kw("uniform") {
            self.expect(Tok::LBrace, "'{' after uniform")?;
            let first = self.expr()?;
            if self.eat(&Tok::DotDot) {
                let hi = self.expr()?;
                self.expect(Tok::RBrace, "'}'")?;
                return Ok(DExpr::UniformRange(first, hi));
            }
            let mut xs = vec![first];
            while self.eat(&Tok::Comma) {
                xs.push(self.expr()?);
            }
            self.expect(Tok::RBrace, "'}'")?;
            return Ok(DExpr::Uniform(xs));
        }
        self.expect(Tok::LDBrace, "distribution")?;
        let e = self.expr()?;
        if !self.eat(&Tok::At) {
            self.expect(Tok::RDBrace, "'}}'")?;
            return Ok(DExpr::Point(e));
        }
        let mut items = vec![(e, self.expr()?)];
        while self.eat(&Tok::Comma) {
            let e = self.expr()?;
            self.expect(Tok::At, "'@'")?;
            items.push((e, self.expr()?));
        }
        self.expect(Tok::RDBrace, "'}}'")?;
        Ok(DExpr::Enumerated(items))
    }

    // ---- expressions ----

    fn expr(&mut self) -> Result<Expr> {
        let mut e = self.and_expr()?;
        while self.eat_kw("or") {
            e = Expr::Bin(BinOp::Or, Box::new(e), Box::new(self.and_expr()?));
        }
        Ok(e)
    }

    fn and_expr(&mut self) -> Result<Expr> {
        let mut e = self.not_expr()?;
        while self.eat_kw("and") {
            e = Expr::Bin(BinOp::And, Box::new(e), Box::new(self.not_expr()?));
        }
        Ok(e)
    }

    fn not_expr(&mut self) -> Result<Expr> {
        if self.eat_kw("not") {
            return Ok(Expr::Not(Box::new(self.not_expr()?)));
        }
        self.cmp_expr()
    }

    fn cmp_expr(&mut self) -> Result<Expr> {
        let e = self.add_expr()?;
        let op = match self.peek() {
            Tok::Eq => BinOp::Eq,
            Tok::Ne => BinOp::Ne,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            _ => return Ok(e),
        };
        self.bump();
        Ok(Expr::Bin(op, Box::new(e), Box::new(self.add_expr()?)))
    }

    fn add_expr(&mut self) -> Result<Expr> {
        let mut e = self.mul_expr()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(e),
            };
            self.bump();
            e = Expr::Bin(op, Box::new(e), Box::new(self.mul_expr()?));
        }
    }

    fn mul_expr(&mut self) -> Result<Expr> {
        let mut e = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                Tok::Ident(s) if s == "div" => BinOp::IntDiv,
                Tok::Ident(s) if s == "mod" => BinOp::Mod,
                _ => return Ok(e),
            };
            self.bump();
            e = Expr::Bin(op, Box::new(e), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(&Tok::Minus) {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Lit(Value::Num(Rat::from_integer(n))))
            }
            Tok::LParen => {
                self.bump();
                if self.eat(&Tok::RParen) {
                    return Ok(Expr::Tuple(Vec::new()));
                }
                let first = self.expr()?;
                if self.eat(&Tok::RParen) {
                    return Ok(first);
                }
                let mut xs = vec![first];
                while self.eat(&Tok::Comma) {
                    xs.push(self.expr()?);
                }
                self.expect(Tok::RParen, "')'")?;
                Ok(Expr::Tuple(xs))
            }
            Tok::Ident(s) if s == "true" => {
                self.bump();
                Ok(Expr::Lit(Value::Bool(true)))
            }
            Tok::Ident(s) if s == "false" => {
                self.bump();
                Ok(Expr::Lit(Value::Bool(false)))
            }
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                if let Some(r) = self.resolve(&s) {
                    if self.locals.contains(&s) && !self.defined.contains(&s) {
                        return self.err(format!("local '{s}' is read before it is assigned"));
                    }
                    self.bump();
                    return Ok(Expr::Var(r));
                }
                if self.symbols.contains(&s) {
                    self.bump();
                    return Ok(Expr::Lit(Value::Sym(s)));
                }
                self.err(format!("unbound identifier '{s}'"))
            }
            _ => self.err("expected expression"),
        }
    }
}

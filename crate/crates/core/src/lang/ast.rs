use crate::value::{Domain, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Vis {
    Vis,
    Hid,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Decl {
    pub name: String,
    pub vis: Vis,
    pub domain: Domain,
}

/// A resolved variable: `index` is its position in the visible or hidden
/// state tuple at the point of use.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VarRef {
    pub name: String,
    pub vis: Vis,
    pub index: usize,
    pub domain: Domain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    /// Exact rational division.
    Div,
    /// Floor division on integers.
    IntDiv,
    Mod,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Lit(Value),
    Var(VarRef),
    Neg(Box<Expr>),
    Not(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Tuple(Vec<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DExpr {
    Uniform(Vec<Expr>),
    /// `uniform{lo..hi}` over integers.
    UniformRange(Expr, Expr),
    Enumerated(Vec<(Expr, Expr)>),
    Point(Expr),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Stmt {
    Skip,
    Abort,
    Assert(Expr),
    Assign(VarRef, Expr),
    Choose(VarRef, DExpr),
    Reveal(Expr),
    RevealDist(DExpr),
    Seq(Box<Stmt>, Box<Stmt>),
    /// Left branch with the given probability.
    PChoice(Expr, Box<Stmt>, Box<Stmt>),
    If(Expr, Box<Stmt>, Box<Stmt>),
    /// The expression is the probability of entering the body.
    While(Expr, Box<Stmt>),
    Scope(Vec<Decl>, Box<Stmt>),
}

impl Stmt {
    pub fn seq(a: Stmt, b: Stmt) -> Stmt {
        Stmt::Seq(Box::new(a), Box::new(b))
    }

    pub fn pchoice(p: Expr, a: Stmt, b: Stmt) -> Stmt {
        Stmt::PChoice(p, Box::new(a), Box::new(b))
    }
}

/// A parsed file: global declarations and a body.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Program {
    pub decls: Vec<Decl>,
    pub body: Stmt,
}

impl Program {
    pub fn vis_decls(&self) -> impl Iterator<Item = &Decl> {
        self.decls.iter().filter(|d| d.vis == Vis::Vis)
    }

    pub fn hid_decls(&self) -> impl Iterator<Item = &Decl> {
        self.decls.iter().filter(|d| d.vis == Vis::Hid)
    }
}

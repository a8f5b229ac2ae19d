//! Syntax tree of model files.

use crate::error::Pos;

/// A node with its source position; equality ignores the position.
#[derive(Clone, Debug)]
pub struct Spanned<T> {
    pub node: T,
    pub pos: Pos,
}

impl<T: PartialEq> PartialEq for Spanned<T> {
    fn eq(&self, o: &Self) -> bool {
        self.node == o.node
    }
}

pub type SExpr = Spanned<Expr>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }

    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    /// Decimal literal as written.
    Num(String),
    Str(String),
    Ident(String),
    Neg(Box<SExpr>),
    Bin(BinOp, Box<SExpr>, Box<SExpr>),
    Call(String, Vec<Arg>),
    /// `[a, b, …]`; two algebra-valued vectors denote their Lie bracket.
    List(Vec<SExpr>),
    /// `(a, b)` against the pairing declared for the carrier of `a`.
    Pairing(Box<SExpr>, Box<SExpr>),
    /// `⟨a, b⟩ = Σ a_i b_i`.
    Natural(Box<SExpr>, Box<SExpr>),
    /// `∂(x, f)`: left derivative of `f` along the variable `x`.
    Deriv(String, Box<SExpr>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Arg {
    pub key: Option<String>,
    pub value: SExpr,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeclKind {
    Param,
    Algebra,
    Rep,
    Pairing,
    Target,
    Bundle,
    Bv,
    Pre,
    Loop,
}

impl DeclKind {
    pub const ALL: [DeclKind; 9] = [
        DeclKind::Param,
        DeclKind::Algebra,
        DeclKind::Rep,
        DeclKind::Pairing,
        DeclKind::Target,
        DeclKind::Bundle,
        DeclKind::Bv,
        DeclKind::Pre,
        DeclKind::Loop,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            DeclKind::Param => "param",
            DeclKind::Algebra => "algebra",
            DeclKind::Rep => "rep",
            DeclKind::Pairing => "pairing",
            DeclKind::Target => "target",
            DeclKind::Bundle => "bundle",
            DeclKind::Bv => "bv",
            DeclKind::Pre => "pre",
            DeclKind::Loop => "loop",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.keyword() == s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Stmt {
    Model(String),
    Decl {
        kind: DeclKind,
        name: String,
        value: SExpr,
    },
    Space {
        name: String,
        coords: Vec<(String, i32)>,
    },
    Vector {
        name: String,
        carrier: String,
        comps: Vec<String>,
    },
    Poly {
        name: String,
        on: String,
        degree: Option<i32>,
        value: SExpr,
    },
    /// `check kind(args)`.
    Check {
        kind: String,
        args: Vec<Arg>,
    },
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct ModelFile {
    pub stmts: Vec<Spanned<Stmt>>,
}

impl ModelFile {
    pub fn name(&self) -> Option<&str> {
        self.stmts.iter().find_map(|s| match &s.node {
            Stmt::Model(n) => Some(n.as_str()),
            _ => None,
        })
    }

    pub fn checks(&self) -> impl Iterator<Item = &Spanned<Stmt>> {
        self.stmts.iter().filter(|s| matches!(s.node, Stmt::Check { .. }))
    }
}

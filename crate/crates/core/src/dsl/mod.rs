//! The `.p6` presentation language.
//!
//! A file starts with an optional header
//!
//! ```text
//! convention bracket=left-normed order=ij
//! ```
//!
//! followed by family blocks:
//!
//! ```text
//! family 21 label "(21,3r)" rank 6 gens a1..a6 {
//!   param r in {1, nu} when p mod 4 == 1 else {1}
//!   pow a5^p = a1^r
//!   comm [a3,a5] = a1
//! }
//! ```
//!
//! Exponents are integer expressions over parameters, `p`, `nu` and
//! `omega`. They are applied with group semantics: `g^-1` is the inverse
//! of `g` even when `g^p` is nontrivial. Omitted relations are trivial.

mod compile;
mod emit;
mod expr;
mod lexer;
mod params;
mod parser;
mod serialize;

use std::fmt;

pub use compile::{compile, compile_any, CompileError};
pub use emit::{emit_cas, Dialect, EmitHeader};
pub use expr::{Env, EvalError};
pub use params::{expand, ParamBinding};
pub use parser::{parse, parse_family, Diagnostic, ParseError, MAX_DIAGNOSTICS};
pub use serialize::{serialize, serialize_family};

/// Source position, 1-based. Ignored by equality so that reparsed text
/// compares equal to the original tree.
#[derive(Debug, Clone, Copy, Default)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl PartialEq for Span {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for Span {}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// How commutator relations are written in a file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Order {
    /// `[ai, aj]` with `i < j`
    #[default]
    Ij,
    /// `[aj, ai]` with `j > i`
    Ji,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Convention {
    /// Only `left-normed`, `[x,y] = x^-1 y^-1 x y`, is accepted.
    pub bracket: String,
    pub order: Order,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SpecFile {
    pub convention: Convention,
    pub families: Vec<FamilySpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gen {
    Alpha(u8),
    Beta(u8),
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gen::Alpha(i) => write!(f, "a{i}"),
            Gen::Beta(i) => write!(f, "b{i}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    /// modular power: the result is a residue mod `p`
    Pow,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    /// inverse mod `p`
    Inv,
    /// 1 when the argument is a square mod `p` (0 included)
    IsSq,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(i64),
    Var(String),
    Neg(Box<Expr>),
    Not(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SetExpr {
    /// `{e1, e2, ...}`
    List(Vec<Expr>),
    /// `lo..hi`, inclusive
    Range(Expr, Expr),
    /// `{e : i in S}`
    Comprehension { expr: Expr, var: String, over: Box<SetExpr> },
    /// `S when cond else T`
    Cond { cond: Expr, then: Box<SetExpr>, otherwise: Box<SetExpr> },
}

/// Parameter-level items, evaluated in order during expansion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decl {
    /// `param r in S`
    Param { name: String, set: SetExpr, span: Span },
    /// `where cond`: drops bindings failing `cond`
    Where { cond: Expr, span: Span },
    /// `let x = e`
    Let { name: String, expr: Expr, span: Span },
    /// `let (x, y) = first x in S, y in T where cond`: the first tuple in
    /// nested order (leftmost outermost) satisfying `cond`
    First { names: Vec<String>, sets: Vec<SetExpr>, cond: Expr, span: Span },
}

impl Decl {
    pub fn span(&self) -> Span {
        match self {
            Decl::Param { span, .. } | Decl::Where { span, .. } | Decl::Let { span, .. } | Decl::First { span, .. } => {
                *span
            }
        }
    }

    /// Names bound by this item.
    pub fn bound_names(&self) -> Vec<&str> {
        match self {
            Decl::Param { name, .. } | Decl::Let { name, .. } => vec![name.as_str()],
            Decl::First { names, .. } => names.iter().map(|s| s.as_str()).collect(),
            Decl::Where { .. } => vec![],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor {
    pub gen: Gen,
    pub exp: Expr,
}

/// A product of generator powers; empty is the identity `1`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Word(pub Vec<Factor>);

impl Word {
    pub fn gens(&self) -> impl Iterator<Item = Gen> + '_ {
        self.0.iter().map(|f| f.gen)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Relation {
    /// `pow g^p = w`
    Pow { gen: Gen, rhs: Word, span: Span },
    /// `comm [x,y] = w`
    Comm { left: Gen, right: Gen, rhs: Word, span: Span },
    /// `def a = w`: eliminates `a`
    Def { alpha: Gen, rhs: Word, span: Span },
}

impl Relation {
    pub fn span(&self) -> Span {
        match self {
            Relation::Pow { span, .. } | Relation::Comm { span, .. } | Relation::Def { span, .. } => *span,
        }
    }

    pub fn rhs(&self) -> &Word {
        match self {
            Relation::Pow { rhs, .. } | Relation::Comm { rhs, .. } | Relation::Def { rhs, .. } => rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilySpec {
    pub family: u32,
    pub label: Option<String>,
    pub rank: u32,
    pub alphas: u8,
    pub betas: u8,
    pub decls: Vec<Decl>,
    pub relations: Vec<Relation>,
    /// commutator orientation inherited from the file header
    pub order: Order,
    pub span: Span,
}

impl FamilySpec {
    pub fn new(family: u32, rank: u32, alphas: u8, betas: u8) -> Self {
        FamilySpec {
            family,
            label: None,
            rank,
            alphas,
            betas,
            decls: Vec::new(),
            relations: Vec::new(),
            order: Order::Ij,
            span: Span::default(),
        }
    }

    /// Declared generators: alphas then betas.
    pub fn generators(&self) -> Vec<Gen> {
        (1..=self.alphas).map(Gen::Alpha).chain((1..=self.betas).map(Gen::Beta)).collect()
    }

    pub fn declares(&self, g: Gen) -> bool {
        match g {
            Gen::Alpha(i) => i >= 1 && i <= self.alphas,
            Gen::Beta(i) => i >= 1 && i <= self.betas,
        }
    }

    pub fn powers(&self) -> impl Iterator<Item = &Relation> {
        self.relations.iter().filter(|r| matches!(r, Relation::Pow { .. }))
    }

    pub fn commutators(&self) -> impl Iterator<Item = &Relation> {
        self.relations.iter().filter(|r| matches!(r, Relation::Comm { .. }))
    }

    pub fn definitions(&self) -> impl Iterator<Item = &Relation> {
        self.relations.iter().filter(|r| matches!(r, Relation::Def { .. }))
    }

    pub fn param_names(&self) -> Vec<&str> {
        self.decls
            .iter()
            .filter_map(|d| match d {
                Decl::Param { name, .. } => Some(name.as_str()),
                _ => None,
            })
            .collect()
    }

    pub fn label_text(&self) -> String {
        self.label.clone().unwrap_or_else(|| format!("family {}", self.family))
    }
}

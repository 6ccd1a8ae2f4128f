use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use super::lexer::{lex, Tok, Token};
use super::{BinOp, Convention, Decl, Expr, Factor, FamilySpec, Func, Gen, Order, Relation, SetExpr, Span, SpecFile, Word};

/// Parsing stops collecting after this many diagnostics.
pub const MAX_DIAGNOSTICS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: u32,
    pub col: u32,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub diagnostics: Vec<Diagnostic>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lines: Vec<String> = self.diagnostics.iter().map(|d| d.to_string()).collect();
        f.write_str(&lines.join("\n"))
    }
}

const RESERVED: &[&str] = &[
    "p", "nu", "omega", "inv", "is_sq", "mod", "and", "or", "not", "in", "when", "else", "first", "where", "let",
    "param", "pow", "comm", "def", "family", "label", "rank", "gens", "convention",
];

const ITEM_KEYWORDS: &[&str] = &["param", "let", "where", "pow", "comm", "def"];

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    diags: Vec<Diagnostic>,
    // from the file header; families are checked against it
    order: Order,
}

type PResult<T> = Result<T, ()>;

fn gen_of(name: &str) -> Option<Gen> {
    let (head, digits) = name.split_at(1);
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) || digits.starts_with('0') {
        return None;
    }
    let idx: u8 = digits.parse().ok()?;
    match head {
        "a" => Some(Gen::Alpha(idx)),
        "b" => Some(Gen::Beta(idx)),
        _ => None,
    }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn advance(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_at(&mut self, span: Span, message: impl Into<String>) {
        if self.diags.len() < MAX_DIAGNOSTICS {
            self.diags.push(Diagnostic { line: span.line, col: span.col, message: message.into() });
        }
    }

    fn fail<T>(&mut self, what: &str) -> PResult<T> {
        let found = self.peek().describe();
        let span = self.span();
        self.error_at(span, format!("expected {what}, found {found}"));
        Err(())
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<()> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            self.fail(&format!("'{kw}'"))
        }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok) -> PResult<()> {
        if self.eat(t) {
            Ok(())
        } else {
            self.fail(&t.describe())
        }
    }

    fn int(&mut self) -> PResult<i64> {
        match self.peek().clone() {
            Tok::Int(v) => {
                self.advance();
                Ok(v)
            }
            _ => self.fail("an integer"),
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.advance();
                Ok(s)
            }
            _ => self.fail("a name"),
        }
    }

    fn generator(&mut self) -> PResult<(Gen, Span)> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Ident(s) => match gen_of(&s) {
                Some(g) => {
                    self.advance();
                    Ok((g, span))
                }
                None => self.fail("a generator such as a3 or b1"),
            },
            _ => self.fail("a generator such as a3 or b1"),
        }
    }

    fn file(&mut self) -> SpecFile {
        let mut file = SpecFile { convention: Convention { bracket: "left-normed".into(), order: Order::Ij }, families: vec![] };
        if self.is_kw("convention") {
            match self.header() {
                Ok(c) => {
                    self.order = c.order;
                    file.convention = c;
                }
                Err(()) => self.recover_to_family(),
            }
        }
        while *self.peek() != Tok::Eof {
            if self.is_kw("family") {
                if let Ok(f) = self.family() {
                    file.families.push(f);
                }
            } else {
                self.fail::<()>("'family'").ok();
                self.advance();
                self.recover_to_family();
            }
            if self.diags.len() >= MAX_DIAGNOSTICS {
                break;
            }
        }
        file
    }

    fn recover_to_family(&mut self) {
        while *self.peek() != Tok::Eof && !self.is_kw("family") {
            self.advance();
        }
    }

    fn header(&mut self) -> PResult<Convention> {
        self.expect_kw("convention")?;
        let mut conv = Convention { bracket: "left-normed".into(), order: Order::Ij };
        while let Tok::Ident(key) = self.peek().clone() {
            if key != "bracket" && key != "order" {
                break;
            }
            self.advance();
            self.expect(&Tok::Assign)?;
            let span = self.span();
            let mut value = self.ident()?;
            while self.eat(&Tok::Minus) {
                value.push('-');
                value.push_str(&self.ident()?);
            }
            if key == "bracket" {
                if value != "left-normed" {
                    self.error_at(span, format!("unsupported bracket convention '{value}'; only left-normed is accepted"));
                }
                conv.bracket = value;
            } else {
                conv.order = match value.as_str() {
                    "ij" => Order::Ij,
                    "ji" => Order::Ji,
                    _ => {
                        self.error_at(span, format!("order must be ij or ji, found '{value}'"));
                        Order::Ij
                    }
                };
            }
        }
        Ok(conv)
    }

    fn gens_range(&mut self, head: char) -> PResult<u8> {
        let span = self.span();
        let (g1, _) = self.generator()?;
        self.expect(&Tok::DotDot)?;
        let (g2, _) = self.generator()?;
        let ok_first = matches!((head, g1), ('a', Gen::Alpha(1)) | ('b', Gen::Beta(1)));
        match (head, g2) {
            ('a', Gen::Alpha(k)) | ('b', Gen::Beta(k)) if ok_first => Ok(k),
            _ => {
                self.error_at(span, format!("expected {head}1..{head}k"));
                Err(())
            }
        }
    }

    fn family(&mut self) -> PResult<FamilySpec> {
        let span = self.span();
        self.expect_kw("family")?;
        let header = (|| -> PResult<FamilySpec> {
            let n = self.int()?;
            let label = if self.eat_kw("label") {
                match self.peek().clone() {
                    Tok::Str(s) => {
                        self.advance();
                        Some(s)
                    }
                    _ => return self.fail("a quoted label"),
                }
            } else {
                None
            };
            self.expect_kw("rank")?;
            let rank = self.int()?;
            self.expect_kw("gens")?;
            let alphas = self.gens_range('a')?;
            let betas = if self.eat(&Tok::Comma) { self.gens_range('b')? } else { 0 };
            let mut f = FamilySpec::new(n.max(0) as u32, rank.max(0) as u32, alphas, betas);
            f.label = label;
            f.span = span;
            Ok(f)
        })();
        let mut f = match header {
            Ok(f) => f,
            Err(()) => {
                self.advance();
                self.recover_to_family();
                return Err(());
            }
        };
        let braced = self.eat(&Tok::LBrace);
        loop {
            if braced && self.eat(&Tok::RBrace) {
                break;
            }
            if *self.peek() == Tok::Eof {
                if braced {
                    self.fail::<()>("'}'").ok();
                }
                break;
            }
            if !braced && self.is_kw("family") {
                break;
            }
            if self.item(&mut f).is_err() {
                // skip to the next item keyword, closing brace or family
                self.advance();
                while *self.peek() != Tok::Eof
                    && *self.peek() != Tok::RBrace
                    && !self.is_kw("family")
                    && !ITEM_KEYWORDS.iter().any(|k| self.is_kw(k))
                {
                    self.advance();
                }
            }
            if self.diags.len() >= MAX_DIAGNOSTICS {
                return Err(());
            }
        }
        f.order = self.order;
        self.check(&f);
        Ok(f)
    }

    fn item(&mut self, f: &mut FamilySpec) -> PResult<()> {
        let span = self.span();
        let kw = match self.peek().clone() {
            Tok::Ident(s) => s,
            _ => return self.fail("param, let, where, pow, comm or def"),
        };
        match kw.as_str() {
            "param" => {
                self.advance();
                let name = self.ident()?;
                self.expect_kw("in")?;
                let set = self.set()?;
                f.decls.push(Decl::Param { name, set, span });
            }
            "where" => {
                self.advance();
                let cond = self.expr()?;
                f.decls.push(Decl::Where { cond, span });
            }
            "let" => {
                self.advance();
                if self.eat(&Tok::LParen) {
                    let mut names = vec![self.ident()?];
                    while self.eat(&Tok::Comma) {
                        names.push(self.ident()?);
                    }
                    self.expect(&Tok::RParen)?;
                    self.expect(&Tok::Assign)?;
                    self.expect_kw("first")?;
                    let mut sets = Vec::new();
                    for (k, name) in names.iter().enumerate() {
                        if k > 0 {
                            self.expect(&Tok::Comma)?;
                        }
                        let at = self.span();
                        let v = self.ident()?;
                        if &v != name {
                            self.error_at(at, format!("expected '{name}' (search variables follow the tuple order)"));
                            return Err(());
                        }
                        self.expect_kw("in")?;
                        sets.push(self.set()?);
                    }
                    self.expect_kw("where")?;
                    let cond = self.expr()?;
                    f.decls.push(Decl::First { names, sets, cond, span });
                } else {
                    let name = self.ident()?;
                    self.expect(&Tok::Assign)?;
                    let expr = self.expr()?;
                    f.decls.push(Decl::Let { name, expr, span });
                }
            }
            "pow" => {
                self.advance();
                let (gen, _) = self.generator()?;
                self.expect(&Tok::Caret)?;
                self.expect_kw("p")?;
                self.expect(&Tok::Assign)?;
                let rhs = self.word()?;
                f.relations.push(Relation::Pow { gen, rhs, span });
            }
            "comm" => {
                self.advance();
                self.expect(&Tok::LBracket)?;
                let (left, _) = self.generator()?;
                self.expect(&Tok::Comma)?;
                let (right, _) = self.generator()?;
                self.expect(&Tok::RBracket)?;
                self.expect(&Tok::Assign)?;
                let rhs = self.word()?;
                f.relations.push(Relation::Comm { left, right, rhs, span });
            }
            "def" => {
                self.advance();
                let (alpha, _) = self.generator()?;
                self.expect(&Tok::Assign)?;
                let rhs = self.word()?;
                f.relations.push(Relation::Def { alpha, rhs, span });
            }
            _ => return self.fail("param, let, where, pow, comm or def"),
        }
        Ok(())
    }

    fn word(&mut self) -> PResult<Word> {
        if *self.peek() == Tok::Int(1) && *self.peek_at(1) != Tok::Caret {
            self.advance();
            return Ok(Word::default());
        }
        let mut factors = Vec::new();
        loop {
            let (gen, _) = self.generator()?;
            let exp = if self.eat(&Tok::Caret) {
                if self.eat(&Tok::Minus) {
                    Expr::Neg(Box::new(self.atom()?))
                } else {
                    self.atom()?
                }
            } else {
                Expr::Int(1)
            };
            factors.push(Factor { gen, exp });
            let continues = match self.peek() {
                Tok::Star => {
                    self.advance();
                    true
                }
                Tok::Ident(s) => gen_of(s).is_some(),
                _ => false,
            };
            if !continues {
                return Ok(Word(factors));
            }
        }
    }

    fn set(&mut self) -> PResult<SetExpr> {
        let base = self.set_primary()?;
        if self.eat_kw("when") {
            let cond = self.expr()?;
            self.expect_kw("else")?;
            let otherwise = self.set()?;
            return Ok(SetExpr::Cond { cond, then: Box::new(base), otherwise: Box::new(otherwise) });
        }
        Ok(base)
    }

    fn set_primary(&mut self) -> PResult<SetExpr> {
        if self.eat(&Tok::LBrace) {
            if self.eat(&Tok::RBrace) {
                return Ok(SetExpr::List(vec![]));
            }
            let first = self.expr()?;
            if self.eat(&Tok::Colon) {
                let var = self.ident()?;
                self.expect_kw("in")?;
                let over = self.set()?;
                self.expect(&Tok::RBrace)?;
                return Ok(SetExpr::Comprehension { expr: first, var, over: Box::new(over) });
            }
            let mut items = vec![first];
            while self.eat(&Tok::Comma) {
                items.push(self.expr()?);
            }
            self.expect(&Tok::RBrace)?;
            return Ok(SetExpr::List(items));
        }
        let lo = self.arith()?;
        self.expect(&Tok::DotDot)?;
        let hi = self.arith()?;
        Ok(SetExpr::Range(lo, hi))
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.and_expr()?;
        while self.eat_kw("or") {
            let rhs = self.and_expr()?;
            lhs = Expr::Bin(BinOp::Or, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.not_expr()?;
        while self.eat_kw("and") {
            let rhs = self.not_expr()?;
            lhs = Expr::Bin(BinOp::And, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn not_expr(&mut self) -> PResult<Expr> {
        if self.eat_kw("not") {
            return Ok(Expr::Not(Box::new(self.not_expr()?)));
        }
        self.cmp_expr()
    }

    fn cmp_expr(&mut self) -> PResult<Expr> {
        let lhs = self.arith()?;
        let op = match self.peek() {
            Tok::EqEq => BinOp::Eq,
            Tok::Ne => BinOp::Ne,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            _ => return Ok(lhs),
        };
        self.advance();
        let rhs = self.arith()?;
        Ok(Expr::Bin(op, Box::new(lhs), Box::new(rhs)))
    }

    fn arith(&mut self) -> PResult<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.advance();
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                Tok::Ident(s) if s == "mod" => BinOp::Mod,
                _ => return Ok(lhs),
            };
            self.advance();
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.eat(&Tok::Minus) {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> PResult<Expr> {
        let base = self.atom()?;
        if self.eat(&Tok::Caret) {
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> PResult<Expr> {
        match self.peek().clone() {
            Tok::Int(v) => {
                self.advance();
                Ok(Expr::Int(v))
            }
            Tok::LParen => {
                self.advance();
                let e = self.expr()?;
                self.expect(&Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(s) if s == "inv" || s == "is_sq" => {
                self.advance();
                self.expect(&Tok::LParen)?;
                let e = self.expr()?;
                self.expect(&Tok::RParen)?;
                let func = if s == "inv" { Func::Inv } else { Func::IsSq };
                Ok(Expr::Call(func, Box::new(e)))
            }
            Tok::Ident(s) if !ITEM_KEYWORDS.contains(&s.as_str()) && gen_of(&s).is_none() => {
                self.advance();
                Ok(Expr::Var(s))
            }
            _ => self.fail("an expression"),
        }
    }

    // semantic checks, reported at the offending item

    fn check_expr(&mut self, e: &Expr, scope: &HashSet<String>, span: Span) {
        match e {
            Expr::Int(_) => {}
            Expr::Var(v) => {
                if !scope.contains(v) {
                    self.error_at(span, format!("undeclared parameter '{v}'"));
                }
            }
            Expr::Neg(a) | Expr::Not(a) | Expr::Call(_, a) => self.check_expr(a, scope, span),
            Expr::Bin(_, a, b) => {
                self.check_expr(a, scope, span);
                self.check_expr(b, scope, span);
            }
        }
    }

    fn check_set(&mut self, s: &SetExpr, scope: &HashSet<String>, span: Span) {
        match s {
            SetExpr::List(items) => items.iter().for_each(|e| self.check_expr(e, scope, span)),
            SetExpr::Range(a, b) => {
                self.check_expr(a, scope, span);
                self.check_expr(b, scope, span);
            }
            SetExpr::Comprehension { expr, var, over } => {
                self.check_set(over, scope, span);
                let mut inner = scope.clone();
                inner.insert(var.clone());
                self.check_expr(expr, &inner, span);
            }
            SetExpr::Cond { cond, then, otherwise } => {
                self.check_expr(cond, scope, span);
                self.check_set(then, scope, span);
                self.check_set(otherwise, scope, span);
            }
        }
    }

    fn check_word(&mut self, f: &FamilySpec, w: &Word, scope: &HashSet<String>, span: Span) {
        for factor in &w.0 {
            if !f.declares(factor.gen) {
                self.error_at(span, format!("undeclared generator {}", factor.gen));
            }
            self.check_expr(&factor.exp, scope, span);
        }
    }

    fn check(&mut self, f: &FamilySpec) {
        let mut scope: HashSet<String> = ["p", "nu", "omega"].iter().map(|s| s.to_string()).collect();
        for d in &f.decls {
            let span = d.span();
            match d {
                Decl::Param { set, .. } => self.check_set(set, &scope, span),
                Decl::Where { cond, .. } => self.check_expr(cond, &scope, span),
                Decl::Let { expr, .. } => self.check_expr(expr, &scope, span),
                Decl::First { names, sets, cond, .. } => {
                    let mut inner = scope.clone();
                    for (name, set) in names.iter().zip(sets) {
                        self.check_set(set, &inner, span);
                        inner.insert(name.clone());
                    }
                    self.check_expr(cond, &inner, span);
                }
            }
            for name in d.bound_names() {
                if RESERVED.contains(&name) || gen_of(name).is_some() {
                    self.error_at(span, format!("'{name}' cannot be used as a parameter name"));
                } else if !scope.insert(name.to_string()) {
                    self.error_at(span, format!("parameter '{name}' declared twice"));
                }
            }
        }
        if f.rank == 6 && (f.betas > 0 || f.definitions().next().is_some()) {
            self.error_at(f.span, "rank-6 families use a1..a6 only, without b generators or definitions");
        }
        let mut pows = HashSet::new();
        let mut comms = HashSet::new();
        let mut defs = HashMap::new();
        for r in &f.relations {
            let span = r.span();
            self.check_word(f, r.rhs(), &scope, span);
            match r {
                Relation::Pow { gen, .. } => {
                    if !f.declares(*gen) {
                        self.error_at(span, format!("undeclared generator {gen}"));
                    }
                    if !pows.insert(*gen) {
                        self.error_at(span, format!("duplicate power relation for {gen}"));
                    }
                }
                Relation::Comm { left, right, .. } => {
                    for g in [left, right] {
                        if !f.declares(*g) {
                            self.error_at(span, format!("undeclared generator {g}"));
                        }
                    }
                    if left == right {
                        self.error_at(span, format!("commutator [{left},{right}] has equal entries"));
                        continue;
                    }
                    let ascending = left < right;
                    let wanted = f.order == Order::Ij;
                    if ascending != wanted {
                        let o = if wanted { "ij" } else { "ji" };
                        self.error_at(span, format!("commutator [{left},{right}] is written against order={o}"));
                    }
                    let key = if ascending { (*left, *right) } else { (*right, *left) };
                    if !comms.insert(key) {
                        self.error_at(span, format!("duplicate commutator relation for {{{left},{right}}}"));
                    }
                }
                Relation::Def { alpha, .. } => {
                    if !matches!(alpha, Gen::Alpha(_)) {
                        self.error_at(span, format!("only a generators can be defined, found {alpha}"));
                    } else if !f.declares(*alpha) {
                        self.error_at(span, format!("undeclared generator {alpha}"));
                    }
                    if defs.insert(*alpha, span).is_some() {
                        self.error_at(span, format!("{alpha} defined twice"));
                    }
                }
            }
        }
        for r in &f.relations {
            let span = r.span();
            match r {
                Relation::Pow { gen, .. } if defs.contains_key(gen) => {
                    self.error_at(span, format!("power relation for {gen}, which is defined by a word"));
                }
                Relation::Comm { left, right, .. } if defs.contains_key(left) || defs.contains_key(right) => {
                    self.error_at(span, format!("commutator [{left},{right}] involves a defined generator"));
                }
                _ => {}
            }
        }
    }
}

/// Parses a whole `.p6` source. On failure, returns up to
/// [`MAX_DIAGNOSTICS`] diagnostics with line and column.
pub fn parse(src: &str) -> Result<SpecFile, ParseError> {
    let toks = lex(src).map_err(|(span, message)| ParseError {
        diagnostics: vec![Diagnostic { line: span.line, col: span.col, message }],
    })?;
    let mut p = Parser { toks, pos: 0, diags: Vec::new(), order: Order::Ij };
    let file = p.file();
    if p.diags.is_empty() {
        Ok(file)
    } else {
        Err(ParseError { diagnostics: p.diags })
    }
}

/// Parses a source holding exactly one family.
pub fn parse_family(src: &str) -> Result<FamilySpec, ParseError> {
    let mut file = parse(src)?;
    if file.families.len() != 1 {
        return Err(ParseError {
            diagnostics: vec![Diagnostic {
                line: 1,
                col: 1,
                message: format!("expected one family, found {}", file.families.len()),
            }],
        });
    }
    Ok(file.families.remove(0))
}

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use super::{BinOp, Expr, Func, SetExpr};
use crate::numtheory::PrimeContext;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound name '{0}'")]
    Unbound(String),
    #[error("arithmetic overflow")]
    Overflow,
    #[error("{0} has no inverse mod p")]
    NotInvertible(i64),
    #[error("division by zero")]
    DivisionByZero,
}

/// Name bindings for evaluation: `p`, `nu`, `omega` plus parameters.
#[derive(Debug, Clone)]
pub struct Env<'a> {
    pub ctx: &'a PrimeContext,
    vars: HashMap<String, i64>,
}

impl<'a> Env<'a> {
    pub fn new(ctx: &'a PrimeContext) -> Self {
        let mut vars = HashMap::new();
        vars.insert("p".to_string(), ctx.p() as i64);
        vars.insert("nu".to_string(), ctx.nu() as i64);
        vars.insert("omega".to_string(), ctx.omega() as i64);
        Env { ctx, vars }
    }

    pub fn bind(&mut self, name: &str, v: i64) {
        self.vars.insert(name.to_string(), v);
    }

    pub fn get(&self, name: &str) -> Option<i64> {
        self.vars.get(name).copied()
    }

    /// Integer arithmetic, except that `^` and `inv` work mod `p` and
    /// return residues in `[0, p)`.
    pub fn eval(&self, e: &Expr) -> Result<i64, EvalError> {
        let p = self.ctx.p() as i64;
        Ok(match e {
            Expr::Int(v) => *v,
            Expr::Var(name) => self.get(name).ok_or_else(|| EvalError::Unbound(name.clone()))?,
            Expr::Neg(a) => self.eval(a)?.checked_neg().ok_or(EvalError::Overflow)?,
            Expr::Not(a) => (self.eval(a)? == 0) as i64,
            Expr::Call(Func::Inv, a) => {
                let v = self.eval(a)?;
                self.ctx.inv(v).map_err(|_| EvalError::NotInvertible(v))? as i64
            }
            Expr::Call(Func::IsSq, a) => self.ctx.is_square(self.eval(a)?) as i64,
            Expr::Bin(op, a, b) => {
                let x = self.eval(a)?;
                // short-circuit so guards like `r != 0 and inv(r) ...` work
                match op {
                    BinOp::And if x == 0 => return Ok(0),
                    BinOp::Or if x != 0 => return Ok(1),
                    _ => {}
                }
                let y = self.eval(b)?;
                match op {
                    BinOp::Add => x.checked_add(y).ok_or(EvalError::Overflow)?,
                    BinOp::Sub => x.checked_sub(y).ok_or(EvalError::Overflow)?,
                    BinOp::Mul => x.checked_mul(y).ok_or(EvalError::Overflow)?,
                    BinOp::Div => {
                        if y == 0 {
                            return Err(EvalError::DivisionByZero);
                        }
                        x.div_euclid(y)
                    }
                    BinOp::Mod => {
                        if y == 0 {
                            return Err(EvalError::DivisionByZero);
                        }
                        x.rem_euclid(y)
                    }
                    BinOp::Pow => {
                        let base = if y < 0 {
                            self.ctx.inv(x).map_err(|_| EvalError::NotInvertible(x))? as i64
                        } else {
                            x.rem_euclid(p)
                        };
                        self.ctx.pow(base, y.unsigned_abs()) as i64
                    }
                    BinOp::Eq => (x == y) as i64,
                    BinOp::Ne => (x != y) as i64,
                    BinOp::Lt => (x < y) as i64,
                    BinOp::Le => (x <= y) as i64,
                    BinOp::Gt => (x > y) as i64,
                    BinOp::Ge => (x >= y) as i64,
                    BinOp::And | BinOp::Or => (y != 0) as i64,
                }
            }
        })
    }

    pub fn truthy(&self, e: &Expr) -> Result<bool, EvalError> {
        Ok(self.eval(e)? != 0)
    }

    /// Members of a set in declaration order. Ranges are inclusive; empty
    /// when `hi < lo`.
    pub fn eval_set(&self, s: &SetExpr) -> Result<Vec<i64>, EvalError> {
        Ok(match s {
            SetExpr::List(items) => items.iter().map(|e| self.eval(e)).collect::<Result<_, _>>()?,
            SetExpr::Range(lo, hi) => (self.eval(lo)?..=self.eval(hi)?).collect(),
            SetExpr::Comprehension { expr, var, over } => {
                let mut inner = self.clone();
                let mut out = Vec::new();
                for v in self.eval_set(over)? {
                    inner.bind(var, v);
                    out.push(inner.eval(expr)?);
                }
                out
            }
            SetExpr::Cond { cond, then, otherwise } => {
                if self.truthy(cond)? {
                    self.eval_set(then)?
                } else {
                    self.eval_set(otherwise)?
                }
            }
        })
    }
}

// printing: precedence levels, higher binds tighter
const OR: u8 = 1;
const AND: u8 = 2;
const NOT: u8 = 3;
const CMP: u8 = 4;
const ADD: u8 = 5;
const MUL: u8 = 6;
const NEG: u8 = 7;
const POW: u8 = 8;
const ATOM: u8 = 9;

fn info(op: BinOp) -> (u8, &'static str) {
    match op {
        BinOp::Or => (OR, " or "),
        BinOp::And => (AND, " and "),
        BinOp::Eq => (CMP, " == "),
        BinOp::Ne => (CMP, " != "),
        BinOp::Lt => (CMP, " < "),
        BinOp::Le => (CMP, " <= "),
        BinOp::Gt => (CMP, " > "),
        BinOp::Ge => (CMP, " >= "),
        BinOp::Add => (ADD, " + "),
        BinOp::Sub => (ADD, " - "),
        BinOp::Mul => (MUL, "*"),
        BinOp::Div => (MUL, "/"),
        BinOp::Mod => (MUL, " mod "),
        BinOp::Pow => (POW, "^"),
    }
}

pub(crate) fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Int(v) if *v < 0 => NEG,
        Expr::Int(_) | Expr::Var(_) | Expr::Call(..) => ATOM,
        Expr::Neg(_) => NEG,
        Expr::Not(_) => NOT,
        Expr::Bin(op, ..) => info(*op).0,
    }
}

fn wrap(e: &Expr, parens: bool) -> String {
    if parens {
        format!("({e})")
    } else {
        e.to_string()
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(v) => write!(f, "{v}"),
            Expr::Var(s) => f.write_str(s),
            Expr::Neg(a) => write!(f, "-{}", wrap(a, prec(a) < NEG)),
            Expr::Not(a) => write!(f, "not {}", wrap(a, prec(a) < NOT)),
            Expr::Call(func, a) => {
                let name = match func {
                    Func::Inv => "inv",
                    Func::IsSq => "is_sq",
                };
                write!(f, "{name}({a})")
            }
            Expr::Bin(op, a, b) => {
                let (level, sym) = info(*op);
                let (left, right) = match level {
                    // right associative
                    POW => (prec(a) <= POW, prec(b) < NEG),
                    CMP => (prec(a) <= CMP, prec(b) <= CMP),
                    _ => (prec(a) < level, prec(b) <= level),
                };
                write!(f, "{}{}{}", wrap(a, left), sym, wrap(b, right))
            }
        }
    }
}

impl fmt::Display for SetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetExpr::List(items) => {
                let parts: Vec<String> = items.iter().map(|e| e.to_string()).collect();
                write!(f, "{{{}}}", parts.join(", "))
            }
            SetExpr::Range(lo, hi) => write!(f, "{}..{}", wrap(lo, prec(lo) < ADD), wrap(hi, prec(hi) < ADD)),
            SetExpr::Comprehension { expr, var, over } => write!(f, "{{{expr} : {var} in {over}}}"),
            SetExpr::Cond { cond, then, otherwise } => write!(f, "{then} when {cond} else {otherwise}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_family;

    fn where_expr(src: &str) -> Expr {
        let text = format!("family 1 rank 1 gens a1..a1 {{ param r in 1..2 param s in 1..2 param t in 1..2 where {src} }}");
        match &parse_family(&text).unwrap().decls[3] {
            crate::dsl::Decl::Where { cond, .. } => cond.clone(),
            _ => unreachable!(),
        }
    }

    #[test]
    fn printing_uses_minimal_parentheses() {
        for src in [
            "(r^2 - inv(nu)*s^2) mod p != inv(nu)",
            "not (r == nu and (t == 1 or t == p - 1) and is_sq(-s))",
            "omega^(2*r - 1) - 1 == 0",
            "-r - 1 < r - (s - t)",
            "r^s^t == (r^s)^t",
        ] {
            assert_eq!(where_expr(src).to_string(), src);
        }
    }

    #[test]
    fn power_and_inverse_are_modular() {
        let ctx = PrimeContext::new(7).unwrap();
        let mut env = Env::new(&ctx);
        env.bind("r", 2);
        assert_eq!(env.eval(&where_expr("omega^2")).unwrap(), 2);
        assert_eq!(env.eval(&where_expr("inv(nu)")).unwrap(), 5);
        assert_eq!(env.eval(&where_expr("-r - 1")).unwrap(), -3);
        assert_eq!(env.eval(&where_expr("(p - 1)/2")).unwrap(), 3);
        assert_eq!(env.eval(&where_expr("is_sq(nu)")).unwrap(), 0);
        assert_eq!(env.eval(&where_expr("r^-1")).unwrap(), 4);
    }
}

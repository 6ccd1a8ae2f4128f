use std::fmt::Write;

use super::expr::prec;
use super::{Decl, Expr, FamilySpec, Order, Relation, SpecFile, Word};

fn exponent(e: &Expr) -> String {
    match e {
        Expr::Int(1) => String::new(),
        Expr::Int(v) if *v >= 0 => format!("^{v}"),
        Expr::Var(v) => format!("^{v}"),
        Expr::Neg(a) if matches!(**a, Expr::Int(v) if v >= 0) || matches!(**a, Expr::Var(_)) => format!("^-{a}"),
        Expr::Call(..) => format!("^{e}"),
        other if prec(other) > 8 => format!("^{other}"),
        other => format!("^({other})"),
    }
}

pub(crate) fn word(w: &Word) -> String {
    if w.0.is_empty() {
        return "1".into();
    }
    let parts: Vec<String> = w.0.iter().map(|f| format!("{}{}", f.gen, exponent(&f.exp))).collect();
    parts.join(" ")
}

/// Canonical text of one family block, ending in a newline.
pub fn serialize_family(f: &FamilySpec) -> String {
    let mut s = String::new();
    write!(s, "family {}", f.family).unwrap();
    if let Some(label) = &f.label {
        write!(s, " label \"{label}\"").unwrap();
    }
    write!(s, " rank {} gens a1..a{}", f.rank, f.alphas).unwrap();
    if f.betas > 0 {
        write!(s, ", b1..b{}", f.betas).unwrap();
    }
    s.push_str(" {\n");
    for d in &f.decls {
        match d {
            Decl::Param { name, set, .. } => writeln!(s, "  param {name} in {set}").unwrap(),
            Decl::Where { cond, .. } => writeln!(s, "  where {cond}").unwrap(),
            Decl::Let { name, expr, .. } => writeln!(s, "  let {name} = {expr}").unwrap(),
            Decl::First { names, sets, cond, .. } => {
                let ranges: Vec<String> = names.iter().zip(sets).map(|(n, set)| format!("{n} in {set}")).collect();
                writeln!(s, "  let ({}) = first {} where {cond}", names.join(", "), ranges.join(", ")).unwrap();
            }
        }
    }
    for r in &f.relations {
        match r {
            Relation::Pow { gen, rhs, .. } => writeln!(s, "  pow {gen}^p = {}", word(rhs)).unwrap(),
            Relation::Comm { left, right, rhs, .. } => writeln!(s, "  comm [{left},{right}] = {}", word(rhs)).unwrap(),
            Relation::Def { alpha, rhs, .. } => writeln!(s, "  def {alpha} = {}", word(rhs)).unwrap(),
        }
    }
    s.push_str("}\n");
    s
}

/// Canonical text of a file: header, blank line, blocks separated by blank
/// lines. LF line endings with a single trailing newline.
pub fn serialize(file: &SpecFile) -> String {
    let order = match file.convention.order {
        Order::Ij => "ij",
        Order::Ji => "ji",
    };
    let mut s = format!("convention bracket={} order={order}\n", file.convention.bracket);
    for f in &file.families {
        s.push('\n');
        s.push_str(&serialize_family(f));
    }
    s
}

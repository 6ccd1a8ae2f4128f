use std::fmt;

use super::expr::{Env, EvalError};
use super::{Decl, Expr, FamilySpec, SetExpr};
use crate::numtheory::PrimeContext;

/// Values for every name a family declares, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParamBinding {
    pub assignments: Vec<(String, i64)>,
    /// Which branch of each conditional range applied, e.g. `r: p mod 4 == 1`.
    pub provenance: Vec<String>,
}

impl ParamBinding {
    pub fn get(&self, name: &str) -> Option<i64> {
        self.assignments.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn env<'a>(&self, ctx: &'a PrimeContext) -> Env<'a> {
        let mut env = Env::new(ctx);
        for (name, v) in &self.assignments {
            env.bind(name, *v);
        }
        env
    }

    /// `r=2 s=1`, restricted to the declared parameters.
    pub fn describe(&self, spec: &FamilySpec) -> String {
        let params = spec.param_names();
        let parts: Vec<String> = self
            .assignments
            .iter()
            .filter(|(n, _)| params.contains(&n.as_str()))
            .map(|(n, v)| format!("{n}={v}"))
            .collect();
        parts.join(" ")
    }
}

impl fmt::Display for ParamBinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.assignments.iter().map(|(n, v)| format!("{n}={v}")).collect();
        f.write_str(&parts.join(" "))
    }
}

fn branch_note(env: &Env<'_>, name: &str, set: &SetExpr) -> Result<Option<String>, EvalError> {
    let mut s = set;
    let mut notes = Vec::new();
    while let SetExpr::Cond { cond, otherwise, .. } = s {
        if env.truthy(cond)? {
            notes.push(cond.to_string());
            break;
        }
        notes.push(format!("not ({cond})"));
        s = otherwise;
    }
    Ok((!notes.is_empty()).then(|| format!("{name}: {}", notes.join(", "))))
}

fn walk(
    decls: &[Decl],
    env: &mut Env<'_>,
    current: &mut ParamBinding,
    out: &mut Vec<ParamBinding>,
) -> Result<(), EvalError> {
    let Some((head, rest)) = decls.split_first() else {
        out.push(current.clone());
        return Ok(());
    };
    match head {
        Decl::Param { name, set, .. } => {
            let note = branch_note(env, name, set)?;
            if let Some(n) = &note {
                current.provenance.push(n.clone());
            }
            for v in env.eval_set(set)? {
                env.bind(name, v);
                current.assignments.push((name.clone(), v));
                walk(rest, env, current, out)?;
                current.assignments.pop();
            }
            if note.is_some() {
                current.provenance.pop();
            }
        }
        Decl::Where { cond, .. } => {
            if env.truthy(cond)? {
                walk(rest, env, current, out)?;
            }
        }
        Decl::Let { name, expr, .. } => {
            let v = env.eval(expr)?;
            env.bind(name, v);
            current.assignments.push((name.clone(), v));
            walk(rest, env, current, out)?;
            current.assignments.pop();
        }
        Decl::First { names, sets, cond, .. } => {
            if let Some(values) = search(env, names, sets, cond)? {
                for (n, v) in names.iter().zip(&values) {
                    env.bind(n, *v);
                    current.assignments.push((n.clone(), *v));
                }
                walk(rest, env, current, out)?;
                for _ in names {
                    current.assignments.pop();
                }
            }
        }
    }
    Ok(())
}

fn search(env: &Env<'_>, names: &[String], sets: &[SetExpr], cond: &Expr) -> Result<Option<Vec<i64>>, EvalError> {
    let Some((set, rest)) = sets.split_first() else {
        return Ok(env.truthy(cond)?.then(Vec::new));
    };
    let mut inner = env.clone();
    for v in env.eval_set(set)? {
        inner.bind(&names[0], v);
        if let Some(mut tail) = search(&inner, &names[1..], rest, cond)? {
            tail.insert(0, v);
            return Ok(Some(tail));
        }
    }
    Ok(None)
}

/// All admissible bindings at this prime, in declaration order with later
/// parameters varying fastest.
pub fn expand(spec: &FamilySpec, ctx: &PrimeContext) -> Result<Vec<ParamBinding>, EvalError> {
    let mut env = Env::new(ctx);
    let mut out = Vec::new();
    walk(&spec.decls, &mut env, &mut ParamBinding::default(), &mut out)?;
    Ok(out)
}

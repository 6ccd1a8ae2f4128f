use std::collections::HashMap;

use thiserror::Error;

use super::expr::{Env, EvalError};
use super::{FamilySpec, Gen, ParamBinding, Relation, Word};
use crate::numtheory::PrimeContext;
use crate::pcgroup::{AllowUnverified, ExponentVector, PcError, PcGroup, PcPresentation, MAX_GENS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("malformed family: {0}")]
    Malformed(String),
    #[error("cannot evaluate exponent: {0}")]
    Eval(#[from] EvalError),
}

impl From<PcError> for CompileError {
    fn from(e: PcError) -> Self {
        CompileError::Malformed(e.to_string())
    }
}

struct Compiler<'a> {
    spec: &'a FamilySpec,
    env: Env<'a>,
    defs: HashMap<Gen, &'a Word>,
    // 1-based polycyclic position of each surviving generator
    position: HashMap<Gen, usize>,
}

impl Compiler<'_> {
    fn pos(&self, g: Gen) -> Result<usize, CompileError> {
        self.position
            .get(&g)
            .copied()
            .ok_or_else(|| CompileError::Malformed(format!("{g} is undeclared or eliminated by a definition")))
    }

    /// Highest polycyclic position a word touches once definitions are
    /// substituted; detects definition cycles.
    fn reach(&self, w: &Word, stack: &mut Vec<Gen>) -> Result<usize, CompileError> {
        let mut top = 0;
        for g in w.gens() {
            if let Some(def) = self.defs.get(&g) {
                if stack.contains(&g) {
                    let names: Vec<String> = stack.iter().map(|x| x.to_string()).collect();
                    return Err(CompileError::Malformed(format!("definition cycle through {} -> {g}", names.join(" -> "))));
                }
                stack.push(g);
                top = top.max(self.reach(def, stack)?);
                stack.pop();
            } else {
                top = top.max(self.pos(g)?);
            }
        }
        Ok(top)
    }

    fn value(&self, group: &PcGroup, w: &Word) -> Result<ExponentVector, CompileError> {
        let mut acc = group.identity();
        for f in &w.0 {
            let e = self.env.eval(&f.exp)?;
            let part = match self.defs.get(&f.gen) {
                Some(def) => group.power(&self.value(group, def)?, e),
                None => group.collect(&[(self.position[&f.gen], e)])?,
            };
            acc = group.multiply(&acc, &part);
        }
        Ok(acc)
    }
}

/// Compiles a family at one binding without restricting the generator count.
///
/// Surviving generators are ordered with the `b`s first, then the undefined
/// `a`s, each in index order. Relations are built one generator at a time,
/// so every right-hand side is evaluated in the group already constructed on
/// the generators below it.
pub fn compile_any(spec: &FamilySpec, binding: &ParamBinding, ctx: &PrimeContext) -> Result<PcPresentation, CompileError> {
    let mut defs = HashMap::new();
    for r in spec.definitions() {
        if let Relation::Def { alpha, rhs, .. } = r {
            defs.insert(*alpha, rhs);
        }
    }
    let order: Vec<Gen> = (1..=spec.betas)
        .map(Gen::Beta)
        .chain((1..=spec.alphas).map(Gen::Alpha).filter(|g| !defs.contains_key(g)))
        .collect();
    let n = order.len();
    if n == 0 || n > MAX_GENS {
        return Err(CompileError::Malformed(format!("{n} generators survive elimination")));
    }
    let position: HashMap<Gen, usize> = order.iter().enumerate().map(|(k, g)| (*g, k + 1)).collect();
    let comp = Compiler { spec, env: binding.env(ctx), defs, position };
    for r in &spec.relations {
        comp.reach(r.rhs(), &mut Vec::new())?;
    }

    let mut pows: HashMap<usize, &Word> = HashMap::new();
    // key (j, i) with j > i; flag marks a relation written as [a_i, a_j]
    let mut comms: HashMap<(usize, usize), (&Word, bool)> = HashMap::new();
    for r in &comp.spec.relations {
        match r {
            Relation::Pow { gen, rhs, .. } => {
                pows.insert(comp.pos(*gen)?, rhs);
            }
            Relation::Comm { left, right, rhs, .. } => {
                let (x, y) = (comp.pos(*left)?, comp.pos(*right)?);
                if x == y {
                    return Err(CompileError::Malformed(format!("commutator [{left},{right}] has equal entries")));
                }
                if x > y {
                    comms.insert((x, y), (rhs, false));
                } else {
                    comms.insert((y, x), (rhs, true));
                }
            }
            Relation::Def { .. } => {}
        }
    }

    let mut pres = PcPresentation::new(ctx, n)?;
    pres.set_names(order.iter().map(|g| g.to_string()).collect())?;
    for j in 1..=n {
        let group = PcGroup::new_unverified(pres.clone(), AllowUnverified);
        let below = |w: &Word, what: String| -> Result<(), CompileError> {
            if comp.reach(w, &mut Vec::new())? >= j {
                return Err(CompileError::Malformed(format!("{what} is not a word in earlier generators")));
            }
            Ok(())
        };
        if let Some(w) = pows.get(&j) {
            below(w, format!("power of {}", order[j - 1]))?;
            let v = comp.value(&group, w)?;
            pres.set_power(j, v).map_err(|_| {
                CompileError::Malformed(format!("{}^p = {} leaves the subgroup below {}", order[j - 1], v, order[j - 1]))
            })?;
        }
        for i in 1..j {
            let Some((w, flipped)) = comps_get(&comms, j, i) else { continue };
            let (gj, gi) = (order[j - 1], order[i - 1]);
            below(w, format!("commutator of {gj} and {gi}"))?;
            let mut v = comp.value(&group, w)?;
            if flipped {
                // [a_j, a_i] = [a_i, a_j]^-1
                v = group.inverse(&v);
            }
            pres.set_comm(j, i, v)
                .map_err(|_| CompileError::Malformed(format!("[{gj},{gi}] = {v} is not below {gi}")))?;
        }
    }
    Ok(pres)
}

fn comps_get<'w>(m: &HashMap<(usize, usize), (&'w Word, bool)>, j: usize, i: usize) -> Option<(&'w Word, bool)> {
    m.get(&(j, i)).copied()
}

/// Compiles a catalog family: exactly six generators must survive.
pub fn compile(spec: &FamilySpec, binding: &ParamBinding, ctx: &PrimeContext) -> Result<PcPresentation, CompileError> {
    let pres = compile_any(spec, binding, ctx)?;
    if pres.n() != 6 {
        return Err(CompileError::Malformed(format!("{} generators survive elimination, expected 6", pres.n())));
    }
    Ok(pres)
}

use std::fmt::Write;
use std::str::FromStr;

use crate::pcgroup::{format_word, PcError, PcPresentation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dialect {
    GapStyle,
    MagmaStyle,
}

impl Dialect {
    pub fn name(self) -> &'static str {
        match self {
            Dialect::GapStyle => "gap-style",
            Dialect::MagmaStyle => "magma-style",
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            Dialect::GapStyle => "g",
            Dialect::MagmaStyle => "m",
        }
    }
}

impl FromStr for Dialect {
    type Err = PcError;

    fn from_str(s: &str) -> Result<Self, PcError> {
        match s {
            "gap-style" => Ok(Dialect::GapStyle),
            "magma-style" => Ok(Dialect::MagmaStyle),
            other => Err(PcError::InvalidArgument(format!(
                "unsupported dialect '{other}' (expected gap-style or magma-style)"
            ))),
        }
    }
}

/// What the script's comment header records.
#[derive(Debug, Clone, Default)]
pub struct EmitHeader {
    pub family: u32,
    pub label: String,
    pub binding: String,
}

/// A script that rebuilds the group in a computer algebra system.
///
/// Both target systems put the most central generator last, so generators
/// are listed in reverse. Trivial commutators are left out.
pub fn emit_cas(pres: &PcPresentation, header: &EmitHeader, dialect: Dialect) -> String {
    let p = pres.p();
    let n = pres.n();
    let names = pres.names();
    let reversed: Vec<&str> = names.iter().rev().map(|s| s.as_str()).collect();
    let comment = match dialect {
        Dialect::GapStyle => "#",
        Dialect::MagmaStyle => "//",
    };
    let mut s = String::new();
    writeln!(s, "{comment} family {} {}", header.family, header.label).unwrap();
    writeln!(s, "{comment} p = {p}").unwrap();
    if !header.binding.is_empty() {
        writeln!(s, "{comment} parameters: {}", header.binding).unwrap();
    }

    let mut rels: Vec<(String, Option<String>)> = Vec::new();
    for i in 1..=n {
        let rhs = pres.power_rhs(i);
        let lhs = format!("{}^{p}", names[i - 1]);
        let rhs = (!rhs.is_identity()).then(|| format_word(&rhs, names, "*"));
        rels.push((lhs, rhs));
    }
    for j in 1..=n {
        for i in 1..j {
            let rhs = pres.comm_rhs(j, i);
            if rhs.is_identity() {
                continue;
            }
            let (a, b) = (&names[j - 1], &names[i - 1]);
            let lhs = match dialect {
                Dialect::GapStyle => format!("Comm({a}, {b})"),
                Dialect::MagmaStyle => format!("({a},{b})"),
            };
            rels.push((lhs, Some(format_word(&rhs, names, "*"))));
        }
    }

    match dialect {
        Dialect::GapStyle => {
            let quoted: Vec<String> = reversed.iter().map(|x| format!("\"{x}\"")).collect();
            writeln!(s, "F := FreeGroup({});;", quoted.join(", ")).unwrap();
            for (k, x) in reversed.iter().enumerate() {
                writeln!(s, "{x} := F.{};;", k + 1).unwrap();
            }
            let items: Vec<String> = rels
                .iter()
                .map(|(l, r)| match r {
                    None => format!("  {l}"),
                    Some(r) => format!("  {l}/({r})"),
                })
                .collect();
            writeln!(s, "rels := [\n{}\n];;", items.join(",\n")).unwrap();
            writeln!(s, "G := PcGroupFpGroup(F / rels);;").unwrap();
        }
        Dialect::MagmaStyle => {
            writeln!(s, "F<{}> := FreeGroup({n});", reversed.join(",")).unwrap();
            let items: Vec<String> = rels
                .iter()
                .map(|(l, r)| match r {
                    None => format!("  {l}"),
                    Some(r) => format!("  {l} = {r}"),
                })
                .collect();
            writeln!(s, "G<{}> := quo<GrpPC : F |\n{}\n>;", reversed.join(","), items.join(",\n")).unwrap();
        }
    }
    s
}

//! Parses a family block, expands its parameters and compiles each binding.

use p6groups::dsl::{compile, expand, parse_family};
use p6groups::numtheory::PrimeContext;
use p6groups::pcgroup::{format_word, PcGroup};

const SRC: &str = "family 40 label \"(demo)\" rank 6 gens a1..a6 {
  param r in {1, nu}
  pow a6^p = a1^r
  comm [a5,a6] = a2
  comm [a4,a6] = a1
  comm [a2,a6] = a1
}";

fn main() {
    let ctx = PrimeContext::new(11).unwrap();
    let spec = parse_family(SRC).unwrap();
    for binding in expand(&spec, &ctx).unwrap() {
        let pres = compile(&spec, &binding, &ctx).unwrap();
        let names = pres.names().to_vec();
        println!("r = {}", binding.get("r").unwrap());
        for i in 1..=pres.n() {
            let rhs = pres.power_rhs(i);
            if !rhs.is_identity() {
                println!("  {}^p = {}", names[i - 1], format_word(&rhs, &names, " "));
            }
            for j in i + 1..=pres.n() {
                let rhs = pres.comm_rhs(j, i);
                if !rhs.is_identity() {
                    println!("  [{}, {}] = {}", names[j - 1], names[i - 1], format_word(&rhs, &names, " "));
                }
            }
        }
        println!("  consistent: {}", PcGroup::new(pres).is_ok());
    }
}

mod common;

use p6groups::dsl::{
    compile, compile_any, emit_cas, expand, parse, parse_family, serialize, Decl, Dialect, EmitHeader, Env, Expr, SetExpr,
    MAX_DIAGNOSTICS,
};
use p6groups::numtheory::PrimeContext;
use p6groups::pcgroup::{ExponentVector, PcGroup};

fn ctx(p: u64) -> PrimeContext {
    PrimeContext::new(p).unwrap()
}

#[test]
fn abelian_block_has_no_relations() {
    let f = parse_family("family 1 rank 1 gens a1..a6 { }").unwrap();
    assert_eq!((f.family, f.rank, f.alphas, f.betas), (1, 1, 6, 0));
    assert!(f.relations.is_empty() && f.decls.is_empty());
    let pres = compile(&f, &expand(&f, &ctx(7)).unwrap()[0], &ctx(7)).unwrap();
    for i in 1..=6 {
        assert!(pres.power_rhs(i).is_identity());
    }
}

#[test]
fn two_element_range() {
    let f = parse_family("family 11 rank 6 gens a1..a6 { param r in {1, nu} }").unwrap();
    let Decl::Param { set: SetExpr::List(items), .. } = &f.decls[0] else { panic!("not a list") };
    assert_eq!(items.len(), 2);
    let values: Vec<i64> = expand(&f, &ctx(7)).unwrap().iter().map(|b| b.get("r").unwrap()).collect();
    assert_eq!(values, vec![1, 3]);
}

#[test]
fn conditional_range_has_two_branches() {
    let src = "family 16 rank 6 gens a1..a6 { param r in {1, omega, omega^2} when p mod 3 == 1 else {1} }";
    let f = parse_family(src).unwrap();
    let Decl::Param { set: SetExpr::Cond { then, otherwise, .. }, .. } = &f.decls[0] else { panic!("not conditional") };
    assert!(matches!(**then, SetExpr::List(ref v) if v.len() == 3));
    assert!(matches!(**otherwise, SetExpr::List(ref v) if v.len() == 1));
    // 7 = 1 mod 3 with omega = 3; 11 = 2 mod 3
    let at = |p| expand(&f, &ctx(p)).unwrap().iter().map(|b| b.get("r").unwrap()).collect::<Vec<_>>();
    assert_eq!(at(7), vec![1, 3, 2]);
    assert_eq!(at(11), vec![1]);
    assert_eq!(expand(&f, &ctx(7)).unwrap()[0].provenance, vec!["r: p mod 3 == 1".to_string()]);
}

#[test]
fn omega_squared_at_seven() {
    let c = ctx(7);
    let f = parse_family("family 40 rank 6 gens a1..a6 { let x = omega^2 }").unwrap();
    let Decl::Let { expr, .. } = &f.decls[0] else { panic!() };
    assert_eq!(Env::new(&c).eval(expr).unwrap(), 2);
}

#[test]
fn definitions_are_eliminated() {
    let src = "family 2 rank 3 gens a1..a6, b1..b1 {
        def a6 = b1^2
        comm [a1,a2] = a6
        pow a3^p = a6^-1
    }";
    let f = parse_family(src).unwrap();
    let c = ctx(7);
    let pres = compile_any(&f, &expand(&f, &c).unwrap()[0], &c).unwrap();
    assert_eq!(pres.n(), 6);
    assert_eq!(pres.names(), ["b1", "a1", "a2", "a3", "a4", "a5"]);
    // [a1, a2] = b1^2 is stored as [a2, a1] = b1^-2
    assert_eq!(pres.comm_rhs(3, 2), ExponentVector::from_exponents(&[5, 0, 0, 0, 0, 0]));
    assert_eq!(pres.power_rhs(4), ExponentVector::from_exponents(&[5, 0, 0, 0, 0, 0]));
    assert!(PcGroup::new(pres).is_ok());
}

#[test]
fn definition_cycles_and_wrong_counts_are_malformed() {
    let c = ctx(7);
    let f = parse_family("family 2 rank 3 gens a1..a6, b1..b1 { def a1 = a2  def a2 = a1 }").unwrap();
    let b = &expand(&f, &c).unwrap()[0];
    let err = compile_any(&f, b, &c).unwrap_err().to_string();
    assert!(err.contains("cycle"), "{err}");
    let f = parse_family("family 2 rank 3 gens a1..a6, b1..b2 { def a6 = b1 }").unwrap();
    assert!(compile(&f, &expand(&f, &c).unwrap()[0], &c).is_err());
}

#[test]
fn relations_must_point_downward() {
    let c = ctx(7);
    let f = parse_family("family 40 rank 6 gens a1..a6 { comm [a1,a2] = a3 }").unwrap();
    let err = compile(&f, &expand(&f, &c).unwrap()[0], &c).unwrap_err().to_string();
    assert!(err.contains("not a word in earlier generators"), "{err}");
}

#[test]
fn diagnostics_carry_positions_and_keep_going() {
    let src = "family 40 rank 6 gens a1..a6 {\n  pow a7^p = 1\n  comm [a2,a2] = a1\n  pow a3^p = a1^q\n}\n";
    let err = parse(src).unwrap_err();
    let lines: Vec<u32> = err.diagnostics.iter().map(|d| d.line).collect();
    assert_eq!(lines, vec![2, 3, 4], "{err}");
    assert!(err.diagnostics[0].message.contains("undeclared generator a7"));
    assert!(err.diagnostics[1].message.contains("equal entries"));
    assert!(err.diagnostics[2].message.contains("undeclared parameter 'q'"));
    assert_eq!(err.diagnostics[0].col, 3);
}

#[test]
fn duplicates_and_orientation_are_rejected() {
    let dup = "family 40 rank 6 gens a1..a6 { comm [a1,a2] = 1 comm [a1,a2] = 1 pow a3^p = 1 pow a3^p = 1 }";
    assert_eq!(parse(dup).unwrap_err().diagnostics.len(), 2);
    let flipped = "convention bracket=left-normed order=ij\nfamily 40 rank 6 gens a1..a6 { comm [a2,a1] = 1 }";
    assert!(parse(flipped).is_err());
    let ji = "convention bracket=left-normed order=ji\nfamily 40 rank 6 gens a1..a6 { comm [a2,a1] = 1 }";
    assert!(parse(ji).is_ok());
    assert!(parse("convention bracket=right-normed order=ij\n").is_err());
    assert!(parse("family 6 rank 6 gens a1..a6, b1..b2 { }").is_err());
}

#[test]
fn diagnostics_are_capped() {
    let body: String = (0..40).map(|k| format!("  pow a9^p = a{k}\n")).collect();
    let err = parse(&format!("family 40 rank 6 gens a1..a6 {{\n{body}}}\n")).unwrap_err();
    assert_eq!(err.diagnostics.len(), MAX_DIAGNOSTICS);
}

#[test]
fn serialization_is_canonical_and_stable() {
    let messy = "family  1 rank 1 gens a1..a6{param r in {1,nu}\npow a2^p=a1^(r+1)  comm [a2 ,a3]=a1^-r a2}";
    let f = parse(messy).unwrap();
    let once = serialize(&f);
    assert_eq!(
        once,
        "convention bracket=left-normed order=ij\n\nfamily 1 rank 1 gens a1..a6 {\n  param r in {1, nu}\n  \
         pow a2^p = a1^(r + 1)\n  comm [a2,a3] = a1^-r a2\n}\n"
    );
    assert_eq!(serialize(&f), once);
    assert_eq!(parse(&once).unwrap(), f);
}

#[test]
fn shipped_files_round_trip_byte_for_byte() {
    let mut files: Vec<_> = std::fs::read_dir(common::data_dir()).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    assert_eq!(files.len(), 43);
    for path in files {
        let text = std::fs::read_to_string(&path).unwrap();
        let ast = parse(&text).unwrap();
        let again = serialize(&ast);
        assert_eq!(parse(&again).unwrap(), ast, "{}", path.display());
        assert_eq!(again, text, "{} is not in canonical form", path.display());
    }
}

#[test]
fn expansion_is_pure() {
    let text = std::fs::read_to_string(common::data_dir().join("phi21.p6")).unwrap();
    for f in parse(&text).unwrap().families {
        assert_eq!(expand(&f, &ctx(13)).unwrap(), expand(&f, &ctx(13)).unwrap());
    }
}

#[test]
fn let_and_where_filter_bindings() {
    let src = "family 40 rank 6 gens a1..a6 {
        param r in 1..p - 1
        where is_sq(r) and r != 1
        let s = inv(r)
        let (x, y) = first x in 1..p - 1, y in 1..p - 1 where x * y == r and x > 1
    }";
    let f = parse_family(src).unwrap();
    let bs = expand(&f, &ctx(7)).unwrap();
    // squares mod 7 other than 1: 2 and 4
    let got: Vec<(i64, i64, i64, i64)> =
        bs.iter().map(|b| (b.get("r").unwrap(), b.get("s").unwrap(), b.get("x").unwrap(), b.get("y").unwrap())).collect();
    assert_eq!(got, vec![(2, 4, 2, 1), (4, 2, 2, 2)]);
}

#[test]
fn elementary_abelian_script() {
    let f = parse_family("family 1 rank 1 gens a1..a6 { }").unwrap();
    let c = ctx(7);
    let b = &expand(&f, &c).unwrap()[0];
    let pres = compile(&f, b, &c).unwrap();
    let header = EmitHeader { family: 1, label: "(1,11)".into(), binding: String::new() };
    let script = emit_cas(&pres, &header, Dialect::GapStyle);
    assert_eq!(script.matches("^7").count(), 6);
    assert!(!script.contains("Comm("));
    assert!(script.starts_with("# family 1 (1,11)\n# p = 7\n"));
    assert!(script.ends_with("G := PcGroupFpGroup(F / rels);;\n"));
    assert_eq!(script, emit_cas(&pres, &header, Dialect::GapStyle));
}

#[test]
fn heisenberg_script_in_magma_syntax() {
    let pres = common::heisenberg(5);
    let script = emit_cas(&pres, &EmitHeader { family: 0, label: "H".into(), binding: String::new() }, Dialect::MagmaStyle);
    assert!(script.contains("(a3,a2) = a1"), "{script}");
    assert!(script.contains("quo<GrpPC : F |"));
    assert!("latex-style".parse::<Dialect>().is_err());
    assert_eq!("magma-style".parse::<Dialect>().unwrap(), Dialect::MagmaStyle);
}

#[test]
fn expressions_use_modular_power_and_division() {
    let c = ctx(11);
    let f = parse_family("family 40 rank 6 gens a1..a6 { let x = (0 - 7) / 2 + (0 - 7) mod 3 + 2^-1 + (3 < 4) }").unwrap();
    let Decl::Let { expr, .. } = &f.decls[0] else { panic!() };
    // floor(-3.5) = -4, -7 mod 3 = 2, 2^-1 = 6 mod 11, true = 1
    assert_eq!(Env::new(&c).eval(expr).unwrap(), -4 + 2 + 6 + 1);
    assert!(matches!(expr, Expr::Bin(..)));
}

mod common;

use std::collections::BTreeSet;

use p6groups::catalog::{build_catalog, load_specs, plan, verify_catalog, BuildOptions, CatalogError, VerifyOptions};
use p6groups::dsl::FamilySpec;
use p6groups::numtheory::{group_count, PrimeContext};

fn specs() -> Vec<FamilySpec> {
    load_specs(&common::data_dir()).unwrap()
}

fn quick(workers: usize) -> VerifyOptions {
    VerifyOptions { workers: Some(workers), profiles: Some(false), ..VerifyOptions::default() }
}

fn partitions(n: u32, max: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in (1..=n.min(max)).rev() {
        for mut rest in partitions(n - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

#[test]
fn family_one_is_the_eleven_abelian_groups() {
    let specs: Vec<FamilySpec> = specs().into_iter().filter(|s| s.family == 1).collect();
    let entries = build_catalog(7, &specs, BuildOptions::default()).unwrap();
    assert_eq!(entries.len(), 11);
    let found: BTreeSet<Vec<u32>> = entries.iter().map(|e| e.profile().unwrap().abelian_invariants.clone()).collect();
    let all: BTreeSet<Vec<u32>> = partitions(6, 6).into_iter().collect();
    assert_eq!(all.len(), 11);
    assert_eq!(found, all);
    for e in &entries {
        let pr = e.profile().unwrap();
        assert_eq!((pr.centre_order, pr.derived_order, pr.nilpotency_class), (6, 0, 1));
    }
}

#[test]
fn profile_is_computed_once() {
    let specs: Vec<FamilySpec> = specs().into_iter().filter(|s| s.family == 3).collect();
    let entries = build_catalog(7, &specs, BuildOptions::default()).unwrap();
    let a = entries[0].profile().unwrap() as *const _;
    let b = entries[0].profile().unwrap() as *const _;
    assert_eq!(a, b);
}

#[test]
fn parameter_family_sizes() {
    let specs = specs();
    let count = |p: u64, label: &str| {
        let ctx = PrimeContext::new(p).unwrap();
        plan(&specs, &ctx).unwrap().iter().filter(|e| e.label.split(' ').next() == Some(label)).count()
    };
    for (label, at7, at13) in [("(11,3r)", 2, 2), ("(11,12r)", 2, 2), ("(16,12r)", 3, 3), ("(18,9r)", 2, 4), ("(21,7rs)", 21, 78)]
    {
        assert_eq!((count(7, label), count(13, label)), (at7, at13), "{label}");
    }
}

#[test]
fn two_parameters_vary_second_fastest() {
    let specs = specs();
    let ctx = PrimeContext::new(7).unwrap();
    let labels: Vec<String> =
        plan(&specs, &ctx).unwrap().into_iter().filter(|e| e.label.starts_with("(21,7rs)")).map(|e| e.label).collect();
    assert_eq!(&labels[..4], ["(21,7rs) r=0 s=1", "(21,7rs) r=0 s=2", "(21,7rs) r=0 s=3", "(21,7rs) r=1 s=1"]);
    assert_eq!(labels.last().unwrap(), "(21,7rs) r=6 s=3");
}

#[test]
fn ids_are_dense_and_family_ordered() {
    let specs = specs();
    let ctx = PrimeContext::new(11).unwrap();
    let planned = plan(&specs, &ctx).unwrap();
    assert!(planned.iter().enumerate().all(|(k, e)| e.index == k + 1));
    assert!(planned.windows(2).all(|w| specs[w[0].spec].family <= specs[w[1].spec].family));
}

#[test]
fn counts_match_the_formula() {
    let specs = specs();
    for p in [7u64, 11, 13] {
        let r = verify_catalog(p, &specs, quick(2)).unwrap();
        assert_eq!(r.actual_count as u64, group_count(p).unwrap(), "p = {p}");
        assert_eq!(r.family_counts.values().sum::<usize>(), r.actual_count);
        assert_eq!(r.family_counts[&1], 11);
        assert!(r.passed(), "{}", r.to_text());
    }
}

#[test]
fn corrupted_relation_is_reported() {
    let dir = common::corrupted_data();
    let specs = load_specs(dir.path()).unwrap();
    let r = verify_catalog(7, &specs, quick(1)).unwrap();
    assert!(!r.passed());
    assert_eq!(r.consistency_failures.len(), 1);
    assert_eq!(r.consistency_failures[0].label, common::CORRUPTED_LABEL);
    assert!(r.to_text().contains("(15,1)"));
    assert!(r.to_machine().contains("failure kind=consistency"));
    // build mode stops at the failing entry
    let err = build_catalog(7, &specs, BuildOptions::default()).unwrap_err();
    assert!(err.to_string().starts_with(common::CORRUPTED_LABEL), "{err}");
}

#[test]
fn small_primes_need_an_override() {
    let specs = specs();
    assert!(matches!(verify_catalog(5, &specs, quick(1)), Err(CatalogError::P5NotAllowed)));
    assert!(verify_catalog(9, &specs, quick(1)).is_err());
    assert!(verify_catalog(3, &specs, VerifyOptions { allow_p5: true, ..quick(1) }).is_err());
    let r = verify_catalog(5, &specs, VerifyOptions { allow_p5: true, ..quick(1) }).unwrap();
    assert_eq!(r.expected_count, 684);
    assert!(r.warnings.iter().any(|w| w.contains("35 to 39")));
}

#[test]
fn reports_do_not_depend_on_worker_count() {
    let specs = specs();
    let one = verify_catalog(11, &specs, quick(1)).unwrap();
    let three = verify_catalog(11, &specs, quick(3)).unwrap();
    assert_eq!(one.to_text(), three.to_text());
    assert_eq!(one.to_machine(), three.to_machine());

    let few: Vec<FamilySpec> = specs.into_iter().filter(|s| s.family <= 3 || s.family == 15).collect();
    let with_profiles = |w| VerifyOptions { workers: Some(w), profiles: Some(true), ..VerifyOptions::default() };
    let a = verify_catalog(7, &few, with_profiles(1)).unwrap();
    let b = verify_catalog(7, &few, with_profiles(2)).unwrap();
    assert!(a.profiles_computed && a.failure_count() == 0, "{}", a.to_text());
    assert_eq!(a.to_text(), b.to_text());
}

#[test]
fn profile_shapes_on_a_sample() {
    let specs: Vec<FamilySpec> = specs().into_iter().filter(|s| [2, 10, 15, 21, 35, 43].contains(&s.family)).collect();
    for e in build_catalog(7, &specs, BuildOptions::default()).unwrap().iter().step_by(5) {
        let pr = e.profile().unwrap();
        let c = pr.nilpotency_class as usize;
        assert!(c <= 5, "{}", e.label);
        assert_eq!(pr.lcs_orders.len(), c + 1);
        assert_eq!(pr.ucs_orders.len(), c + 1);
        assert!(pr.lcs_orders.windows(2).all(|w| w[0] > w[1]));
        assert!(pr.ucs_orders.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(pr.lcs_orders[1], pr.derived_order);
        for &size in pr.class_size_multiset.as_ref().unwrap().keys() {
            assert!(size <= 7u64.pow(5) && 7u64.pow(5).is_multiple_of(size), "{}: class size {size}", e.label);
        }
    }
}

//! Lists catalog labels per family with their sizes.
//!
//! ```text
//! cargo run --example list_catalog -- 13
//! ```

use std::collections::BTreeMap;
use std::path::PathBuf;

use p6groups::catalog::{check_prime, load_specs, plan};
use p6groups::numtheory::group_count;

fn main() {
    let p = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(7);
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data");
    let specs = load_specs(&data).unwrap();
    let planned = plan(&specs, &check_prime(p, false).unwrap()).unwrap();

    let mut per_family: BTreeMap<u32, (usize, usize, usize)> = BTreeMap::new();
    for e in &planned {
        let f = specs[e.spec].family;
        let slot = per_family.entry(f).or_insert((e.index, e.index, 0));
        slot.1 = e.index;
        slot.2 += 1;
    }
    for (f, (first, last, n)) in &per_family {
        println!("family {f:>2}: {n:>4} groups, ids {first}..{last}");
    }
    println!("total {} (formula {})", planned.len(), group_count(p).unwrap());
}

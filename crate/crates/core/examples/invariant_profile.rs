//! Prints the invariant profile of one catalog entry.
//!
//! ```text
//! cargo run --release --example invariant_profile -- 7 300
//! ```

use std::path::PathBuf;

use p6groups::catalog::{build_entry, check_prime, load_specs, plan};
use p6groups::invariants::{Analysis, ProfileOptions};

fn main() {
    let args: Vec<u64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let p = args.first().copied().unwrap_or(7);
    let index = args.get(1).copied().unwrap_or(100) as usize;

    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data");
    let specs = load_specs(&data).unwrap();
    let ctx = check_prime(p, false).unwrap();
    let planned = plan(&specs, &ctx).unwrap();
    let e = planned.iter().find(|e| e.index == index).expect("index in range");
    let entry = build_entry(&specs, e, &ctx, 1 << 26).unwrap();

    let an = Analysis::new(&entry.group, 1 << 26).unwrap();
    let pr = an.profile(ProfileOptions::default());
    println!("entry {index} of p={p}: {}", entry.label);
    println!("  order type        {}", pr.order_type.rendered());
    println!("  |Z(G)|            p^{}", pr.centre_order);
    println!("  |G'|              p^{}", pr.derived_order);
    println!("  G/Phi(G) rank     {}", pr.frattini_quotient_rank);
    println!("  lower central     {:?}", pr.lcs_orders);
    println!("  upper central     {:?}", pr.ucs_orders);
    println!("  class             {}", pr.nilpotency_class);
    println!("  exponent          {}", pr.exponent_value());
    println!("  G/G' invariants   {:?}", pr.abelian_invariants);
    println!("  conjugacy classes {}", pr.class_count().unwrap());
    for (size, n) in pr.class_size_multiset.as_ref().unwrap() {
        println!("    {n} classes of size {size}");
    }
}

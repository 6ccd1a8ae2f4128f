//! Number of groups of order `p^6`, term by term.
//!
//! ```text
//! cargo run --example count_formula -- 7 11 13
//! ```

use p6groups::numtheory::{group_count_terms, smallest_nonresidue, smallest_primitive_root};

fn main() {
    let mut primes: Vec<u64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    if primes.is_empty() {
        primes = vec![7, 11, 13, 17, 19];
    }
    for p in primes {
        match group_count_terms(p) {
            Ok(t) => println!(
                "p={p:<4} total={:<6} quadratic={} gcd(p-1,3)={} gcd(p-1,4)={} gcd(p-1,5)={} nu={} omega={}",
                t.total(),
                t.quadratic,
                t.gcd3,
                t.gcd4,
                t.gcd5,
                smallest_nonresidue(p).unwrap(),
                smallest_primitive_root(p).unwrap()
            ),
            Err(e) => println!("p={p:<4} {e}"),
        }
    }
}

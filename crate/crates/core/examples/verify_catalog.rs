//! Builds and checks the catalog for one prime.
//!
//! ```text
//! cargo run --release --example verify_catalog -- 11
//! ```

use std::path::PathBuf;
use std::time::Instant;

use p6groups::catalog::{load_specs, verify_catalog, VerifyOptions};

fn main() {
    let p = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(11);
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data");
    let specs = load_specs(&data).unwrap();
    let t = Instant::now();
    let report = verify_catalog(p, &specs, VerifyOptions { profiles: Some(false), ..VerifyOptions::default() }).unwrap();
    print!("{}", report.to_text());
    println!("took {:.2}s", t.elapsed().as_secs_f64());
    std::process::exit(if report.passed() { 0 } else { 1 });
}

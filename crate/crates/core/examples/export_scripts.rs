//! Writes a GAP and a Magma script for the first few entries of a family.
//!
//! ```text
//! cargo run --example export_scripts -- 21
//! ```

use std::path::PathBuf;

use p6groups::catalog::{build_catalog, load_specs, BuildOptions};
use p6groups::dsl::{emit_cas, Dialect, EmitHeader};

fn main() {
    let family: u32 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(2);
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data");
    let specs: Vec<_> = load_specs(&data).unwrap().into_iter().filter(|s| s.family == family).collect();
    let entries = build_catalog(7, &specs, BuildOptions::default()).unwrap();
    for e in entries.iter().take(2) {
        let header = EmitHeader { family: e.family, label: e.label.clone(), binding: e.binding.to_string() };
        for d in [Dialect::GapStyle, Dialect::MagmaStyle] {
            println!("{}", emit_cas(e.group.presentation(), &header, d));
        }
    }
}

//! Builds the Heisenberg group of order `p^3` by hand and collects words.

use p6groups::numtheory::PrimeContext;
use p6groups::pcgroup::{format_word, ExponentVector, PcGroup, PcPresentation};

fn main() {
    let ctx = PrimeContext::new(7).unwrap();
    let mut pres = PcPresentation::new(&ctx, 3).unwrap();
    // [a3, a2] = a1, everything else trivial
    pres.set_comm(3, 2, ExponentVector::generator(3, 1)).unwrap();
    let report = pres.consistency_check();
    println!("consistent: {}", report.is_consistent());

    let g = PcGroup::new(pres).unwrap();
    let names = g.presentation().names().to_vec();
    let show = |v: &ExponentVector| format_word(v, &names, " ");

    let (a2, a3) = (g.generator(2), g.generator(3));
    println!("a3 * a2       = {}", show(&g.multiply(&a3, &a2)));
    println!("[a3, a2]      = {}", show(&g.commutator(&a3, &a2)));
    println!("(a2 a3)^7     = {}", show(&g.power(&g.multiply(&a2, &a3), 7)));
    let word = [(3, 2), (2, -1), (3, -1), (2, 4)];
    println!("a3^2 a2^-1 a3^-1 a2^4 = {}", show(&g.collect(&word).unwrap()));
    println!("order of a2 a3 = {}", g.element_order(&g.multiply(&a2, &a3)));
    println!("|G| = {}", g.order());
}

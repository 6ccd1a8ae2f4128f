//! Groups of order `p^6` for primes `p >= 7` as executable objects.
//!
//! Family presentations live in `.p6` text files (see [`dsl`]). They are
//! expanded over their parameter ranges, compiled to consistent
//! power-commutator presentations ([`pcgroup`]) and fingerprinted with
//! standard invariants ([`invariants`]). [`catalog`] ties this together and
//! checks the result against the closed formula for the number of groups.

pub mod numtheory;
pub mod pcgroup;
pub mod invariants;
pub mod dsl;
pub mod catalog;
pub mod cli;

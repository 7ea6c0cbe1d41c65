//! Small monoids shipped with the crate.
//!
//! `h2` is bridged and `(x6, x5, x4)` is its only bridged triple:
//! `x6·x4 = x1 ∉ {x6·x5, x5·x4} = {x2, x3}`. Note that the unbalanced pairs
//! `(x6, x5), (x5, x4), (x6, x3)` do not form a triple of the required shape.

use crate::io;
use crate::monoid::{FiniteMonoid, Magma};

pub const Z2_JSON: &str = include_str!("../fixtures/z2.json");
pub const Z3_JSON: &str = include_str!("../fixtures/z3.json");
pub const Z5_JSON: &str = include_str!("../fixtures/z5.json");
pub const CHAIN2_JSON: &str = include_str!("../fixtures/chain2.json");
pub const CHAIN3_JSON: &str = include_str!("../fixtures/chain3.json");
pub const H1_JSON: &str = include_str!("../fixtures/h1.json");
pub const H2_JSON: &str = include_str!("../fixtures/h2.json");
/// A 3-element almost-breakable semigroup that is not breakable (no identity).
pub const S_JSON: &str = include_str!("../fixtures/s.json");

/// Monoid fixtures by name.
pub const MONOIDS: [(&str, &str); 7] = [
    ("z2", Z2_JSON),
    ("z3", Z3_JSON),
    ("z5", Z5_JSON),
    ("chain2", CHAIN2_JSON),
    ("chain3", CHAIN3_JSON),
    ("h1", H1_JSON),
    ("h2", H2_JSON),
];

/// Every fixture file, including the semigroup `s`.
pub const FILES: [(&str, &str); 8] = [
    ("z2", Z2_JSON),
    ("z3", Z3_JSON),
    ("z5", Z5_JSON),
    ("chain2", CHAIN2_JSON),
    ("chain3", CHAIN3_JSON),
    ("s", S_JSON),
    ("h1", H1_JSON),
    ("h2", H2_JSON),
];

/// Loads a monoid fixture by name. Panics on unknown names.
pub fn monoid(name: &str) -> FiniteMonoid {
    let json = MONOIDS
        .iter()
        .find(|(n, _)| *n == name)
        .unwrap_or_else(|| panic!("no monoid fixture named {name}"))
        .1;
    io::parse_monoid(json).expect("fixtures are valid")
}

pub fn s_semigroup() -> Magma {
    io::parse_magma(S_JSON).expect("fixture is a valid table")
}

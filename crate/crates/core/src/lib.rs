//! Arithmetic of reduced finitary power monoids over finite ground monoids.
//!
//! - [`monoid`]: finite monoids as Cayley tables, element-level predicates and
//!   constructions.
//! - [`power`]: setwise products, irreducibles and (minimal) factorizations.
//! - [`classify`]: brute-force deciders and the structural UmF ladder.
//! - [`census`]: isomorphism-class enumeration and census records.
//! - [`io`]: table files and label-level serialization.
//! - [`fixtures`]: the small monoids shipped with the crate.

pub mod census;
pub mod classify;
pub mod fixtures;
pub mod io;
pub mod monoid;
pub mod power;

pub use classify::{classify, Budget, ClassificationReport, TriState, Verdict};
pub use monoid::{
    CanonicalForm, ElementId, FiniteMonoid, Magma, MonoidError, RawMonoid, StructureFlags,
};
pub use power::{
    equivalent, FactorMultiset, FactorWord, Growth, MinimalFactorization, PSet, PowerError,
    PowerMonoid,
};

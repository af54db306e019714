//! Spaces of ideals of stage-enumerable transitive relations on the naturals.
//!
//! A countably based space is presented here as the set of ideals of a
//! transitive relation on `ω`. Relations are never materialized whole:
//! every relation is a [`RelationSource`](relations::RelationSource), a
//! deterministic and monotone enumerator that yields a finite set of pairs
//! for each stage. Everything that can only be semi-decided is reported as a
//! [`Verdict`] relative to a stage prefix, so callers cannot mistake
//! "no counterexample yet" for a proof.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line, and report rendering live in the `idealspace` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod carrier;
pub mod closures;
pub mod constructions;
pub mod engine;
pub mod fixtures;
pub mod ideals;
pub mod morphisms;
pub mod relations;
mod verdict;

use alloc::collections::BTreeSet;

pub use verdict::Verdict;

/// A natural number standing for an element of some countable carrier.
pub type Code = u64;

/// The single global clock: "enumerated by stage `s`".
pub type Stage = u64;

/// A finite set of ordered pairs of codes.
pub type PairSet = BTreeSet<(Code, Code)>;

/// A finite set of codes.
pub type ElemSet = BTreeSet<Code>;

pub use carrier::{pair, unpair, Rational, TreePredicate};
pub use relations::{FiniteRelation, Prefix, RelationSource};


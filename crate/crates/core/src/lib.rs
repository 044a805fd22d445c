//! Parallel-innermost runtime complexity analysis for term rewrite systems.
//!
//! The crate covers the whole pipeline: terms and rewrite systems, an
//! executable rewriting semantics with derivation-height oracles, parallel
//! dependency tuples, polynomial interpretation search, the transformation
//! to relative rewriting, a confluence criterion and TPDB-style I/O.

pub mod analysis;
pub mod dt;
pub mod exec;
pub mod fixtures;
pub mod poly;
pub mod rewrite;
pub mod term;
pub mod tpdb;
pub mod transform;
pub mod trs;

pub use rewrite::{DerivationHeight, Strategy};
pub use term::{Position, Substitution, Symbol, SymbolKind, Term};
pub use trs::{RelativeTrs, Rule, Trs};

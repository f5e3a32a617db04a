//! Executable forcing over hereditarily finite set models.
//!
//! The crate provides a canonical kernel of hereditarily finite sets
//! ([`hfset`]), internalized de Bruijn formulas ([`formula`]), satisfaction and
//! axiom codes ([`semantics`]), relational predicates and absoluteness
//! ([`relativize`]), forcing notions, names and the forcing relation
//! ([`forcing`]), and an exhaustive verification harness ([`lab`]).

pub mod cli;
pub mod error;
pub mod forcing;
pub mod formula;
pub mod hfset;
pub mod lab;
pub mod relativize;
pub mod semantics;

pub use error::{Error, HfError, ParseError, Result};
pub use forcing::{ForcingNotion, GenericFilter};
pub use formula::Formula;
pub use hfset::HFSet;

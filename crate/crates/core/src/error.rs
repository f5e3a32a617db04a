use thiserror::Error;

use crate::hfset::HFSet;

/// A syntax error in a formula or HF literal, with the byte offset where it was detected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at position {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

impl ParseError {
    pub fn new(pos: usize, msg: impl Into<String>) -> ParseError {
        ParseError {
            pos,
            msg: msg.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HfError {
    #[error("resource limit exceeded in {op}: {requested} elements requested, limit is {limit} (set FORCING_LAB_MAX_SET_SIZE to raise it)")]
    ResourceLimit {
        op: &'static str,
        requested: u128,
        limit: usize,
    },
}

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Hf(#[from] HfError),
    #[error("formula is not core (contains forcing atoms) and no forcing context was supplied: {0}")]
    NonCore(String),
    #[error("invalid forcing notion: {0} violated")]
    InvalidNotion(&'static str),
    #[error("condition {0} is not in P")]
    NotInP(HFSet),
    #[error("{0} is not a subset of P")]
    NotSubsetOfP(HFSet),
    #[error("{0} is not a name")]
    NotAName(HFSet),
    #[error("environment entry {0} is not in the model")]
    EnvOutsideModel(HFSet),
    #[error("formula arity {arity} exceeds environment length {len}")]
    ArityExceedsEnv { arity: usize, len: usize },
    #[error("model precondition failed: {0}")]
    Model(String),
    #[error("unknown {kind} '{name}'")]
    Unknown { kind: &'static str, name: String },
    #[error("wrong number of arguments for {name}: expected {expected}, got {got}")]
    Arguments {
        name: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("bound exceeded: {0}")]
    Bound(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid poset spec: {0}")]
    Poset(String),
}

pub type Result<T> = std::result::Result<T, Error>;

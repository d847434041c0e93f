//! The concrete universal machine: a prefix-free register-machine language,
//! its bounded interpreter, a sound halting decider, builtin programs and
//! exact Busy Beaver enumeration.

mod bb;
pub mod builtins;
mod exec;
mod program;

use thiserror::Error;

pub use bb::{codewords, enumerate_bb, BbEntry, BbTable};
pub use exec::{execute, fitness, oracle, oracle_with, run, Decider, MachineVerdict, VerdictKind};
pub use program::{decode, Body, Instruction, Labels, Op, Program, BUILTIN_PREFIX, MAX_LABEL_BITS};

pub(crate) use exec::eval;
pub(crate) use program::{decode_from, DecodeFault};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MachineError {
    #[error("malformed encoding: {reason}")]
    MalformedEncoding { reason: &'static str },
    #[error("codeword ends after {consumed} of {total} bits")]
    TrailingBits { consumed: usize, total: usize },
    #[error("input of {bits} bits does not fit in a register")]
    InputTooLong { bits: usize },
    #[error("labels longer than {MAX_LABEL_BITS} bits")]
    LabelTooLong,
    #[error("bb table: {0}")]
    BbTable(String),
}

//! Experiment harness shared by the command-line tool and the acceptance
//! suite. Every command writes deterministic files into the configured output
//! directory and stamps each one with the seed and config fingerprint.

mod commands;
mod config;

use std::path::PathBuf;

use thiserror::Error;

use crate::bits::Bitstring;
use crate::machine::{oracle, MachineError, Program, VerdictKind};
use crate::measures::MeasureError;
use crate::network::{NetworkError, Selector};
use crate::tvg::TvgError;

pub use commands::{
    cmd_bb, cmd_central, cmd_halting_sweep, cmd_run, cmd_synergy, cmd_tvg, wilson_interval,
    SweepRow,
};
pub use config::{BbConfig, ExperimentConfig, SelectorKind, SynergyConfig, SEED_ENV};

#[derive(Debug, Error)]
pub enum ExpError {
    /// Bad configuration or arguments. Nothing was run.
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("{0}")]
    Runtime(String),
}

impl ExpError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ExpError::Validation(_) => 1,
            ExpError::Runtime(_) => 2,
        }
    }
}

macro_rules! runtime_from {
    ($($t:ty),*) => {$(
        impl From<$t> for ExpError {
            fn from(e: $t) -> Self {
                ExpError::Runtime(e.to_string())
            }
        }
    )*};
}

runtime_from!(
    std::io::Error,
    csv::Error,
    serde_json::Error,
    MachineError,
    NetworkError,
    TvgError,
    MeasureError
);

/// What a command produced.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    /// Data files written, in write order.
    pub files: Vec<PathBuf>,
    /// Human-readable summary lines.
    pub lines: Vec<String>,
}

/// The answer a correct network gives on `w`. For `p_halt` this is the label
/// the reference decider assigns; `None` when it cannot settle `w`. Identity
/// returns the carried maximum; custom selectors have no known answer.
pub fn reference_output(
    selector: &Selector,
    w: &Bitstring,
    x_max: u128,
    reference_budget: u64,
) -> Result<Option<Bitstring>, MachineError> {
    Ok(match selector {
        Selector::PHalt { labels } => {
            let p = Program::parse(w)?;
            match oracle(&p, &Bitstring::empty(), reference_budget)?.kind() {
                VerdictKind::Halted => Some(labels.halting.clone()),
                VerdictKind::ProvenNonhalting => Some(labels.non_halting.clone()),
                VerdictKind::BudgetExhausted => None,
            }
        }
        Selector::Identity => Some(Bitstring::from_natural(x_max)),
        Selector::Custom { .. } => None,
    })
}

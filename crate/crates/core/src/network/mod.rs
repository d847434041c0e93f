//! Populations of random programs placed on a time-varying graph and run
//! under the synergistic imitation-of-the-fittest protocol.

mod central;
mod sifp;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::{BitSource, Bitstring};
use crate::machine::{
    builtins, decode_from, fitness, oracle, DecodeFault, Labels, MachineError, MachineVerdict,
    Program,
};
use crate::tvg::TvgError;

pub use central::{find_central_node, CentralReport, Qualifying};
pub use sifp::{
    run_networked, sifp_cycle, Carried, CycleState, NetworkAssembly, NodeRecord, Partial,
    RunRecord, Stage,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetworkError {
    #[error("configuration mismatch: {0}")]
    ConfigMismatch(String),
    #[error("vertex-to-node map is not a bijection")]
    NotBijective,
    #[error("no node qualifies as central")]
    NoCentralNode,
    #[error(transparent)]
    Machine(#[from] MachineError),
    #[error(transparent)]
    Tvg(#[from] TvgError),
}

/// Program applied to the carried maximum and the network input in the last
/// cycle. `head ∘ γ(x+1) ∘ w` is what gets executed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Selector {
    /// Decides whether `w` halts within `x` steps.
    PHalt {
        labels: Labels,
    },
    /// Returns `x`.
    Identity,
    Custom {
        bits: Bitstring,
    },
}

impl Selector {
    pub fn head(&self) -> Bitstring {
        match self {
            Selector::PHalt { labels } => builtins::p_halt(labels),
            Selector::Identity => builtins::p_identity(),
            Selector::Custom { bits } => bits.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub id: usize,
    pub program: Program,
    /// `fitness(verdict)`, the node's first-cycle offer.
    pub first_fitness: u128,
    /// Decider verdict of the program on the network input.
    pub verdict: MachineVerdict,
}

impl Node {
    pub fn evaluate(
        id: usize,
        program: Program,
        w: &Bitstring,
        budget: u64,
    ) -> Result<Node, MachineError> {
        let verdict = oracle(&program, w, budget)?;
        Ok(Node {
            id,
            first_fitness: fitness(&verdict),
            program,
            verdict,
        })
    }
}

pub fn evaluate_population(
    programs: &[Program],
    w: &Bitstring,
    budget: u64,
) -> Result<Vec<Node>, MachineError> {
    programs
        .par_iter()
        .enumerate()
        .map(|(id, p)| Node::evaluate(id, p.clone(), w, budget))
        .collect()
}

/// The random stream of node `index`. Streams do not depend on the
/// population size, so a larger population extends a smaller one.
pub fn node_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

struct FairBits<'a> {
    rng: &'a mut ChaCha8Rng,
    left: usize,
}

impl BitSource for FairBits<'_> {
    fn next_bit(&mut self) -> Option<bool> {
        if self.left == 0 {
            return None;
        }
        self.left -= 1;
        Some(self.rng.gen())
    }

    fn next_bit_avoiding(&mut self, dead: bool) -> Option<bool> {
        self.next_bit().map(|b| if b == dead { !dead } else { b })
    }
}

/// Draws one program from fair coin flips. A flip that would leave no valid
/// completion is replaced by its complement, which renormalizes the draw over
/// prefixes of codewords; the draw restarts only past `max_bits`.
pub fn sample_program(rng: &mut ChaCha8Rng, max_bits: usize) -> Program {
    loop {
        let mut src = FairBits {
            rng: &mut *rng,
            left: max_bits.max(1),
        };
        match decode_from(&mut src) {
            Ok(p) => return p,
            Err(DecodeFault::Truncated) => {}
            Err(DecodeFault::Malformed(reason)) => unreachable!("sampler steered into {reason}"),
        }
    }
}

pub fn sample_population(n: usize, seed: u64, max_bits: usize) -> Vec<Program> {
    (0..n)
        .into_par_iter()
        .map(|i| sample_program(&mut node_rng(seed, i), max_bits))
        .collect()
}

/// Output of a node left alone for `cycles` cycles: each cycle feeds the
/// previous fitness-coded output back as input. A failed cycle fixes the
/// output at ε.
pub fn run_isolated(program: &Program, w: &Bitstring, cycles: usize, budget: u64) -> Bitstring {
    isolated_trace(program, w, cycles, budget)
        .pop()
        .unwrap_or_else(|| w.clone())
}

/// Outputs after cycles `1..=cycles`.
pub fn isolated_trace(
    program: &Program,
    w: &Bitstring,
    cycles: usize,
    budget: u64,
) -> Vec<Bitstring> {
    let mut trace = Vec::with_capacity(cycles);
    let mut input = w.clone();
    let mut failed = false;
    for _ in 0..cycles {
        if !failed {
            // an input beyond register range counts as a failed cycle
            let f = oracle(program, &input, budget).map_or(0, |v| fitness(&v));
            failed = f == 0;
            input = Bitstring::from_natural(f);
        }
        trace.push(input.clone());
    }
    trace
}

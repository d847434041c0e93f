//! Bounded interpreter and the halting decider built on top of it.

use serde::{Deserialize, Serialize};

use crate::bits::Bitstring;

use super::program::{decode, Body, Op, Program};
use super::MachineError;

/// How the decider proves non-termination of a register program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decider {
    /// A full configuration (program counter and every register) repeats.
    Repeat,
    /// Repeat, or the program comes back to the same instruction with every
    /// register at least as large, where no register that grew was found
    /// zero by a test in between. Such a segment replays forever.
    #[default]
    Translated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictKind {
    Halted,
    ProvenNonhalting,
    BudgetExhausted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MachineVerdict {
    /// `value` is the natural held in R0; `steps` the instructions executed.
    Halted {
        value: u128,
        steps: u64,
    },
    /// Non-termination was proven after `steps` instructions.
    ProvenNonhalting {
        steps: u64,
    },
    BudgetExhausted {
        budget: u64,
    },
}

impl MachineVerdict {
    pub fn kind(&self) -> VerdictKind {
        match self {
            MachineVerdict::Halted { .. } => VerdictKind::Halted,
            MachineVerdict::ProvenNonhalting { .. } => VerdictKind::ProvenNonhalting,
            MachineVerdict::BudgetExhausted { .. } => VerdictKind::BudgetExhausted,
        }
    }

    pub fn output(&self) -> Option<Bitstring> {
        match *self {
            MachineVerdict::Halted { value, .. } => Some(Bitstring::from_natural(value)),
            _ => None,
        }
    }

    pub fn value(&self) -> Option<u128> {
        match *self {
            MachineVerdict::Halted { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn steps(&self) -> Option<u64> {
        match *self {
            MachineVerdict::Halted { steps, .. } => Some(steps),
            _ => None,
        }
    }

    pub fn halted(&self) -> bool {
        matches!(self, MachineVerdict::Halted { .. })
    }
}

/// Imitation-game fitness: the successor of the output when the program
/// halts, zero otherwise.
pub fn fitness(verdict: &MachineVerdict) -> u128 {
    match verdict {
        MachineVerdict::Halted { value, .. } => value + 1,
        _ => 0,
    }
}

fn input_register(input: &Bitstring) -> Result<u128, MachineError> {
    input
        .to_natural()
        .ok_or(MachineError::InputTooLong { bits: input.len() })
}

/// Plain bounded execution: R0 starts at the natural of `input`.
pub fn run(p: &Program, input: &Bitstring, budget: u64) -> Result<MachineVerdict, MachineError> {
    Ok(eval(p, input_register(input)?, budget, None))
}

/// Bounded execution with non-termination proofs.
pub fn oracle(p: &Program, input: &Bitstring, budget: u64) -> Result<MachineVerdict, MachineError> {
    oracle_with(p, input, budget, Decider::default())
}

pub fn oracle_with(
    p: &Program,
    input: &Bitstring,
    budget: u64,
    decider: Decider,
) -> Result<MachineVerdict, MachineError> {
    Ok(eval(p, input_register(input)?, budget, Some(decider)))
}

/// Runs a raw bit stream the way the universal machine does: the leading
/// codeword is the program, whatever follows is its input.
pub fn execute(
    bits: &Bitstring,
    budget: u64,
    decider: Option<Decider>,
) -> Result<MachineVerdict, MachineError> {
    let (p, rest) = decode(bits)?;
    Ok(eval(&p, input_register(&rest)?, budget, decider))
}

pub(crate) fn eval(p: &Program, r0: u128, budget: u64, decider: Option<Decider>) -> MachineVerdict {
    use MachineVerdict::*;
    match p.body() {
        Body::Register { ops, registers, .. } => run_register(ops, *registers, r0, budget, decider),
        Body::Literal(n) => {
            if budget == 0 {
                BudgetExhausted { budget }
            } else {
                Halted {
                    value: *n,
                    steps: 1,
                }
            }
        }
        Body::Time(inner) | Body::Successor(inner) => {
            if budget == 0 {
                return BudgetExhausted { budget };
            }
            match eval(inner, r0, budget - 1, decider) {
                Halted { value, steps } => {
                    let value = if matches!(p.body(), Body::Time(_)) {
                        steps as u128
                    } else {
                        value + 1
                    };
                    Halted {
                        value,
                        steps: steps + 1,
                    }
                }
                ProvenNonhalting { steps } => ProvenNonhalting { steps: steps + 1 },
                BudgetExhausted { .. } => BudgetExhausted { budget },
            }
        }
        Body::Halt {
            labels,
            bound,
            target,
        } => {
            if budget == 0 {
                return BudgetExhausted { budget };
            }
            let room = budget - 1;
            let inner_budget = (*bound).min(room as u128) as u64;
            let (halts, simulated) = match eval(target, r0, inner_budget, Some(Decider::default()))
            {
                Halted { steps, .. } => (true, steps),
                ProvenNonhalting { steps } => (false, steps),
                // ran the full bound without halting
                BudgetExhausted { .. } if *bound <= room as u128 => (false, inner_budget),
                BudgetExhausted { .. } => return BudgetExhausted { budget },
            };
            let value = labels
                .label(halts)
                .to_natural()
                .expect("labels are bounded at decode time");
            Halted {
                value,
                steps: simulated + 1,
            }
        }
    }
}

struct Checkpoint {
    step: u64,
    pc: usize,
    regs: Vec<u128>,
    /// Registers found zero by a DECJZ before any ZERO since the checkpoint.
    zero_tested: Vec<bool>,
    /// Registers cleared by ZERO since the checkpoint.
    cleared: Vec<bool>,
}

impl Checkpoint {
    fn proves_loop(&self, pc: usize, regs: &[u128], decider: Decider) -> bool {
        if pc != self.pc {
            return false;
        }
        match decider {
            Decider::Repeat => self.regs == regs,
            Decider::Translated => self
                .regs
                .iter()
                .zip(regs)
                .zip(&self.zero_tested)
                .all(|((&then, &now), &tested)| now == then || (now > then && !tested)),
        }
    }
}

fn run_register(
    ops: &[Op],
    registers: usize,
    r0: u128,
    budget: u64,
    decider: Option<Decider>,
) -> MachineVerdict {
    let mut regs = vec![0u128; registers];
    regs[0] = r0;
    let mut pc = 0usize;
    let mut steps = 0u64;
    let mut checkpoint: Option<Checkpoint> = None;
    let mut next_checkpoint = 1u64;

    loop {
        if pc >= ops.len() {
            return MachineVerdict::Halted {
                value: regs[0],
                steps,
            };
        }
        if let Some(decider) = decider {
            if let Some(cp) = &checkpoint {
                if steps > cp.step && cp.proves_loop(pc, &regs, decider) {
                    return MachineVerdict::ProvenNonhalting { steps };
                }
            }
            if steps == next_checkpoint - 1 {
                checkpoint = Some(Checkpoint {
                    step: steps,
                    pc,
                    regs: regs.clone(),
                    zero_tested: vec![false; registers],
                    cleared: vec![false; registers],
                });
                next_checkpoint = next_checkpoint.saturating_mul(2);
            }
        }
        if steps == budget {
            return MachineVerdict::BudgetExhausted { budget };
        }
        match ops[pc] {
            Op::Inc(r) => {
                regs[r] += 1;
                pc += 1;
            }
            Op::Zero(r) => {
                regs[r] = 0;
                if let Some(cp) = checkpoint.as_mut() {
                    cp.cleared[r] = true;
                }
                pc += 1;
            }
            Op::DecJz { reg, target } => {
                if regs[reg] == 0 {
                    if let Some(cp) = checkpoint.as_mut() {
                        if !cp.cleared[reg] {
                            cp.zero_tested[reg] = true;
                        }
                    }
                    pc = target;
                } else {
                    regs[reg] -= 1;
                    pc += 1;
                }
            }
            Op::Jump(t) => pc = t,
        }
        steps += 1;
    }
}

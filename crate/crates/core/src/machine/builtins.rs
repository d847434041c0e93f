//! Heads of the builtin calls and helpers to apply them.
//!
//! A head is the fixed bit prefix of a builtin call; appending its arguments
//! yields a codeword. `p_time() ∘ p` is the program that outputs the running
//! time of `p`, `p_succ() ∘ p` outputs the successor of `p`'s output, and
//! `p_halt(labels) ∘ γ(n+1) ∘ p` runs `p` for at most `n` steps and writes
//! the halting or non-halting label.

use crate::bits::{concat_selfdelim, gamma, gamma_encode, Bitstring};

use super::program::{Labels, Program, BUILTIN_PREFIX, ID_HALT, ID_LITERAL, ID_SUCC, ID_TIME};
use super::MachineError;

fn head(id: u128) -> Bitstring {
    let mut bits: Bitstring = BUILTIN_PREFIX.parse().expect("constant prefix");
    gamma_encode(id, &mut bits);
    bits
}

/// `p_T`: `U(p_T ∘ p)` is the number of steps `p` takes to halt.
pub fn p_time() -> Bitstring {
    head(ID_TIME)
}

/// `p_+1`: `U(p_+1 ∘ p)` is the successor of `U(p)`.
pub fn p_succ() -> Bitstring {
    head(ID_SUCC)
}

/// `p_halt` writing the given labels. The labels are part of the program
/// text, so a more complex label pair gives a longer decider.
pub fn p_halt(labels: &Labels) -> Bitstring {
    let mut bits = head(ID_HALT);
    bits.extend_from(&concat_selfdelim(&[&labels.halting, &labels.non_halting]));
    bits
}

/// Selector that returns the natural handed to it: `U(p_id ∘ γ(x+1) ∘ w) = x`.
pub fn p_identity() -> Bitstring {
    head(ID_LITERAL)
}

pub fn time_of(p: &Program) -> Program {
    Program::parse(&Bitstring::concat(&[&p_time(), p.encoding()])).expect("well-formed call")
}

pub fn succ_of(p: &Program) -> Program {
    Program::parse(&Bitstring::concat(&[&p_succ(), p.encoding()])).expect("well-formed call")
}

/// `p_+1 ∘ p_T ∘ p`, the program whose output exceeds the running time of `p`.
pub fn succ_time_of(p: &Program) -> Program {
    succ_of(&time_of(p))
}

/// Bits that `p_+1 ∘ p_T` add in front of a program.
pub fn succ_time_overhead() -> usize {
    p_succ().len() + p_time().len()
}

pub fn halt_decider(labels: &Labels, bound: u128, p: &Program) -> Result<Program, MachineError> {
    if labels.halting.len() > super::MAX_LABEL_BITS
        || labels.non_halting.len() > super::MAX_LABEL_BITS
    {
        return Err(MachineError::LabelTooLong);
    }
    let bits = Bitstring::concat(&[&p_halt(labels), &gamma(bound + 1), p.encoding()]);
    Program::parse(&bits)
}

pub fn literal(n: u128) -> Program {
    Program::parse(&Bitstring::concat(&[&p_identity(), &gamma(n + 1)]))
        .expect("well-formed literal")
}

/// `s ∘ γ(x+1) ∘ w`: a selector applied to a natural and a program.
pub fn apply_selector(selector: &Bitstring, x: u128, w: &Program) -> Bitstring {
    Bitstring::concat(&[selector, &gamma(x + 1), w.encoding()])
}

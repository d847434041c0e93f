//! Codewords of the prefix-free program language.
//!
//! A codeword is either a register program or a builtin call:
//!
//! ```text
//! register program   γ(n+1) instr_0 … instr_{n-1}
//! instruction        00 γ(r+1)            INC r
//!                    01 γ(r+1) γ(Δ)       DECJZ r Δ   (jump forward Δ when r = 0)
//!                    10 γ(Δ)              JMPBACK Δ   (Δ ≤ index of the instruction)
//!                    11 γ(r+1)            ZERO r
//! builtin call       01010 γ(id) args…
//! ```
//!
//! A one-instruction program whose only instruction is a backward jump can
//! never be valid, so the prefix `01010` (header `γ(2)`, opcode `10`) is free
//! and is used to introduce builtin calls. Builtin arguments are themselves
//! self-delimiting (gamma-coded naturals, framed strings or nested codewords),
//! so the whole language stays prefix-free.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bits::{
    gamma_decode, gamma_decode_at_most, gamma_encode, BitCursor, BitSource, Bitstring, GammaError,
};

use super::MachineError;

/// Bits introducing a builtin call.
pub const BUILTIN_PREFIX: &str = "01010";
/// Longest halting/non-halting label accepted inside a halting-decider codeword.
pub const MAX_LABEL_BITS: usize = 96;

pub(crate) const ID_TIME: u128 = 1;
pub(crate) const ID_SUCC: u128 = 2;
pub(crate) const ID_HALT: u128 = 3;
pub(crate) const ID_LITERAL: u128 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Instruction {
    Inc { reg: u128 },
    DecJz { reg: u128, skip: u128 },
    JmpBack { back: u128 },
    Zero { reg: u128 },
}

impl Instruction {
    pub fn encode(&self, out: &mut Bitstring) {
        let (hi, lo) = match self {
            Instruction::Inc { .. } => (false, false),
            Instruction::DecJz { .. } => (false, true),
            Instruction::JmpBack { .. } => (true, false),
            Instruction::Zero { .. } => (true, true),
        };
        out.push(hi);
        out.push(lo);
        match *self {
            Instruction::Inc { reg } | Instruction::Zero { reg } => gamma_encode(reg + 1, out),
            Instruction::DecJz { reg, skip } => {
                gamma_encode(reg + 1, out);
                gamma_encode(skip, out);
            }
            Instruction::JmpBack { back } => gamma_encode(back, out),
        }
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instruction::Inc { reg } => write!(f, "INC R{reg}"),
            Instruction::DecJz { reg, skip } => write!(f, "DECJZ R{reg} +{skip}"),
            Instruction::JmpBack { back } => write!(f, "JMPBACK -{back}"),
            Instruction::Zero { reg } => write!(f, "ZERO R{reg}"),
        }
    }
}

/// Halting and non-halting labels written by the halting decider.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Labels {
    pub halting: Bitstring,
    pub non_halting: Bitstring,
}

impl Default for Labels {
    fn default() -> Self {
        Labels {
            halting: Bitstring::from_bits(vec![true]),
            non_halting: Bitstring::from_bits(vec![false]),
        }
    }
}

impl Labels {
    pub fn label(&self, halts: bool) -> &Bitstring {
        if halts {
            &self.halting
        } else {
            &self.non_halting
        }
    }
}

/// Register-machine operation with registers renumbered densely and jump
/// targets resolved. Targets at or past the end of the program halt.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Inc(usize),
    DecJz { reg: usize, target: usize },
    Jump(usize),
    Zero(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Body {
    Register {
        instructions: Vec<Instruction>,
        ops: Vec<Op>,
        registers: usize,
    },
    /// Outputs the running time of the inner program.
    Time(Box<Program>),
    /// Outputs the successor of the inner program's output.
    Successor(Box<Program>),
    /// Simulates `target` for at most `bound` steps and writes a label.
    Halt {
        labels: Labels,
        bound: u128,
        target: Box<Program>,
    },
    /// Outputs a fixed natural.
    Literal(u128),
}

#[derive(Clone, PartialEq, Eq)]
pub struct Program {
    encoding: Bitstring,
    body: Body,
}

impl Program {
    pub fn encoding(&self) -> &Bitstring {
        &self.encoding
    }

    pub fn body(&self) -> &Body {
        &self.body
    }

    pub fn len(&self) -> usize {
        self.encoding.len()
    }

    pub fn is_empty(&self) -> bool {
        self.encoding.is_empty()
    }

    /// Decoded instruction list; empty for builtin calls.
    pub fn instructions(&self) -> &[Instruction] {
        match &self.body {
            Body::Register { instructions, .. } => instructions,
            _ => &[],
        }
    }

    pub fn is_builtin(&self) -> bool {
        !matches!(self.body, Body::Register { .. })
    }

    /// Parses a string that must be exactly one codeword.
    pub fn parse(bits: &Bitstring) -> Result<Program, MachineError> {
        let (program, rest) = decode(bits)?;
        if !rest.is_empty() {
            return Err(MachineError::TrailingBits {
                consumed: program.len(),
                total: bits.len(),
            });
        }
        Ok(program)
    }

    /// Encodes and decodes a register program.
    pub fn register(instructions: &[Instruction]) -> Result<Program, MachineError> {
        let mut bits = Bitstring::empty();
        gamma_encode(instructions.len() as u128 + 1, &mut bits);
        for ins in instructions {
            ins.encode(&mut bits);
        }
        Program::parse(&bits)
    }

    /// The shortest codeword: zero instructions, outputs its input unchanged.
    pub fn empty_program() -> Program {
        Program::register(&[]).expect("empty program is valid")
    }
}

impl fmt::Debug for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Program({} = {})", self.encoding, self)
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.body {
            Body::Register { instructions, .. } => {
                f.write_str("[")?;
                for (i, ins) in instructions.iter().enumerate() {
                    if i > 0 {
                        f.write_str("; ")?;
                    }
                    write!(f, "{ins}")?;
                }
                f.write_str("]")
            }
            Body::Time(p) => write!(f, "time({p})"),
            Body::Successor(p) => write!(f, "succ({p})"),
            Body::Halt {
                labels,
                bound,
                target,
            } => write!(
                f,
                "halt[{}/{}]({bound}, {target})",
                labels.halting, labels.non_halting
            ),
            Body::Literal(n) => write!(f, "lit({n})"),
        }
    }
}

/// Decoding failure, distinguishing "needs more bits" from "can never be valid".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum DecodeFault {
    Truncated,
    Malformed(&'static str),
}

impl From<GammaError> for DecodeFault {
    fn from(e: GammaError) -> Self {
        match e {
            GammaError::Exhausted => DecodeFault::Truncated,
            GammaError::Overflow => DecodeFault::Malformed("gamma value too large"),
            GammaError::TooLarge => DecodeFault::Malformed("value out of range"),
        }
    }
}

/// Wraps a bit source and keeps every bit it hands out.
pub(crate) struct Recorder<'a, S: BitSource + ?Sized> {
    src: &'a mut S,
    seen: Vec<bool>,
}

impl<'a, S: BitSource + ?Sized> Recorder<'a, S> {
    pub(crate) fn new(src: &'a mut S) -> Self {
        Recorder {
            src,
            seen: Vec::new(),
        }
    }
}

impl<S: BitSource + ?Sized> BitSource for Recorder<'_, S> {
    fn next_bit(&mut self) -> Option<bool> {
        let b = self.src.next_bit()?;
        self.seen.push(b);
        Some(b)
    }

    fn next_bit_avoiding(&mut self, dead: bool) -> Option<bool> {
        let b = self.src.next_bit_avoiding(dead)?;
        self.seen.push(b);
        Some(b)
    }
}

fn bit<S: BitSource + ?Sized>(src: &mut S) -> Result<bool, DecodeFault> {
    src.next_bit().ok_or(DecodeFault::Truncated)
}

fn read_framed<S: BitSource + ?Sized>(src: &mut S, max: usize) -> Result<Bitstring, DecodeFault> {
    let len = gamma_decode_at_most(src, max as u128 + 1).map_err(|e| match e {
        GammaError::TooLarge => DecodeFault::Malformed("label too long"),
        e => e.into(),
    })? - 1;
    let mut bits = Vec::with_capacity(len as usize);
    for _ in 0..len {
        bits.push(bit(src)?);
    }
    Ok(Bitstring::from_bits(bits))
}

/// Reads one codeword from `src`.
pub(crate) fn decode_from<S: BitSource>(src: &mut S) -> Result<Program, DecodeFault> {
    decode_dyn(src)
}

// nested calls go through a trait object so decoding does not instantiate
// an unbounded tower of recorder types
fn decode_dyn(src: &mut dyn BitSource) -> Result<Program, DecodeFault> {
    let mut rec = Recorder::new(src);
    let body = decode_body(&mut rec)?;
    Ok(Program {
        encoding: Bitstring::from_bits(rec.seen),
        body,
    })
}

fn decode_body(src: &mut Recorder<'_, dyn BitSource + '_>) -> Result<Body, DecodeFault> {
    let count = gamma_decode(src)? - 1;
    let mut instructions = Vec::new();
    let mut index: u128 = 0;
    while index < count {
        let hi = bit(src)?;
        // opcode 10 opens a builtin call only as the sole instruction
        let lo = if hi && index == 0 && count != 1 {
            src.next_bit_avoiding(false).ok_or(DecodeFault::Truncated)?
        } else {
            bit(src)?
        };
        let ins = match (hi, lo) {
            (false, false) => Instruction::Inc {
                reg: gamma_decode(src)? - 1,
            },
            (false, true) => {
                let reg = gamma_decode(src)? - 1;
                let skip = gamma_decode(src)?;
                Instruction::DecJz { reg, skip }
            }
            (true, false) => {
                if index == 0 {
                    if count == 1 {
                        return decode_builtin(src);
                    }
                    return Err(DecodeFault::Malformed(
                        "backward jump before first instruction",
                    ));
                }
                let back = gamma_decode_at_most(src, index).map_err(|e| match e {
                    GammaError::TooLarge => {
                        DecodeFault::Malformed("backward jump before first instruction")
                    }
                    e => e.into(),
                })?;
                Instruction::JmpBack { back }
            }
            (true, true) => Instruction::Zero {
                reg: gamma_decode(src)? - 1,
            },
        };
        instructions.push(ins);
        index += 1;
    }
    let (ops, registers) = compile(&instructions);
    Ok(Body::Register {
        instructions,
        ops,
        registers,
    })
}

fn decode_builtin(src: &mut Recorder<'_, dyn BitSource + '_>) -> Result<Body, DecodeFault> {
    let id = gamma_decode_at_most(src, ID_LITERAL).map_err(|e| match e {
        GammaError::TooLarge => DecodeFault::Malformed("unknown builtin"),
        e => e.into(),
    })?;
    match id {
        ID_TIME => Ok(Body::Time(Box::new(decode_dyn(src)?))),
        ID_SUCC => Ok(Body::Successor(Box::new(decode_dyn(src)?))),
        ID_HALT => {
            let halting = read_framed(src, MAX_LABEL_BITS)?;
            let non_halting = read_framed(src, MAX_LABEL_BITS)?;
            let bound = gamma_decode(src)? - 1;
            let target = decode_dyn(src)?;
            Ok(Body::Halt {
                labels: Labels {
                    halting,
                    non_halting,
                },
                bound,
                target: Box::new(target),
            })
        }
        ID_LITERAL => Ok(Body::Literal(gamma_decode(src)? - 1)),
        _ => Err(DecodeFault::Malformed("unknown builtin")),
    }
}

/// Renumbers registers by first appearance (R0 stays R0) and resolves jumps.
fn compile(instructions: &[Instruction]) -> (Vec<Op>, usize) {
    let mut names: Vec<u128> = vec![0];
    let mut slot = |reg: u128| -> usize {
        match names.iter().position(|&r| r == reg) {
            Some(i) => i,
            None => {
                names.push(reg);
                names.len() - 1
            }
        }
    };
    let len = instructions.len();
    let ops = instructions
        .iter()
        .enumerate()
        .map(|(pc, ins)| match *ins {
            Instruction::Inc { reg } => Op::Inc(slot(reg)),
            Instruction::Zero { reg } => Op::Zero(slot(reg)),
            Instruction::DecJz { reg, skip } => {
                let target = (pc as u128).saturating_add(skip).min(len as u128) as usize;
                Op::DecJz {
                    reg: slot(reg),
                    target,
                }
            }
            Instruction::JmpBack { back } => Op::Jump(pc - back as usize),
        })
        .collect();
    (ops, names.len())
}

/// Decodes the self-delimiting prefix of `bits` and returns it with the
/// remaining bits.
pub fn decode(bits: &Bitstring) -> Result<(Program, Bitstring), MachineError> {
    let mut cur = BitCursor::new(bits.bits());
    match decode_from(&mut cur) {
        Ok(p) => Ok((p, cur.remaining())),
        Err(DecodeFault::Truncated) => Err(MachineError::MalformedEncoding {
            reason: "bits exhausted before the codeword ended",
        }),
        Err(DecodeFault::Malformed(reason)) => Err(MachineError::MalformedEncoding { reason }),
    }
}

/// Status of a finite prefix with respect to the codeword set.
#[derive(Debug)]
pub(crate) enum PrefixStatus {
    /// The prefix is itself a codeword.
    Complete(Program),
    /// The prefix can still be extended into a codeword.
    Open,
    /// No extension of the prefix is a codeword.
    Dead,
}

pub(crate) fn classify(prefix: &[bool]) -> PrefixStatus {
    let mut cur = BitCursor::new(prefix);
    match decode_from(&mut cur) {
        Ok(p) if cur.position() == prefix.len() => PrefixStatus::Complete(p),
        // a shorter codeword is a prefix: everything beyond it is not a codeword
        Ok(_) => PrefixStatus::Dead,
        Err(DecodeFault::Truncated) => PrefixStatus::Open,
        Err(DecodeFault::Malformed(_)) => PrefixStatus::Dead,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(s: &str) -> Bitstring {
        s.parse().unwrap()
    }

    #[test]
    fn single_one_is_the_empty_program() {
        let p = Program::parse(&b("1")).unwrap();
        assert!(p.instructions().is_empty());
        assert!(!p.is_builtin());
    }

    #[test]
    fn inc_r0_hand_decode() {
        let p = Program::parse(&b("010001")).unwrap();
        assert_eq!(p.instructions(), &[Instruction::Inc { reg: 0 }]);
    }

    #[test]
    fn incomplete_gamma_is_malformed() {
        assert!(matches!(
            decode(&b("0")),
            Err(MachineError::MalformedEncoding { .. })
        ));
        assert!(matches!(
            decode(&b("")),
            Err(MachineError::MalformedEncoding { .. })
        ));
        // header says one instruction, body missing
        assert!(decode(&b("010")).is_err());
        assert!(decode(&b("0100")).is_err());
    }

    #[test]
    fn decode_reports_remaining_bits() {
        let (p, rest) = decode(&b("010001101")).unwrap();
        assert_eq!(p.encoding(), &b("010001"));
        assert_eq!(rest, b("101"));
    }

    #[test]
    fn backward_jump_must_stay_in_program() {
        // two instructions: JMPBACK at index 0
        assert!(matches!(
            decode(&b("011101")),
            Err(MachineError::MalformedEncoding { .. })
        ));
        // INC R0; JMPBACK 2 reaches before instruction 0
        let bad = Program::register(&[
            Instruction::Inc { reg: 0 },
            Instruction::JmpBack { back: 2 },
        ]);
        assert!(bad.is_err());
        let ok = Program::register(&[
            Instruction::Inc { reg: 0 },
            Instruction::JmpBack { back: 1 },
        ]);
        assert!(ok.is_ok());
    }

    #[test]
    fn register_round_trip() {
        let ins = [
            Instruction::DecJz { reg: 3, skip: 2 },
            Instruction::Inc { reg: 7 },
            Instruction::Zero { reg: 0 },
            Instruction::JmpBack { back: 3 },
        ];
        let p = Program::register(&ins).unwrap();
        assert_eq!(p.instructions(), &ins);
        match p.body() {
            Body::Register { ops, registers, .. } => {
                assert_eq!(*registers, 3);
                assert_eq!(ops[0], Op::DecJz { reg: 1, target: 2 });
                assert_eq!(ops[3], Op::Jump(0));
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn unknown_builtin_is_malformed() {
        // prefix + γ(5)
        assert!(decode(&b("0101000101")).is_err());
    }

    #[test]
    fn classify_prefixes() {
        assert!(matches!(classify(&[true]), PrefixStatus::Complete(_)));
        assert!(matches!(classify(&[true, false]), PrefixStatus::Dead));
        assert!(matches!(classify(&[false, true]), PrefixStatus::Open));
        assert!(matches!(
            classify(&[false, true, true, true, false]),
            PrefixStatus::Dead
        ));
    }
}

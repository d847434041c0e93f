//! Binary strings, the length-lexicographic natural-number bijection, and
//! Elias gamma codes.
//!
//! Every natural `n` corresponds to exactly one string: write `n + 1` in
//! binary and drop the leading one. So `0 ↔ ε`, `1 ↔ "0"`, `2 ↔ "1"`,
//! `3 ↔ "00"` and so on. Register values, outputs and fitness values all move
//! between the two views through [`Bitstring::to_natural`] and
//! [`Bitstring::from_natural`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Longest string whose natural value fits in a machine register.
pub const MAX_NATURAL_BITS: usize = 126;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid bit character {0:?} (expected '0' or '1')")]
pub struct ParseBitsError(pub char);

#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Bitstring(Vec<bool>);

impl Bitstring {
    pub fn empty() -> Self {
        Bitstring(Vec::new())
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Bitstring(bits)
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    pub fn extend_from(&mut self, other: &Bitstring) {
        self.0.extend_from_slice(&other.0);
    }

    /// Concatenation without any framing.
    pub fn concat(parts: &[&Bitstring]) -> Bitstring {
        let mut out = Vec::with_capacity(parts.iter().map(|p| p.len()).sum());
        for p in parts {
            out.extend_from_slice(&p.0);
        }
        Bitstring(out)
    }

    /// Position of `self` in the length-lexicographic order, or `None` when it
    /// is longer than [`MAX_NATURAL_BITS`].
    pub fn to_natural(&self) -> Option<u128> {
        if self.0.len() > MAX_NATURAL_BITS {
            return None;
        }
        let mut v: u128 = 1;
        for &b in &self.0 {
            v = (v << 1) | b as u128;
        }
        Some(v - 1)
    }

    pub fn from_natural(n: u128) -> Bitstring {
        match n.checked_add(1) {
            Some(m) => {
                let width = 128 - m.leading_zeros() as usize;
                let bits = (0..width - 1).rev().map(|i| (m >> i) & 1 == 1).collect();
                Bitstring(bits)
            }
            // n + 1 = 2^128: a one followed by 128 zeros
            None => Bitstring(vec![false; 128]),
        }
    }

    /// `true` when `self` is a proper prefix of `other`.
    pub fn is_proper_prefix_of(&self, other: &Bitstring) -> bool {
        self.len() < other.len() && other.0[..self.len()] == self.0[..]
    }

    /// Pack into bytes, most significant bit first, zero padded.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.0
            .chunks(8)
            .map(|chunk| {
                chunk
                    .iter()
                    .enumerate()
                    .fold(0u8, |acc, (i, &b)| acc | ((b as u8) << (7 - i)))
            })
            .collect()
    }
}

impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            f.write_str("ε")
        } else {
            write!(f, "\"{self}\"")
        }
    }
}

impl FromStr for Bitstring {
    type Err = ParseBitsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(ParseBitsError(other)),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Bitstring)
    }
}

impl TryFrom<String> for Bitstring {
    type Error = ParseBitsError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Bitstring> for String {
    fn from(b: Bitstring) -> String {
        b.to_string()
    }
}

/// Source of bits for the streaming decoders.
pub trait BitSource {
    fn next_bit(&mut self) -> Option<bool>;

    /// Next bit, given that reading `dead` would make the code invalid.
    /// Sources that replay fixed bits ignore the hint.
    fn next_bit_avoiding(&mut self, dead: bool) -> Option<bool> {
        let _ = dead;
        self.next_bit()
    }
}

/// Reads bits from a slice, tracking how many were consumed.
pub struct BitCursor<'a> {
    bits: &'a [bool],
    pos: usize,
}

impl<'a> BitCursor<'a> {
    pub fn new(bits: &'a [bool]) -> Self {
        BitCursor { bits, pos: 0 }
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> Bitstring {
        Bitstring(self.bits[self.pos..].to_vec())
    }
}

impl BitSource for BitCursor<'_> {
    fn next_bit(&mut self) -> Option<bool> {
        let b = self.bits.get(self.pos).copied();
        if b.is_some() {
            self.pos += 1;
        }
        b
    }
}

/// Failure while reading a gamma code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaError {
    /// The source ran dry mid-code.
    Exhausted,
    /// The encoded value does not fit in 127 bits.
    Overflow,
    /// Every completion of the bits read so far exceeds the caller's bound.
    TooLarge,
}

/// Elias gamma code of `n ≥ 1`: ⌊lg n⌋ zeros followed by `n` in binary.
pub fn gamma_encode(n: u128, out: &mut Bitstring) {
    assert!(n >= 1, "gamma code is defined for n >= 1");
    let width = 128 - n.leading_zeros() as usize;
    out.0.extend(std::iter::repeat_n(false, width - 1));
    out.0.extend((0..width).rev().map(|i| (n >> i) & 1 == 1));
}

pub fn gamma(n: u128) -> Bitstring {
    let mut b = Bitstring::empty();
    gamma_encode(n, &mut b);
    b
}

pub fn gamma_len(n: u128) -> usize {
    let width = 128 - n.leading_zeros() as usize;
    2 * width - 1
}

pub fn gamma_decode<S: BitSource + ?Sized>(src: &mut S) -> Result<u128, GammaError> {
    gamma_decode_at_most(src, u128::MAX)
}

/// Reads a gamma code whose value must not exceed `max`. Fails with
/// [`GammaError::TooLarge`] as soon as the bits read rule out every value up
/// to `max`, so a pending code always has a valid completion.
pub fn gamma_decode_at_most<S: BitSource + ?Sized>(
    src: &mut S,
    max: u128,
) -> Result<u128, GammaError> {
    let mut zeros = 0usize;
    loop {
        // one more zero would overflow or force the value past `max`
        let next = if zeros + 1 > MAX_NATURAL_BITS || 1u128 << (zeros + 1) > max {
            src.next_bit_avoiding(false)
        } else {
            src.next_bit()
        };
        match next {
            None => return Err(GammaError::Exhausted),
            Some(true) => break,
            Some(false) => {
                zeros += 1;
                if zeros > MAX_NATURAL_BITS {
                    return Err(GammaError::Overflow);
                }
                if 1u128 << zeros > max {
                    return Err(GammaError::TooLarge);
                }
            }
        }
    }
    let mut v: u128 = 1;
    for left in (0..zeros).rev() {
        let b = if ((v << 1) | 1) << left > max {
            src.next_bit_avoiding(true)
        } else {
            src.next_bit()
        }
        .ok_or(GammaError::Exhausted)?;
        v = (v << 1) | b as u128;
        if v << left > max {
            return Err(GammaError::TooLarge);
        }
    }
    Ok(v)
}

/// Self-delimiting tuple encoding: every part is framed as `γ(len + 1)`
/// followed by its raw bits.
pub fn concat_selfdelim(parts: &[&Bitstring]) -> Bitstring {
    let mut out = Bitstring::empty();
    for p in parts {
        gamma_encode(p.len() as u128 + 1, &mut out);
        out.extend_from(p);
    }
    out
}

/// Inverse of [`concat_selfdelim`]. Fails if the input is not an exact
/// sequence of framed parts.
pub fn split_selfdelim(bits: &Bitstring) -> Option<Vec<Bitstring>> {
    let mut cur = BitCursor::new(bits.bits());
    let mut parts = Vec::new();
    while cur.position() < bits.len() {
        let len = gamma_decode(&mut cur).ok()? - 1;
        let mut part = Vec::with_capacity(len as usize);
        for _ in 0..len {
            part.push(cur.next_bit()?);
        }
        parts.push(Bitstring(part));
    }
    Some(parts)
}

/// Every string of length exactly `len`, in lexicographic order.
pub fn all_of_length(len: usize) -> impl Iterator<Item = Bitstring> {
    assert!(len < 64);
    (0u64..(1u64 << len))
        .map(move |v| Bitstring((0..len).rev().map(|i| (v >> i) & 1 == 1).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn b(s: &str) -> Bitstring {
        s.parse().unwrap()
    }

    #[test]
    fn bijection_small_values() {
        assert_eq!(Bitstring::from_natural(0), b(""));
        assert_eq!(Bitstring::from_natural(1), b("0"));
        assert_eq!(Bitstring::from_natural(2), b("1"));
        assert_eq!(Bitstring::from_natural(3), b("00"));
        assert_eq!(Bitstring::from_natural(6), b("11"));
        assert_eq!(b("000").to_natural(), Some(7));
    }

    #[test]
    fn bijection_round_trip_up_to_12_bits() {
        let mut expected = 0u128;
        for len in 0..=12 {
            for w in all_of_length(len) {
                let n = w.to_natural().unwrap();
                assert_eq!(n, expected, "length-lex order broken at {w:?}");
                assert_eq!(Bitstring::from_natural(n), w);
                expected += 1;
            }
        }
    }

    #[test]
    fn natural_rejects_overlong() {
        let long = Bitstring::from_bits(vec![true; MAX_NATURAL_BITS + 1]);
        assert_eq!(long.to_natural(), None);
        let max = Bitstring::from_bits(vec![true; MAX_NATURAL_BITS]);
        assert!(max.to_natural().is_some());
        assert_eq!(Bitstring::from_natural(u128::MAX).len(), 128);
    }

    #[test]
    fn gamma_known_codes() {
        assert_eq!(gamma(1), b("1"));
        assert_eq!(gamma(2), b("010"));
        assert_eq!(gamma(3), b("011"));
        assert_eq!(gamma(4), b("00100"));
        assert_eq!(gamma_len(4), 5);
    }

    #[test]
    fn gamma_truncated() {
        let bits = b("001");
        let mut cur = BitCursor::new(bits.bits());
        assert_eq!(gamma_decode(&mut cur), Err(GammaError::Exhausted));
        let bits = b("0");
        let mut cur = BitCursor::new(bits.bits());
        assert_eq!(gamma_decode(&mut cur), Err(GammaError::Exhausted));
    }

    #[test]
    fn concat_examples() {
        assert_eq!(concat_selfdelim(&[&b("")]), b("1"));
        assert_eq!(concat_selfdelim(&[&b("0")]), b("0100"));
        assert_eq!(split_selfdelim(&b("0100")), Some(vec![b("0")]));
        assert_eq!(split_selfdelim(&b("010")), None);
    }

    #[test]
    fn bytes_pack_msb_first() {
        assert_eq!(b("1").to_bytes(), vec![0x80]);
        assert_eq!(b("000000011").to_bytes(), vec![0x01, 0x80]);
    }

    proptest! {
        #[test]
        fn gamma_round_trip(n in 1u128..u64::MAX as u128) {
            let code = gamma(n);
            prop_assert_eq!(code.len(), gamma_len(n));
            let mut cur = BitCursor::new(code.bits());
            prop_assert_eq!(gamma_decode(&mut cur), Ok(n));
            prop_assert_eq!(cur.position(), code.len());
        }

        #[test]
        fn selfdelim_round_trip(parts in proptest::collection::vec(proptest::collection::vec(any::<bool>(), 0..40), 0..6)) {
            let parts: Vec<Bitstring> = parts.into_iter().map(Bitstring::from_bits).collect();
            let refs: Vec<&Bitstring> = parts.iter().collect();
            let joined = concat_selfdelim(&refs);
            prop_assert_eq!(split_selfdelim(&joined), Some(parts));
        }
    }
}

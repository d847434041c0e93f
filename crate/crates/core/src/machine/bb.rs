//! Exhaustive codeword enumeration and Busy Beaver tables.

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::Bitstring;

use super::exec::{eval, Decider, MachineVerdict};
use super::program::{classify, PrefixStatus, Program};
use super::MachineError;

/// Every codeword of at most `max_bits` bits, ordered by length and then
/// lexicographically.
pub fn codewords(max_bits: usize) -> Vec<Program> {
    // split the search at a fixed depth so the subtrees can be walked in parallel
    let split = max_bits.min(8);
    let mut found = Vec::new();
    let mut frontier = Vec::new();
    walk(Vec::new(), split, &mut found, &mut frontier);
    let deeper: Vec<Vec<Program>> = frontier
        .into_par_iter()
        .map(|prefix| {
            let mut out = Vec::new();
            let mut ignored = Vec::new();
            walk(prefix, max_bits, &mut out, &mut ignored);
            out
        })
        .collect();
    found.extend(deeper.into_iter().flatten());
    found.sort_by(|a, b| {
        a.len()
            .cmp(&b.len())
            .then_with(|| a.encoding().cmp(b.encoding()))
    });
    found
}

/// Depth-first walk from `start`. Open prefixes of length `limit` are pushed
/// to `open` instead of being expanded.
fn walk(start: Vec<bool>, limit: usize, found: &mut Vec<Program>, open: &mut Vec<Vec<bool>>) {
    let mut stack = vec![start];
    while let Some(prefix) = stack.pop() {
        match classify(&prefix) {
            PrefixStatus::Complete(p) => found.push(p),
            PrefixStatus::Dead => {}
            PrefixStatus::Open if prefix.len() >= limit => open.push(prefix),
            PrefixStatus::Open => {
                for bit in [true, false] {
                    let mut next = prefix.clone();
                    next.push(bit);
                    stack.push(next);
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BbEntry {
    /// Program length bound.
    pub n: usize,
    /// Largest output (as a natural) of a codeword of at most `n` bits that
    /// the decider saw halt.
    pub value: u128,
    /// First shortest codeword producing `value`.
    pub witness: Bitstring,
    /// Codewords of at most `n` bits the decider could not classify. When
    /// non-zero, `value` is only a lower bound on BB(n).
    pub unknown_count: u64,
}

impl BbEntry {
    pub fn is_exact(&self) -> bool {
        self.unknown_count == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BbTable {
    pub entries: Vec<BbEntry>,
    pub budget: u64,
}

#[derive(Deserialize)]
struct BbRow {
    n: usize,
    bb_value: String,
    witness_bits: String,
    unknown_count: u64,
    budget: u64,
}

impl BbTable {
    pub fn get(&self, n: usize) -> Option<&BbEntry> {
        self.entries.iter().find(|e| e.n == n)
    }

    pub fn max_bits(&self) -> usize {
        self.entries.last().map_or(0, |e| e.n)
    }

    /// BB(n) when every codeword up to `n` bits was classified.
    pub fn exact(&self, n: usize) -> Option<u128> {
        self.get(n).filter(|e| e.is_exact()).map(|e| e.value)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), csv::Error> {
        self.write_csv_tagged(w, &[])
    }

    /// Like [`BbTable::write_csv`] with constant trailing columns.
    pub fn write_csv_tagged<W: Write>(
        &self,
        w: W,
        tags: &[(&str, String)],
    ) -> Result<(), csv::Error> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["n", "bb_value", "witness_bits", "unknown_count", "budget"];
        header.extend(tags.iter().map(|(k, _)| *k));
        out.write_record(&header)?;
        for e in &self.entries {
            let mut row = vec![
                e.n.to_string(),
                e.value.to_string(),
                e.witness.to_string(),
                e.unknown_count.to_string(),
                self.budget.to_string(),
            ];
            row.extend(tags.iter().map(|(_, v)| v.clone()));
            out.write_record(&row)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<BbTable, MachineError> {
        let mut rdr = csv::Reader::from_reader(r);
        let mut entries = Vec::new();
        let mut budget = None;
        for row in rdr.deserialize::<BbRow>() {
            let row = row.map_err(|e| MachineError::BbTable(e.to_string()))?;
            let value = row
                .bb_value
                .parse()
                .map_err(|_| MachineError::BbTable(format!("bad value {}", row.bb_value)))?;
            let witness = row
                .witness_bits
                .parse()
                .map_err(|e| MachineError::BbTable(format!("{e}")))?;
            budget = Some(row.budget);
            entries.push(BbEntry {
                n: row.n,
                value,
                witness,
                unknown_count: row.unknown_count,
            });
        }
        Ok(BbTable {
            entries,
            budget: budget.unwrap_or(0),
        })
    }
}

/// Runs the decider on every codeword of at most `max_bits` bits with empty
/// input and records the largest output for each length bound.
pub fn enumerate_bb(max_bits: usize, budget: u64) -> BbTable {
    let programs = codewords(max_bits);
    let verdicts: Vec<MachineVerdict> = programs
        .par_iter()
        .map(|p| eval(p, 0, budget, Some(Decider::default())))
        .collect();

    let mut entries = Vec::with_capacity(max_bits);
    let mut best: Option<(u128, &Program)> = None;
    let mut unknown = 0u64;
    let mut idx = 0;
    for n in 1..=max_bits {
        while idx < programs.len() && programs[idx].len() <= n {
            match verdicts[idx] {
                MachineVerdict::Halted { value, .. } => {
                    if best.is_none_or(|(v, _)| value > v) {
                        best = Some((value, &programs[idx]));
                    }
                }
                MachineVerdict::BudgetExhausted { .. } => unknown += 1,
                MachineVerdict::ProvenNonhalting { .. } => {}
            }
            idx += 1;
        }
        if let Some((value, witness)) = best {
            entries.push(BbEntry {
                n,
                value,
                witness: witness.encoding().clone(),
                unknown_count: unknown,
            });
        }
    }
    BbTable { entries, budget }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{oracle, Program};

    #[test]
    fn one_bit_table() {
        let t = enumerate_bb(1, 100);
        assert_eq!(t.entries.len(), 1);
        assert_eq!(t.entries[0].value, 0);
        assert_eq!(t.entries[0].witness.to_string(), "1");
    }

    #[test]
    fn six_bits_reaches_one() {
        let t = enumerate_bb(6, 100);
        let e = t.get(6).unwrap();
        assert!(e.value >= 1);
        let w = Program::parse(&e.witness).unwrap();
        assert!(w.len() <= 6);
        assert_eq!(
            oracle(&w, &Bitstring::empty(), 100).unwrap().value(),
            Some(e.value)
        );
        assert!(t.get(6).unwrap().value >= t.get(1).unwrap().value);
    }

    #[test]
    fn codewords_are_sorted_and_complete_for_small_lengths() {
        let all = codewords(10);
        assert_eq!(all[0].encoding().to_string(), "1");
        for pair in all.windows(2) {
            assert!((pair[0].len(), pair[0].encoding()) < (pair[1].len(), pair[1].encoding()));
        }
        // cross-check against brute-force decoding of every string up to 10 bits
        let mut brute = Vec::new();
        for len in 0..=10 {
            for s in crate::bits::all_of_length(len) {
                if let Ok(p) = Program::parse(&s) {
                    brute.push(p.encoding().clone());
                }
            }
        }
        let listed: Vec<Bitstring> = all.iter().map(|p| p.encoding().clone()).collect();
        assert_eq!(listed, brute);
    }

    #[test]
    fn csv_round_trip() {
        let t = enumerate_bb(8, 1000);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("n,bb_value,witness_bits,unknown_count,budget\n"));
        assert_eq!(BbTable::read_csv(&buf[..]).unwrap(), t);
        let mut tagged = Vec::new();
        t.write_csv_tagged(&mut tagged, &[("seed", "3".into())])
            .unwrap();
        assert!(String::from_utf8(tagged.clone())
            .unwrap()
            .starts_with("n,bb_value,witness_bits,unknown_count,budget,seed\n"));
        assert_eq!(BbTable::read_csv(&tagged[..]).unwrap(), t);
    }
}

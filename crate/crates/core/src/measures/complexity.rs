//! Upper bounds on prefix complexity from exhaustive enumeration, with a
//! compression bound when nothing within budget produces the target.

use std::collections::{BTreeMap, HashMap};
use std::io::{Read, Write};
use std::sync::{Arc, Mutex, OnceLock};

use flate2::write::DeflateEncoder;
use flate2::Compression;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::Bitstring;
use crate::machine::{codewords, eval, Decider, MachineVerdict, Program};

/// Enumeration limits: program length in bits and steps per program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Budgets {
    pub bits: usize,
    pub steps: u64,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            bits: 24,
            steps: 10_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ExactEnumeration,
    CompressionFallback,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::ExactEnumeration => "exact-enumeration",
            Method::CompressionFallback => "compression-fallback",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexityEstimate {
    /// Bits.
    pub value: usize,
    pub method: Method,
    pub budgets: Budgets,
    /// Shortest program found, for exact estimates.
    pub witness: Option<Bitstring>,
}

impl ComplexityEstimate {
    pub fn is_exact(&self) -> bool {
        self.method == Method::ExactEnumeration
    }
}

/// Raw DEFLATE at level 9 of the MSB-first packed bits.
pub fn deflate_bits(target: &Bitstring) -> usize {
    let mut enc = DeflateEncoder::new(Vec::new(), Compression::best());
    enc.write_all(&target.to_bytes())
        .expect("writing to memory");
    enc.finish().expect("writing to memory").len() * 8
}

/// Bound used when enumeration finds nothing: at least one more than the
/// enumerated length, and at least the compressed size plus a byte.
pub fn compression_fallback(target: &Bitstring, budgets: Budgets) -> usize {
    (budgets.bits + 1).max(deflate_bits(target) + 8)
}

/// Codewords sorted by (length, bits), shared across estimators. Longer
/// requests extend the cache; shorter ones use its prefix.
fn shared_codewords(max_bits: usize) -> (Arc<Vec<Program>>, usize) {
    static CACHE: OnceLock<Mutex<(usize, Arc<Vec<Program>>)>> = OnceLock::new();
    let cell = CACHE.get_or_init(|| Mutex::new((0, Arc::new(codewords(0)))));
    let cached = {
        let guard = cell.lock().expect("codeword cache poisoned");
        (guard.0 >= max_bits).then(|| Arc::clone(&guard.1))
    };
    let all = match cached {
        Some(all) => all,
        None => {
            // enumerate without the lock: the walk is parallel, and a worker
            // blocked here could be the one that holds it
            let fresh = Arc::new(codewords(max_bits));
            let mut guard = cell.lock().expect("codeword cache poisoned");
            if guard.0 < max_bits {
                *guard = (max_bits, Arc::clone(&fresh));
            }
            fresh
        }
    };
    let count = all.partition_point(|p| p.len() <= max_bits);
    (all, count)
}

/// Shortest program for every output reached from one input register value.
struct OutputTable {
    shortest: HashMap<u128, Bitstring>,
}

impl OutputTable {
    fn build(r0: Option<u128>, budgets: Budgets) -> OutputTable {
        let Some(r0) = r0 else {
            return OutputTable {
                shortest: HashMap::new(),
            };
        };
        let (all, count) = shared_codewords(budgets.bits);
        let values: Vec<Option<u128>> = all[..count]
            .par_iter()
            .map(
                |p| match eval(p, r0, budgets.steps, Some(Decider::default())) {
                    MachineVerdict::Halted { value, .. } => Some(value),
                    _ => None,
                },
            )
            .collect();
        let mut shortest = HashMap::new();
        for (p, v) in all[..count].iter().zip(values) {
            if let Some(v) = v {
                shortest.entry(v).or_insert_with(|| p.encoding().clone());
            }
        }
        OutputTable { shortest }
    }
}

type TableKey = (Bitstring, Budgets);

/// Complexity estimator with memoized enumeration tables and a log of every
/// estimate it produced.
#[derive(Default)]
pub struct Estimator {
    tables: Mutex<HashMap<TableKey, Arc<OutputTable>>>,
    log: Mutex<BTreeMap<(Bitstring, Bitstring), ComplexityEstimate>>,
}

impl Estimator {
    pub fn new() -> Estimator {
        Estimator::default()
    }

    fn table(&self, given: &Bitstring, budgets: Budgets) -> Arc<OutputTable> {
        let key = (given.clone(), budgets);
        if let Some(t) = self.tables.lock().expect("table cache poisoned").get(&key) {
            return Arc::clone(t);
        }
        // Built outside the lock for the same reason as the codeword cache.
        // Concurrent callers may build the same table twice; both copies agree.
        let built = Arc::new(OutputTable::build(given.to_natural(), budgets));
        let mut tables = self.tables.lock().expect("table cache poisoned");
        Arc::clone(tables.entry(key).or_insert(built))
    }

    /// Shortest program that outputs `target` from an empty register file.
    pub fn a_hat(&self, target: &Bitstring, budgets: Budgets) -> ComplexityEstimate {
        self.a_hat_cond(target, &Bitstring::empty(), budgets)
    }

    /// Shortest program that outputs `target` when R0 starts at the natural
    /// of `given`.
    pub fn a_hat_cond(
        &self,
        target: &Bitstring,
        given: &Bitstring,
        budgets: Budgets,
    ) -> ComplexityEstimate {
        let table = self.table(given, budgets);
        let est = match target.to_natural().and_then(|v| table.shortest.get(&v)) {
            Some(w) => ComplexityEstimate {
                value: w.len(),
                method: Method::ExactEnumeration,
                budgets,
                witness: Some(w.clone()),
            },
            None => ComplexityEstimate {
                value: compression_fallback(target, budgets),
                method: Method::CompressionFallback,
                budgets,
                witness: None,
            },
        };
        self.log
            .lock()
            .expect("log poisoned")
            .entry((target.clone(), given.clone()))
            .or_insert_with(|| est.clone());
        est
    }

    /// Length of the shortest program that copies its input, measured on a
    /// fixed non-empty input.
    pub fn c_copy(&self, budgets: Budgets) -> usize {
        let x: Bitstring = "0110".parse().expect("literal");
        self.a_hat_cond(&x, &x, budgets).value
    }

    /// Appends every logged estimate whose (target, given) pair is not yet in
    /// `existing`, sorted by given then target. Columns: target_bits,
    /// given_bits, value, method, then one constant column per tag.
    pub fn append_cache_csv<W: Write>(
        &self,
        existing: &[(Bitstring, Bitstring)],
        w: W,
        header: bool,
        tags: &[(&str, String)],
    ) -> Result<usize, csv::Error> {
        let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        if header {
            let mut names = vec!["target_bits", "given_bits", "value", "method"];
            names.extend(tags.iter().map(|(k, _)| *k));
            out.write_record(&names)?;
        }
        let log = self.log.lock().expect("log poisoned");
        let mut rows: Vec<_> = log
            .iter()
            .filter(|(k, _)| !existing.contains(k))
            .map(|((t, g), e)| (g.clone(), t.clone(), e.value, e.method))
            .collect();
        rows.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
        for (g, t, value, method) in &rows {
            let mut row = vec![
                t.to_string(),
                g.to_string(),
                value.to_string(),
                method.name().to_string(),
            ];
            row.extend(tags.iter().map(|(_, v)| v.clone()));
            out.write_record(&row)?;
        }
        out.flush()?;
        Ok(rows.len())
    }
}

/// (target, given) pairs already present in a cache file.
pub fn read_cache_keys<R: Read>(r: R) -> Result<Vec<(Bitstring, Bitstring)>, csv::Error> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut keys = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let parse = |i: usize| rec.get(i).and_then(|s| s.parse::<Bitstring>().ok());
        if let (Some(t), Some(g)) = (parse(0), parse(1)) {
            keys.push((t, g));
        }
    }
    Ok(keys)
}

fn shared() -> &'static Estimator {
    static SHARED: OnceLock<Estimator> = OnceLock::new();
    SHARED.get_or_init(Estimator::new)
}

/// [`Estimator::a_hat`] on a process-wide estimator.
pub fn a_hat(target: &Bitstring, budgets: Budgets) -> ComplexityEstimate {
    shared().a_hat(target, budgets)
}

/// [`Estimator::a_hat_cond`] on a process-wide estimator.
pub fn a_hat_cond(target: &Bitstring, given: &Bitstring, budgets: Budgets) -> ComplexityEstimate {
    shared().a_hat_cond(target, given, budgets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::run;

    fn b(s: &str) -> Bitstring {
        s.parse().unwrap()
    }

    const SMALL: Budgets = Budgets {
        bits: 16,
        steps: 1000,
    };

    #[test]
    fn known_values() {
        let e = a_hat(&b(""), SMALL);
        assert_eq!((e.value, e.method), (1, Method::ExactEnumeration));
        let e = a_hat(&b("0"), SMALL);
        assert_eq!(e.value, 6);
        assert_eq!(e.witness, Some(b("010001")));
        assert_eq!(a_hat_cond(&b("0110"), &b("0110"), SMALL).value, 1);
        // clearing R0 is the shortest way to print ε from a non-empty input
        assert_eq!(a_hat_cond(&b(""), &b("0110"), SMALL).value, 6);
    }

    #[test]
    fn witnesses_reproduce_targets() {
        let est = Estimator::new();
        for len in 0..=5 {
            for x in crate::bits::all_of_length(len) {
                let e = est.a_hat(&x, SMALL);
                if let Some(w) = &e.witness {
                    let p = Program::parse(w).unwrap();
                    assert_eq!(
                        run(&p, &b(""), SMALL.steps).unwrap().output(),
                        Some(x.clone())
                    );
                    assert_eq!(e.value, w.len());
                } else {
                    assert!(e.value > SMALL.bits);
                }
            }
        }
    }

    #[test]
    fn fallback_exceeds_budget() {
        let target = Bitstring::from_bits(vec![true; 200]);
        let e = a_hat(&target, SMALL);
        assert_eq!(e.method, Method::CompressionFallback);
        assert!(e.value > SMALL.bits);
        assert_eq!(e.value, compression_fallback(&target, SMALL));
    }

    #[test]
    fn cache_csv_appends_only_new_pairs() {
        let est = Estimator::new();
        est.a_hat(&b("0"), SMALL);
        est.a_hat_cond(&b("1"), &b("0"), SMALL);
        let mut first = Vec::new();
        assert_eq!(est.append_cache_csv(&[], &mut first, true, &[]).unwrap(), 2);
        let keys = read_cache_keys(&first[..]).unwrap();
        assert_eq!(keys.len(), 2);
        est.a_hat(&b("1"), SMALL);
        let mut more = Vec::new();
        assert_eq!(
            est.append_cache_csv(&keys, &mut more, false, &[("seed", "1".into())])
                .unwrap(),
            1
        );
        let text = String::from_utf8(first).unwrap();
        assert!(text.starts_with("target_bits,given_bits,value,method\n"));
        assert!(text.contains("0,,6,exact-enumeration"));
    }
}

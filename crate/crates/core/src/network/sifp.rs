//! Network assembly and the cycle-by-cycle protocol.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::{gamma, Bitstring};
use crate::machine::{execute, MachineVerdict, Program, VerdictKind};
use crate::tvg::Tvg;

use super::{evaluate_population, NetworkError, Node};

/// Population on a graph. Node `b_j[v]` sits at vertex `v`.
#[derive(Debug, Clone)]
pub struct NetworkAssembly {
    tvg: Tvg,
    programs: Vec<Program>,
    b_j: Vec<usize>,
    vertex_of: Vec<usize>,
    c_0: usize,
    n_cycles: usize,
}

/// What a cycle does, by cycle number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    /// A one-cycle network: every node emits its own fitness.
    Single,
    /// First cycle: every node offers its own fitness.
    First,
    /// Nodes repeat their first offer.
    WarmUp,
    /// Nodes adopt the best offer over arcs of this interval index.
    Interval(usize),
    /// Past the last interval: offers are held.
    Hold,
    /// The selector is applied to the adopted value.
    Final,
}

impl NetworkAssembly {
    /// `n_cycles` defaults to the minimum `c_0 + |T| + 1`. A one-cycle network
    /// is also accepted.
    pub fn new(
        tvg: Tvg,
        programs: Vec<Program>,
        b_j: Vec<usize>,
        c_0: usize,
        n_cycles: Option<usize>,
    ) -> Result<NetworkAssembly, NetworkError> {
        let n = tvg.n();
        if programs.len() != n || b_j.len() != n {
            return Err(NetworkError::ConfigMismatch(format!(
                "{} vertices, {} programs, {} map entries",
                n,
                programs.len(),
                b_j.len()
            )));
        }
        let mut vertex_of = vec![usize::MAX; n];
        for (v, &o) in b_j.iter().enumerate() {
            if o >= n || vertex_of[o] != usize::MAX {
                return Err(NetworkError::NotBijective);
            }
            vertex_of[o] = v;
        }
        let minimum = c_0 + tvg.instants() + 1;
        let n_cycles = n_cycles.unwrap_or(minimum);
        if n_cycles != 1 && n_cycles < minimum {
            return Err(NetworkError::ConfigMismatch(format!(
                "{n_cycles} cycles, need at least c_0 + |T| + 1 = {minimum}"
            )));
        }
        Ok(NetworkAssembly {
            tvg,
            programs,
            b_j,
            vertex_of,
            c_0,
            n_cycles,
        })
    }

    /// Identity vertex-to-node map and the minimum cycle count.
    pub fn identity(
        tvg: Tvg,
        programs: Vec<Program>,
        c_0: usize,
    ) -> Result<NetworkAssembly, NetworkError> {
        let b_j = (0..tvg.n()).collect();
        NetworkAssembly::new(tvg, programs, b_j, c_0, None)
    }

    pub fn tvg(&self) -> &Tvg {
        &self.tvg
    }

    pub fn programs(&self) -> &[Program] {
        &self.programs
    }

    pub fn b_j(&self) -> &[usize] {
        &self.b_j
    }

    pub fn vertex_of(&self, node: usize) -> usize {
        self.vertex_of[node]
    }

    pub fn c_0(&self) -> usize {
        self.c_0
    }

    pub fn n_cycles(&self) -> usize {
        self.n_cycles
    }

    pub fn len(&self) -> usize {
        self.programs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.programs.is_empty()
    }

    /// Same population and map on another graph with the minimum cycle count.
    pub fn with_tvg(&self, tvg: Tvg) -> Result<NetworkAssembly, NetworkError> {
        NetworkAssembly::new(tvg, self.programs.clone(), self.b_j.clone(), self.c_0, None)
    }

    /// Stage of cycle `c` (1-based).
    pub fn stage(&self, c: usize) -> Stage {
        if self.n_cycles == 1 {
            return Stage::Single;
        }
        let intervals = self.tvg.intervals();
        if c == 1 {
            Stage::First
        } else if c == self.n_cycles {
            Stage::Final
        } else if c <= self.c_0 + 1 {
            Stage::WarmUp
        } else if c <= self.c_0 + 1 + intervals {
            Stage::Interval(c - self.c_0 - 2)
        } else {
            Stage::Hold
        }
    }

    /// In-neighbor nodes of every node over interval `i`, ascending by node id.
    fn in_nodes(&self, i: usize) -> Vec<Vec<usize>> {
        let by_vertex = self.tvg.in_lists(i);
        (0..self.len())
            .map(|o| {
                let mut ns: Vec<usize> = by_vertex[self.vertex_of[o]]
                    .iter()
                    .map(|&u| self.b_j[u])
                    .collect();
                ns.sort_unstable();
                ns
            })
            .collect()
    }
}

/// Best offer a node holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Carried {
    pub value: u128,
    pub owner: usize,
}

/// Partial output of a node in one cycle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Partial {
    /// A plain output; `None` when the computation did not halt.
    Output(Option<Bitstring>),
    /// `w ∘ o_owner ∘ string(value)`.
    Offer { owner: usize, value: u128 },
}

impl Partial {
    pub fn to_bits(&self, w: &Bitstring, programs: &[Program]) -> Option<Bitstring> {
        match self {
            Partial::Output(out) => out.clone(),
            Partial::Offer { owner, value } => Some(Bitstring::concat(&[
                w,
                programs[*owner].encoding(),
                &Bitstring::from_natural(*value),
            ])),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CycleState {
    /// Cycles completed so far.
    pub cycle: usize,
    pub carried: Vec<Carried>,
    pub partials: Vec<Partial>,
}

fn final_output(selector: &Bitstring, x: u128, w: &Bitstring, budget: u64) -> Option<Bitstring> {
    let bits = Bitstring::concat(&[selector, &gamma(x + 1), w]);
    execute(&bits, budget, None).ok().and_then(|v| v.output())
}

/// Advances `state` by one cycle. `nodes` holds the first-cycle evaluations.
pub fn sifp_cycle(
    assembly: &NetworkAssembly,
    nodes: &[Node],
    state: &CycleState,
    w: &Bitstring,
    selector: &Bitstring,
    budget: u64,
) -> Result<CycleState, NetworkError> {
    let c = state.cycle + 1;
    if c > assembly.n_cycles {
        return Err(NetworkError::ConfigMismatch(format!(
            "cycle {c} past the last cycle {}",
            assembly.n_cycles
        )));
    }
    let own = |o: usize| Carried {
        value: nodes[o].first_fitness,
        owner: o,
    };
    let (carried, partials): (Vec<Carried>, Vec<Partial>) = match assembly.stage(c) {
        Stage::Single => (0..nodes.len())
            .map(|o| {
                (
                    own(o),
                    Partial::Output(Some(Bitstring::from_natural(own(o).value))),
                )
            })
            .unzip(),
        Stage::First => (0..nodes.len())
            .map(|o| {
                (
                    own(o),
                    Partial::Offer {
                        owner: o,
                        value: own(o).value,
                    },
                )
            })
            .unzip(),
        Stage::WarmUp | Stage::Hold => (state.carried.clone(), state.partials.clone()),
        Stage::Interval(i) => {
            let ins = assembly.in_nodes(i);
            let carried: Vec<Carried> = (0..nodes.len())
                .map(|o| {
                    let mut best = state.carried[o];
                    // ascending ids: the first strictly larger offer wins ties among neighbors
                    for &u in &ins[o] {
                        if state.carried[u].value > best.value {
                            best = state.carried[u];
                        }
                    }
                    best
                })
                .collect();
            let partials = carried
                .iter()
                .map(|k| Partial::Offer {
                    owner: k.owner,
                    value: k.value,
                })
                .collect();
            (carried, partials)
        }
        Stage::Final => {
            let mut cache: BTreeMap<u128, Option<Bitstring>> = BTreeMap::new();
            for k in &state.carried {
                cache.entry(k.value).or_default();
            }
            let outs: Vec<(u128, Option<Bitstring>)> = cache
                .keys()
                .copied()
                .collect::<Vec<_>>()
                .into_par_iter()
                .map(|x| (x, final_output(selector, x, w, budget)))
                .collect();
            cache.extend(outs);
            let partials = state
                .carried
                .iter()
                .map(|k| Partial::Output(cache[&k.value].clone()))
                .collect();
            (state.carried.clone(), partials)
        }
    };
    Ok(CycleState {
        cycle: c,
        carried,
        partials,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub node_id: usize,
    pub vertex: usize,
    pub program_bits: Bitstring,
    pub first_fitness: u128,
    pub first_verdict: VerdictKind,
    pub final_output: Option<Bitstring>,
    /// Set once the run is scored against an expected output.
    pub correct: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub config_fingerprint: String,
    pub n: usize,
    pub instants: usize,
    pub c_0: usize,
    pub n_cycles: usize,
    pub w: Bitstring,
    pub selector: Bitstring,
    pub budget: u64,
    /// Largest first-cycle fitness in the population.
    pub x_max: u128,
    /// Nodes whose first-cycle run hit the step budget.
    pub budget_exhausted: usize,
    /// Largest carried value in each cycle.
    pub cycle_maxima: Vec<u128>,
    /// `carried[c - 1][o]`: value node `o` holds after cycle `c`.
    pub carried: Vec<Vec<u128>>,
    pub expected: Option<Bitstring>,
    pub nodes: Vec<NodeRecord>,
}

impl RunRecord {
    /// Marks each node's final output against `expected`.
    pub fn score(&mut self, expected: &Bitstring) {
        self.expected = Some(expected.clone());
        for n in &mut self.nodes {
            n.correct = Some(n.final_output.as_ref() == Some(expected));
        }
    }

    pub fn all_correct(&self) -> bool {
        self.nodes.iter().all(|n| n.correct == Some(true))
    }

    pub fn final_outputs(&self) -> Vec<Option<Bitstring>> {
        self.nodes.iter().map(|n| n.final_output.clone()).collect()
    }

    /// Per-node CSV; an output of `none` means the last cycle did not halt.
    pub fn write_nodes_csv<W: Write>(&self, w: W) -> Result<(), csv::Error> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record([
            "node_id",
            "program_bits",
            "first_fitness",
            "final_output",
            "correct",
            "seed",
            "config_fingerprint",
        ])?;
        for n in &self.nodes {
            out.write_record([
                n.node_id.to_string(),
                n.program_bits.to_string(),
                n.first_fitness.to_string(),
                n.final_output
                    .as_ref()
                    .map_or_else(|| "none".to_string(), |b| b.to_string()),
                u8::from(n.correct == Some(true)).to_string(),
                self.seed.to_string(),
                self.config_fingerprint.clone(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Runs every cycle of the assembly on input `w`.
pub fn run_networked(
    assembly: &NetworkAssembly,
    w: &Bitstring,
    selector: &Bitstring,
    budget: u64,
) -> Result<RunRecord, NetworkError> {
    let nodes = evaluate_population(&assembly.programs, w, budget)?;
    let mut state = CycleState::default();
    let mut carried = Vec::with_capacity(assembly.n_cycles);
    while state.cycle < assembly.n_cycles {
        state = sifp_cycle(assembly, &nodes, &state, w, selector, budget)?;
        carried.push(state.carried.iter().map(|k| k.value).collect::<Vec<_>>());
    }
    let finals: Vec<Option<Bitstring>> = state
        .partials
        .iter()
        .map(|p| p.to_bits(w, &assembly.programs))
        .collect();
    Ok(RunRecord {
        seed: 0,
        config_fingerprint: String::new(),
        n: nodes.len(),
        instants: assembly.tvg.instants(),
        c_0: assembly.c_0,
        n_cycles: assembly.n_cycles,
        w: w.clone(),
        selector: selector.clone(),
        budget,
        x_max: nodes.iter().map(|n| n.first_fitness).max().unwrap_or(0),
        budget_exhausted: nodes
            .iter()
            .filter(|n| matches!(n.verdict, MachineVerdict::BudgetExhausted { .. }))
            .count(),
        cycle_maxima: carried
            .iter()
            .map(|c| c.iter().copied().max().unwrap_or(0))
            .collect(),
        carried,
        expected: None,
        nodes: nodes
            .into_iter()
            .zip(finals)
            .map(|(n, final_output)| NodeRecord {
                node_id: n.id,
                vertex: assembly.vertex_of[n.id],
                program_bits: n.program.encoding().clone(),
                first_fitness: n.first_fitness,
                first_verdict: n.verdict.kind(),
                final_output,
                correct: None,
            })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{builtins, Labels};
    use crate::network::{sample_population, Selector};
    use crate::tvg::{gen_small_diameter, Family};

    fn b(s: &str) -> Bitstring {
        s.parse().unwrap()
    }

    fn lit(n: u128) -> Program {
        builtins::literal(n)
    }

    #[test]
    fn single_cycle_emits_own_fitness() {
        let a = NetworkAssembly::new(
            Tvg::new(1, 1),
            vec![Program::empty_program()],
            vec![0],
            0,
            Some(1),
        )
        .unwrap();
        let r = run_networked(&a, &b(""), &builtins::p_identity(), 10).unwrap();
        assert_eq!(a.stage(1), Stage::Single);
        assert_eq!(r.nodes[0].final_output, Some(Bitstring::from_natural(1)));
    }

    #[test]
    fn interval_takes_neighbor_maximum() {
        // node 1 hears 0 and 2; values 3, 4, 5
        let g = Tvg::replicated(3, 2, &[(0, 1), (2, 1)]).unwrap();
        let a = NetworkAssembly::identity(g, vec![lit(2), lit(3), lit(4)], 0).unwrap();
        let r = run_networked(&a, &b(""), &builtins::p_identity(), 10).unwrap();
        assert_eq!(r.carried[1], vec![3, 5, 5]);
        assert_eq!(r.nodes[1].final_output, Some(Bitstring::from_natural(5)));
    }

    #[test]
    fn ties_keep_own_owner_then_lowest_neighbor() {
        let g = Tvg::replicated(4, 2, &[(2, 0), (1, 0), (3, 1), (2, 1)]).unwrap();
        let a = NetworkAssembly::identity(g, vec![lit(0), lit(7), lit(7), lit(7)], 0).unwrap();
        let nodes = evaluate_population(a.programs(), &b(""), 10).unwrap();
        let sel = builtins::p_identity();
        let s1 = sifp_cycle(&a, &nodes, &CycleState::default(), &b(""), &sel, 10).unwrap();
        let s2 = sifp_cycle(&a, &nodes, &s1, &b(""), &sel, 10).unwrap();
        assert_eq!(s2.carried[0], Carried { value: 8, owner: 1 });
        assert_eq!(s2.carried[1], Carried { value: 8, owner: 1 });
        let s3 = sifp_cycle(&a, &nodes, &s2, &b(""), &sel, 10).unwrap();
        assert_eq!(s3.cycle, 3);
        assert!(sifp_cycle(&a, &nodes, &s3, &b(""), &sel, 10).is_err());
    }

    #[test]
    fn schedule_stages() {
        let g = Tvg::complete(2, 3);
        let a = NetworkAssembly::new(g, vec![lit(0), lit(1)], vec![1, 0], 2, Some(8)).unwrap();
        let stages: Vec<Stage> = (1..=8).map(|c| a.stage(c)).collect();
        assert_eq!(
            stages,
            vec![
                Stage::First,
                Stage::WarmUp,
                Stage::WarmUp,
                Stage::Interval(0),
                Stage::Interval(1),
                Stage::Hold,
                Stage::Hold,
                Stage::Final
            ]
        );
        assert_eq!(a.vertex_of(1), 0);
    }

    #[test]
    fn assembly_validation() {
        let g = Tvg::complete(2, 3);
        let ps = vec![lit(0), lit(1)];
        assert!(matches!(
            NetworkAssembly::new(g.clone(), ps.clone(), vec![0, 1], 0, Some(3)),
            Err(NetworkError::ConfigMismatch(_))
        ));
        assert_eq!(
            NetworkAssembly::new(g.clone(), ps.clone(), vec![1, 1], 0, None).unwrap_err(),
            NetworkError::NotBijective
        );
        assert!(matches!(
            NetworkAssembly::new(g, vec![lit(0)], vec![0, 1], 0, None),
            Err(NetworkError::ConfigMismatch(_))
        ));
    }

    #[test]
    fn star_spreads_global_max() {
        for seed in 0..20 {
            let g = gen_small_diameter(Family::StarBroadcast, 12, seed).unwrap();
            let a = NetworkAssembly::identity(g, sample_population(12, seed, 40), 0).unwrap();
            let r = run_networked(&a, &b(""), &Selector::Identity.head(), 1000).unwrap();
            let x = r.x_max;
            assert!(r.carried[a.n_cycles() - 2].iter().all(|&v| v == x));
            let out = Bitstring::from_natural(x);
            assert!(r.final_outputs().iter().all(|o| o.as_ref() == Some(&out)));
        }
    }

    #[test]
    fn halting_labels_and_scoring() {
        let labels = Labels::default();
        let g = Tvg::complete(3, 2);
        let a = NetworkAssembly::identity(g, vec![lit(5), lit(0), lit(1)], 0).unwrap();
        // w = INC R0 halts after one step; x_max = 6
        let w = b("010001");
        let mut r = run_networked(&a, &w, &builtins::p_halt(&labels), 1000).unwrap();
        r.score(&labels.halting);
        assert!(r.all_correct());
        let mut csv = Vec::new();
        r.write_nodes_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("node_id,program_bits,first_fitness,final_output,correct"));
        assert_eq!(text.lines().count(), 4);
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<RunRecord>(&json).unwrap(), r);
    }
}

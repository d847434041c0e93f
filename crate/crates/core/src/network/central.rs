//! Search for the node that computes the network's answer soonest.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bits::Bitstring;
use crate::tvg::{reverse_reach_all, temporal_diffusion_diameter, TvgError};

use super::sifp::{run_networked, NetworkAssembly};
use super::{isolated_trace, NetworkError};

/// A node whose networked output on the trimmed graph is `f(w)` and whose
/// isolated runs over fewer cycles never are.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Qualifying {
    pub node: usize,
    pub vertex: usize,
    pub reverse_reach: usize,
    /// `c_0 + reverse_reach + 2`.
    pub cycles: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CentralReport {
    pub node: usize,
    pub vertex: usize,
    pub reverse_reach: usize,
    pub c_min: usize,
    /// Every qualifying node, ordered by (reverse reach, node id).
    pub qualifying: Vec<Qualifying>,
}

/// Ranks nodes by time-reachability centrality (lowest node id on ties) and
/// returns the best one that qualifies. `expected` is `f(w)`.
pub fn find_central_node(
    assembly: &NetworkAssembly,
    w: &Bitstring,
    selector: &Bitstring,
    expected: &Bitstring,
    budget: u64,
) -> Result<CentralReport, NetworkError> {
    let g = assembly.tvg();
    if g.n() < 2 {
        return Err(TvgError::TooFewVertices(g.n()).into());
    }
    if temporal_diffusion_diameter(g, 0)?.is_none() {
        return Err(TvgError::InfiniteDiameter.into());
    }
    let rr = reverse_reach_all(g, 0);
    let mut order: Vec<(usize, usize)> = (0..assembly.len())
        .map(|o| (rr[assembly.vertex_of(o)].expect("finite diameter"), o))
        .collect();
    order.sort_unstable();

    // networked final outputs per trimmed horizon
    let mut runs: BTreeMap<usize, Vec<Option<Bitstring>>> = BTreeMap::new();
    let mut qualifying = Vec::new();
    for (k, o) in order {
        if !runs.contains_key(&k) {
            let trimmed = assembly.with_tvg(g.truncated(k + 1))?;
            runs.insert(
                k,
                run_networked(&trimmed, w, selector, budget)?.final_outputs(),
            );
        }
        if runs[&k][o].as_ref() != Some(expected) {
            continue;
        }
        let cycles = assembly.c_0() + k + 2;
        let program = &assembly.programs()[o];
        if isolated_trace(program, w, cycles - 1, budget).contains(expected) {
            continue;
        }
        qualifying.push(Qualifying {
            node: o,
            vertex: assembly.vertex_of(o),
            reverse_reach: k,
            cycles,
        });
    }
    let best = qualifying
        .first()
        .cloned()
        .ok_or(NetworkError::NoCentralNode)?;
    Ok(CentralReport {
        node: best.node,
        vertex: best.vertex,
        reverse_reach: best.reverse_reach,
        c_min: best.cycles,
        qualifying,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{builtins, Labels, Program};
    use crate::tvg::{gen_small_diameter, Family, Tvg};

    fn b(s: &str) -> Bitstring {
        s.parse().unwrap()
    }

    fn labels() -> Labels {
        Labels {
            halting: b("110101"),
            non_halting: b("001010"),
        }
    }

    #[test]
    fn star_center_needs_three_cycles() {
        let g = gen_small_diameter(Family::StarBroadcast, 6, 0).unwrap();
        let ps = (0..6).map(|i| builtins::literal(i * 3)).collect();
        let a = NetworkAssembly::identity(g, ps, 0).unwrap();
        let w = Program::empty_program();
        let l = labels();
        let r =
            find_central_node(&a, w.encoding(), &builtins::p_halt(&l), &l.halting, 1000).unwrap();
        assert_eq!((r.node, r.c_min, r.reverse_reach), (0, 3, 1));
        assert!(r.qualifying.iter().all(|q| q.cycles >= r.c_min));
    }

    #[test]
    fn complete_graph_picks_lowest_id() {
        let ps = (0..4).map(|i| builtins::literal(i + 1)).collect();
        let a = NetworkAssembly::identity(Tvg::complete(4, 2), ps, 1).unwrap();
        let l = labels();
        let w = Program::empty_program();
        let r =
            find_central_node(&a, w.encoding(), &builtins::p_halt(&l), &l.halting, 1000).unwrap();
        assert_eq!((r.node, r.c_min), (0, 4));
        assert_eq!(r.qualifying.len(), 4);
    }

    #[test]
    fn isolated_success_excludes_node() {
        // the isolated literal outputs the halting label's fitness code
        let l = labels();
        let code = l.halting.to_natural().unwrap() - 1;
        let ps = vec![
            builtins::literal(code),
            builtins::literal(1),
            builtins::literal(2),
        ];
        let a = NetworkAssembly::identity(Tvg::complete(3, 2), ps, 0).unwrap();
        let w = Program::empty_program();
        let r =
            find_central_node(&a, w.encoding(), &builtins::p_halt(&l), &l.halting, 1000).unwrap();
        assert_eq!(r.node, 1);
        let ps = vec![builtins::literal(code)];
        let one = NetworkAssembly::identity(Tvg::complete(1, 2), ps, 0).unwrap();
        assert!(
            find_central_node(&one, w.encoding(), &builtins::p_halt(&l), &l.halting, 1000).is_err()
        );
    }
}

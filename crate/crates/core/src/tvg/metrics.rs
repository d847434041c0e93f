//! Monotone temporal diffusion and the metrics built on it.

use serde::Serialize;

use super::{Hops, Tvg, TvgError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiffusionResult {
    pub source: usize,
    pub start: usize,
    /// Intervals after `start` at which each vertex is first reached.
    pub reached_at: Vec<Hops>,
}

/// Single-source diffusion from `u` starting at instant `t`. Reached vertices
/// stay reached; each interval extends the set along that interval's arcs.
pub fn diffuse(g: &Tvg, t: usize, u: usize) -> Result<DiffusionResult, TvgError> {
    g.check_vertex(u)?;
    g.check_instant(t)?;
    let mut reached_at: Vec<Hops> = vec![None; g.n()];
    reached_at[u] = Some(0);
    let mut frontier = vec![u];
    let mut reached = vec![u];
    for i in t..g.intervals() {
        let k = i - t + 1;
        frontier.clear();
        for &a in &reached {
            for &b in g.out_neighbors(i, a) {
                if reached_at[b].is_none() {
                    reached_at[b] = Some(k);
                    frontier.push(b);
                }
            }
        }
        reached.extend_from_slice(&frontier);
    }
    Ok(DiffusionResult {
        source: u,
        start: t,
        reached_at,
    })
}

fn needed(n: usize, tau: f64) -> Result<usize, TvgError> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(TvgError::BadFraction);
    }
    // the epsilon keeps products such as 0.3 * 10 from rounding up past 3
    Ok(((tau * n as f64) - 1e-9).ceil().max(1.0) as usize)
}

/// Fewest intervals after which a diffusion from `u` at `t` covers at least
/// `⌈tau·N⌉` vertices.
pub fn d_t(g: &Tvg, t: usize, u: usize, tau: f64) -> Result<Hops, TvgError> {
    let need = needed(g.n(), tau)?;
    let res = diffuse(g, t, u)?;
    let mut times: Vec<usize> = res.reached_at.iter().flatten().copied().collect();
    if times.len() < need {
        return Ok(None);
    }
    times.sort_unstable();
    Ok(Some(times[need - 1]))
}

/// `arrival[s][v]`: intervals for a diffusion from `s` at `t` to reach `v`.
/// All sources are propagated together as bitsets.
pub(crate) fn arrival_matrix(g: &Tvg, t: usize) -> Vec<Vec<Hops>> {
    let n = g.n();
    let words = n.div_ceil(64);
    let mut reach = vec![vec![0u64; words]; n];
    let mut arrival: Vec<Vec<Hops>> = vec![vec![None; n]; n];
    for v in 0..n {
        reach[v][v / 64] |= 1 << (v % 64);
        arrival[v][v] = Some(0);
    }
    for i in t..g.intervals() {
        let k = i - t + 1;
        let mut next = reach.clone();
        for u in 0..n {
            for &v in g.out_neighbors(i, u) {
                for w in 0..words {
                    next[v][w] |= reach[u][w];
                }
            }
        }
        for v in 0..n {
            for w in 0..words {
                let mut fresh = next[v][w] & !reach[v][w];
                while fresh != 0 {
                    let bit = fresh.trailing_zeros() as usize;
                    arrival[w * 64 + bit][v] = Some(k);
                    fresh &= fresh - 1;
                }
            }
        }
        reach = next;
    }
    arrival
}

fn worst(values: impl Iterator<Item = Hops>) -> Hops {
    let mut acc = Some(0);
    for h in values {
        acc = match (acc, h) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => return None,
        };
    }
    acc
}

/// Worst case over sources of the intervals needed to reach every vertex.
pub fn temporal_diffusion_diameter(g: &Tvg, t: usize) -> Result<Hops, TvgError> {
    g.check_instant(t)?;
    let arrival = arrival_matrix(g, t);
    Ok(worst(arrival.iter().map(|row| worst(row.iter().copied()))))
}

/// Worst case over sources of the intervals a diffusion needs to reach `u`.
pub fn reverse_reach(g: &Tvg, t: usize, u: usize) -> Result<Hops, TvgError> {
    g.check_vertex(u)?;
    g.check_instant(t)?;
    Ok(reverse_reach_all(g, t)[u])
}

pub(crate) fn reverse_reach_all(g: &Tvg, t: usize) -> Vec<Hops> {
    let arrival = arrival_matrix(g, t);
    (0..g.n())
        .map(|u| worst(arrival.iter().map(|row| row[u])))
        .collect()
}

fn require_finite(g: &Tvg, t: usize) -> Result<(), TvgError> {
    if g.n() < 2 {
        return Err(TvgError::TooFewVertices(g.n()));
    }
    match temporal_diffusion_diameter(g, t)? {
        Some(_) => Ok(()),
        None => Err(TvgError::InfiniteDiameter),
    }
}

/// `1 / reverse_reach`. Defined only for graphs with at least two vertices
/// and a finite diameter, where every reverse reach is at least 1.
pub fn time_reachability_centrality(g: &Tvg, t: usize, u: usize) -> Result<f64, TvgError> {
    g.check_vertex(u)?;
    require_finite(g, t)?;
    let rr = reverse_reach(g, t, u)?.expect("finite diameter bounds every reverse reach");
    Ok(1.0 / rr as f64)
}

/// Vertices whose centrality is exactly `1 / k`.
pub fn x_treach(g: &Tvg, t: usize, k: usize) -> Result<Vec<usize>, TvgError> {
    require_finite(g, t)?;
    Ok(reverse_reach_all(g, t)
        .iter()
        .enumerate()
        .filter(|(_, rr)| **rr == Some(k))
        .map(|(u, _)| u)
        .collect())
}

/// Vertices of highest centrality, ascending.
pub fn central_vertices(g: &Tvg, t: usize) -> Result<Vec<usize>, TvgError> {
    require_finite(g, t)?;
    let rr = reverse_reach_all(g, t);
    let best = rr.iter().flatten().min().copied().unwrap_or(0);
    Ok((0..g.n()).filter(|&u| rr[u] == Some(best)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> Tvg {
        let mut g = Tvg::new(3, 3);
        g.add_arc(0, 0, 1).unwrap();
        g.add_arc(1, 1, 2).unwrap();
        g
    }

    fn star(n: usize) -> Tvg {
        let mut g = Tvg::new(n, 3);
        for s in 1..n {
            g.add_arc(s, 0, 0).unwrap();
            g.add_arc(s, 1, 0).unwrap();
            g.add_arc(0, 1, s).unwrap();
        }
        g
    }

    #[test]
    fn complete_graph_metrics() {
        let g = Tvg::complete(5, 3);
        for u in 0..5 {
            assert_eq!(d_t(&g, 0, u, 1.0).unwrap(), Some(1));
            assert_eq!(reverse_reach(&g, 0, u).unwrap(), Some(1));
            assert_eq!(time_reachability_centrality(&g, 0, u).unwrap(), 1.0);
        }
        assert_eq!(temporal_diffusion_diameter(&g, 0).unwrap(), Some(1));
        assert_eq!(x_treach(&g, 0, 1).unwrap(), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn chain_needs_two_intervals() {
        let g = chain();
        assert_eq!(d_t(&g, 0, 0, 1.0).unwrap(), Some(2));
        assert_eq!(d_t(&g, 0, 0, 0.5).unwrap(), Some(1));
        assert_eq!(d_t(&g, 0, 1, 1.0).unwrap(), None);
        assert_eq!(temporal_diffusion_diameter(&g, 0).unwrap(), None);
        let both = Tvg::replicated(3, 3, &[(0, 1), (1, 0), (1, 2), (2, 1)]).unwrap();
        assert_eq!(temporal_diffusion_diameter(&both, 0).unwrap(), Some(2));
    }

    #[test]
    fn isolated_vertex_is_never_covered() {
        let g = Tvg::replicated(3, 4, &[(0, 1), (1, 0)]).unwrap();
        assert_eq!(d_t(&g, 0, 0, 1.0).unwrap(), None);
        assert_eq!(temporal_diffusion_diameter(&g, 0).unwrap(), None);
        assert_eq!(reverse_reach(&g, 0, 2).unwrap(), None);
        assert_eq!(
            time_reachability_centrality(&g, 0, 0),
            Err(TvgError::InfiniteDiameter)
        );
    }

    #[test]
    fn star_reverse_reach() {
        let g = star(6);
        assert_eq!(reverse_reach(&g, 0, 0).unwrap(), Some(1));
        assert_eq!(reverse_reach(&g, 0, 3).unwrap(), Some(2));
        assert_eq!(time_reachability_centrality(&g, 0, 3).unwrap(), 0.5);
        assert_eq!(central_vertices(&g, 0).unwrap(), vec![0]);
    }

    #[test]
    fn argument_checks() {
        let g = chain();
        assert_eq!(d_t(&g, 0, 7, 1.0), Err(TvgError::UnknownVertex(7)));
        assert_eq!(d_t(&g, 0, 0, 0.0), Err(TvgError::BadFraction));
        assert_eq!(d_t(&g, 0, 0, 1.5), Err(TvgError::BadFraction));
        assert_eq!(d_t(&g, 5, 0, 1.0), Err(TvgError::UnknownInstant(5)));
        let one = Tvg::new(1, 2);
        assert_eq!(
            time_reachability_centrality(&one, 0, 0),
            Err(TvgError::TooFewVertices(1))
        );
    }

    #[test]
    fn later_start_uses_later_arcs_only() {
        let g = chain();
        assert_eq!(d_t(&g, 1, 1, 1.0 / 3.0 * 2.0).unwrap(), Some(1));
        assert_eq!(
            diffuse(&g, 1, 0).unwrap().reached_at,
            vec![Some(0), None, None]
        );
    }
}

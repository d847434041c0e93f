use algnet::tvg::{
    central_vertices, d_t, gen_small_diameter, reverse_reach, temporal_diffusion_diameter,
    time_reachability_centrality, Family, Tvg,
};
use proptest::prelude::*;

/// Earliest arrival by walking every journey: a sequence of arcs taken at
/// strictly increasing intervals, waiting allowed in between.
fn earliest(g: &Tvg, t: usize, src: usize) -> Vec<Option<usize>> {
    fn walk(g: &Tvg, t: usize, at: usize, from: usize, best: &mut [Option<usize>]) {
        for i in from..g.intervals() {
            for &v in g.out_neighbors(i, at) {
                let hops = i - t + 1;
                if best[v].is_none_or(|b| hops < b) {
                    best[v] = Some(hops);
                    walk(g, t, v, i + 1, best);
                }
            }
        }
    }
    let mut best = vec![None; g.n()];
    best[src] = Some(0);
    walk(g, t, src, t, &mut best);
    best
}

fn graph(max_n: usize, max_t: usize) -> impl Strategy<Value = Tvg> {
    (1..=max_n, 1..=max_t).prop_flat_map(|(n, t)| {
        proptest::collection::vec((0..n, 0..t.max(2) - 1, 0..n), 0..3 * n * t).prop_map(
            move |arcs| {
                let mut g = Tvg::new(n, t);
                for (u, i, v) in arcs {
                    if i + 1 < t {
                        g.add_arc(u, i, v).unwrap();
                    }
                }
                g
            },
        )
    })
}

proptest! {
    #[test]
    fn metrics_match_journey_enumeration(g in graph(6, 4), tau in 0.05f64..=1.0) {
        for t in 0..g.instants() {
            let rows: Vec<Vec<Option<usize>>> = (0..g.n()).map(|s| earliest(&g, t, s)).collect();
            for (u, row) in rows.iter().enumerate() {
                let need = ((tau * g.n() as f64) - 1e-9).ceil().max(1.0) as usize;
                let mut times: Vec<usize> = row.iter().flatten().copied().collect();
                times.sort_unstable();
                prop_assert_eq!(d_t(&g, t, u, tau).unwrap(), times.get(need - 1).copied());
                let rr = rows.iter().map(|r| r[u]).try_fold(0, |a, h| h.map(|h| a.max(h)));
                prop_assert_eq!(reverse_reach(&g, t, u).unwrap(), rr);
            }
            let diameter = rows.iter().flatten().try_fold(0, |a, h| h.map(|h| a.max(h)));
            prop_assert_eq!(temporal_diffusion_diameter(&g, t).unwrap(), diameter);
        }
    }

    #[test]
    fn extra_arcs_never_slow_diffusion(g in graph(6, 4), u in 0usize..6, i in 0usize..3, v in 0usize..6) {
        prop_assume!(u < g.n() && v < g.n() && i + 1 < g.instants());
        let mut h = g.clone();
        h.add_arc(u, i, v).unwrap();
        let before = temporal_diffusion_diameter(&g, 0).unwrap();
        let after = temporal_diffusion_diameter(&h, 0).unwrap();
        if let Some(b) = before {
            prop_assert!(after.is_some_and(|a| a <= b));
        }
        for x in 0..g.n() {
            if let Some(b) = reverse_reach(&g, 0, x).unwrap() {
                prop_assert!(reverse_reach(&h, 0, x).unwrap().is_some_and(|a| a <= b));
            }
        }
    }

    #[test]
    fn larger_fractions_need_no_fewer_intervals(g in graph(6, 4), a in 0.05f64..=1.0, b in 0.05f64..=1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        for u in 0..g.n() {
            match (d_t(&g, 0, u, lo).unwrap(), d_t(&g, 0, u, hi).unwrap()) {
                (Some(x), Some(y)) => prop_assert!(x <= y),
                (None, Some(_)) => prop_assert!(false, "coverage shrank"),
                _ => {}
            }
        }
    }
}

#[test]
fn text_form_round_trips() {
    let g = gen_small_diameter(Family::ReplicatedRandomRegular, 12, 4).unwrap();
    let back: Tvg = g.to_string().parse().unwrap();
    assert_eq!(back.to_string(), g.to_string());
    assert_eq!(back.n(), 12);
}

#[test]
fn complete_graph_is_uniformly_central() {
    let g = Tvg::complete(4, 2);
    for u in 0..4 {
        assert_eq!(time_reachability_centrality(&g, 0, u).unwrap(), 1.0);
    }
    assert_eq!(central_vertices(&g, 0).unwrap(), vec![0, 1, 2, 3]);
}

#[test]
fn generated_families_stay_within_their_diameter_bound() {
    for family in Family::ALL {
        for n in [2, 3, 8, 33, 256] {
            for seed in 0..3 {
                let g = gen_small_diameter(family, n, seed).unwrap();
                let d = temporal_diffusion_diameter(&g, 0).unwrap().unwrap();
                assert!(d <= family.diameter_bound(n), "{family} N={n}: D={d}");
                assert_eq!(g.instants(), d + 1);
            }
        }
    }
}

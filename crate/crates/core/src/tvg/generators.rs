//! Families of time-varying graphs whose diffusion diameter grows
//! logarithmically in the number of vertices.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::metrics::temporal_diffusion_diameter;
use super::{Tvg, TvgError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Hypercube on `0..N` (the induced subgraph of the `⌈lg N⌉`-cube),
    /// identical at every interval.
    ReplicatedHypercube,
    /// Union of `⌈lg N⌉` random permutations, arcs both ways, identical at
    /// every interval.
    ReplicatedRandomRegular,
    /// Vertex 0 collects from every spoke, then broadcasts to them.
    StarBroadcast,
}

impl Family {
    pub const ALL: [Family; 3] = [
        Family::StarBroadcast,
        Family::ReplicatedHypercube,
        Family::ReplicatedRandomRegular,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::ReplicatedHypercube => "replicated-hypercube",
            Family::ReplicatedRandomRegular => "replicated-random-regular",
            Family::StarBroadcast => "star-broadcast",
        }
    }

    /// Largest temporal diffusion diameter a member on `n` vertices may have.
    pub fn diameter_bound(self, n: usize) -> usize {
        2 * ceil_lg(n).max(1)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = TvgError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| TvgError::UnknownFamily(s.to_string()))
    }
}

fn ceil_lg(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

const MAX_ATTEMPTS: u64 = 1000;

/// A member of `family` on `n` vertices whose instants are trimmed to
/// `D + 1`, so every interval is needed by some diffusion.
pub fn gen_small_diameter(family: Family, n: usize, seed: u64) -> Result<Tvg, TvgError> {
    if n < 2 {
        return Err(TvgError::TooFewVertices(n));
    }
    let bound = family.diameter_bound(n);
    for attempt in 0..MAX_ATTEMPTS {
        let g = match family {
            Family::StarBroadcast => star_broadcast(n),
            Family::ReplicatedHypercube => Tvg::replicated(n, bound + 1, &hypercube_arcs(n))?,
            Family::ReplicatedRandomRegular => Tvg::replicated(
                n,
                bound + 1,
                &random_regular_arcs(n, seed.wrapping_add(attempt)),
            )?,
        };
        if let Some(d) = temporal_diffusion_diameter(&g, 0)? {
            if d <= bound {
                return Ok(g.truncated(d + 1));
            }
        }
        if family != Family::ReplicatedRandomRegular {
            break;
        }
    }
    Err(TvgError::InfiniteDiameter)
}

fn star_broadcast(n: usize) -> Tvg {
    let mut g = Tvg::new(n, 3);
    for s in 1..n {
        g.add_arc(s, 0, 0).expect("in range");
        g.add_arc(0, 1, s).expect("in range");
    }
    g
}

fn hypercube_arcs(n: usize) -> Vec<(usize, usize)> {
    let dims = ceil_lg(n);
    (0..n)
        .flat_map(|u| (0..dims).map(move |b| (u, u ^ (1 << b))))
        .filter(|&(_, v)| v < n)
        .collect()
}

fn random_regular_arcs(n: usize, seed: u64) -> Vec<(usize, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut arcs = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    for _ in 0..ceil_lg(n) {
        perm.shuffle(&mut rng);
        for (u, &v) in perm.iter().enumerate() {
            if u != v {
                arcs.push((u, v));
                arcs.push((v, u));
            }
        }
    }
    arcs
}

//! Time-varying graphs with arcs between consecutive instants, their
//! diffusion metrics and small-diameter generators.

mod generators;
mod metrics;

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use thiserror::Error;

pub use generators::{gen_small_diameter, Family};
pub(crate) use metrics::reverse_reach_all;
pub use metrics::{
    central_vertices, d_t, diffuse, reverse_reach, temporal_diffusion_diameter,
    time_reachability_centrality, x_treach, DiffusionResult,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TvgError {
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(usize),
    #[error("instant {0} is not in the graph")]
    UnknownInstant(usize),
    #[error("fraction must lie in (0, 1]")]
    BadFraction,
    #[error("temporal diffusion diameter is infinite")]
    InfiniteDiameter,
    #[error("at least two vertices are required, got {0}")]
    TooFewVertices(usize),
    #[error("unknown graph family `{0}`")]
    UnknownFamily(String),
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("io: {0}")]
    Io(String),
}

/// Interval count that may be infinite (`None`).
pub type Hops = Option<usize>;

pub fn fmt_hops(h: Hops) -> String {
    h.map_or_else(|| "inf".to_string(), |k| k.to_string())
}

/// Vertices `0..n`, instants `0..instants`, and arcs `(u, i, v, i + 1)`.
#[derive(Clone, PartialEq, Eq)]
pub struct Tvg {
    n: usize,
    instants: usize,
    /// `out[i][u]`: sorted, deduplicated heads of arcs leaving `u` at instant `i`.
    out: Vec<Vec<Vec<usize>>>,
}

impl Tvg {
    /// A graph without arcs. `instants` is at least 1.
    pub fn new(n: usize, instants: usize) -> Tvg {
        let instants = instants.max(1);
        Tvg {
            n,
            instants,
            out: vec![vec![Vec::new(); n]; instants - 1],
        }
    }

    /// The same arc set at every interval.
    pub fn replicated(n: usize, instants: usize, arcs: &[(usize, usize)]) -> Result<Tvg, TvgError> {
        let mut g = Tvg::new(n, instants);
        for i in 0..g.intervals() {
            for &(u, v) in arcs {
                g.add_arc(u, i, v)?;
            }
        }
        Ok(g)
    }

    pub fn complete(n: usize, instants: usize) -> Tvg {
        let arcs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)))
            .collect();
        Tvg::replicated(n, instants, &arcs).expect("vertices in range")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn instants(&self) -> usize {
        self.instants
    }

    /// Number of time intervals, `|T| - 1`.
    pub fn intervals(&self) -> usize {
        self.instants - 1
    }

    /// Adds the arc `(u, t_i, v, t_{i+1})`.
    pub fn add_arc(&mut self, u: usize, i: usize, v: usize) -> Result<(), TvgError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if i + 1 >= self.instants {
            return Err(TvgError::UnknownInstant(i + 1));
        }
        let heads = &mut self.out[i][u];
        if let Err(pos) = heads.binary_search(&v) {
            heads.insert(pos, v);
        }
        Ok(())
    }

    pub fn out_neighbors(&self, i: usize, u: usize) -> &[usize] {
        &self.out[i][u]
    }

    /// Tails of arcs entering `v` over interval `i`, ascending.
    pub fn in_neighbors(&self, i: usize, v: usize) -> Vec<usize> {
        (0..self.n)
            .filter(|&u| self.out[i][u].binary_search(&v).is_ok())
            .collect()
    }

    /// In-neighbor lists of every vertex over interval `i`.
    pub fn in_lists(&self, i: usize) -> Vec<Vec<usize>> {
        let mut ins = vec![Vec::new(); self.n];
        for u in 0..self.n {
            for &v in &self.out[i][u] {
                ins[v].push(u);
            }
        }
        ins
    }

    /// Arcs as `(u, i, v)` triples in (i, u, v) order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.out.iter().enumerate().flat_map(|(i, layer)| {
            layer
                .iter()
                .enumerate()
                .flat_map(move |(u, heads)| heads.iter().map(move |&v| (u, i, v)))
        })
    }

    pub fn arc_count(&self) -> usize {
        self.out.iter().flatten().map(Vec::len).sum()
    }

    /// Keeps instants `0..instants`.
    pub fn truncated(&self, instants: usize) -> Tvg {
        let instants = instants.clamp(1, self.instants);
        Tvg {
            n: self.n,
            instants,
            out: self.out[..instants - 1].to_vec(),
        }
    }

    pub(crate) fn check_vertex(&self, u: usize) -> Result<(), TvgError> {
        if u < self.n {
            Ok(())
        } else {
            Err(TvgError::UnknownVertex(u))
        }
    }

    pub(crate) fn check_instant(&self, t: usize) -> Result<(), TvgError> {
        if t < self.instants {
            Ok(())
        } else {
            Err(TvgError::UnknownInstant(t))
        }
    }

    /// Text form: a header `N |T|`, then one `u t_i v t_j` line per arc.
    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{} {}", self.n, self.instants)?;
        for (u, i, v) in self.arcs() {
            writeln!(w, "{u} {i} {v} {}", i + 1)?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Tvg, TvgError> {
        let mut g: Option<Tvg> = None;
        for (idx, line) in r.lines().enumerate() {
            let line = line.map_err(|e| TvgError::Io(e.to_string()))?;
            let lineno = idx + 1;
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.is_empty() || fields[0].starts_with('#') {
                continue;
            }
            let nums = fields
                .iter()
                .map(|f| f.parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| TvgError::Parse {
                    line: lineno,
                    reason: e.to_string(),
                })?;
            match (&mut g, nums.as_slice()) {
                (None, &[n, t]) => {
                    if t == 0 {
                        return Err(TvgError::Parse {
                            line: lineno,
                            reason: "a graph needs at least one instant".into(),
                        });
                    }
                    g = Some(Tvg::new(n, t));
                }
                (Some(g), &[u, ti, v, tj]) => {
                    if tj != ti + 1 {
                        return Err(TvgError::Parse {
                            line: lineno,
                            reason: format!("arc {ti} -> {tj} does not join consecutive instants"),
                        });
                    }
                    g.add_arc(u, ti, v)?;
                }
                _ => {
                    return Err(TvgError::Parse {
                        line: lineno,
                        reason: "expected `N |T|` header or `u t_i v t_j` arc".into(),
                    })
                }
            }
        }
        g.ok_or(TvgError::Parse {
            line: 0,
            reason: "missing header".into(),
        })
    }
}

impl fmt::Debug for Tvg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Tvg(n={}, |T|={}, arcs={})",
            self.n,
            self.instants,
            self.arc_count()
        )
    }
}

impl FromStr for Tvg {
    type Err = TvgError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Tvg::read_from(s.as_bytes())
    }
}

impl fmt::Display for Tvg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut buf = Vec::new();
        self.write_to(&mut buf).map_err(|_| fmt::Error)?;
        f.write_str(&String::from_utf8_lossy(&buf))
    }
}

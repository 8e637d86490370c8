//! Seeded random instances: Erdős–Rényi, Watts–Strogatz and
//! Barabási–Albert graphs with integer weights and nested terminal sets.
//!
//! All randomness flows from one `Xoshiro256PlusPlus` seeded through
//! splitmix64 (`seed_from_u64`), so a [`GenSpec`] always yields the same
//! instance. Generators return unit-weight graphs; [`assign_weights`]
//! draws the costs.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{MlstError, Result};
use crate::graph::{MlstInstance, VertexId, WeightedGraph};
use crate::scalar::Scalar;

pub type GenRng = Xoshiro256PlusPlus;

pub const MAX_RETRIES: usize = 1000;
pub const MIN_WEIGHT: usize = 1;
pub const MAX_WEIGHT: usize = 10;

pub fn rng_from_seed(seed: u64) -> GenRng {
    GenRng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraphModel {
    Er { epsilon: f64 },
    Ws { k: usize, beta: f64 },
    Ba { m0: usize, m: usize },
}

impl GraphModel {
    pub fn er() -> Self {
        GraphModel::Er { epsilon: 1.0 }
    }

    pub fn ws() -> Self {
        GraphModel::Ws { k: 6, beta: 0.2 }
    }

    pub fn ba() -> Self {
        GraphModel::Ba { m0: 10, m: 5 }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GraphModel::Er { .. } => "er",
            GraphModel::Ws { .. } => "ws",
            GraphModel::Ba { .. } => "ba",
        }
    }
}

impl FromStr for GraphModel {
    type Err = MlstError;

    /// Model name with default parameters.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "er" => Ok(GraphModel::er()),
            "ws" => Ok(GraphModel::ws()),
            "ba" => Ok(GraphModel::ba()),
            other => Err(MlstError::Generator(format!("unknown model {other:?} (er, ws, ba)"))),
        }
    }
}

impl fmt::Display for GraphModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Terminal selection scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tsm {
    Linear,
    Exponential,
}

impl Tsm {
    /// `|T_i|` for `i = 1..=ell`, bottom first.
    pub fn sizes(self, n: usize, ell: usize) -> Vec<usize> {
        (1..=ell)
            .map(|i| match self {
                Tsm::Linear => n * (ell - i + 1) / (ell + 1),
                Tsm::Exponential => {
                    if i >= usize::BITS as usize {
                        0
                    } else {
                        n >> i
                    }
                }
            })
            .collect()
    }
}

impl FromStr for Tsm {
    type Err = MlstError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "linear" | "lin" => Ok(Tsm::Linear),
            "exponential" | "exp" => Ok(Tsm::Exponential),
            other => Err(MlstError::Generator(format!("unknown terminal scheme {other:?}"))),
        }
    }
}

impl fmt::Display for Tsm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tsm::Linear => "linear",
            Tsm::Exponential => "exponential",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub model: GraphModel,
    pub n: usize,
    pub ell: usize,
    pub tsm: Tsm,
    pub seed: u64,
}

impl GenSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(MlstError::Generator(msg));
        if self.n < 2 {
            return bad(format!("n = {} must be at least 2", self.n));
        }
        if self.ell < 1 {
            return bad("ell must be at least 1".into());
        }
        match self.model {
            GraphModel::Er { epsilon } if !(epsilon > 0.0 && epsilon.is_finite()) => {
                bad(format!("er: epsilon = {epsilon} must be positive"))
            }
            GraphModel::Ws { k, beta } if k % 2 == 1 || k < 2 || k >= self.n || !(0.0..=1.0).contains(&beta) => {
                bad(format!("ws: need even 2 <= K < n and 0 <= beta <= 1, got K = {k}, beta = {beta}"))
            }
            GraphModel::Ba { m0, m } if m < 1 || m > m0 || m0 < 3 || m0 > self.n => {
                bad(format!("ba: need 1 <= m <= m0, 3 <= m0 <= n, got m0 = {m0}, m = {m}"))
            }
            _ => Ok(()),
        }
    }

    /// Graph, then weights, then terminals, all from the one seeded stream.
    pub fn generate<W: Scalar>(&self) -> Result<MlstInstance<W>> {
        self.validate()?;
        let mut rng = rng_from_seed(self.seed);
        let graph: WeightedGraph<W> = match self.model {
            GraphModel::Er { epsilon } => gen_er(self.n, epsilon, &mut rng)?,
            GraphModel::Ws { k, beta } => gen_ws(self.n, k, beta, &mut rng)?,
            GraphModel::Ba { m0, m } => gen_ba(self.n, m0, m, &mut rng)?,
        };
        let graph = assign_weights(&graph, &mut rng);
        let terminals = pick_terminals(&graph, self.ell, self.tsm, &mut rng)?;
        MlstInstance::new(graph, terminals)
    }
}

fn unit_graph<W: Scalar>(n: usize, edges: &BTreeSet<(VertexId, VertexId)>) -> WeightedGraph<W> {
    WeightedGraph::new(n, edges.iter().map(|&(u, v)| (u, v, W::one()))).expect("generated edges are simple")
}

fn until_connected<W: Scalar>(
    what: &str,
    rng: &mut GenRng,
    mut attempt: impl FnMut(&mut GenRng) -> WeightedGraph<W>,
) -> Result<WeightedGraph<W>> {
    for _ in 0..MAX_RETRIES {
        let g = attempt(rng);
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(MlstError::Generator(format!("{what}: no connected graph after {MAX_RETRIES} attempts")))
}

pub fn er_probability(n: usize, epsilon: f64) -> f64 {
    let n = n as f64;
    ((1.0 + epsilon) * n.ln() / n).min(1.0)
}

pub fn gen_er<W: Scalar>(n: usize, epsilon: f64, rng: &mut GenRng) -> Result<WeightedGraph<W>> {
    if n < 2 || !(epsilon > 0.0) {
        return Err(MlstError::Generator(format!("er: need n >= 2 and epsilon > 0, got {n}, {epsilon}")));
    }
    let p = er_probability(n, epsilon);
    until_connected("er", rng, |rng| {
        let mut edges = BTreeSet::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen::<f64>() < p {
                    edges.insert((u, v));
                }
            }
        }
        unit_graph(n, &edges)
    })
}

fn norm(a: VertexId, b: VertexId) -> (VertexId, VertexId) {
    (a.min(b), a.max(b))
}

pub fn gen_ws<W: Scalar>(n: usize, k: usize, beta: f64, rng: &mut GenRng) -> Result<WeightedGraph<W>> {
    if k % 2 == 1 || k < 2 || k >= n || !(0.0..=1.0).contains(&beta) {
        return Err(MlstError::Generator(format!("ws: need even 2 <= K < n, 0 <= beta <= 1, got K = {k}, beta = {beta}")));
    }
    until_connected("ws", rng, |rng| {
        let mut edges = BTreeSet::new();
        for u in 0..n {
            for j in 1..=k / 2 {
                edges.insert(norm(u, (u + j) % n));
            }
        }
        // rewire (u, u+j) to (u, w), one lattice ring at a time
        for j in 1..=k / 2 {
            for u in 0..n {
                let v = (u + j) % n;
                if !(rng.gen::<f64>() < beta) {
                    continue;
                }
                let degree = edges.iter().filter(|&&(a, b)| a == u || b == u).count();
                if degree >= n - 1 {
                    continue;
                }
                let w = loop {
                    let w = rng.gen_range(0..n);
                    if w != u && !edges.contains(&norm(u, w)) {
                        break w;
                    }
                };
                edges.remove(&norm(u, v));
                edges.insert(norm(u, w));
            }
        }
        unit_graph(n, &edges)
    })
}

/// Ring on `m0` vertices, then each new vertex attaches to `m` distinct
/// existing vertices chosen proportionally to degree.
pub fn gen_ba<W: Scalar>(n: usize, m0: usize, m: usize, rng: &mut GenRng) -> Result<WeightedGraph<W>> {
    if m < 1 || m > m0 || m0 < 3 || m0 > n {
        return Err(MlstError::Generator(format!("ba: need 1 <= m <= m0, 3 <= m0 <= n, got m0 = {m0}, m = {m}")));
    }
    let mut edges = BTreeSet::new();
    // each vertex appears once per incident edge
    let mut stubs: Vec<VertexId> = Vec::with_capacity(2 * (m0 + m * (n - m0)));
    for u in 0..m0 {
        let v = (u + 1) % m0;
        edges.insert(norm(u, v));
        stubs.extend([u, v]);
    }
    for v in m0..n {
        let mut targets = BTreeSet::new();
        while targets.len() < m {
            targets.insert(stubs[rng.gen_range(0..stubs.len())]);
        }
        for &u in &targets {
            edges.insert((u, v));
            stubs.extend([u, v]);
        }
    }
    Ok(unit_graph(n, &edges))
}

/// Independent uniform integer costs in `1..=10`.
pub fn assign_weights<W: Scalar>(graph: &WeightedGraph<W>, rng: &mut GenRng) -> WeightedGraph<W> {
    let costs = (0..graph.edge_count())
        .map(|_| W::of_usize(rng.gen_range(MIN_WEIGHT..=MAX_WEIGHT)))
        .collect();
    graph.with_costs(costs).expect("same edge count")
}

/// Nested terminal sets, each sampled uniformly from the one below
/// (`T_0 = V`).
pub fn pick_terminals<W>(
    graph: &WeightedGraph<W>,
    ell: usize,
    tsm: Tsm,
    rng: &mut GenRng,
) -> Result<Vec<Vec<VertexId>>>
where
    W: Scalar,
{
    let n = graph.vertex_count();
    let sizes = tsm.sizes(n, ell);
    if sizes.last().copied().unwrap_or(0) == 0 {
        return Err(MlstError::Generator(format!(
            "{tsm} terminals on {n} vertices leave level {ell} empty"
        )));
    }
    let mut prev: Vec<VertexId> = (0..n).collect();
    let mut out = Vec::with_capacity(ell);
    for size in sizes {
        let mut next: Vec<VertexId> = sample(rng, prev.len(), size).into_iter().map(|i| prev[i]).collect();
        next.sort_unstable();
        out.push(next.clone());
        prev = next;
    }
    Ok(out)
}

/// Small connected instance: random recursive tree plus extra random
/// edges up to `edges` total, weights in `1..=10`.
pub fn gen_micro<W: Scalar>(n: usize, edges: usize, ell: usize, tsm: Tsm, rng: &mut GenRng) -> Result<MlstInstance<W>> {
    if n < 2 || edges < n - 1 || edges > n * (n - 1) / 2 {
        return Err(MlstError::Generator(format!("micro: {edges} edges impossible on {n} vertices")));
    }
    let mut set = BTreeSet::new();
    for v in 1..n {
        set.insert((rng.gen_range(0..v), v));
    }
    while set.len() < edges {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v {
            set.insert(norm(u, v));
        }
    }
    let graph = assign_weights(&unit_graph::<W>(n, &set), rng);
    let terminals = pick_terminals(&graph, ell, tsm, rng)?;
    MlstInstance::new(graph, terminals)
}

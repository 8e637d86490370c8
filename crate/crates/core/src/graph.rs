//! Graph, instance and solution data model.
//!
//! Levels are 1-based throughout the public API: level 1 is the bottom
//! (largest terminal set) and level `ℓ` the top. Internally the sets are
//! stored in a `Vec` where index `i - 1` holds level `i`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use petgraph::unionfind::UnionFind;

use crate::error::{MlstError, Result};
use crate::scalar::Scalar;

pub type VertexId = usize;
pub type EdgeId = usize;
pub type EdgeSet = BTreeSet<EdgeId>;

#[derive(Debug, Clone, PartialEq)]
pub struct Edge<W> {
    /// Smaller endpoint.
    pub u: VertexId,
    pub v: VertexId,
    pub cost: W,
}

impl<W> Edge<W> {
    pub fn other(&self, x: VertexId) -> VertexId {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// Undirected graph with strictly positive edge costs. Edge ids are the
/// positions in the input edge list.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph<W> {
    vertex_count: usize,
    edges: Vec<Edge<W>>,
    adjacency: Vec<Vec<(VertexId, EdgeId)>>,
    index: BTreeMap<(VertexId, VertexId), EdgeId>,
}

impl<W: Scalar> WeightedGraph<W> {
    pub fn new<I>(vertex_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (VertexId, VertexId, W)>,
    {
        if vertex_count == 0 {
            return Err(MlstError::InvalidGraph("graph needs at least one vertex".into()));
        }
        let mut out = Vec::new();
        let mut adjacency = vec![Vec::new(); vertex_count];
        let mut index = BTreeMap::new();
        for (id, (a, b, cost)) in edges.into_iter().enumerate() {
            if a >= vertex_count || b >= vertex_count {
                return Err(MlstError::InvalidGraph(format!(
                    "edge {id} ({a},{b}) has an endpoint outside 0..{vertex_count}"
                )));
            }
            if a == b {
                return Err(MlstError::InvalidGraph(format!("edge {id} is a self-loop at {a}")));
            }
            if !cost.is_positive() {
                return Err(MlstError::InvalidGraph(format!("edge {id} ({a},{b}) has non-positive cost {cost}")));
            }
            let (u, v) = (a.min(b), a.max(b));
            if index.insert((u, v), id).is_some() {
                return Err(MlstError::InvalidGraph(format!("duplicate edge ({u},{v})")));
            }
            adjacency[u].push((v, id));
            adjacency[v].push((u, id));
            out.push(Edge { u, v, cost });
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(WeightedGraph { vertex_count, edges: out, adjacency, index })
    }

    /// Same topology, new costs (indexed by edge id).
    pub fn with_costs(&self, costs: Vec<W>) -> Result<Self> {
        if costs.len() != self.edges.len() {
            return Err(MlstError::InvalidGraph(format!(
                "expected {} costs, got {}",
                self.edges.len(),
                costs.len()
            )));
        }
        WeightedGraph::new(
            self.vertex_count,
            self.edges.iter().zip(costs).map(|(e, c)| (e.u, e.v, c)),
        )
    }

    pub fn total_cost<'a>(&self, edges: impl IntoIterator<Item = &'a EdgeId>) -> W {
        edges.into_iter().fold(W::zero(), |acc, &e| acc + self.edges[e].cost.clone())
    }
}

impl<W> WeightedGraph<W> {
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge<W>] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge<W> {
        &self.edges[id]
    }

    /// Neighbours of `v` as `(neighbour, edge id)`, sorted by neighbour.
    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adjacency[v]
    }

    pub fn edge_between(&self, a: VertexId, b: VertexId) -> Option<EdgeId> {
        self.index.get(&(a.min(b), a.max(b))).copied()
    }

    pub fn is_connected(&self) -> bool {
        let mut uf = UnionFind::new(self.vertex_count);
        let mut parts = self.vertex_count;
        for e in &self.edges {
            if uf.union(e.u, e.v) {
                parts -= 1;
            }
        }
        parts == 1
    }

    /// True when every vertex of `terminals` lies in one component of the
    /// subgraph formed by `edges`. An empty or single terminal set is
    /// always connected.
    pub fn connects<'a>(&self, edges: impl IntoIterator<Item = &'a EdgeId>, terminals: &[VertexId]) -> bool {
        if terminals.len() <= 1 {
            return true;
        }
        let mut uf = UnionFind::new(self.vertex_count);
        for &e in edges {
            let edge = &self.edges[e];
            uf.union(edge.u, edge.v);
        }
        let root = uf.find(terminals[0]);
        terminals[1..].iter().all(|&t| uf.find(t) == root)
    }

    /// Vertices touched by `edges`.
    pub fn vertices_of<'a>(&self, edges: impl IntoIterator<Item = &'a EdgeId>) -> BTreeSet<VertexId> {
        let mut out = BTreeSet::new();
        for &e in edges {
            out.insert(self.edges[e].u);
            out.insert(self.edges[e].v);
        }
        out
    }

    /// Acyclic and connected on its own vertex set. The empty set counts as a tree.
    pub fn is_tree(&self, edges: &EdgeSet) -> bool {
        let verts = self.vertices_of(edges);
        if edges.is_empty() {
            return true;
        }
        if verts.len() != edges.len() + 1 {
            return false;
        }
        let mut uf = UnionFind::new(self.vertex_count);
        edges.iter().all(|&e| uf.union(self.edges[e].u, self.edges[e].v))
    }
}

/// A failed instance invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoLevels,
    EmptyLevel { level: usize },
    VertexOutOfRange { level: usize, vertex: VertexId },
    DuplicateTerminal { level: usize, vertex: VertexId },
    /// `T_level` contains `vertex`, which is missing from `T_{level-1}`.
    NotNested { level: usize, vertex: VertexId },
    Disconnected,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoLevels => write!(f, "instance has no levels"),
            Violation::EmptyLevel { level } => write!(f, "terminal set T{level} is empty"),
            Violation::VertexOutOfRange { level, vertex } => {
                write!(f, "vertex out of range: {vertex} in T{level}")
            }
            Violation::DuplicateTerminal { level, vertex } => {
                write!(f, "duplicate terminal {vertex} in T{level}")
            }
            Violation::NotNested { level, vertex } => {
                write!(f, "nesting T{level} ⊄ T{}: vertex {vertex}", level - 1)
            }
            Violation::Disconnected => write!(f, "graph not connected"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks nesting, non-emptiness, vertex range and connectivity.
/// `terminals[0]` is the bottom level.
pub fn validate_instance<W>(graph: &WeightedGraph<W>, terminals: &[Vec<VertexId>]) -> ValidationReport {
    let mut violations = Vec::new();
    if terminals.is_empty() {
        violations.push(Violation::NoLevels);
    }
    let n = graph.vertex_count();
    let mut below: Option<BTreeSet<VertexId>> = None;
    for (idx, set) in terminals.iter().enumerate() {
        let level = idx + 1;
        if set.is_empty() {
            violations.push(Violation::EmptyLevel { level });
        }
        let mut seen = BTreeSet::new();
        for &v in set {
            if v >= n {
                violations.push(Violation::VertexOutOfRange { level, vertex: v });
            }
            if !seen.insert(v) {
                violations.push(Violation::DuplicateTerminal { level, vertex: v });
            }
        }
        if let Some(lower) = &below {
            for &v in &seen {
                if !lower.contains(&v) {
                    violations.push(Violation::NotNested { level, vertex: v });
                }
            }
        }
        below = Some(seen);
    }
    if !graph.is_connected() {
        violations.push(Violation::Disconnected);
    }
    ValidationReport { violations }
}

/// Graph plus nested terminal sets `T_ℓ ⊆ … ⊆ T_1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MlstInstance<W> {
    graph: WeightedGraph<W>,
    terminals: Vec<Vec<VertexId>>,
}

impl<W: Scalar> MlstInstance<W> {
    /// `terminals[0]` is `T_1`. Sets are sorted on construction.
    pub fn new(graph: WeightedGraph<W>, terminals: Vec<Vec<VertexId>>) -> Result<Self> {
        let report = validate_instance(&graph, &terminals);
        if !report.is_ok() {
            return Err(MlstError::InvalidInstance(report.violations));
        }
        let terminals = terminals
            .into_iter()
            .map(|mut t| {
                t.sort_unstable();
                t
            })
            .collect();
        Ok(MlstInstance { graph, terminals })
    }
}

impl<W> MlstInstance<W> {
    pub fn graph(&self) -> &WeightedGraph<W> {
        &self.graph
    }

    pub fn levels(&self) -> usize {
        self.terminals.len()
    }

    /// Sorted terminal set of `level` (1-based).
    pub fn terminals(&self, level: usize) -> &[VertexId] {
        &self.terminals[level - 1]
    }

    pub fn terminal_sets(&self) -> &[Vec<VertexId>] {
        &self.terminals
    }

    /// Highest level at which `v` is a terminal, 0 if it is not in `T_1`.
    pub fn vertex_level(&self, v: VertexId) -> usize {
        self.terminals
            .iter()
            .rposition(|t| t.binary_search(&v).is_ok())
            .map_or(0, |i| i + 1)
    }
}

/// Nested edge sets `E_ℓ ⊆ … ⊆ E_1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MlstSolution {
    edge_sets: Vec<EdgeSet>,
}

impl MlstSolution {
    /// Validates nesting and spanning against `instance`.
    pub fn new<W>(instance: &MlstInstance<W>, edge_sets: Vec<EdgeSet>) -> Result<Self> {
        check_solution(instance, &edge_sets).map_err(MlstError::InvalidSolution)?;
        Ok(MlstSolution { edge_sets })
    }

    #[cfg(test)]
    pub(crate) fn from_sets_unchecked(edge_sets: Vec<EdgeSet>) -> Self {
        MlstSolution { edge_sets }
    }

    pub fn levels(&self) -> usize {
        self.edge_sets.len()
    }

    /// Edge set of `level` (1-based).
    pub fn level(&self, level: usize) -> &EdgeSet {
        &self.edge_sets[level - 1]
    }

    pub fn edge_sets(&self) -> &[EdgeSet] {
        &self.edge_sets
    }
}

fn check_solution<W>(instance: &MlstInstance<W>, sets: &[EdgeSet]) -> std::result::Result<(), String> {
    let levels = instance.levels();
    if sets.len() != levels {
        return Err(format!("expected {levels} edge sets, got {}", sets.len()));
    }
    let m = instance.graph().edge_count();
    for (idx, set) in sets.iter().enumerate() {
        if let Some(&bad) = set.iter().find(|&&e| e >= m) {
            return Err(format!("edge id {bad} out of range at level {}", idx + 1));
        }
        if idx > 0 {
            if let Some(&e) = set.iter().find(|e| !sets[idx - 1].contains(e)) {
                return Err(format!("nesting: edge {e} in E{} but not in E{}", idx + 1, idx));
            }
        }
        if !instance.graph().connects(set, instance.terminals(idx + 1)) {
            return Err(format!("E{} does not connect T{}", idx + 1, idx + 1));
        }
    }
    Ok(())
}

/// `L(e)`: highest level containing each edge, 0 when absent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeLevelMap {
    level_of: Vec<usize>,
}

impl EdgeLevelMap {
    pub fn level_of(&self, e: EdgeId) -> usize {
        self.level_of[e]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.level_of
    }
}

pub fn edge_level_map(solution: &MlstSolution, edge_count: usize) -> EdgeLevelMap {
    let mut level_of = vec![0; edge_count];
    for (idx, set) in solution.edge_sets.iter().enumerate() {
        for &e in set {
            level_of[e] = level_of[e].max(idx + 1);
        }
    }
    EdgeLevelMap { level_of }
}

/// `Σ_i c(E_i)`. Rejects solutions that are not nested or do not span.
pub fn solution_cost<W: Scalar>(instance: &MlstInstance<W>, solution: &MlstSolution) -> Result<W> {
    check_solution(instance, &solution.edge_sets).map_err(MlstError::InvalidSolution)?;
    Ok(solution
        .edge_sets
        .iter()
        .fold(W::zero(), |acc, set| acc + instance.graph().total_cost(set)))
}

/// `Σ_e L(e) c(e)`; equal to [`solution_cost`] for every nested solution.
pub fn level_weighted_cost<W: Scalar>(graph: &WeightedGraph<W>, levels: &EdgeLevelMap) -> W {
    graph
        .edges()
        .iter()
        .zip(levels.as_slice())
        .filter(|(_, &l)| l > 0)
        .fold(W::zero(), |acc, (e, &l)| acc + e.cost.clone() * W::of_usize(l))
}

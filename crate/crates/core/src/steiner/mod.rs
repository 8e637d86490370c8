//! Single-level Steiner tree subroutines and the tree surgery used to keep
//! multi-level solutions nested.

mod exact;
mod paths;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use petgraph::unionfind::UnionFind;

use crate::error::{MlstError, Result};
use crate::graph::{EdgeId, EdgeSet, VertexId, WeightedGraph};
use crate::scalar::Scalar;

pub(crate) use exact::subset_dp;
pub use paths::{metric_closure, MetricClosure};

/// Terminal-count bound for the exact subroutine.
pub const EXACT_TERMINAL_LIMIT: usize = 14;

/// Edges whose cost is treated as zero.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WeightOverlay {
    zeroed: EdgeSet,
}

impl WeightOverlay {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn zeroing(edges: impl IntoIterator<Item = EdgeId>) -> Self {
        WeightOverlay { zeroed: edges.into_iter().collect() }
    }

    pub fn zero(&mut self, edges: impl IntoIterator<Item = EdgeId>) {
        self.zeroed.extend(edges);
    }

    pub fn is_zeroed(&self, e: EdgeId) -> bool {
        self.zeroed.contains(&e)
    }

    pub fn effective_cost<W: Scalar>(&self, graph: &WeightedGraph<W>, e: EdgeId) -> W {
        if self.is_zeroed(e) {
            W::zero()
        } else {
            graph.edge(e).cost.clone()
        }
    }

    pub fn effective_costs<W: Scalar>(&self, graph: &WeightedGraph<W>) -> Vec<W> {
        (0..graph.edge_count()).map(|e| self.effective_cost(graph, e)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SteinerMode {
    /// Metric-closure minimum spanning tree (ratio 2).
    Approx2,
    Exact,
}

impl fmt::Display for SteinerMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SteinerMode::Approx2 => "approx2",
            SteinerMode::Exact => "exact",
        })
    }
}

impl FromStr for SteinerMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "approx2" => Ok(SteinerMode::Approx2),
            "exact" => Ok(SteinerMode::Exact),
            other => Err(format!("unknown Steiner mode {other:?} (expected approx2 or exact)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteinerResult<W> {
    pub edges: EdgeSet,
    /// Cost under the overlay in effect at call time.
    pub cost: W,
    pub mode: SteinerMode,
}

fn sorted_terminals<W>(graph: &WeightedGraph<W>, terminals: &[VertexId]) -> Result<Vec<VertexId>> {
    if terminals.is_empty() {
        return Err(MlstError::Precondition("terminal set is empty".into()));
    }
    let mut t = terminals.to_vec();
    t.sort_unstable();
    t.dedup();
    if let Some(&bad) = t.iter().find(|&&v| v >= graph.vertex_count()) {
        return Err(MlstError::Precondition(format!("terminal {bad} is not a vertex")));
    }
    Ok(t)
}

fn finish<W: Scalar>(
    graph: &WeightedGraph<W>,
    overlay: &WeightOverlay,
    terminals: &[VertexId],
    raw: EdgeSet,
    mode: SteinerMode,
) -> Result<SteinerResult<W>> {
    let tree = force_tree(graph, &raw, &EdgeSet::new(), overlay)?;
    let edges = prune(graph, &tree, terminals, &EdgeSet::new())?;
    let cost = edges
        .iter()
        .fold(W::zero(), |acc, &e| acc + overlay.effective_cost(graph, e));
    Ok(SteinerResult { edges, cost, mode })
}

/// Classical 2-approximation: minimum spanning tree of the metric closure,
/// expanded to witness paths, re-treed and stripped of non-terminal leaves.
pub fn steiner_2approx<W: Scalar>(
    graph: &WeightedGraph<W>,
    terminals: &[VertexId],
    overlay: &WeightOverlay,
) -> Result<SteinerResult<W>> {
    let closure = metric_closure(graph, terminals, overlay)?;
    let t = closure.terminals().len();
    let terms = closure.terminals().to_vec();

    // Prim on the dense closure; ties go to the smaller terminal index.
    let mut in_tree = vec![false; t];
    let mut best: Vec<Option<(W, usize)>> = vec![None; t];
    let mut union = EdgeSet::new();
    in_tree[0] = true;
    for j in 1..t {
        best[j] = Some((closure.distance(0, j).clone(), 0));
    }
    for _ in 1..t {
        let mut pick: Option<usize> = None;
        for j in 0..t {
            if in_tree[j] {
                continue;
            }
            if let Some((d, _)) = &best[j] {
                if pick.is_none_or(|p| *d < best[p].as_ref().unwrap().0) {
                    pick = Some(j);
                }
            }
        }
        let j = pick.ok_or(MlstError::Disconnected)?;
        let (_, from) = best[j].clone().unwrap();
        in_tree[j] = true;
        union.extend(closure.path(from, j).iter().copied());
        for k in 0..t {
            if !in_tree[k] {
                let d = closure.distance(j, k);
                if best[k].as_ref().is_none_or(|(cur, _)| *d < *cur) {
                    best[k] = Some((d.clone(), j));
                }
            }
        }
    }
    finish(graph, overlay, &terms, union, SteinerMode::Approx2)
}

/// Exact Steiner tree with the default terminal bound.
pub fn steiner_exact<W: Scalar>(
    graph: &WeightedGraph<W>,
    terminals: &[VertexId],
    overlay: &WeightOverlay,
) -> Result<SteinerResult<W>> {
    steiner_exact_with_limit(graph, terminals, overlay, EXACT_TERMINAL_LIMIT)
}

/// Exact Steiner tree. Uses the terminal-subset program when there are at
/// most `limit` terminals, otherwise enumerates Steiner-vertex subsets when
/// at most `limit` vertices are non-terminals.
pub fn steiner_exact_with_limit<W: Scalar>(
    graph: &WeightedGraph<W>,
    terminals: &[VertexId],
    overlay: &WeightOverlay,
    limit: usize,
) -> Result<SteinerResult<W>> {
    let terms = sorted_terminals(graph, terminals)?;
    let costs = overlay.effective_costs(graph);
    let non_terminals = graph.vertex_count() - terms.len();
    let raw = if terms.len() <= limit {
        let dp = subset_dp(graph, &costs, terms[0], &terms[1..], |_| 1).ok_or(MlstError::Disconnected)?;
        dp.edges.into_keys().collect()
    } else if non_terminals <= limit {
        exact::steiner_by_vertex_enumeration(graph, &costs, &terms)
            .ok_or(MlstError::Disconnected)?
            .1
    } else {
        return Err(MlstError::ExactTerminalLimit {
            terminals: terms.len(),
            steiner_candidates: non_terminals,
            limit,
        });
    };
    finish(graph, overlay, &terms, raw, SteinerMode::Exact)
}

pub fn steiner_tree<W: Scalar>(
    graph: &WeightedGraph<W>,
    terminals: &[VertexId],
    overlay: &WeightOverlay,
    mode: SteinerMode,
) -> Result<SteinerResult<W>> {
    match mode {
        SteinerMode::Approx2 => steiner_2approx(graph, terminals, overlay),
        SteinerMode::Exact => steiner_exact(graph, terminals, overlay),
    }
}

/// Minimal subtree of `tree` spanning `keep` and every endpoint of
/// `forced`, obtained by peeling unprotected leaves.
pub fn prune<W>(
    graph: &WeightedGraph<W>,
    tree: &EdgeSet,
    keep: &[VertexId],
    forced: &EdgeSet,
) -> Result<EdgeSet> {
    if !graph.is_tree(tree) {
        return Err(MlstError::Precondition("prune input is not a tree".into()));
    }
    if let Some(e) = forced.iter().find(|e| !tree.contains(e)) {
        return Err(MlstError::Precondition(format!("forced edge {e} is not in the tree")));
    }
    let verts = graph.vertices_of(tree);
    let mut protected: BTreeSet<VertexId> = keep.iter().copied().collect();
    if tree.is_empty() {
        return if protected.len() <= 1 {
            Ok(EdgeSet::new())
        } else {
            Err(MlstError::Precondition("empty tree cannot span several vertices".into()))
        };
    }
    if let Some(v) = protected.iter().find(|v| !verts.contains(v)) {
        return Err(MlstError::Precondition(format!("vertex {v} is not on the tree")));
    }
    for &e in forced {
        protected.insert(graph.edge(e).u);
        protected.insert(graph.edge(e).v);
    }

    let mut incident: BTreeMap<VertexId, BTreeSet<EdgeId>> = BTreeMap::new();
    for &e in tree {
        let edge = graph.edge(e);
        incident.entry(edge.u).or_default().insert(e);
        incident.entry(edge.v).or_default().insert(e);
    }
    let mut out = tree.clone();
    let mut queue: VecDeque<VertexId> = incident
        .iter()
        .filter(|(v, es)| es.len() == 1 && !protected.contains(v))
        .map(|(&v, _)| v)
        .collect();
    while let Some(v) = queue.pop_front() {
        let Some(&e) = incident.get(&v).and_then(|es| es.iter().next()) else {
            continue;
        };
        out.remove(&e);
        incident.get_mut(&v).unwrap().remove(&e);
        let w = graph.edge(e).other(v);
        let es = incident.get_mut(&w).unwrap();
        es.remove(&e);
        if es.len() == 1 && !protected.contains(&w) {
            queue.push_back(w);
        }
    }
    Ok(out)
}

/// Spanning forest of `edges` containing every forced edge. Cycles are
/// broken by dropping the most expensive non-forced edge (effective cost
/// under `overlay`); equal costs keep the smaller edge id.
pub fn force_tree<W: Scalar>(
    graph: &WeightedGraph<W>,
    edges: &EdgeSet,
    forced: &EdgeSet,
    overlay: &WeightOverlay,
) -> Result<EdgeSet> {
    if let Some(e) = forced.iter().find(|e| !edges.contains(e)) {
        return Err(MlstError::Precondition(format!("forced edge {e} is not in the edge set")));
    }
    let mut uf = UnionFind::new(graph.vertex_count());
    let mut out = EdgeSet::new();
    for &e in forced {
        let edge = graph.edge(e);
        if !uf.union(edge.u, edge.v) {
            return Err(MlstError::Precondition("forced edges contain a cycle".into()));
        }
        out.insert(e);
    }
    let mut rest: Vec<(W, EdgeId)> = edges
        .iter()
        .filter(|e| !forced.contains(e))
        .map(|&e| (overlay.effective_cost(graph, e), e))
        .collect();
    rest.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    for (_, e) in rest {
        let edge = graph.edge(e);
        if uf.union(edge.u, edge.v) {
            out.insert(e);
        }
    }
    Ok(out)
}

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{MlstError, Result};
use crate::graph::{EdgeId, VertexId, WeightedGraph};
use crate::scalar::{Ordered, Scalar};

use super::WeightOverlay;

pub(crate) struct ShortestPaths<W> {
    pub dist: Vec<Option<W>>,
    /// `(previous vertex, edge used)`; `None` at sources.
    pub pred: Vec<Option<(VertexId, EdgeId)>>,
}

impl<W> ShortestPaths<W> {
    /// Edges from the source tree root to `target`, root first.
    pub fn path_to(&self, target: VertexId) -> Vec<EdgeId> {
        let mut out = Vec::new();
        let mut at = target;
        while let Some((prev, e)) = self.pred[at] {
            out.push(e);
            at = prev;
        }
        out.reverse();
        out
    }
}

/// Multi-source Dijkstra over explicit per-edge costs.
///
/// `sources` carries initial potentials. On equal distances the
/// predecessor with the smaller vertex id wins, as long as the target is
/// not settled yet; a source potential is never displaced by a tie.
pub(crate) fn dijkstra<W: Scalar>(
    graph: &WeightedGraph<W>,
    costs: &[W],
    sources: impl IntoIterator<Item = (VertexId, W)>,
) -> ShortestPaths<W> {
    let n = graph.vertex_count();
    let mut dist: Vec<Option<W>> = vec![None; n];
    let mut pred = vec![None; n];
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();
    for (v, d) in sources {
        if dist[v].as_ref().is_none_or(|cur| d < *cur) {
            dist[v] = Some(d.clone());
            heap.push(Reverse((Ordered(d), v)));
        }
    }
    while let Some(Reverse((Ordered(d), u))) = heap.pop() {
        if settled[u] || dist[u].as_ref().is_some_and(|cur| *cur < d) {
            continue;
        }
        settled[u] = true;
        for &(v, e) in graph.neighbors(u) {
            if settled[v] {
                continue;
            }
            let cand = d.clone() + costs[e].clone();
            let better = match (&dist[v], &pred[v]) {
                (None, _) => true,
                (Some(cur), _) if cand < *cur => true,
                (Some(cur), Some((p, _))) => cand == *cur && u < *p,
                (Some(_), None) => false,
            };
            if better {
                let improved = dist[v].as_ref().is_none_or(|cur| cand < *cur);
                dist[v] = Some(cand.clone());
                pred[v] = Some((u, e));
                if improved {
                    heap.push(Reverse((Ordered(cand), v)));
                }
            }
        }
    }
    ShortestPaths { dist, pred }
}

/// Complete graph over a terminal set, weighted by shortest-path
/// distance, with one witness path per ordered pair.
#[derive(Debug, Clone)]
pub struct MetricClosure<W> {
    terminals: Vec<VertexId>,
    dist: Vec<Vec<W>>,
    paths: Vec<Vec<Vec<EdgeId>>>,
}

impl<W> MetricClosure<W> {
    pub fn terminals(&self) -> &[VertexId] {
        &self.terminals
    }

    /// Distance between the `i`-th and `j`-th terminal.
    pub fn distance(&self, i: usize, j: usize) -> &W {
        &self.dist[i][j]
    }

    /// Witness path from terminal `i` to terminal `j`.
    pub fn path(&self, i: usize, j: usize) -> &[EdgeId] {
        &self.paths[i][j]
    }
}

pub fn metric_closure<W: Scalar>(
    graph: &WeightedGraph<W>,
    terminals: &[VertexId],
    overlay: &WeightOverlay,
) -> Result<MetricClosure<W>> {
    if terminals.is_empty() {
        return Err(MlstError::Precondition("metric closure needs at least one terminal".into()));
    }
    let mut terms = terminals.to_vec();
    terms.sort_unstable();
    terms.dedup();
    if let Some(&bad) = terms.iter().find(|&&t| t >= graph.vertex_count()) {
        return Err(MlstError::Precondition(format!("terminal {bad} is not a vertex")));
    }
    let costs = overlay.effective_costs(graph);
    let mut dist = Vec::with_capacity(terms.len());
    let mut paths = Vec::with_capacity(terms.len());
    for &s in &terms {
        let sp = dijkstra(graph, &costs, [(s, W::zero())]);
        let mut row = Vec::with_capacity(terms.len());
        let mut prow = Vec::with_capacity(terms.len());
        for &t in &terms {
            row.push(sp.dist[t].clone().ok_or(MlstError::Disconnected)?);
            prow.push(sp.path_to(t));
        }
        dist.push(row);
        paths.push(prow);
    }
    Ok(MetricClosure { terminals: terms, dist, paths })
}

//! Exact Steiner computations.
//!
//! The terminal-subset dynamic program is written once with a per-subset
//! cost multiplier: multiplier 1 gives the classical Steiner tree, and a
//! multiplier equal to the highest terminal level below an edge gives the
//! exact multi-level optimum used by the oracle module.

use std::collections::BTreeMap;

use petgraph::unionfind::UnionFind;

use crate::graph::{EdgeId, EdgeSet, VertexId, WeightedGraph};
use crate::scalar::Scalar;

use super::paths::dijkstra;

#[derive(Clone, Copy)]
enum Back {
    Unset,
    Leaf,
    Split(usize),
    Step(VertexId, EdgeId),
}

/// Result of the subset program: optimum value and, for every edge used
/// by the optimal structure, the largest multiplier it was charged with.
pub(crate) struct SubsetDp<W> {
    pub value: W,
    pub edges: BTreeMap<EdgeId, usize>,
}

/// Minimum over trees rooted at `root` spanning `terminals` of
/// `Σ_e c(e) · multiplier(set of terminals below e)`.
///
/// Subsets are bitmasks over `terminals`. Returns `None` if some terminal
/// cannot reach `root`.
pub(crate) fn subset_dp<W: Scalar>(
    graph: &WeightedGraph<W>,
    costs: &[W],
    root: VertexId,
    terminals: &[VertexId],
    multiplier: impl Fn(usize) -> usize,
) -> Option<SubsetDp<W>> {
    let t = terminals.len();
    if t == 0 {
        return Some(SubsetDp { value: W::zero(), edges: BTreeMap::new() });
    }
    let n = graph.vertex_count();
    let full = (1usize << t) - 1;
    let mut dp: Vec<Vec<Option<W>>> = vec![Vec::new(); full + 1];
    let mut back: Vec<Vec<Back>> = vec![Vec::new(); full + 1];
    let mut scaled: BTreeMap<usize, Vec<W>> = BTreeMap::new();

    for mask in 1..=full {
        let mult = multiplier(mask);
        let step_costs = scaled.entry(mult).or_insert_with(|| {
            let k = W::of_usize(mult);
            costs.iter().map(|c| c.clone() * k.clone()).collect()
        });

        let mut pot: Vec<Option<W>> = vec![None; n];
        let mut bk = vec![Back::Unset; n];
        if mask.is_power_of_two() {
            let v = terminals[mask.trailing_zeros() as usize];
            pot[v] = Some(W::zero());
            bk[v] = Back::Leaf;
        } else {
            let low = mask & mask.wrapping_neg();
            let mut sub = (mask - 1) & mask;
            while sub > 0 {
                if sub & low != 0 {
                    let rest = mask ^ sub;
                    for v in 0..n {
                        if let (Some(a), Some(b)) = (&dp[sub][v], &dp[rest][v]) {
                            let cand = a.clone() + b.clone();
                            if pot[v].as_ref().is_none_or(|cur| cand < *cur) {
                                pot[v] = Some(cand);
                                bk[v] = Back::Split(sub);
                            }
                        }
                    }
                }
                sub = (sub - 1) & mask;
            }
        }

        let sources: Vec<_> = pot
            .iter()
            .enumerate()
            .filter_map(|(v, p)| p.clone().map(|p| (v, p)))
            .collect();
        let sp = dijkstra(graph, step_costs, sources);
        for v in 0..n {
            if let Some((u, e)) = sp.pred[v] {
                bk[v] = Back::Step(u, e);
            }
        }
        dp[mask] = sp.dist;
        back[mask] = bk;
    }

    let value = dp[full][root].clone()?;
    let mut edges: BTreeMap<EdgeId, usize> = BTreeMap::new();
    let mut stack = vec![(full, root)];
    while let Some((mask, v)) = stack.pop() {
        match back[mask][v] {
            Back::Unset | Back::Leaf => {}
            Back::Split(sub) => {
                stack.push((sub, v));
                stack.push((mask ^ sub, v));
            }
            Back::Step(u, e) => {
                let mult = multiplier(mask);
                let slot = edges.entry(e).or_insert(0);
                *slot = (*slot).max(mult);
                stack.push((mask, u));
            }
        }
    }
    Some(SubsetDp { value, edges })
}

/// Exact Steiner tree by enumerating which non-terminals join the tree:
/// the optimum is a minimum spanning tree of the subgraph induced by the
/// terminals plus its Steiner vertices.
pub(crate) fn steiner_by_vertex_enumeration<W: Scalar>(
    graph: &WeightedGraph<W>,
    costs: &[W],
    terminals: &[VertexId],
) -> Option<(W, EdgeSet)> {
    let n = graph.vertex_count();
    let mut is_terminal = vec![false; n];
    for &t in terminals {
        is_terminal[t] = true;
    }
    let others: Vec<VertexId> = (0..n).filter(|&v| !is_terminal[v]).collect();
    let mut order: Vec<EdgeId> = (0..graph.edge_count()).collect();
    order.sort_by(|&a, &b| costs[a].total_cmp(&costs[b]).then(a.cmp(&b)));

    let mut best: Option<(W, EdgeSet)> = None;
    for mask in 0usize..(1usize << others.len()) {
        let mut allowed = is_terminal.clone();
        let mut count = terminals.len();
        for (bit, &v) in others.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                allowed[v] = true;
                count += 1;
            }
        }
        let mut uf = UnionFind::new(n);
        let mut tree = EdgeSet::new();
        let mut cost = W::zero();
        for &e in &order {
            let edge = graph.edge(e);
            if allowed[edge.u] && allowed[edge.v] && uf.union(edge.u, edge.v) {
                tree.insert(e);
                cost = cost + costs[e].clone();
            }
        }
        if tree.len() + 1 != count {
            continue;
        }
        if best.as_ref().is_none_or(|(b, _)| cost < *b) {
            best = Some((cost, tree));
        }
    }
    best
}

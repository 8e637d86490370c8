//! Ground truth for small instances.
//!
//! [`oracle_steiner`] and [`oracle_mlst`] enumerate edge subsets and are
//! meant for micro instances only. [`exact_mlst`] is an exact dynamic
//! program that reaches instances with a few dozen vertices as long as
//! `T_1` stays small.

use crate::error::{MlstError, Result};
use crate::graph::{solution_cost, EdgeId, EdgeSet, MlstInstance, MlstSolution, VertexId, WeightedGraph};
use crate::scalar::Scalar;
use crate::steiner::{subset_dp, EXACT_TERMINAL_LIMIT};

pub const ORACLE_STEINER_MAX_EDGES: usize = 16;
pub const ORACLE_MLST_MAX_EDGES: usize = 10;
pub const ORACLE_MLST_MAX_LEVELS: usize = 3;

fn mask_edges(mask: usize) -> impl Iterator<Item = EdgeId> {
    (0..usize::BITS as usize).filter(move |b| mask >> b & 1 == 1)
}

fn mask_to_set(mask: usize) -> EdgeSet {
    mask_edges(mask).collect()
}

/// Lexicographic order of the sorted edge lists of two masks.
fn lex_less(a: usize, b: usize) -> bool {
    if a == b {
        return false;
    }
    // both lists agree below the lowest differing bit; whichever holds it
    // has the smaller element at that position
    let diff = a ^ b;
    let low = diff & diff.wrapping_neg();
    a & low != 0
}

/// Per-mask cost and, for each terminal set, whether the mask connects it.
struct Tables<W> {
    cost: Vec<W>,
    connects: Vec<Vec<bool>>,
}

fn tables<W: Scalar>(graph: &WeightedGraph<W>, sets: &[&[VertexId]]) -> Tables<W> {
    let m = graph.edge_count();
    let total = 1usize << m;
    let mut cost = vec![W::zero(); total];
    for mask in 1..total {
        let low = mask.trailing_zeros() as usize;
        cost[mask] = cost[mask & (mask - 1)].clone() + graph.edge(low).cost.clone();
    }
    let connects = sets
        .iter()
        .map(|t| (0..total).map(|mask| graph.connects(&mask_to_set(mask), t)).collect())
        .collect();
    Tables { cost, connects }
}

/// Minimum Steiner tree by enumerating every edge subset.
/// Among optimal subsets the lexicographically smallest edge list wins.
pub fn oracle_steiner<W: Scalar>(graph: &WeightedGraph<W>, terminals: &[VertexId]) -> Result<(W, EdgeSet)> {
    let m = graph.edge_count();
    if m > ORACLE_STEINER_MAX_EDGES {
        return Err(MlstError::guard("oracle edge count", ORACLE_STEINER_MAX_EDGES, m));
    }
    if let Some(&v) = terminals.iter().find(|&&v| v >= graph.vertex_count()) {
        return Err(MlstError::Precondition(format!("terminal {v} is not a vertex")));
    }
    let t = tables(graph, &[terminals]);
    let mut best: Option<usize> = None;
    for mask in 0..1usize << m {
        if !t.connects[0][mask] {
            continue;
        }
        let better = match best {
            None => true,
            Some(b) => t.cost[mask] < t.cost[b] || (t.cost[mask] == t.cost[b] && lex_less(mask, b)),
        };
        if better {
            best = Some(mask);
        }
    }
    let b = best.ok_or(MlstError::Disconnected)?;
    Ok((t.cost[b].clone(), mask_to_set(b)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlstOptimum<W> {
    pub cost: W,
    pub solution: MlstSolution,
    /// `OPT_i = c(E_i \ E_{i+1})`, bottom level first.
    pub per_level: Vec<W>,
    /// `MIN_i`, the optimal Steiner cost of each level on its own.
    pub level_minima: Vec<W>,
}

/// Exact MLST optimum by exhaustive search over nested edge-set families,
/// with the default guards (`|E| ≤ 10`, `ℓ ≤ 3`).
pub fn oracle_mlst<W: Scalar>(instance: &MlstInstance<W>) -> Result<MlstOptimum<W>> {
    oracle_mlst_with_limits(instance, ORACLE_MLST_MAX_EDGES, ORACLE_MLST_MAX_LEVELS)
}

/// `F_i(S) = c(S) + min { F_{i+1}(S') : S' ⊆ S connects T_{i+1} }` is
/// evaluated for every mask `S` connecting `T_i`, top level first; submask
/// enumeration visits every nested family exactly once and skips whole
/// subtrees whose top set fails to connect. Ties resolve toward the
/// lexicographically smallest `(E_1, E_2, …)`.
pub fn oracle_mlst_with_limits<W: Scalar>(
    instance: &MlstInstance<W>,
    max_edges: usize,
    max_levels: usize,
) -> Result<MlstOptimum<W>> {
    let graph = instance.graph();
    let m = graph.edge_count();
    let ell = instance.levels();
    if m > max_edges {
        return Err(MlstError::guard("oracle edge count", max_edges, m));
    }
    if ell > max_levels {
        return Err(MlstError::guard("oracle level count", max_levels, ell));
    }
    if m >= usize::BITS as usize - 1 {
        return Err(MlstError::guard("oracle edge count", usize::BITS as usize - 2, m));
    }
    let sets: Vec<&[VertexId]> = (1..=ell).map(|i| instance.terminals(i)).collect();
    let t = tables(graph, &sets);
    let total = 1usize << m;

    // value[i][mask]: best cost of levels i+1..ℓ given E_{i+1} = mask,
    // choice[i][mask]: the E_{i+2} achieving it.
    let mut value: Vec<Vec<Option<W>>> = vec![vec![None; total]; ell];
    let mut choice: Vec<Vec<usize>> = vec![vec![0; total]; ell];
    for mask in 0..total {
        if t.connects[ell - 1][mask] {
            value[ell - 1][mask] = Some(t.cost[mask].clone());
        }
    }
    for i in (0..ell - 1).rev() {
        for mask in 0..total {
            if !t.connects[i][mask] {
                continue;
            }
            let mut best: Option<(W, usize)> = None;
            let mut sub = mask;
            loop {
                if let Some(v) = &value[i + 1][sub] {
                    let better = match &best {
                        None => true,
                        Some((b, bs)) => v < b || (v == b && lex_less(sub, *bs)),
                    };
                    if better {
                        best = Some((v.clone(), sub));
                    }
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & mask;
            }
            if let Some((v, s)) = best {
                value[i][mask] = Some(t.cost[mask].clone() + v);
                choice[i][mask] = s;
            }
        }
    }

    let mut top: Option<(W, usize)> = None;
    for mask in 0..total {
        if let Some(v) = &value[0][mask] {
            let better = match &top {
                None => true,
                Some((b, bm)) => v < b || (v == b && lex_less(mask, *bm)),
            };
            if better {
                top = Some((v.clone(), mask));
            }
        }
    }
    let (cost, mut mask) = top.ok_or(MlstError::Disconnected)?;
    let mut masks = vec![mask];
    for i in 0..ell - 1 {
        mask = choice[i][mask];
        masks.push(mask);
    }
    let solution = MlstSolution::new(instance, masks.iter().map(|&m| mask_to_set(m)).collect())?;

    let per_level: Vec<W> = (0..ell)
        .map(|i| {
            let above = masks.get(i + 1).copied().unwrap_or(0);
            t.cost[masks[i] & !above].clone()
        })
        .collect();
    let level_minima: Vec<W> = (0..ell)
        .map(|i| {
            (0..total)
                .filter(|&mk| t.connects[i][mk])
                .map(|mk| t.cost[mk].clone())
                .reduce(|a, b| if b < a { b } else { a })
                .expect("the full edge set connects every level")
        })
        .collect();

    let decomposed = per_level
        .iter()
        .enumerate()
        .fold(W::zero(), |acc, (i, c)| acc + W::of_usize(i + 1) * c.clone());
    assert!(decomposed.approx_eq(&cost), "OPT differs from Σ i·OPT_i");
    let min_sum = level_minima.iter().fold(W::zero(), |a, v| a + v.clone());
    assert!(!cost.definitely_lt(&min_sum), "OPT below Σ MIN_i");

    Ok(MlstOptimum { cost, solution, per_level, level_minima })
}

/// Exact MLST optimum with the default terminal bound.
pub fn exact_mlst<W: Scalar>(instance: &MlstInstance<W>) -> Result<(W, MlstSolution)> {
    exact_mlst_with_limit(instance, EXACT_TERMINAL_LIMIT)
}

/// Exact MLST optimum by a terminal-subset dynamic program.
///
/// Some optimum has a tree `E_1` with every `E_i` equal to the minimal
/// subtree spanning `T_i`. Rooting `E_1` at a top-level terminal, an edge
/// then belongs to `E_1..E_L` exactly when `L` is the highest level among
/// the terminals below it, so the optimum is a Steiner tree where each
/// edge costs `c(e)` times that level. The subset program handles such
/// subset-dependent multipliers directly. Needs `|T_1| - 1 ≤ limit`.
pub fn exact_mlst_with_limit<W: Scalar>(instance: &MlstInstance<W>, limit: usize) -> Result<(W, MlstSolution)> {
    let ell = instance.levels();
    let root = instance.terminals(ell)[0];
    let others: Vec<VertexId> = instance.terminals(1).iter().copied().filter(|&v| v != root).collect();
    if others.len() > limit {
        return Err(MlstError::Guard {
            what: "exact MLST terminals besides the root",
            limit,
            actual: others.len(),
            hint: Some("use a heuristic with the approx2 subroutine"),
        });
    }
    let levels: Vec<usize> = others.iter().map(|&v| instance.vertex_level(v)).collect();
    let costs: Vec<W> = instance.graph().edges().iter().map(|e| e.cost.clone()).collect();
    let multiplier = |mask: usize| {
        (0..levels.len())
            .filter(|b| mask >> b & 1 == 1)
            .map(|b| levels[b])
            .max()
            .unwrap_or(0)
    };
    let dp = subset_dp(instance.graph(), &costs, root, &others, multiplier).ok_or(MlstError::Disconnected)?;

    let sets: Vec<EdgeSet> = (1..=ell)
        .map(|i| dp.edges.iter().filter(|(_, &l)| l >= i).map(|(&e, _)| e).collect())
        .collect();
    let solution = MlstSolution::new(instance, sets)?;
    let cost = solution_cost(instance, &solution)?;
    assert!(!dp.value.definitely_lt(&cost), "witness costs more than the program value");
    Ok((cost, solution))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    type R = Rational64;

    fn r(n: i64, d: i64) -> R {
        R::new(n, d)
    }

    fn cycle(k: usize, heavy: R) -> WeightedGraph<R> {
        let mut edges: Vec<(usize, usize, R)> = (0..k).map(|i| (i, i + 1, r(1, 1))).collect();
        edges.push((0, k, heavy));
        WeightedGraph::new(k + 1, edges).unwrap()
    }

    #[test]
    fn steiner_examples() {
        let tri = WeightedGraph::new(3, [(0, 1, r(7, 1)), (1, 2, r(5, 1)), (0, 2, r(5, 1))]).unwrap();
        assert_eq!(oracle_steiner(&tri, &[0, 1]).unwrap(), (r(7, 1), [0].into()));
        assert_eq!(oracle_steiner(&tri, &[2]).unwrap(), (r(0, 1), EdgeSet::new()));
        let c = cycle(4, r(7, 2));
        assert_eq!(oracle_steiner(&c, &[0, 4]).unwrap().0, r(7, 2));
    }

    #[test]
    fn steiner_witness_is_lexicographically_smallest() {
        // square with equal weights: four optimal spanning paths
        let sq = WeightedGraph::new(4, [(0, 1, r(1, 1)), (1, 2, r(1, 1)), (2, 3, r(1, 1)), (0, 3, r(1, 1))]).unwrap();
        assert_eq!(oracle_steiner(&sq, &[0, 1, 2, 3]).unwrap().1, [0, 1, 2].into());
        assert!(lex_less(0b0011, 0b0101));
        assert!(!lex_less(0b0011, 0b0111));
        assert!(lex_less(0b0111, 0b0011));
    }

    #[test]
    fn tight_family_optima() {
        let top = MlstInstance::new(cycle(4, r(7, 2)), vec![(0..5).collect(), vec![0, 4]]).unwrap();
        let opt = oracle_mlst(&top).unwrap();
        assert_eq!(opt.cost, r(8, 1));
        assert_eq!(opt.level_minima, vec![r(4, 1), r(7, 2)]);
        let bot = MlstInstance::new(cycle(4, r(3, 2)), vec![(0..5).collect(), vec![0, 4]]).unwrap();
        let opt = oracle_mlst(&bot).unwrap();
        assert_eq!(opt.cost, r(6, 1));
        assert_eq!(opt.per_level, vec![r(3, 1), r(3, 2)]);
        for inst in [&top, &bot] {
            assert_eq!(exact_mlst(inst).unwrap().0, oracle_mlst(inst).unwrap().cost);
        }
    }

    #[test]
    fn single_level_matches_steiner_oracle() {
        let c = cycle(5, r(5, 2));
        let inst = MlstInstance::new(c.clone(), vec![vec![0, 2, 5]]).unwrap();
        assert_eq!(oracle_mlst(&inst).unwrap().cost, oracle_steiner(&c, &[0, 2, 5]).unwrap().0);
    }

    #[test]
    fn guards() {
        let big = cycle(16, r(1, 1));
        assert!(oracle_steiner(&big, &[0, 1]).unwrap_err().is_guard());
        let inst = MlstInstance::new(cycle(10, r(1, 1)), vec![vec![0, 1]]).unwrap();
        assert!(oracle_mlst(&inst).unwrap_err().is_guard());
        let g = WeightedGraph::new(2, [(0, 1, r(1, 1))]).unwrap();
        let deep = MlstInstance::new(g, vec![vec![0, 1]; 4]).unwrap();
        assert!(oracle_mlst(&deep).unwrap_err().is_guard());
        assert_eq!(oracle_mlst_with_limits(&deep, 10, 4).unwrap().cost, r(4, 1));
    }
}

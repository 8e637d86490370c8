//! Multi-level heuristics built from a single-level Steiner subroutine.
//!
//! All of them are instances of the composite heuristic on a level subset
//! `Q = {i_1 = 1 < i_2 < … < i_m}`: Steiner trees are computed at the levels
//! of `Q` from the top down, each one in a graph where the edges of the
//! trees above it cost nothing, and the remaining levels are filled by
//! pruning.

use std::fmt;
use std::str::FromStr;

use crate::error::{MlstError, Result};
use crate::graph::{solution_cost, EdgeSet, MlstInstance, MlstSolution};
use crate::ratio::pricing_best_q;
use crate::scalar::Scalar;
use crate::steiner::{force_tree, prune, steiner_tree, SteinerMode, WeightOverlay};

/// Largest level count accepted by [`composite_full`] by default.
pub const COMPOSITE_FULL_LIMIT: usize = 16;

/// Level subset `Q ⊆ {1..ℓ}` with `1 ∈ Q`, kept sorted.
///
/// The derived order is lexicographic on the sorted levels, so `{1,2}`
/// comes before `{1,2,3}`, which comes before `{1,3}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LevelSubset {
    levels: Vec<usize>,
}

impl LevelSubset {
    pub fn new(mut levels: Vec<usize>, ell: usize) -> Result<Self> {
        levels.sort_unstable();
        if levels.first() != Some(&1) {
            return Err(MlstError::InvalidSubset(format!("{levels:?} does not contain level 1")));
        }
        if levels.windows(2).any(|w| w[0] == w[1]) {
            return Err(MlstError::InvalidSubset(format!("{levels:?} repeats a level")));
        }
        if *levels.last().unwrap() > ell {
            return Err(MlstError::InvalidSubset(format!("{levels:?} exceeds level count {ell}")));
        }
        Ok(LevelSubset { levels })
    }

    /// `{1, …, ℓ}`, the top-down heuristic.
    pub fn full(ell: usize) -> Self {
        LevelSubset { levels: (1..=ell.max(1)).collect() }
    }

    /// `{1}`, the bottom-up heuristic.
    pub fn bottom() -> Self {
        LevelSubset { levels: vec![1] }
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, level: usize) -> bool {
        self.levels.binary_search(&level).is_ok()
    }

    pub fn max_level(&self) -> usize {
        *self.levels.last().unwrap()
    }

    /// Subset for row `r` of the ratio matrix: bit `j-2` of `r` selects
    /// level `j`. Rows run `{1}, {1,2}, {1,3}, {1,2,3}, {1,4}, …`.
    pub fn from_row_index(row: usize, ell: usize) -> Result<Self> {
        if ell == 0 || row >> (ell - 1) != 0 {
            return Err(MlstError::InvalidSubset(format!("row {row} out of range for {ell} levels")));
        }
        let mut levels = vec![1];
        levels.extend((0..ell - 1).filter(|b| row >> b & 1 == 1).map(|b| b + 2));
        Ok(LevelSubset { levels })
    }

    pub fn row_index(&self) -> usize {
        self.levels[1..].iter().fold(0, |acc, &j| acc | 1 << (j - 2))
    }

    /// All `2^(ℓ-1)` subsets in row order.
    pub fn all(ell: usize) -> impl Iterator<Item = LevelSubset> {
        let rows = if ell == 0 { 0 } else { 1usize << (ell - 1) };
        (0..rows).map(move |r| LevelSubset::from_row_index(r, ell).unwrap())
    }

    /// Coefficient of `MIN_i` in the composite bound: `i_{k+1} - 1` at
    /// column `i_k` (with `i_{m+1} = ℓ+1`), zero elsewhere.
    pub fn coefficients(&self, ell: usize) -> Vec<usize> {
        let mut out = vec![0; ell];
        for (k, &i) in self.levels.iter().enumerate() {
            let next = self.levels.get(k + 1).copied().unwrap_or(ell + 1);
            out[i - 1] = next - 1;
        }
        out
    }
}

impl fmt::Display for LevelSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.levels.iter().map(|l| l.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl FromStr for LevelSubset {
    type Err = MlstError;

    /// Accepts `1,3,4` or `{1,3,4}`. The level bound is checked later.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('{').trim_end_matches('}');
        let levels = inner
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| MlstError::InvalidSubset(format!("bad level {p:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        LevelSubset::new(levels, usize::MAX)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicRun<W> {
    pub solution: MlstSolution,
    pub cost: W,
    pub stp_calls: usize,
    pub subset_used: Option<LevelSubset>,
    pub subroutine_mode: SteinerMode,
    /// Per-level Steiner costs computed by [`guaranteed_composite`].
    pub min_costs: Option<Vec<W>>,
}

/// Composite heuristic on a fixed level subset; `|Q|` Steiner calls.
pub fn composite_on_q<W: Scalar>(
    instance: &MlstInstance<W>,
    q: &LevelSubset,
    mode: SteinerMode,
) -> Result<HeuristicRun<W>> {
    let ell = instance.levels();
    if q.max_level() > ell {
        return Err(MlstError::InvalidSubset(format!("{q} exceeds level count {ell}")));
    }
    let graph = instance.graph();
    let mut sets: Vec<EdgeSet> = vec![EdgeSet::new(); ell];
    let mut overlay = WeightOverlay::new();
    let mut above: Option<EdgeSet> = None;
    let mut upper = ell + 1;
    let mut calls = 0;

    for &i in q.levels().iter().rev() {
        let st = steiner_tree(graph, instance.terminals(i), &overlay, mode)?;
        calls += 1;
        let tree = match &above {
            None => st.edges,
            Some(prev) => {
                let union: EdgeSet = st.edges.union(prev).copied().collect();
                force_tree(graph, &union, prev, &overlay)?
            }
        };
        let forced = above.clone().unwrap_or_default();
        for j in i + 1..upper {
            sets[j - 1] = prune(graph, &tree, instance.terminals(j), &forced)?;
        }
        overlay.zero(tree.iter().copied());
        sets[i - 1] = tree.clone();
        above = Some(tree);
        upper = i;
    }

    let solution = MlstSolution::new(instance, sets)?;
    let cost = solution_cost(instance, &solution)?;
    Ok(HeuristicRun {
        solution,
        cost,
        stp_calls: calls,
        subset_used: Some(q.clone()),
        subroutine_mode: mode,
        min_costs: None,
    })
}

/// Steiner tree on `T_1`, higher levels by pruning. One Steiner call.
pub fn bottom_up<W: Scalar>(instance: &MlstInstance<W>, mode: SteinerMode) -> Result<HeuristicRun<W>> {
    composite_on_q(instance, &LevelSubset::bottom(), mode)
}

/// Steiner trees from the top level down, reusing chosen edges for free.
/// `ℓ` Steiner calls.
pub fn top_down<W: Scalar>(instance: &MlstInstance<W>, mode: SteinerMode) -> Result<HeuristicRun<W>> {
    composite_on_q(instance, &LevelSubset::full(instance.levels()), mode)
}

/// Best composite run over all `2^(ℓ-1)` subsets, with the default bound.
pub fn composite_full<W: Scalar>(instance: &MlstInstance<W>, mode: SteinerMode) -> Result<HeuristicRun<W>> {
    composite_full_with_limit(instance, mode, COMPOSITE_FULL_LIMIT)
}

/// Ties are resolved toward the lexicographically smallest subset.
/// `stp_calls` counts every call made across the whole enumeration.
pub fn composite_full_with_limit<W: Scalar>(
    instance: &MlstInstance<W>,
    mode: SteinerMode,
    limit: usize,
) -> Result<HeuristicRun<W>> {
    let ell = instance.levels();
    if ell > limit {
        return Err(MlstError::Guard {
            what: "composite over all level subsets",
            limit,
            actual: ell,
            hint: Some("use the guaranteed composite (cmps) instead"),
        });
    }
    let mut best: Option<HeuristicRun<W>> = None;
    let mut calls = 0;
    for q in LevelSubset::all(ell) {
        let run = composite_on_q(instance, &q, mode)?;
        calls += run.stp_calls;
        let better = match &best {
            None => true,
            Some(b) => match run.cost.total_cmp(&b.cost) {
                std::cmp::Ordering::Less => true,
                std::cmp::Ordering::Equal => run.subset_used < b.subset_used,
                std::cmp::Ordering::Greater => false,
            },
        };
        if better {
            best = Some(run);
        }
    }
    let mut best = best.expect("at least one level subset");
    best.stp_calls = calls;
    Ok(best)
}

/// Computes every `MIN_i`, picks `Q*` by pricing on that vector and runs
/// the composite heuristic on it: `ℓ + |Q*| ≤ 2ℓ` Steiner calls.
pub fn guaranteed_composite<W: Scalar>(
    instance: &MlstInstance<W>,
    mode: SteinerMode,
) -> Result<HeuristicRun<W>> {
    let ell = instance.levels();
    let overlay = WeightOverlay::new();
    let mut mins = Vec::with_capacity(ell);
    for i in 1..=ell {
        mins.push(steiner_tree(instance.graph(), instance.terminals(i), &overlay, mode)?.cost);
    }
    // A level with a single terminal has MIN_i = 0, which pricing handles
    // fine even though the public selector insists on positive entries.
    let (q, _) = pricing_best_q(&mins)?;
    let mut run = composite_on_q(instance, &q, mode)?;
    run.stp_calls += ell;
    run.min_costs = Some(mins);
    Ok(run)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::WeightedGraph;
    use num_rational::Rational64;

    type R = Rational64;

    fn r(n: i64, d: i64) -> R {
        R::new(n, d)
    }

    /// 5-cycle with unit edges and a chord-like closing edge (0,4).
    fn cycle_instance(heavy: R) -> MlstInstance<R> {
        let one = r(1, 1);
        let g = WeightedGraph::new(
            5,
            [(0, 1, one), (1, 2, one), (2, 3, one), (3, 4, one), (0, 4, heavy)],
        )
        .unwrap();
        MlstInstance::new(g, vec![vec![0, 1, 2, 3, 4], vec![0, 4]]).unwrap()
    }

    #[test]
    fn subset_rows_follow_matrix_order() {
        let rows: Vec<String> = LevelSubset::all(3).map(|q| q.to_string()).collect();
        assert_eq!(rows, ["{1}", "{1,2}", "{1,3}", "{1,2,3}"]);
        for q in LevelSubset::all(6) {
            assert_eq!(LevelSubset::from_row_index(q.row_index(), 6).unwrap(), q);
        }
        assert!(LevelSubset::from_row_index(4, 3).is_err());
    }

    #[test]
    fn subset_validation_and_parsing() {
        assert!(LevelSubset::new(vec![2, 3], 3).is_err());
        assert!(LevelSubset::new(vec![1, 4], 3).is_err());
        assert!(LevelSubset::new(vec![1, 2, 2], 3).is_err());
        let q: LevelSubset = "{1,3,4}".parse().unwrap();
        assert_eq!(q.levels(), &[1, 3, 4]);
        assert_eq!(q.coefficients(5), vec![2, 0, 3, 5, 0]);
        assert_eq!("3,1".parse::<LevelSubset>().unwrap().levels(), &[1, 3]);
    }

    #[test]
    fn lexicographic_order_puts_prefix_first() {
        let a = LevelSubset::new(vec![1, 2], 3).unwrap();
        let b = LevelSubset::new(vec![1, 2, 3], 3).unwrap();
        let c = LevelSubset::new(vec![1, 3], 3).unwrap();
        assert!(LevelSubset::bottom() < a && a < b && b < c);
    }

    #[test]
    fn top_down_on_heavy_closing_edge() {
        let inst = cycle_instance(r(7, 2));
        let run = top_down(&inst, SteinerMode::Exact).unwrap();
        assert_eq!(run.cost, r(10, 1));
        assert_eq!(run.stp_calls, 2);
        let bu = bottom_up(&inst, SteinerMode::Exact).unwrap();
        assert_eq!(bu.cost, r(8, 1));
        assert_eq!(bu.stp_calls, 1);
        let cmp = composite_full(&inst, SteinerMode::Exact).unwrap();
        assert_eq!(cmp.cost, r(8, 1));
        assert_eq!(cmp.subset_used, Some(LevelSubset::bottom()));
        assert_eq!(cmp.stp_calls, 3);
    }

    #[test]
    fn bottom_up_on_light_closing_edge() {
        let inst = cycle_instance(r(3, 2));
        let bu = bottom_up(&inst, SteinerMode::Exact).unwrap();
        assert_eq!(bu.cost, r(8, 1));
        let td = top_down(&inst, SteinerMode::Exact).unwrap();
        assert_eq!(td.cost, r(6, 1));
    }

    #[test]
    fn equal_levels_repeat_one_tree() {
        let one = r(1, 1);
        let g = WeightedGraph::new(4, [(0, 1, one), (1, 2, r(2, 1)), (2, 3, one), (0, 3, r(5, 1))]).unwrap();
        let inst = MlstInstance::new(g, vec![vec![0, 2, 3]; 3]).unwrap();
        let td = top_down(&inst, SteinerMode::Exact).unwrap();
        assert_eq!(td.cost, r(12, 1));
        for i in 1..=3 {
            assert_eq!(td.solution.level(i), td.solution.level(3));
        }
    }

    #[test]
    fn single_level_is_plain_steiner() {
        let inst = {
            let g = WeightedGraph::new(3, [(0, 1, r(7, 1)), (1, 2, r(5, 1)), (0, 2, r(5, 1))]).unwrap();
            MlstInstance::new(g, vec![vec![0, 1]]).unwrap()
        };
        for run in [
            bottom_up(&inst, SteinerMode::Exact).unwrap(),
            top_down(&inst, SteinerMode::Exact).unwrap(),
        ] {
            assert_eq!(run.cost, r(7, 1));
        }
        let g = guaranteed_composite(&inst, SteinerMode::Exact).unwrap();
        assert_eq!(g.stp_calls, 2);
        assert_eq!(g.subset_used, Some(LevelSubset::bottom()));
    }

    #[test]
    fn guaranteed_composite_counts_calls() {
        let inst = cycle_instance(r(7, 2));
        let run = guaranteed_composite(&inst, SteinerMode::Exact).unwrap();
        let q = run.subset_used.clone().unwrap();
        assert_eq!(run.stp_calls, 2 + q.len());
        // MIN = (4, 3.5): 2·4 = 8 against 4 + 2·3.5 = 11
        assert_eq!(q, LevelSubset::bottom());
        assert_eq!(run.min_costs, Some(vec![r(4, 1), r(7, 2)]));
    }

    #[test]
    fn composite_full_guard() {
        let g = WeightedGraph::new(2, [(0, 1, r(1, 1))]).unwrap();
        let inst = MlstInstance::new(g, vec![vec![0, 1]; 3]).unwrap();
        let err = composite_full_with_limit(&inst, SteinerMode::Exact, 2).unwrap_err();
        assert!(err.is_guard());
        assert!(err.to_string().contains("cmps"));
    }
}

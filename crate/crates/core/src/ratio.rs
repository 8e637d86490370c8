//! Approximation ratio of the composite heuristic.
//!
//! For a level subset `Q = {i_1 < … < i_m}` the composite heuristic costs
//! at most `Σ_k (i_{k+1} - 1) · MIN_{i_k}` (with `i_{m+1} = ℓ+1`), and the
//! best subset is at least as good as the worst case of
//!
//! ```text
//! max t  s.t.  t ≤ Σ_k (i_{k+1} - 1) y_{i_k}   for every Q,
//!              y_1 ≥ y_2 ≥ … ≥ y_ℓ ≥ 0,  Σ y_i = 1.
//! ```
//!
//! Its optimum is `t_ℓ`. The LP has `2^(ℓ-1)` rows, so beyond small `ℓ`
//! it is solved by column generation: the most violated row for a given
//! `y` is a shortest path in a DAG on `1..ℓ+1`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{MlstError, Result};
use crate::heuristics::LevelSubset;
use crate::lp::{solve_lp, ColumnLp, LinearProgram, LpOutcome, PivotRule, Relation};
use crate::scalar::Scalar;

/// Largest `ℓ` for which all `2^(ℓ-1)` rows are materialized.
pub const FULL_MATRIX_LIMIT: usize = 16;

/// Closed-form ratio of the composite heuristic restricted to `q`:
/// `max_{m'} Σ_{k ≤ m'} (i_{k+1} - 1) / i_{m'}`.
pub fn t_of_q<W: Scalar>(q: &LevelSubset, ell: usize) -> Result<W> {
    if q.max_level() > ell {
        return Err(MlstError::InvalidSubset(format!("{q} exceeds level count {ell}")));
    }
    let coeffs = q.coefficients(ell);
    let mut prefix = 0usize;
    let mut best: Option<W> = None;
    for &i in q.levels() {
        prefix += coeffs[i - 1];
        let v = W::of_usize(prefix) / W::of_usize(i);
        if best.as_ref().is_none_or(|b| v > *b) {
            best = Some(v);
        }
    }
    Ok(best.expect("subset is never empty"))
}

/// The `2^(ℓ-1) × ℓ` matrix whose rows are the subset coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintMatrix {
    ell: usize,
    rows: Vec<Vec<usize>>,
}

impl ConstraintMatrix {
    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    /// Subset read off the nonzero pattern of row `r`.
    pub fn row_subset(&self, r: usize) -> Result<LevelSubset> {
        let levels = self.rows[r]
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(j, _)| j + 1)
            .collect();
        LevelSubset::new(levels, self.ell)
    }
}

/// Builds `M_ℓ` by the block recursion
///
/// ```text
/// M_ℓ = [ P_{ℓ-1} + M_{ℓ-1}   0 ]     P_ℓ = [ P_{ℓ-1}  0 ]
///       [ M_{ℓ-1}             ℓ ]           [ 0        1 ]
/// ```
///
/// from `M_1 = P_1 = [1]`. Row `r` belongs to
/// [`LevelSubset::from_row_index`]`(r, ℓ)`.
pub fn build_matrix(ell: usize) -> Result<ConstraintMatrix> {
    if ell == 0 || ell > FULL_MATRIX_LIMIT {
        return Err(MlstError::Guard {
            what: "constraint matrix levels",
            limit: FULL_MATRIX_LIMIT,
            actual: ell,
            hint: if ell == 0 { Some("need at least one level") } else { Some("use column generation") },
        });
    }
    let mut m: Vec<Vec<usize>> = vec![vec![1]];
    let mut p: Vec<Vec<usize>> = vec![vec![1]];
    for l in 2..=ell {
        let mut m_next = Vec::with_capacity(2 * m.len());
        let mut p_next = Vec::with_capacity(2 * p.len());
        for (mr, pr) in m.iter().zip(&p) {
            let mut row: Vec<usize> = mr.iter().zip(pr).map(|(a, b)| a + b).collect();
            row.push(0);
            m_next.push(row);
            let mut prow = pr.clone();
            prow.push(0);
            p_next.push(prow);
        }
        for mr in &m {
            let mut row = mr.clone();
            row.push(l);
            m_next.push(row);
            let mut prow = vec![0; l - 1];
            prow.push(1);
            p_next.push(prow);
        }
        m = m_next;
        p = p_next;
    }
    Ok(ConstraintMatrix { ell, rows: m })
}

/// Subset minimizing `Σ_k (i_{k+1} - 1) y_{i_k}` and that minimum.
///
/// Shortest path from node 1 to node `ℓ+1` in the DAG with arcs `i → j`
/// (`i < j`) of weight `(j - 1) y_i`; the visited nodes below `ℓ+1` form
/// the subset. Ties go to the lexicographically smallest subset.
pub fn pricing_best_q<W: Scalar>(y: &[W]) -> Result<(LevelSubset, W)> {
    let ell = y.len();
    if ell == 0 {
        return Err(MlstError::Precondition("pricing needs at least one level".into()));
    }
    if let Some(i) = y.iter().position(|v| *v < -W::epsilon()) {
        return Err(MlstError::Precondition(format!("y[{}] is negative", i + 1)));
    }
    // best[i]: cheapest completion from node i; next[i]: its first step.
    let mut best: Vec<W> = vec![W::zero(); ell + 2];
    let mut next = vec![ell + 1; ell + 2];
    for i in (1..=ell).rev() {
        let yi = &y[i - 1];
        // Stopping at i (a prefix) is the smallest continuation, then
        // smaller successors.
        let order = std::iter::once(ell + 1).chain(i + 1..=ell);
        let mut pick: Option<(W, usize)> = None;
        for j in order {
            let cand = W::of_usize(j - 1) * yi.clone() + best[j].clone();
            if pick.as_ref().is_none_or(|(b, _)| cand.definitely_lt(b)) {
                pick = Some((cand, j));
            }
        }
        let (v, j) = pick.unwrap();
        best[i] = v;
        next[i] = j;
    }
    let mut levels = vec![1];
    let mut at = next[1];
    while at <= ell {
        levels.push(at);
        at = next[at];
    }
    Ok((LevelSubset::new(levels, ell)?, best[1].clone()))
}

/// Exhaustive counterpart of [`pricing_best_q`], for cross-checks.
pub fn pricing_exhaustive<W: Scalar>(y: &[W]) -> Result<(LevelSubset, W)> {
    let ell = y.len();
    if ell == 0 || ell > 24 {
        return Err(MlstError::guard("exhaustive pricing levels", 24, ell));
    }
    let mut best: Option<(W, LevelSubset)> = None;
    for q in LevelSubset::all(ell) {
        let v = row_value(&q.coefficients(ell), y);
        let better = match &best {
            None => true,
            Some((b, bq)) => v.definitely_lt(b) || (!b.definitely_lt(&v) && q < *bq),
        };
        if better {
            best = Some((v, q));
        }
    }
    let (v, q) = best.unwrap();
    Ok((q, v))
}

fn row_value<W: Scalar>(coeffs: &[usize], y: &[W]) -> W {
    coeffs
        .iter()
        .zip(y)
        .filter(|(c, _)| **c != 0)
        .fold(W::zero(), |acc, (&c, v)| acc + W::of_usize(c) * v.clone())
}

/// Subset for the guaranteed composite heuristic: the row minimizing
/// `Σ_k (i_{k+1} - 1) MIN_{i_k}`, found by pricing.
pub fn select_q_star<W: Scalar>(min_costs: &[W]) -> Result<LevelSubset> {
    if let Some(i) = min_costs.iter().position(|v| !(*v > W::zero())) {
        return Err(MlstError::Precondition(format!("MIN_{} is not positive", i + 1)));
    }
    pricing_best_q(min_costs).map(|(q, _)| q)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatioMethod {
    Full,
    ColGen,
}

impl fmt::Display for RatioMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RatioMethod::Full => "full",
            RatioMethod::ColGen => "colgen",
        })
    }
}

impl FromStr for RatioMethod {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "full" => Ok(RatioMethod::Full),
            "colgen" => Ok(RatioMethod::ColGen),
            other => Err(format!("unknown method {other:?} (expected full or colgen)")),
        }
    }
}

/// One column-generation round: the priced subset, its value at the
/// current `y`, and the master optimum after adding it (if it was added).
#[derive(Debug, Clone, PartialEq)]
pub struct ColGenStep<W> {
    pub subset: LevelSubset,
    pub pricing_value: W,
    pub t_after: Option<W>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioLpReport<W> {
    pub ell: usize,
    pub t_value: W,
    pub y: Vec<W>,
    pub pool: Vec<LevelSubset>,
    /// Number of master LP solves.
    pub iterations: usize,
    pub method: RatioMethod,
    pub trace: Vec<ColGenStep<W>>,
}

impl<W: Scalar> RatioLpReport<W> {
    /// Checks the report invariants; returns the first problem found.
    pub fn check(&self, tol: &W) -> std::result::Result<(), String> {
        if self.y.len() != self.ell {
            return Err("y has the wrong length".into());
        }
        if self.y.iter().any(|v| *v < -tol.clone()) {
            return Err("y has a negative entry".into());
        }
        if self.y.windows(2).any(|w| w[1].clone() - w[0].clone() > *tol) {
            return Err("y is not decreasing".into());
        }
        let sum = self.y.iter().fold(W::zero(), |a, v| a + v.clone());
        if (sum - W::one()).abs() > *tol {
            return Err("y does not sum to 1".into());
        }
        let mut min_row: Option<W> = None;
        for q in &self.pool {
            let v = row_value(&q.coefficients(self.ell), &self.y);
            if self.t_value.clone() - v.clone() > *tol {
                return Err(format!("row {q} is violated"));
            }
            if min_row.as_ref().is_none_or(|m| v < *m) {
                min_row = Some(v);
            }
        }
        match min_row {
            Some(m) if (m.clone() - self.t_value.clone()).abs() <= *tol => Ok(()),
            _ => Err("t is not attained by any pool row".into()),
        }
    }
}

/// Master LP over `z_k = y_k - y_{k+1} ≥ 0` (`y_{ℓ+1} = 0`), so that
/// `y_i = Σ_{k≥i} z_k` and `Σ_i y_i = Σ_k k z_k`. Fixing `t = 1` and
/// dropping the normalization gives `min Σ k z_k` s.t. `P z ≥ 1`, with
/// `P` the prefix sums of the row coefficients; its optimum is `1 / t_ℓ`.
/// That LP is solved through its dual `max Σ λ` s.t. `Pᵀ λ ≤ (1, …, ℓ)`,
/// which is feasible at `λ = 0` with a positive right-hand side: adding a
/// subset to the pool adds a column, so the previous basis stays feasible
/// and `z` is read off the dual multipliers.
struct Master<W> {
    ell: usize,
    lp: ColumnLp<W>,
}

impl<W: Scalar> Master<W> {
    fn new(ell: usize) -> Result<Self> {
        let rhs = (1..=ell).map(W::of_usize).collect();
        Ok(Master { ell, lp: ColumnLp::new(rhs, PivotRule::Dantzig)? })
    }

    fn add(&mut self, q: &LevelSubset) -> Result<()> {
        let mut acc = 0;
        let col = q
            .coefficients(self.ell)
            .into_iter()
            .map(|c| {
                acc += c;
                W::of_usize(acc)
            })
            .collect();
        self.lp.add_column(col, W::one())
    }

    /// `(t, y)` for the current pool.
    fn solve(&mut self) -> Result<(W, Vec<W>)> {
        if !self.lp.solve()? {
            return Err(MlstError::Lp("master dual is unbounded".into()));
        }
        let value = self.lp.value().clone();
        if !value.is_positive_beyond_eps() {
            return Err(MlstError::Lp("master dual has no positive optimum".into()));
        }
        let y = y_from_z(&self.lp.duals(), &value);
        Ok((W::one() / value, y))
    }
}

/// One-shot solve of the same dual, for a fixed pool.
fn solve_master<W: Scalar>(ell: usize, pool: &[LevelSubset]) -> Result<(W, Vec<W>)> {
    let prefix: Vec<Vec<usize>> = pool
        .iter()
        .map(|q| {
            let mut acc = 0;
            q.coefficients(ell)
                .into_iter()
                .map(|c| {
                    acc += c;
                    acc
                })
                .collect()
        })
        .collect();
    let mut lp = LinearProgram::new(vec![W::one(); pool.len()]);
    lp.set_pivot_rule(PivotRule::Dantzig);
    for k in 0..ell {
        let row = prefix.iter().map(|p| W::of_usize(p[k])).collect();
        lp.add_row(row, Relation::Le, W::of_usize(k + 1))?;
    }
    match solve_lp(&lp)? {
        LpOutcome::Optimal { value, duals, .. } if value.is_positive_beyond_eps() => {
            Ok((W::one() / value.clone(), y_from_z(&duals, &value)))
        }
        other => Err(MlstError::Lp(format!("master LP ended as {other:?}"))),
    }
}

/// `y_i = Σ_{k≥i} z_k / v`, ignoring round-off negatives in `z`.
fn y_from_z<W: Scalar>(z: &[W], v: &W) -> Vec<W> {
    let mut y = vec![W::zero(); z.len()];
    let mut acc = W::zero();
    for k in (0..z.len()).rev() {
        if z[k] > W::zero() {
            acc = acc + z[k].clone();
        }
        y[k] = acc.clone() / v.clone();
    }
    y
}

/// `t_ℓ` in double precision.
pub fn compute_ratio(ell: usize, method: RatioMethod) -> Result<RatioLpReport<f64>> {
    compute_ratio_with(ell, method)
}

pub fn compute_ratio_with<W: Scalar>(ell: usize, method: RatioMethod) -> Result<RatioLpReport<W>> {
    if ell == 0 {
        return Err(MlstError::Precondition("need at least one level".into()));
    }
    match method {
        RatioMethod::Full => {
            let matrix = build_matrix(ell)?;
            let pool: Vec<LevelSubset> = (0..matrix.rows().len())
                .map(|r| LevelSubset::from_row_index(r, ell))
                .collect::<Result<_>>()?;
            let (t, y) = solve_master(ell, &pool)?;
            Ok(RatioLpReport { ell, t_value: t, y, pool, iterations: 1, method, trace: Vec::new() })
        }
        RatioMethod::ColGen => {
            let mut y: Vec<W> = (1..=ell).map(|i| W::one() / W::of_usize(i)).collect();
            let mut t: Option<W> = None;
            let mut pool: Vec<LevelSubset> = Vec::new();
            let mut master = Master::<W>::new(ell)?;
            let mut seen: BTreeSet<LevelSubset> = BTreeSet::new();
            let mut trace = Vec::new();
            loop {
                let (q, value) = pricing_best_q(&y)?;
                let settled = seen.contains(&q) || t.as_ref().is_some_and(|t| !value.definitely_lt(t));
                if settled {
                    trace.push(ColGenStep { subset: q, pricing_value: value, t_after: None });
                    break;
                }
                seen.insert(q.clone());
                pool.push(q.clone());
                master.add(&q)?;
                let (tv, yv) = master.solve()?;
                trace.push(ColGenStep { subset: q, pricing_value: value, t_after: Some(tv.clone()) });
                t = Some(tv);
                y = yv;
            }
            let iterations = pool.len();
            Ok(RatioLpReport { ell, t_value: t.unwrap(), y, pool, iterations, method, trace })
        }
    }
}

/// `ell,t_ell` lines for every requested level count.
pub fn ratio_table_csv(ells: impl IntoIterator<Item = usize>, method: RatioMethod) -> Result<String> {
    let mut out = String::from("ell,t_ell\n");
    for ell in ells {
        let report = compute_ratio(ell, method)?;
        out.push_str(&format!("{ell},{:.6}\n", report.t_value));
    }
    Ok(out)
}

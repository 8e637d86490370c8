//! Dense two-phase primal simplex in dictionary form.
//!
//! Every row is turned into a `≤` row (equalities become two rows, `≥`
//! rows are negated), variables are shifted to a zero lower bound or split
//! when free, and finite upper bounds become extra rows. The dictionary
//! only stores nonbasic columns, so slack columns never materialize and
//! LPs with tens of thousands of rows and a handful of columns stay cheap.
//! Pivoting follows Bland's rule, which makes the result deterministic and
//! guarantees termination in exact arithmetic.

use crate::error::{MlstError, Result};
use crate::scalar::Scalar;

/// Entering-variable rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PivotRule {
    /// Smallest-index improving variable; never cycles.
    #[default]
    Bland,
    /// Largest reduced cost, switching to Bland's rule after a run of
    /// degenerate pivots and back after the next improving one. Far fewer
    /// pivots on large, highly degenerate LPs.
    Dantzig,
}

/// Consecutive degenerate pivots tolerated before Bland's rule takes over.
const DEGENERATE_RUN: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint<S> {
    pub coeffs: Vec<S>,
    pub relation: Relation,
    pub rhs: S,
}

/// `max c·x` subject to linear rows and per-variable bounds.
/// Variables default to `0 ≤ x_j < ∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram<S> {
    objective: Vec<S>,
    constraints: Vec<Constraint<S>>,
    lower: Vec<Option<S>>,
    upper: Vec<Option<S>>,
    max_pivots: Option<usize>,
    rule: PivotRule,
}

/// `duals` holds one multiplier per constraint, in insertion order, with
/// the sign convention of the Lagrangian `c·x - Σ_r λ_r (a_r·x - b_r)`:
/// non-negative on `≤` rows, non-positive on `≥` rows.
#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome<S> {
    Optimal { value: S, point: Vec<S>, duals: Vec<S> },
    Infeasible,
    Unbounded,
}

impl<S> LpOutcome<S> {
    pub fn value(&self) -> Option<&S> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn point(&self) -> Option<&[S]> {
        match self {
            LpOutcome::Optimal { point, .. } => Some(point),
            _ => None,
        }
    }

    pub fn duals(&self) -> Option<&[S]> {
        match self {
            LpOutcome::Optimal { duals, .. } => Some(duals),
            _ => None,
        }
    }
}

impl<S: Scalar> LinearProgram<S> {
    pub fn new(objective: Vec<S>) -> Self {
        let n = objective.len();
        LinearProgram {
            objective,
            constraints: Vec::new(),
            lower: vec![Some(S::zero()); n],
            upper: vec![None; n],
            max_pivots: None,
            rule: PivotRule::Bland,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn constraints(&self) -> &[Constraint<S>] {
        &self.constraints
    }

    pub fn add_row(&mut self, coeffs: Vec<S>, relation: Relation, rhs: S) -> Result<()> {
        if coeffs.len() != self.num_vars() {
            return Err(MlstError::Lp(format!(
                "row has {} coefficients, LP has {} variables",
                coeffs.len(),
                self.num_vars()
            )));
        }
        self.constraints.push(Constraint { coeffs, relation, rhs });
        Ok(())
    }

    /// `None` makes the variable unbounded below.
    pub fn set_lower(&mut self, var: usize, bound: Option<S>) {
        self.lower[var] = bound;
    }

    pub fn set_upper(&mut self, var: usize, bound: Option<S>) {
        self.upper[var] = bound;
    }

    pub fn set_free(&mut self, var: usize) {
        self.lower[var] = None;
        self.upper[var] = None;
    }

    /// Overrides the default pivot cap.
    pub fn set_max_pivots(&mut self, cap: usize) {
        self.max_pivots = Some(cap);
    }

    pub fn set_pivot_rule(&mut self, rule: PivotRule) {
        self.rule = rule;
    }

    /// Largest violation of any row or bound at `point`.
    pub fn max_violation(&self, point: &[S]) -> S {
        let mut worst = S::zero();
        let mut see = |v: S| {
            if v > worst {
                worst = v;
            }
        };
        for row in &self.constraints {
            let lhs = dot(&row.coeffs, point);
            match row.relation {
                Relation::Le => see(lhs - row.rhs.clone()),
                Relation::Ge => see(row.rhs.clone() - lhs),
                Relation::Eq => see((lhs - row.rhs.clone()).abs()),
            }
        }
        for (j, x) in point.iter().enumerate() {
            if let Some(l) = &self.lower[j] {
                see(l.clone() - x.clone());
            }
            if let Some(u) = &self.upper[j] {
                see(x.clone() - u.clone());
            }
        }
        worst
    }

    pub fn objective_at(&self, point: &[S]) -> S {
        dot(&self.objective, point)
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        let finite = |x: &S| S::is_exact() || x.to_f64().is_some_and(f64::is_finite);
        let all_finite = self.objective.iter().all(finite)
            && self
                .constraints
                .iter()
                .all(|r| r.coeffs.len() == n && r.coeffs.iter().all(finite) && finite(&r.rhs))
            && self.lower.iter().chain(&self.upper).flatten().all(finite);
        if !all_finite {
            return Err(MlstError::Lp("non-finite coefficient".into()));
        }
        for j in 0..n {
            if let (Some(l), Some(u)) = (&self.lower[j], &self.upper[j]) {
                if l > u {
                    return Err(MlstError::Lp(format!("variable {j} has lower bound above upper bound")));
                }
            }
        }
        Ok(())
    }
}

fn dot<S: Scalar>(a: &[S], x: &[S]) -> S {
    a.iter()
        .zip(x)
        .filter(|(c, _)| !c.is_zero())
        .fold(S::zero(), |acc, (c, v)| acc + c.clone() * v.clone())
}

/// How an original variable is expressed in the non-negative columns.
/// Shift values live in `Standard::shift`.
enum Column {
    Shifted { col: usize },
    Split { pos: usize, neg: usize },
}

struct Standard<S> {
    cols: usize,
    map: Vec<Column>,
    shift: Vec<S>,
    c: Vec<S>,
    c0: S,
    rows: Vec<(Vec<S>, S)>,
    /// Original constraint and sign for each standard row; bound rows
    /// have no origin.
    origin: Vec<Option<(usize, bool)>>,
}

fn standardize<S: Scalar>(lp: &LinearProgram<S>) -> Standard<S> {
    let n = lp.num_vars();
    let mut map = Vec::with_capacity(n);
    let mut shift = vec![S::zero(); n];
    let mut cols = 0;
    for j in 0..n {
        match &lp.lower[j] {
            Some(l) => {
                shift[j] = l.clone();
                map.push(Column::Shifted { col: cols });
                cols += 1;
            }
            None => {
                map.push(Column::Split { pos: cols, neg: cols + 1 });
                cols += 2;
            }
        }
    }

    let expand = |coeffs: &[S], rhs: &S| -> (Vec<S>, S) {
        let mut row = vec![S::zero(); cols];
        let mut b = rhs.clone();
        for (j, a) in coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            match map[j] {
                Column::Shifted { col } => {
                    row[col] = a.clone();
                    b = b - a.clone() * shift[j].clone();
                }
                Column::Split { pos, neg } => {
                    row[pos] = a.clone();
                    row[neg] = -a.clone();
                }
            }
        }
        (row, b)
    };

    let mut rows = Vec::new();
    let mut origin = Vec::new();
    for (idx, r) in lp.constraints.iter().enumerate() {
        let (row, b) = expand(&r.coeffs, &r.rhs);
        match r.relation {
            Relation::Le => {
                rows.push((row, b));
                origin.push(Some((idx, true)));
            }
            Relation::Ge => {
                rows.push((row.into_iter().map(|x| -x).collect(), -b));
                origin.push(Some((idx, false)));
            }
            Relation::Eq => {
                rows.push((row.iter().cloned().map(|x| -x).collect(), -b.clone()));
                origin.push(Some((idx, false)));
                rows.push((row, b));
                origin.push(Some((idx, true)));
            }
        }
    }
    for j in 0..n {
        if let Some(u) = &lp.upper[j] {
            let mut unit = vec![S::zero(); n];
            unit[j] = S::one();
            rows.push(expand(&unit, u));
            origin.push(None);
        }
    }

    let (c, mut c0) = expand(&lp.objective, &S::zero());
    c0 = -c0;
    Standard { cols, map, shift, c, c0, rows, origin }
}

/// `x_basic[i] = b[i] - Σ_j a[i][j] · x_nonbasic[j]`,
/// `z = z0 + Σ_j c[j] · x_nonbasic[j]`.
struct Dictionary<S> {
    width: usize,
    a: Vec<S>,
    b: Vec<S>,
    c: Vec<S>,
    z0: S,
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
    pivots: usize,
    cap: usize,
    rule: PivotRule,
}

enum Step {
    Optimal,
    Unbounded,
}

impl<S: Scalar> Dictionary<S> {
    fn at(&self, i: usize, j: usize) -> &S {
        &self.a[i * self.width + j]
    }

    fn pivot(&mut self, r: usize, s: usize) -> Result<()> {
        self.pivots += 1;
        if self.pivots > self.cap {
            return Err(MlstError::Lp(format!("pivot limit {} reached", self.cap)));
        }
        let w = self.width;
        let piv = self.at(r, s).clone();
        let inv = S::one() / piv;

        // Row r now expresses the entering variable.
        for j in 0..w {
            let k = r * w + j;
            self.a[k] = if j == s { inv.clone() } else { self.a[k].clone() * inv.clone() };
        }
        self.b[r] = self.b[r].clone() * inv.clone();

        let pivot_row: Vec<S> = self.a[r * w..(r + 1) * w].to_vec();
        let br = self.b[r].clone();
        for i in 0..self.b.len() {
            if i == r {
                continue;
            }
            let f = self.a[i * w + s].clone();
            if f.is_zero() {
                continue;
            }
            for (j, pr) in pivot_row.iter().enumerate() {
                let k = i * w + j;
                if j == s {
                    self.a[k] = -(f.clone() * inv.clone());
                } else if !pr.is_zero() {
                    self.a[k] = self.a[k].clone() - f.clone() * pr.clone();
                }
            }
            self.b[i] = self.b[i].clone() - f * br.clone();
        }

        let cs = self.c[s].clone();
        if !cs.is_zero() {
            for (j, pr) in pivot_row.iter().enumerate() {
                if j == s {
                    self.c[j] = -(cs.clone() * inv.clone());
                } else if !pr.is_zero() {
                    self.c[j] = self.c[j].clone() - cs.clone() * pr.clone();
                }
            }
            self.z0 = self.z0.clone() + cs * br;
        }

        std::mem::swap(&mut self.basic[r], &mut self.nonbasic[s]);
        Ok(())
    }

    /// Leaving row for entering column `s`; ties go to the smallest basic
    /// variable index.
    fn ratio_test(&self, s: usize) -> Option<usize> {
        let eps = S::epsilon();
        let mut best: Option<(S, usize)> = None;
        for i in 0..self.b.len() {
            let a = self.at(i, s);
            if *a <= eps {
                continue;
            }
            let bi = if self.b[i] < S::zero() { S::zero() } else { self.b[i].clone() };
            let ratio = bi / a.clone();
            let take = match &best {
                None => true,
                Some((cur, r)) => {
                    ratio.definitely_lt(cur)
                        || (!cur.definitely_lt(&ratio) && self.basic[i] < self.basic[*r])
                }
            };
            if take {
                best = Some((ratio, i));
            }
        }
        best.map(|(_, i)| i)
    }

    fn run(&mut self) -> Result<Step> {
        let eps = S::epsilon();
        let mut degenerate = 0;
        loop {
            let improving = (0..self.width).filter(|&j| self.c[j] > eps);
            let bland = self.rule == PivotRule::Bland || degenerate >= DEGENERATE_RUN;
            let entering = if bland {
                improving.min_by_key(|&j| self.nonbasic[j])
            } else {
                improving.reduce(|a, b| {
                    let better = match self.c[b].total_cmp(&self.c[a]) {
                        std::cmp::Ordering::Greater => true,
                        std::cmp::Ordering::Equal => self.nonbasic[b] < self.nonbasic[a],
                        std::cmp::Ordering::Less => false,
                    };
                    if better { b } else { a }
                })
            };
            let Some(s) = entering else {
                return Ok(Step::Optimal);
            };
            let Some(r) = self.ratio_test(s) else {
                return Ok(Step::Unbounded);
            };
            if self.b[r] > eps {
                degenerate = 0;
            } else {
                degenerate += 1;
            }
            self.pivot(r, s)?;
        }
    }

    fn drop_column(&mut self, s: usize) {
        let w = self.width;
        let mut a = Vec::with_capacity(self.b.len() * (w - 1));
        for i in 0..self.b.len() {
            for j in 0..w {
                if j != s {
                    a.push(self.a[i * w + j].clone());
                }
            }
        }
        self.a = a;
        self.c.remove(s);
        self.nonbasic.remove(s);
        self.width = w - 1;
    }
}

/// `max c·λ` s.t. `A λ ≤ b`, `λ ≥ 0` with `b ≥ 0`, grown one column at a
/// time and re-optimized from the previous basis.
///
/// Row slacks are variables `0..m`, columns are numbered from `m` in the
/// order they are added. A new column enters the dictionary as
/// `B⁻¹ a` with reduced cost `c - yᵀ a`, where both `B⁻¹` and `y` are read
/// off the slack columns.
pub struct ColumnLp<S> {
    dict: Dictionary<S>,
    rows: usize,
    columns: usize,
}

impl<S: Scalar> ColumnLp<S> {
    pub fn new(rhs: Vec<S>, rule: PivotRule) -> Result<Self> {
        if rhs.iter().any(|b| *b < S::zero()) {
            return Err(MlstError::Lp("column LP needs a non-negative right-hand side".into()));
        }
        let m = rhs.len();
        Ok(ColumnLp {
            dict: Dictionary {
                width: 0,
                a: Vec::new(),
                b: rhs,
                c: Vec::new(),
                z0: S::zero(),
                basic: (0..m).collect(),
                nonbasic: Vec::new(),
                pivots: 0,
                cap: usize::MAX,
                rule,
            },
            rows: m,
            columns: 0,
        })
    }

    pub fn num_columns(&self) -> usize {
        self.columns
    }

    /// Row duals `y` of the current basis.
    pub fn duals(&self) -> Vec<S> {
        let mut y = vec![S::zero(); self.rows];
        for (j, &v) in self.dict.nonbasic.iter().enumerate() {
            if v < self.rows {
                y[v] = -self.dict.c[j].clone();
            }
        }
        y
    }

    pub fn value(&self) -> &S {
        &self.dict.z0
    }

    /// Current value of every added column.
    pub fn primal(&self) -> Vec<S> {
        let mut x = vec![S::zero(); self.columns];
        for (i, &v) in self.dict.basic.iter().enumerate() {
            if v >= self.rows {
                x[v - self.rows] = self.dict.b[i].clone();
            }
        }
        x
    }

    pub fn add_column(&mut self, coeffs: Vec<S>, cost: S) -> Result<()> {
        if coeffs.len() != self.rows {
            return Err(MlstError::Lp(format!(
                "column has {} entries, LP has {} rows",
                coeffs.len(),
                self.rows
            )));
        }
        let d = &mut self.dict;
        let m = self.rows;
        let w = d.width;
        let mut col = vec![S::zero(); m];
        let mut reduced = cost;
        // Nonbasic slacks carry columns of B⁻¹ and the duals.
        for (j, &v) in d.nonbasic.iter().enumerate() {
            if v >= m || coeffs[v].is_zero() {
                continue;
            }
            let ak = &coeffs[v];
            for (i, slot) in col.iter_mut().enumerate() {
                let e = &d.a[i * w + j];
                if !e.is_zero() {
                    *slot = slot.clone() + e.clone() * ak.clone();
                }
            }
            reduced = reduced + d.c[j].clone() * ak.clone();
        }
        // Basic slacks carry unit columns.
        for (i, &v) in d.basic.iter().enumerate() {
            if v < m && !coeffs[v].is_zero() {
                col[i] = col[i].clone() + coeffs[v].clone();
            }
        }
        let mut a = Vec::with_capacity(m * (w + 1));
        for (i, extra) in col.into_iter().enumerate() {
            a.extend(d.a[i * w..(i + 1) * w].iter().cloned());
            a.push(extra);
        }
        d.a = a;
        d.c.push(reduced);
        d.nonbasic.push(m + self.columns);
        d.width = w + 1;
        self.columns += 1;
        Ok(())
    }

    /// Re-optimizes; `Ok(false)` when the LP is unbounded.
    pub fn solve(&mut self) -> Result<bool> {
        Ok(matches!(self.dict.run()?, Step::Optimal))
    }
}

pub fn solve_lp<S: Scalar>(lp: &LinearProgram<S>) -> Result<LpOutcome<S>> {
    lp.validate()?;
    let std = standardize(lp);
    let m = std.rows.len();
    let n = std.cols;
    let eps = S::epsilon();
    let cap = lp.max_pivots.unwrap_or(50_000 + 50 * (m + n));

    let mut a = Vec::with_capacity(m * (n + 1));
    let mut b = Vec::with_capacity(m);
    for (row, rhs) in &std.rows {
        a.extend(row.iter().cloned());
        a.push(-S::one());
        b.push(rhs.clone());
    }
    // Column n is the phase-one auxiliary x0, index n + m.
    let aux = n + m;
    let mut dict = Dictionary {
        width: n + 1,
        a,
        b,
        c: vec![S::zero(); n + 1],
        z0: S::zero(),
        basic: (n..n + m).collect(),
        nonbasic: (0..n).chain([aux]).collect(),
        pivots: 0,
        cap,
        rule: lp.rule,
    };

    let worst = (0..m)
        .filter(|&i| dict.b[i] < -eps.clone())
        .min_by(|&i, &j| dict.b[i].total_cmp(&dict.b[j]).then(dict.basic[i].cmp(&dict.basic[j])));
    if let Some(r) = worst {
        dict.c[n] = -S::one();
        dict.pivot(r, n)?;
        dict.run()?;
        if dict.z0 < -eps.clone() {
            return Ok(LpOutcome::Infeasible);
        }
        if let Some(r) = dict.basic.iter().position(|&v| v == aux) {
            let s = (0..dict.width)
                .filter(|&j| dict.at(r, j).abs() > eps)
                .min_by_key(|&j| dict.nonbasic[j]);
            match s {
                Some(s) => dict.pivot(r, s)?,
                None => {
                    // x0 row is identically zero; the row is redundant.
                    dict.b[r] = S::zero();
                }
            }
        }
    }
    if let Some(s) = dict.nonbasic.iter().position(|&v| v == aux) {
        dict.drop_column(s);
    } else {
        // x0 stayed basic in a redundant row: remove that row.
        let r = dict.basic.iter().position(|&v| v == aux).unwrap();
        let w = dict.width;
        dict.a.drain(r * w..(r + 1) * w);
        dict.b.remove(r);
        dict.basic.remove(r);
    }

    // Phase two objective.
    let obj = |v: usize| if v < n { std.c[v].clone() } else { S::zero() };
    dict.c = dict.nonbasic.iter().map(|&v| obj(v)).collect();
    dict.z0 = S::zero();
    for i in 0..dict.b.len() {
        let cb = obj(dict.basic[i]);
        if cb.is_zero() {
            continue;
        }
        dict.z0 = dict.z0.clone() + cb.clone() * dict.b[i].clone();
        for j in 0..dict.width {
            let aij = dict.at(i, j).clone();
            if !aij.is_zero() {
                dict.c[j] = dict.c[j].clone() - cb.clone() * aij;
            }
        }
    }
    if let Step::Unbounded = dict.run()? {
        return Ok(LpOutcome::Unbounded);
    }

    let mut cols = vec![S::zero(); n];
    for (i, &v) in dict.basic.iter().enumerate() {
        if v < n {
            cols[v] = dict.b[i].clone();
        }
    }
    let point: Vec<S> = std
        .map
        .iter()
        .enumerate()
        .map(|(j, col)| match *col {
            Column::Shifted { col } => cols[col].clone() + std.shift[j].clone(),
            Column::Split { pos, neg } => cols[pos].clone() - cols[neg].clone(),
        })
        .collect();
    let mut duals = vec![S::zero(); lp.constraints.len()];
    for (j, &v) in dict.nonbasic.iter().enumerate() {
        if v < n {
            continue;
        }
        if let Some((idx, positive)) = std.origin[v - n] {
            let y = -dict.c[j].clone();
            duals[idx] = if positive { duals[idx].clone() + y } else { duals[idx].clone() - y };
        }
    }
    let value = dict.z0 + std.c0;
    Ok(LpOutcome::Optimal { value, point, duals })
}

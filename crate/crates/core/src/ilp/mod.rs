//! Integer programming models for MLST, written as LP-format text.
//!
//! Four formulations are available (see [`IlpForm`]). Models are plain
//! data: named variables, a minimisation objective and named rows.
//! Nothing here solves them; [`IlpModel::evaluate`] checks a given
//! assignment, and [`encode_solution`] turns an MLST solution into one.

mod forms;
mod lp_format;

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{MlstError, Result};

pub use forms::{
    emit, emit_cut_based, emit_multicommodity, emit_reduced_flow, emit_single_flow, encode_solution,
    expected_counts, instance_hash, CUT_VERTEX_LIMIT,
};
pub use lp_format::{parse_lp, write_lp};

/// Feasibility tolerance used by [`IlpModel::evaluate`].
pub const FEAS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IlpForm {
    Cut,
    Mcf,
    Scf,
    Reduced,
}

impl IlpForm {
    pub const ALL: [IlpForm; 4] = [IlpForm::Cut, IlpForm::Mcf, IlpForm::Scf, IlpForm::Reduced];

    pub fn name(self) -> &'static str {
        match self {
            IlpForm::Cut => "cut",
            IlpForm::Mcf => "mcf",
            IlpForm::Scf => "scf",
            IlpForm::Reduced => "reduced",
        }
    }
}

impl fmt::Display for IlpForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IlpForm {
    type Err = MlstError;

    fn from_str(s: &str) -> Result<Self> {
        IlpForm::ALL
            .into_iter()
            .find(|f| f.name() == s.trim())
            .ok_or_else(|| MlstError::Precondition(format!("unknown formulation {s:?} (cut, mcf, scf, reduced)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Binary,
    Integer,
    Continuous,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    /// `f64::INFINITY` when unbounded.
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }
}

pub type LinExpr = Vec<(String, f64)>;

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub name: String,
    pub terms: LinExpr,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IlpModel {
    pub name: String,
    /// Comment lines written before the model.
    pub header: Vec<String>,
    pub variables: Vec<Variable>,
    pub objective: LinExpr,
    pub constraints: Vec<Row>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelCounts {
    pub variables: usize,
    pub constraints: usize,
}

impl IlpModel {
    pub fn new(name: impl Into<String>) -> Self {
        IlpModel { name: name.into(), ..Default::default() }
    }

    pub fn add_var(&mut self, name: String, kind: VarKind, lower: f64, upper: f64) {
        self.variables.push(Variable { name, kind, lower, upper });
    }

    pub fn binary(&mut self, name: String) {
        self.add_var(name, VarKind::Binary, 0.0, 1.0);
    }

    pub fn continuous(&mut self, name: String, upper: f64) {
        self.add_var(name, VarKind::Continuous, 0.0, upper);
    }

    /// Zero coefficients are dropped.
    pub fn add_row(&mut self, name: String, terms: LinExpr, sense: Sense, rhs: f64) {
        let terms = terms.into_iter().filter(|(_, c)| *c != 0.0).collect();
        self.constraints.push(Row { name, terms, sense, rhs });
    }

    pub fn counts(&self) -> ModelCounts {
        ModelCounts { variables: self.variables.len(), constraints: self.constraints.len() }
    }

    pub fn var(&self, name: &str) -> Option<&Variable> {
        self.variables.iter().find(|v| v.name == name)
    }

    /// Unique names, declared references, non-empty rows.
    pub fn check(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for v in &self.variables {
            if !seen.insert(v.name.as_str()) {
                return Err(MlstError::Precondition(format!("variable {} declared twice", v.name)));
            }
        }
        let mut rows = HashSet::new();
        for r in &self.constraints {
            if !rows.insert(r.name.as_str()) {
                return Err(MlstError::Precondition(format!("row {} declared twice", r.name)));
            }
            if r.terms.is_empty() {
                return Err(MlstError::Precondition(format!("row {} is empty", r.name)));
            }
        }
        let exprs = std::iter::once(&self.objective).chain(self.constraints.iter().map(|r| &r.terms));
        for expr in exprs {
            if let Some((n, _)) = expr.iter().find(|(n, _)| !seen.contains(n.as_str())) {
                return Err(MlstError::Precondition(format!("undeclared variable {n}")));
            }
        }
        Ok(())
    }

    /// Orders variables by first use (objective, rows, then the rest), the
    /// order in which the LP reader discovers them.
    pub fn canonicalize(&mut self) {
        let mut rank: BTreeMap<&str, usize> = BTreeMap::new();
        let exprs = std::iter::once(&self.objective).chain(self.constraints.iter().map(|r| &r.terms));
        for expr in exprs {
            for (n, _) in expr {
                let next = rank.len();
                rank.entry(n.as_str()).or_insert(next);
            }
        }
        let mut keyed: Vec<(usize, Variable)> = self
            .variables
            .iter()
            .enumerate()
            .map(|(i, v)| (rank.get(v.name.as_str()).copied().unwrap_or(usize::MAX / 2 + i), v.clone()))
            .collect();
        keyed.sort_by_key(|(k, _)| *k);
        self.variables = keyed.into_iter().map(|(_, v)| v).collect();
    }

    /// Objective value of `values`, or the first violated bound, integrality
    /// requirement or row. Missing variables count as zero.
    pub fn evaluate(&self, values: &BTreeMap<String, f64>) -> std::result::Result<f64, String> {
        let get = |n: &str| values.get(n).copied().unwrap_or(0.0);
        if let Some(n) = values.keys().find(|n| self.var(n).is_none()) {
            return Err(format!("value for unknown variable {n}"));
        }
        for v in &self.variables {
            let x = get(&v.name);
            if x < v.lower - FEAS_TOL || x > v.upper + FEAS_TOL {
                return Err(format!("{} = {x} outside [{}, {}]", v.name, v.lower, v.upper));
            }
            if v.kind != VarKind::Continuous && (x - x.round()).abs() > FEAS_TOL {
                return Err(format!("{} = {x} is not integral", v.name));
            }
        }
        let dot = |e: &LinExpr| e.iter().map(|(n, c)| c * get(n)).sum::<f64>();
        for r in &self.constraints {
            let lhs = dot(&r.terms);
            let ok = match r.sense {
                Sense::Le => lhs <= r.rhs + FEAS_TOL,
                Sense::Ge => lhs >= r.rhs - FEAS_TOL,
                Sense::Eq => (lhs - r.rhs).abs() <= FEAS_TOL,
            };
            if !ok {
                return Err(format!("{}: {lhs} {} {}", r.name, r.sense.symbol(), r.rhs));
            }
        }
        Ok(dot(&self.objective))
    }
}

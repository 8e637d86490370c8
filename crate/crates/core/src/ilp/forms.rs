use std::collections::{BTreeMap, VecDeque};

use sha2::{Digest, Sha256};

use super::{IlpForm, IlpModel, LinExpr, ModelCounts, Sense};
use crate::error::{MlstError, Result};
use crate::format::{canonicalize, write_instance};
use crate::graph::{EdgeId, EdgeSet, MlstInstance, MlstSolution, VertexId};
use crate::scalar::Scalar;

/// The cut formulation has `O(ℓ·2^|V|)` rows.
pub const CUT_VERTEX_LIMIT: usize = 20;

/// First 16 hex digits of the SHA-256 of the canonical instance file.
pub fn instance_hash<W: Scalar>(instance: &MlstInstance<W>) -> String {
    let digest = Sha256::digest(write_instance(&canonicalize(instance)).as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

fn x(u: VertexId, v: VertexId, i: usize) -> String {
    format!("x_{}_{}_{i}", u.min(v), u.max(v))
}

fn source<W>(instance: &MlstInstance<W>) -> VertexId {
    instance.terminals(instance.levels())[0]
}

fn start<W: Scalar>(form: IlpForm, instance: &MlstInstance<W>) -> IlpModel {
    let g = instance.graph();
    let mut m = IlpModel::new(format!("mlst_{form}"));
    m.header.push(format!("formulation: {form}"));
    m.header.push(format!("instance: {}", instance_hash(instance)));
    m.header.push(format!(
        "vertices: {}, edges: {}, levels: {}",
        g.vertex_count(),
        g.edge_count(),
        instance.levels()
    ));
    m
}

/// Undirected `x_{u}_{v}_{i}` for every level, objective `Σ_i Σ_e c(e)·x^i_e`
/// and the linking rows `x^i ≤ x^{i-1}`.
fn layered_edges<W: Scalar>(m: &mut IlpModel, instance: &MlstInstance<W>) {
    let g = instance.graph();
    for i in 1..=instance.levels() {
        for e in g.edges() {
            m.binary(x(e.u, e.v, i));
            m.objective.push((x(e.u, e.v, i), e.cost.to_f64_lossy()));
        }
    }
}

fn linking_rows<W: Scalar>(m: &mut IlpModel, instance: &MlstInstance<W>) {
    for i in 2..=instance.levels() {
        for e in instance.graph().edges() {
            m.add_row(
                format!("link_{i}_{}_{}", e.u, e.v),
                vec![(x(e.u, e.v, i), 1.0), (x(e.u, e.v, i - 1), -1.0)],
                Sense::Le,
                0.0,
            );
        }
    }
}

fn finish(mut m: IlpModel, form: IlpForm, expected: ModelCounts) -> Result<IlpModel> {
    m.canonicalize();
    m.check()?;
    assert_eq!(m.counts(), expected, "{form} model size");
    Ok(m)
}

/// Variable and row counts each formulation must produce.
///
/// * cut: `ℓ|E|` variables; per level with `|T_i| ≥ 2`,
///   `2^{|V|-1} - 2^{|V|-|T_i|}` cuts (sets holding the smallest terminal
///   but not all of `T_i`), plus `(ℓ-1)|E|` links.
/// * mcf: `ℓ|E| + Σ_i 2|E|(|T_i|-1)` variables and
///   `Σ_i (|T_i|-1)(|V|+|E|) + (ℓ-1)|E|` rows.
/// * scf: `3ℓ|E|` variables and `ℓ|V| + 2ℓ|E| + (ℓ-1)|E|` rows.
/// * reduced: `6|E|` variables and `2|V| + 10|E| - 2deg(s) + |T_1| - 1` rows.
pub fn expected_counts<W: Scalar>(form: IlpForm, instance: &MlstInstance<W>) -> ModelCounts {
    let g = instance.graph();
    let (n, e, ell) = (g.vertex_count(), g.edge_count(), instance.levels());
    let sizes: Vec<usize> = (1..=ell).map(|i| instance.terminals(i).len()).collect();
    let links = (ell - 1) * e;
    match form {
        IlpForm::Cut => ModelCounts {
            variables: ell * e,
            constraints: sizes
                .iter()
                .filter(|&&t| t >= 2)
                .map(|&t| (1usize << (n - 1)) - (1usize << (n - t)))
                .sum::<usize>()
                + links,
        },
        IlpForm::Mcf => ModelCounts {
            variables: ell * e + sizes.iter().map(|t| 2 * e * (t - 1)).sum::<usize>(),
            constraints: sizes.iter().map(|t| (t - 1) * (n + e)).sum::<usize>() + links,
        },
        IlpForm::Scf => ModelCounts { variables: 3 * ell * e, constraints: ell * n + 2 * ell * e + links },
        IlpForm::Reduced => ModelCounts {
            variables: 6 * e,
            constraints: 2 * n + 10 * e - 2 * g.neighbors(source(instance)).len() + sizes[0] - 1,
        },
    }
}

pub fn emit<W: Scalar>(form: IlpForm, instance: &MlstInstance<W>) -> Result<IlpModel> {
    match form {
        IlpForm::Cut => emit_cut_based(instance),
        IlpForm::Mcf => emit_multicommodity(instance),
        IlpForm::Scf => emit_single_flow(instance),
        IlpForm::Reduced => emit_reduced_flow(instance),
    }
}

pub fn emit_cut_based<W: Scalar>(instance: &MlstInstance<W>) -> Result<IlpModel> {
    let g = instance.graph();
    let n = g.vertex_count();
    if n > CUT_VERTEX_LIMIT {
        return Err(MlstError::Guard {
            what: "cut formulation vertices",
            limit: CUT_VERTEX_LIMIT,
            actual: n,
            hint: Some("use a flow formulation"),
        });
    }
    let mut m = start(IlpForm::Cut, instance);
    m.header.push("note: level i cuts separate T_i; S and its complement give one row".into());
    layered_edges(&mut m, instance);
    for i in 1..=instance.levels() {
        let t = instance.terminals(i);
        if t.len() < 2 {
            continue;
        }
        let anchor = 1usize << t[0];
        let tmask = t.iter().fold(0usize, |a, &v| a | 1 << v);
        for s in 0..1usize << n {
            if s & anchor == 0 || s & tmask == tmask {
                continue;
            }
            let terms: LinExpr = g
                .edges()
                .iter()
                .filter(|e| (s >> e.u & 1) != (s >> e.v & 1))
                .map(|e| (x(e.u, e.v, i), 1.0))
                .collect();
            m.add_row(format!("cut_{i}_{s:x}"), terms, Sense::Ge, 1.0);
        }
    }
    linking_rows(&mut m, instance);
    finish(m, IlpForm::Cut, expected_counts(IlpForm::Cut, instance))
}

fn fp(u: VertexId, v: VertexId, p: VertexId, i: usize) -> String {
    format!("f_{u}_{v}_{p}_{i}")
}

pub fn emit_multicommodity<W: Scalar>(instance: &MlstInstance<W>) -> Result<IlpModel> {
    let g = instance.graph();
    let s = source(instance);
    let mut m = start(IlpForm::Mcf, instance);
    m.header.push(format!("source: {s}"));
    m.header.push("deviation: coupling rows f^p_uv + f^p_vu <= x_uv added per commodity and level".into());
    layered_edges(&mut m, instance);
    for i in 1..=instance.levels() {
        for &p in instance.terminals(i).iter().filter(|&&p| p != s) {
            for e in g.edges() {
                m.continuous(fp(e.u, e.v, p, i), 1.0);
                m.continuous(fp(e.v, e.u, p, i), 1.0);
            }
            for v in 0..g.vertex_count() {
                let mut terms = LinExpr::new();
                for &(w, _) in g.neighbors(v) {
                    terms.push((fp(v, w, p, i), 1.0));
                    terms.push((fp(w, v, p, i), -1.0));
                }
                let rhs = if v == s { 1.0 } else if v == p { -1.0 } else { 0.0 };
                m.add_row(format!("cons_{i}_{p}_{v}"), terms, Sense::Eq, rhs);
            }
            for e in g.edges() {
                m.add_row(
                    format!("cap_{i}_{p}_{}_{}", e.u, e.v),
                    vec![(fp(e.u, e.v, p, i), 1.0), (fp(e.v, e.u, p, i), 1.0), (x(e.u, e.v, i), -1.0)],
                    Sense::Le,
                    0.0,
                );
            }
        }
    }
    linking_rows(&mut m, instance);
    finish(m, IlpForm::Mcf, expected_counts(IlpForm::Mcf, instance))
}

fn fl(u: VertexId, v: VertexId, i: usize) -> String {
    format!("f_{u}_{v}_{i}")
}

pub fn emit_single_flow<W: Scalar>(instance: &MlstInstance<W>) -> Result<IlpModel> {
    let g = instance.graph();
    let s = source(instance);
    let mut m = start(IlpForm::Scf, instance);
    m.header.push(format!("source: {s}"));
    m.header.push("deviation: linking written as x^i <= x^(i-1)".into());
    layered_edges(&mut m, instance);
    for i in 1..=instance.levels() {
        let t = instance.terminals(i);
        let supply = (t.len() - 1) as f64;
        for e in g.edges() {
            m.continuous(fl(e.u, e.v, i), f64::INFINITY);
            m.continuous(fl(e.v, e.u, i), f64::INFINITY);
        }
        for v in 0..g.vertex_count() {
            let mut terms = LinExpr::new();
            for &(w, _) in g.neighbors(v) {
                terms.push((fl(v, w, i), 1.0));
                terms.push((fl(w, v, i), -1.0));
            }
            let rhs = if v == s {
                supply
            } else if t.binary_search(&v).is_ok() {
                -1.0
            } else {
                0.0
            };
            m.add_row(format!("cons_{i}_{v}"), terms, Sense::Eq, rhs);
        }
        for e in g.edges() {
            for (a, b) in [(e.u, e.v), (e.v, e.u)] {
                m.add_row(
                    format!("cap_{i}_{a}_{b}"),
                    vec![(fl(a, b, i), 1.0), (x(a, b, i), -supply)],
                    Sense::Le,
                    0.0,
                );
            }
        }
    }
    linking_rows(&mut m, instance);
    finish(m, IlpForm::Scf, expected_counts(IlpForm::Scf, instance))
}

fn xd(u: VertexId, v: VertexId) -> String {
    format!("xd_{u}_{v}")
}

fn y(u: VertexId, v: VertexId) -> String {
    format!("y_{u}_{v}")
}

fn f(u: VertexId, v: VertexId) -> String {
    format!("f_{u}_{v}")
}

/// Flow on level 1 only; `y_uv` counts the levels arc `(u,v)` is paid on.
pub fn emit_reduced_flow<W: Scalar>(instance: &MlstInstance<W>) -> Result<IlpModel> {
    let g = instance.graph();
    let s = source(instance);
    let ell = instance.levels() as f64;
    let t1 = instance.terminals(1);
    let supply = (t1.len() - 1) as f64;
    let mut m = start(IlpForm::Reduced, instance);
    m.header.push(format!("source: {s}"));
    m.header.push("note: f and y continuous, x binary".into());

    let arcs: Vec<(VertexId, VertexId, f64)> = g
        .edges()
        .iter()
        .flat_map(|e| {
            let c = e.cost.to_f64_lossy();
            [(e.u, e.v, c), (e.v, e.u, c)]
        })
        .collect();
    for &(u, v, c) in &arcs {
        m.objective.push((y(u, v), c));
    }
    for &(u, v, _) in &arcs {
        m.binary(xd(u, v));
        m.continuous(y(u, v), f64::INFINITY);
        m.continuous(f(u, v), f64::INFINITY);
    }

    let n = g.vertex_count();
    for v in 0..n {
        let mut terms = LinExpr::new();
        for &(w, _) in g.neighbors(v) {
            terms.push((f(v, w), 1.0));
            terms.push((f(w, v), -1.0));
        }
        let rhs = if v == s {
            supply
        } else if t1.binary_search(&v).is_ok() {
            -1.0
        } else {
            0.0
        };
        m.add_row(format!("c2_{v}"), terms, Sense::Eq, rhs);
    }
    for &(u, v, _) in &arcs {
        m.add_row(format!("c3_{u}_{v}"), vec![(f(u, v), 1.0), (xd(u, v), -supply)], Sense::Le, 0.0);
    }
    for v in 0..n {
        let terms = g.neighbors(v).iter().map(|&(u, _)| (xd(u, v), 1.0)).collect();
        m.add_row(format!("c4_{v}"), terms, Sense::Le, 1.0);
    }
    for &(u, v, _) in &arcs {
        m.add_row(format!("c5lo_{u}_{v}"), vec![(xd(u, v), 1.0), (y(u, v), -1.0)], Sense::Le, 0.0);
        m.add_row(format!("c5hi_{u}_{v}"), vec![(y(u, v), 1.0), (xd(u, v), -ell)], Sense::Le, 0.0);
    }
    for (prefix, var) in [("c6", xd as fn(VertexId, VertexId) -> String), ("c7", y)] {
        for &(v, w, _) in arcs.iter().filter(|a| a.0 != s) {
            let mut terms: LinExpr = g
                .neighbors(v)
                .iter()
                .filter(|&&(u, _)| u != w)
                .map(|&(u, _)| (var(u, v), 1.0))
                .collect();
            terms.push((var(v, w), -1.0));
            m.add_row(format!("{prefix}_{v}_{w}"), terms, Sense::Ge, 0.0);
        }
    }
    for &v in t1.iter().filter(|&&v| v != s) {
        let terms = g.neighbors(v).iter().map(|&(u, _)| (y(u, v), 1.0)).collect();
        m.add_row(format!("c8_{v}"), terms, Sense::Ge, instance.vertex_level(v) as f64);
    }
    finish(m, IlpForm::Reduced, expected_counts(IlpForm::Reduced, instance))
}

/// BFS over `edges` from `root`: parent arc of each reached vertex and the
/// visit order.
fn bfs_tree<W: Scalar>(
    instance: &MlstInstance<W>,
    edges: &EdgeSet,
    root: VertexId,
) -> (Vec<Option<(VertexId, EdgeId)>>, Vec<VertexId>) {
    let g = instance.graph();
    let mut parent = vec![None; g.vertex_count()];
    let mut seen = vec![false; g.vertex_count()];
    let mut order = vec![root];
    let mut queue = VecDeque::from([root]);
    seen[root] = true;
    while let Some(v) = queue.pop_front() {
        for &(w, e) in g.neighbors(v) {
            if edges.contains(&e) && !seen[w] {
                seen[w] = true;
                parent[w] = Some((v, e));
                order.push(w);
                queue.push_back(w);
            }
        }
    }
    (parent, order)
}

/// Per-vertex count of `targets` in its BFS subtree.
fn subtree_counts(parent: &[Option<(VertexId, EdgeId)>], order: &[VertexId], targets: &[VertexId], skip: VertexId) -> Vec<f64> {
    let mut count = vec![0.0; parent.len()];
    for &t in targets.iter().filter(|&&t| t != skip) {
        count[t] += 1.0;
    }
    for &v in order.iter().rev() {
        if let Some((p, _)) = parent[v] {
            count[p] += count[v];
        }
    }
    count
}

/// Variable assignment representing `solution` in the given formulation.
/// Flows follow BFS trees from the source; the reduced formulation needs
/// `E_1` to be a tree.
pub fn encode_solution<W: Scalar>(
    form: IlpForm,
    instance: &MlstInstance<W>,
    solution: &MlstSolution,
) -> Result<BTreeMap<String, f64>> {
    let g = instance.graph();
    let s = source(instance);
    let ell = instance.levels();
    let mut out = BTreeMap::new();
    let unreached = |v: VertexId| MlstError::InvalidSolution(format!("terminal {v} not reached from source {s}"));

    if form != IlpForm::Reduced {
        for i in 1..=ell {
            for &e in solution.level(i) {
                let ed = g.edge(e);
                out.insert(x(ed.u, ed.v, i), 1.0);
            }
        }
    }
    match form {
        IlpForm::Cut => {}
        IlpForm::Mcf => {
            for i in 1..=ell {
                let (parent, _) = bfs_tree(instance, solution.level(i), s);
                for &p in instance.terminals(i).iter().filter(|&&p| p != s) {
                    let mut v = p;
                    while v != s {
                        let (u, _) = parent[v].ok_or_else(|| unreached(p))?;
                        out.insert(fp(u, v, p, i), 1.0);
                        v = u;
                    }
                }
            }
        }
        IlpForm::Scf => {
            for i in 1..=ell {
                let (parent, order) = bfs_tree(instance, solution.level(i), s);
                if let Some(&p) = instance.terminals(i).iter().find(|&&p| p != s && parent[p].is_none()) {
                    return Err(unreached(p));
                }
                let count = subtree_counts(&parent, &order, instance.terminals(i), s);
                for &v in &order[1..] {
                    let (u, _) = parent[v].expect("non-root");
                    if count[v] > 0.0 {
                        out.insert(fl(u, v, i), count[v]);
                    }
                }
            }
        }
        IlpForm::Reduced => {
            let e1 = solution.level(1);
            let (parent, order) = bfs_tree(instance, e1, s);
            if order.len() != e1.len() + 1 {
                return Err(MlstError::InvalidSolution(
                    "level 1 edges must form a tree containing the source".into(),
                ));
            }
            if let Some(&p) = instance.terminals(1).iter().find(|&&p| p != s && parent[p].is_none()) {
                return Err(unreached(p));
            }
            let count = subtree_counts(&parent, &order, instance.terminals(1), s);
            for &v in &order[1..] {
                let (u, e) = parent[v].expect("non-root");
                let levels = (1..=ell).filter(|&i| solution.level(i).contains(&e)).count();
                out.insert(xd(u, v), 1.0);
                out.insert(y(u, v), levels as f64);
                if count[v] > 0.0 {
                    out.insert(f(u, v), count[v]);
                }
            }
        }
    }
    Ok(out)
}

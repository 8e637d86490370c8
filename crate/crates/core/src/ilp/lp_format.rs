//! Reader and writer for the LP text format.
//!
//! ```text
//! \Problem name: mlst_cut
//! \ any header comment
//! Minimize
//!  obj: 3 x_0_1_1 + 3 x_0_1_2
//! Subject To
//!  link_2_0_1: x_0_1_2 - x_0_1_1 <= 0
//! Bounds
//!  0 <= f_0_1_1 <= 1
//! Binary
//!  x_0_1_1
//! General
//! End
//! ```
//!
//! Numbers use Rust's shortest round-trip formatting, so writing a parsed
//! file reproduces it byte for byte.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{IlpModel, LinExpr, Row, Sense, VarKind, Variable};
use crate::error::{MlstError, Result};

const NAME_PREFIX: &str = "\\Problem name: ";

fn write_expr(out: &mut String, expr: &LinExpr) {
    for (k, (name, c)) in expr.iter().enumerate() {
        let (sign, mag) = if *c < 0.0 { ("-", -c) } else { ("+", *c) };
        match (k, sign) {
            (0, "+") => {
                let _ = write!(out, "{mag} {name}");
            }
            (0, _) => {
                let _ = write!(out, "-{mag} {name}");
            }
            _ => {
                let _ = write!(out, " {sign} {mag} {name}");
            }
        }
    }
}

fn fmt_bound(x: f64) -> String {
    if x == f64::INFINITY {
        "+inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x}")
    }
}

pub fn write_lp(model: &IlpModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{NAME_PREFIX}{}", model.name);
    for h in &model.header {
        let _ = writeln!(out, "\\ {h}");
    }
    out.push_str("Minimize\n obj: ");
    write_expr(&mut out, &model.objective);
    out.push_str("\nSubject To\n");
    for r in &model.constraints {
        let _ = write!(out, " {}: ", r.name);
        write_expr(&mut out, &r.terms);
        let _ = writeln!(out, " {} {}", r.sense.symbol(), r.rhs);
    }
    out.push_str("Bounds\n");
    for v in model.variables.iter().filter(|v| v.kind != VarKind::Binary) {
        let _ = match (v.lower, v.upper) {
            (lo, hi) if lo == f64::NEG_INFINITY && hi == f64::INFINITY => writeln!(out, " {} free", v.name),
            (lo, hi) if hi == f64::INFINITY => writeln!(out, " {} >= {}", v.name, fmt_bound(lo)),
            (lo, hi) => writeln!(out, " {} <= {} <= {}", fmt_bound(lo), v.name, fmt_bound(hi)),
        };
    }
    for (section, kind) in [("Binary", VarKind::Binary), ("General", VarKind::Integer)] {
        let _ = writeln!(out, "{section}");
        for v in model.variables.iter().filter(|v| v.kind == kind) {
            let _ = writeln!(out, " {}", v.name);
        }
    }
    out.push_str("End\n");
    out
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Preamble,
    Objective,
    Rows,
    Bounds,
    Binary,
    General,
    Done,
}

struct Reader {
    vars: Vec<Variable>,
    index: HashMap<String, usize>,
}

impl Reader {
    fn touch(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        self.vars.push(Variable {
            name: name.to_string(),
            kind: VarKind::Continuous,
            lower: 0.0,
            upper: f64::INFINITY,
        });
        self.index.insert(name.to_string(), self.vars.len() - 1);
        self.vars.len() - 1
    }
}

fn is_number(tok: &str) -> bool {
    let body = tok.strip_prefix(['+', '-']).unwrap_or(tok);
    body.starts_with(|c: char| c.is_ascii_digit() || c == '.') || body == "inf"
}

fn number(line: usize, tok: &str) -> Result<f64> {
    tok.parse::<f64>()
        .map_err(|_| MlstError::parse(line, format!("expected a number, got {tok:?}")))
}

fn parse_expr(line: usize, tokens: &[&str], reader: &mut Reader) -> Result<LinExpr> {
    let mut out = Vec::new();
    let mut sign = 1.0;
    let mut coef: Option<f64> = None;
    for &tok in tokens {
        match tok {
            "+" => sign = 1.0,
            "-" => sign = -1.0,
            t if is_number(t) => coef = Some(number(line, t)?),
            t => {
                let name = match t.strip_prefix(['+', '-']) {
                    Some(rest) if !rest.is_empty() => {
                        if t.starts_with('-') {
                            sign = -sign;
                        }
                        rest
                    }
                    _ => t,
                };
                reader.touch(name);
                out.push((name.to_string(), sign * coef.take().unwrap_or(1.0)));
                sign = 1.0;
            }
        }
    }
    if coef.is_some() {
        return Err(MlstError::parse(line, "dangling coefficient"));
    }
    Ok(out)
}

fn split_label(tokens: &[&str]) -> (Option<String>, usize) {
    match tokens.first() {
        Some(t) if t.ends_with(':') => (Some(t.trim_end_matches(':').to_string()), 1),
        _ => (None, 0),
    }
}

pub fn parse_lp(text: &str) -> Result<IlpModel> {
    let mut model = IlpModel::default();
    let mut reader = Reader { vars: Vec::new(), index: HashMap::new() };
    let mut section = Section::Preamble;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if let Some(name) = raw.strip_prefix(NAME_PREFIX) {
            model.name = name.to_string();
            continue;
        }
        if let Some(c) = raw.strip_prefix('\\') {
            if section == Section::Preamble {
                model.header.push(c.strip_prefix(' ').unwrap_or(c).to_string());
            }
            continue;
        }
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        let keyword = tokens.join(" ").to_ascii_lowercase();
        let next = match keyword.as_str() {
            "minimize" | "minimise" | "min" => Some(Section::Objective),
            "subject to" | "st" | "s.t." => Some(Section::Rows),
            "bounds" => Some(Section::Bounds),
            "binary" | "binaries" => Some(Section::Binary),
            "general" | "generals" => Some(Section::General),
            "end" => Some(Section::Done),
            _ => None,
        };
        if let Some(s) = next {
            section = s;
            continue;
        }
        match section {
            Section::Preamble | Section::Done => {
                return Err(MlstError::parse(line, "content outside a section"));
            }
            Section::Objective => {
                let (_, skip) = split_label(&tokens);
                let mut terms = parse_expr(line, &tokens[skip..], &mut reader)?;
                model.objective.append(&mut terms);
            }
            Section::Rows => {
                let (label, skip) = split_label(&tokens);
                let name = label.unwrap_or_else(|| format!("r{}", model.constraints.len() + 1));
                let body = &tokens[skip..];
                let pos = body
                    .iter()
                    .position(|t| matches!(*t, "<=" | ">=" | "=" | "=<" | "=>"))
                    .ok_or_else(|| MlstError::parse(line, "row without a relation"))?;
                if pos + 2 != body.len() {
                    return Err(MlstError::parse(line, "expected a single right-hand side"));
                }
                let sense = match body[pos] {
                    "<=" | "=<" => Sense::Le,
                    ">=" | "=>" => Sense::Ge,
                    _ => Sense::Eq,
                };
                let terms = parse_expr(line, &body[..pos], &mut reader)?;
                let rhs = number(line, body[pos + 1])?;
                model.constraints.push(Row { name, terms, sense, rhs });
            }
            Section::Bounds => match tokens.as_slice() {
                [name, "free"] => {
                    let i = reader.touch(name);
                    reader.vars[i].lower = f64::NEG_INFINITY;
                    reader.vars[i].upper = f64::INFINITY;
                }
                [name, op @ (">=" | "<=" | "="), value] if !is_number(name) => {
                    let i = reader.touch(name);
                    let x = number(line, value)?;
                    match *op {
                        ">=" => reader.vars[i].lower = x,
                        "<=" => reader.vars[i].upper = x,
                        _ => {
                            reader.vars[i].lower = x;
                            reader.vars[i].upper = x;
                        }
                    }
                }
                [lo, "<=", name, "<=", hi] => {
                    let i = reader.touch(name);
                    reader.vars[i].lower = number(line, lo)?;
                    reader.vars[i].upper = number(line, hi)?;
                }
                _ => return Err(MlstError::parse(line, "unrecognised bound")),
            },
            Section::Binary | Section::General => {
                for name in tokens {
                    let i = reader.touch(name);
                    let v = &mut reader.vars[i];
                    if section == Section::Binary {
                        v.kind = VarKind::Binary;
                        v.lower = 0.0;
                        v.upper = 1.0;
                    } else {
                        v.kind = VarKind::Integer;
                    }
                }
            }
        }
    }
    if section != Section::Done {
        return Err(MlstError::parse(text.lines().count(), "missing End"));
    }
    model.variables = reader.vars;
    Ok(model)
}

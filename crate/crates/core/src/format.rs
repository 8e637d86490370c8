//! Line-oriented MLST instance files.
//!
//! ```text
//! mlst 1
//! n <V> m <E> l <L>
//! e <u> <v> <w>          (E lines, 0-based ids, positive decimal weight)
//! t <i> <k> <v1> … <vk>  (L lines, i = 1..L, bottom to top)
//! ```
//!
//! `#` starts a comment. The writer sorts edges by `(u, v)` and terminals
//! ascending, so writing a parsed file is byte-stable.

use std::fmt::Write as _;

use crate::error::{MlstError, Result};
use crate::graph::{MlstInstance, WeightedGraph};
use crate::scalar::Scalar;

const MAGIC: &str = "mlst";
const VERSION: &str = "1";

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next_tokens(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (idx, raw) in self.inner.by_ref() {
            let content = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = content.split_whitespace().collect();
            if !tokens.is_empty() {
                self.last = idx + 1;
                return Some((idx + 1, tokens));
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, Vec<&'a str>)> {
        let last = self.last;
        self.next_tokens()
            .ok_or_else(|| MlstError::parse(last + 1, format!("unexpected end of file, expected {what}")))
    }
}

fn int(line: usize, tok: &str, what: &str) -> Result<usize> {
    tok.parse()
        .map_err(|_| MlstError::parse(line, format!("{what}: expected a non-negative integer, got {tok:?}")))
}

pub fn parse_instance<W: Scalar>(text: &str) -> Result<MlstInstance<W>> {
    let mut lines = Lines { inner: text.lines().enumerate(), last: 0 };

    let (line, header) = lines.expect("header")?;
    if header != [MAGIC, VERSION] {
        return Err(MlstError::parse(line, format!("expected `{MAGIC} {VERSION}`")));
    }

    let (line, sizes) = lines.expect("size line")?;
    if sizes.len() != 6 || sizes[0] != "n" || sizes[2] != "m" || sizes[4] != "l" {
        return Err(MlstError::parse(line, "expected `n <V> m <E> l <L>`"));
    }
    let n = int(line, sizes[1], "vertex count")?;
    let m = int(line, sizes[3], "edge count")?;
    let levels = int(line, sizes[5], "level count")?;
    if levels == 0 {
        return Err(MlstError::parse(line, "level count must be at least 1"));
    }

    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (line, tok) = lines.expect("edge line")?;
        if tok.len() != 4 || tok[0] != "e" {
            return Err(MlstError::parse(line, "expected `e <u> <v> <w>`"));
        }
        let u = int(line, tok[1], "edge endpoint")?;
        let v = int(line, tok[2], "edge endpoint")?;
        let w = W::parse_decimal(tok[3])
            .ok_or_else(|| MlstError::parse(line, format!("bad weight {:?}", tok[3])))?;
        edges.push((u, v, w));
    }

    let mut terminals = Vec::with_capacity(levels);
    for expected in 1..=levels {
        let (line, tok) = lines.expect("terminal line")?;
        if tok.len() < 3 || tok[0] != "t" {
            return Err(MlstError::parse(line, "expected `t <i> <k> <v1> ... <vk>`"));
        }
        let level = int(line, tok[1], "level index")?;
        if level != expected {
            return Err(MlstError::parse(line, format!("expected level {expected}, got {level}")));
        }
        let k = int(line, tok[2], "terminal count")?;
        if tok.len() != 3 + k {
            return Err(MlstError::parse(line, format!("declared {k} terminals, found {}", tok.len() - 3)));
        }
        let set = tok[3..]
            .iter()
            .map(|t| int(line, t, "terminal"))
            .collect::<Result<Vec<_>>>()?;
        terminals.push(set);
    }

    if let Some((line, _)) = lines.next_tokens() {
        return Err(MlstError::parse(line, "trailing content after terminal sets"));
    }

    let graph = WeightedGraph::new(n, edges)?;
    MlstInstance::new(graph, terminals)
}

pub fn write_instance<W: Scalar>(instance: &MlstInstance<W>) -> String {
    let graph = instance.graph();
    let mut edges: Vec<_> = graph.edges().iter().collect();
    edges.sort_by_key(|e| (e.u, e.v));

    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC} {VERSION}");
    let _ = writeln!(
        out,
        "n {} m {} l {}",
        graph.vertex_count(),
        graph.edge_count(),
        instance.levels()
    );
    for e in edges {
        let _ = writeln!(out, "e {} {} {}", e.u, e.v, e.cost.to_decimal_string());
    }
    for level in 1..=instance.levels() {
        let set = instance.terminals(level);
        let _ = write!(out, "t {} {}", level, set.len());
        for v in set {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
    }
    out
}

/// Re-numbers edges into the canonical `(u, v)` order used by the writer.
pub fn canonicalize<W: Scalar>(instance: &MlstInstance<W>) -> MlstInstance<W> {
    let graph = instance.graph();
    let mut edges: Vec<_> = graph.edges().iter().map(|e| (e.u, e.v, e.cost.clone())).collect();
    edges.sort_by_key(|e| (e.0, e.1));
    let graph = WeightedGraph::new(graph.vertex_count(), edges).expect("re-ordering keeps a valid graph");
    MlstInstance::new(graph, instance.terminal_sets().to_vec()).expect("re-ordering keeps a valid instance")
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    const SAMPLE: &str = "\
# two-level path
mlst 1
n 3 m 2 l 2
e 1 2 2.5   # heavier edge
e 0 1 1
t 1 3 2 0 1
t 2 2 0 2
";

    #[test]
    fn parses_and_canonicalizes() {
        let inst: MlstInstance<Rational64> = parse_instance(SAMPLE).unwrap();
        assert_eq!(inst.levels(), 2);
        assert_eq!(inst.terminals(1), &[0, 1, 2]);
        assert_eq!(inst.graph().edge(0).cost, Rational64::new(5, 2));
        let text = write_instance(&inst);
        assert_eq!(
            text,
            "mlst 1\nn 3 m 2 l 2\ne 0 1 1\ne 1 2 2.5\nt 1 3 0 1 2\nt 2 2 0 2\n"
        );
        let again: MlstInstance<Rational64> = parse_instance(&text).unwrap();
        assert_eq!(write_instance(&again), text);
    }

    #[test]
    fn rejects_invalid_files() {
        let cases = [
            ("mlst 2\n", "expected `mlst 1`"),
            ("mlst 1\nn 2 m 1 l 1\ne 0 1 x\nt 1 2 0 1\n", "bad weight"),
            ("mlst 1\nn 2 m 1 l 1\ne 0 1 1\nt 1 3 0 1\n", "declared 3"),
            ("mlst 1\nn 2 m 1 l 1\ne 0 1 1\n", "unexpected end"),
            ("mlst 1\nn 2 m 1 l 1\ne 0 1 1\nt 2 1 0\n", "expected level 1"),
            ("mlst 1\nn 2 m 1 l 1\ne 0 1 1\nt 1 1 0\ne 0 1 1\n", "trailing"),
        ];
        for (text, needle) in cases {
            let err = parse_instance::<Rational64>(text).unwrap_err().to_string();
            assert!(err.contains(needle), "{err} should mention {needle}");
        }
    }

    #[test]
    fn loader_runs_validation() {
        let nested_wrong = "mlst 1\nn 3 m 2 l 2\ne 0 1 1\ne 1 2 1\nt 1 1 0\nt 2 2 0 2\n";
        assert!(matches!(
            parse_instance::<Rational64>(nested_wrong),
            Err(MlstError::InvalidInstance(_))
        ));
        let duplicate = "mlst 1\nn 2 m 2 l 1\ne 0 1 1\ne 1 0 2\nt 1 2 0 1\n";
        assert!(matches!(parse_instance::<Rational64>(duplicate), Err(MlstError::InvalidGraph(_))));
    }
}

//! File formats and command implementations behind the `domcert` binary.
//!
//! Formats (UTF-8, LF, `#` starts a comment line):
//! - `.fg` flow graph: `<n> <m>`, then `s <vertex>`, then m lines
//!   `<tail> <head>`.
//! - `.tree` spanning tree: n-1 lines `<parent> <child>`.
//! - arc set: `<count>`, then count lines `<tail> <head>` (the output of
//!   `validset` reparses as one).
//!
//! Vertices are relabeled internally so the start vertex is 1; all output
//! uses the file's original labels.

use std::fmt;
use std::fs;
use std::io::Read;
use std::path::Path;

use domcert_core::{Arc, FlowGraph, SpanningTree, VertexId};

pub mod commands;

/// Failure category, carrying the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// exit 2: unreadable or malformed input
    Input(String),
    /// exit 1: verification failed or restriction infeasible
    Verification(String),
    /// exit 3: a self-check the implementation guarantees has failed
    Internal(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Input(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Verification(m) | CliError::Internal(m) => {
                write!(f, "{m}")
            }
        }
    }
}

/// Reads a file, or standard input for the path `-`.
pub fn read_input(path: &Path) -> Result<String, CliError> {
    if path.as_os_str() == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| CliError::Input(format!("stdin: {e}")))?;
        return Ok(buf);
    }
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// A parsed graph plus the original start label, so ids can be mapped in
/// both directions (the relabeling swaps `start` and 1, an involution).
#[derive(Debug)]
pub struct ParsedGraph {
    pub graph: FlowGraph,
    pub start: u32,
}

impl ParsedGraph {
    /// Maps between file labels and internal labels (either direction).
    pub fn relabel(&self, u: u32) -> u32 {
        if u == self.start {
            1
        } else if u == 1 {
            self.start
        } else {
            u
        }
    }

    /// External (file) label of an internal vertex.
    pub fn ext(&self, v: VertexId) -> u32 {
        self.relabel(v.0)
    }
}

/// Significant lines (trimmed, non-empty, non-comment) with 1-based line
/// numbers.
fn significant_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_pair(line: &str, lineno: usize) -> Result<(u32, u32), CliError> {
    let mut it = line.split_whitespace();
    let err = || CliError::Input(format!("line {lineno}: expected two integers, got {line:?}"));
    let a = it.next().ok_or_else(err)?.parse().map_err(|_| err())?;
    let b = it.next().ok_or_else(err)?.parse().map_err(|_| err())?;
    if it.next().is_some() {
        return Err(err());
    }
    Ok((a, b))
}

pub fn parse_flowgraph(text: &str) -> Result<ParsedGraph, CliError> {
    let mut lines = significant_lines(text);
    let (ln, header) = lines
        .next()
        .ok_or_else(|| CliError::Input("empty graph file".into()))?;
    let (n, m) = parse_pair(header, ln)?;
    if n == 0 {
        return Err(CliError::Input(format!("line {ln}: vertex count must be positive")));
    }
    let (ln, start_line) = lines
        .next()
        .ok_or_else(|| CliError::Input("missing start-vertex line".into()))?;
    let start: u32 = match start_line.split_whitespace().collect::<Vec<_>>()[..] {
        ["s", v] => v.parse().map_err(|_| {
            CliError::Input(format!("line {ln}: expected `s <vertex>`, got {start_line:?}"))
        })?,
        _ => {
            return Err(CliError::Input(format!(
                "line {ln}: expected `s <vertex>`, got {start_line:?}"
            )))
        }
    };
    if start == 0 || start > n {
        return Err(CliError::Input(format!(
            "line {ln}: start vertex {start} out of range [1, {n}]"
        )));
    }
    let mut arcs = Vec::with_capacity(m as usize);
    for _ in 0..m {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| CliError::Input(format!("expected {m} arc lines, file ended early")))?;
        let (t, h) = parse_pair(line, ln)?;
        arcs.push((t, h));
    }
    if let Some((ln, _)) = lines.next() {
        return Err(CliError::Input(format!("line {ln}: trailing content after {m} arcs")));
    }
    let graph = FlowGraph::new(n, start, &arcs).map_err(|e| CliError::Input(format!("{e}")))?;
    Ok(ParsedGraph { graph, start })
}

pub fn parse_tree(text: &str, pg: &ParsedGraph) -> Result<SpanningTree, CliError> {
    let n = pg.graph.vertex_count();
    let mut pairs = Vec::with_capacity(n as usize - 1);
    for (ln, line) in significant_lines(text) {
        let (u, v) = parse_pair(line, ln)?;
        if u == 0 || u > n || v == 0 || v > n {
            return Err(CliError::Input(format!(
                "line {ln}: vertex out of range [1, {n}]"
            )));
        }
        pairs.push((pg.relabel(u), pg.relabel(v)));
    }
    SpanningTree::new(&pg.graph, &pairs).map_err(|e| CliError::Input(format!("{e}")))
}

/// Parses an arc set (count header then arcs), in internal labels.
pub fn parse_arcset(text: &str, pg: &ParsedGraph) -> Result<Vec<Arc>, CliError> {
    let n = pg.graph.vertex_count();
    let mut lines = significant_lines(text);
    let (ln, header) = lines
        .next()
        .ok_or_else(|| CliError::Input("empty arc-set file".into()))?;
    let count: usize = header
        .parse()
        .map_err(|_| CliError::Input(format!("line {ln}: expected arc count, got {header:?}")))?;
    let mut arcs = Vec::with_capacity(count);
    for _ in 0..count {
        let (ln, line) = lines.next().ok_or_else(|| {
            CliError::Input(format!("expected {count} arc lines, file ended early"))
        })?;
        let (u, v) = parse_pair(line, ln)?;
        if u == 0 || u > n || v == 0 || v > n {
            return Err(CliError::Input(format!(
                "line {ln}: vertex out of range [1, {n}]"
            )));
        }
        arcs.push(Arc::new(pg.relabel(u), pg.relabel(v)));
    }
    if let Some((ln, _)) = lines.next() {
        return Err(CliError::Input(format!(
            "line {ln}: trailing content after {count} arcs"
        )));
    }
    Ok(arcs)
}

/// Canonical edge-list serialization; reparses to an equal graph.
pub fn serialize_edgelist(g: &FlowGraph) -> String {
    let mut out = format!("{} {}\ns 1\n", g.vertex_count(), g.arc_count());
    for a in g.arcs() {
        out.push_str(&format!("{} {}\n", a.tail.0, a.head.0));
    }
    out
}

/// DOT export; tree arcs, if a tree is given, are attributed bold.
pub fn serialize_dot(g: &FlowGraph, t: Option<&SpanningTree>) -> String {
    let mut out = String::from("digraph {\n");
    for a in g.arcs() {
        let bold = t.map_or(false, |t| t.contains_arc(*a));
        if bold {
            out.push_str(&format!("  {} -> {} [style=bold];\n", a.tail.0, a.head.0));
        } else {
            out.push_str(&format!("  {} -> {};\n", a.tail.0, a.head.0));
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::path::PathBuf;

    const E2: &str = "4 5\ns 1\n1 2\n2 3\n1 3\n3 4\n2 4\n";

    #[test]
    fn parses_e2() {
        let pg = parse_flowgraph(E2).unwrap();
        assert_eq!(pg.graph.vertex_count(), 4);
        assert_eq!(pg.graph.arc_count(), 5);
        assert!(pg.graph.has_arc(VertexId(2), VertexId(4)));
    }

    #[test]
    fn comments_and_blanks_ignored() {
        let text = "# a diamond\n\n4 5\ns 1\n1 2\n2 3\n# middle\n1 3\n3 4\n2 4\n";
        assert_eq!(parse_flowgraph(text).unwrap().graph.arc_count(), 5);
    }

    #[test]
    fn rejects_unreachable() {
        let err = parse_flowgraph("3 1\ns 1\n1 2\n").unwrap_err();
        assert!(matches!(err, CliError::Input(_)));
        assert!(err.to_string().contains("unreachable"));
    }

    #[test]
    fn rejects_malformed_lines() {
        for bad in [
            "",
            "4\ns 1\n",
            "4 5\nstart 1\n1 2\n2 3\n1 3\n3 4\n2 4\n",
            "4 5\ns 9\n1 2\n2 3\n1 3\n3 4\n2 4\n",
            "4 5\ns 1\n1 2\n2 3\n1 3\n3 4\n",
            "4 5\ns 1\n1 2\n2 3\n1 3\n3 4\n2 4\n5 5\n",
            "4 5\ns 1\n1 2\n2 3\n1 x\n3 4\n2 4\n",
            "0 0\ns 1\n",
        ] {
            assert!(parse_flowgraph(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn start_relabeling_round_trips() {
        // same diamond written with s = 3: labels 3 and 1 swap internally
        let pg = parse_flowgraph("4 5\ns 3\n3 2\n2 1\n3 1\n1 4\n2 4\n").unwrap();
        assert_eq!(pg.graph.start(), VertexId(1));
        assert_eq!(pg.relabel(3), 1);
        assert_eq!(pg.relabel(1), 3);
        assert_eq!(pg.relabel(2), 2);
        // tree in original labels
        let t = parse_tree("3 2\n2 1\n1 4\n", &pg).unwrap();
        assert_eq!(t.parent(VertexId(2)), Some(VertexId(1)));
    }

    #[test]
    fn tree_and_arcset_errors() {
        let pg = parse_flowgraph(E2).unwrap();
        assert!(parse_tree("1 2\n2 3\n4 4\n", &pg).is_err());
        assert!(parse_tree("1 2\n2 3\n", &pg).is_err());
        assert!(parse_arcset("2\n1 3\n", &pg).is_err());
        assert!(parse_arcset("1\n9 4\n", &pg).is_err());
        let arcs = parse_arcset("2\n1 3\n2 4\n", &pg).unwrap();
        assert_eq!(arcs, vec![Arc::new(1, 3), Arc::new(2, 4)]);
    }

    #[test]
    fn dot_marks_tree_arcs() {
        let pg = parse_flowgraph(E2).unwrap();
        let t = parse_tree("1 2\n2 3\n3 4\n", &pg).unwrap();
        let dot = serialize_dot(&pg.graph, Some(&t));
        assert_eq!(dot.matches("style=bold").count(), 3);
        assert_eq!(dot.matches("->").count(), 5);
        let plain = serialize_dot(&pg.graph, None);
        assert_eq!(plain.matches("style=bold").count(), 0);
    }

    #[test]
    fn read_input_missing_file() {
        let err = read_input(&PathBuf::from("/nonexistent/x.fg")).unwrap_err();
        assert_eq!(err.code(), 2);
    }

    proptest! {
        #[test]
        fn edgelist_round_trip(n in 1u32..30, extra in 0usize..60, seed in 0u64..500) {
            let m = (n as usize - 1 + extra).min(n as usize * (n as usize - 1));
            let g = domcert_core::random_flowgraph(n, m, seed).unwrap();
            let text = serialize_edgelist(&g);
            let back = parse_flowgraph(&text).unwrap();
            prop_assert_eq!(&back.graph, &g);
            // serialization is canonical: a second round trip is identical
            prop_assert_eq!(serialize_edgelist(&back.graph), text);
        }

        #[test]
        fn parser_never_panics(text in "\\PC*") {
            let _ = parse_flowgraph(&text);
        }
    }
}

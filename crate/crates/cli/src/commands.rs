//! One function per subcommand. Each returns the stdout payload; errors
//! carry the exit code (1 verification, 2 input, 3 internal).

use std::fmt::Write as _;
use std::path::Path;

use domcert_core::{
    build_divergent_trees, check_divergent, check_low_high, compute_valid_set,
    construct_low_high, dominator_tree, extract_spanning_tree, is_valid_set, lower_bound,
    random_flowgraph, ArcSet, DivergentError, SpanningTree, TreeStrategy, ValidSetError,
    VertexId,
};

use crate::{
    parse_arcset, parse_flowgraph, parse_tree, read_input, serialize_dot, serialize_edgelist,
    CliError, ParsedGraph,
};

fn load_graph(path: &Path) -> Result<ParsedGraph, CliError> {
    parse_flowgraph(&read_input(path)?)
}

fn load_tree(path: &Path, pg: &ParsedGraph) -> Result<SpanningTree, CliError> {
    parse_tree(&read_input(path)?, pg)
}

/// `dom`: one line `v d(v)` per non-start vertex, ascending.
pub fn cmd_dom(graph: &Path) -> Result<String, CliError> {
    let pg = load_graph(graph)?;
    let d = dominator_tree(&pg.graph);
    let mut rows: Vec<(u32, u32)> = (2..=pg.graph.vertex_count())
        .map(|v| {
            let v = VertexId(v);
            (pg.ext(v), pg.ext(d.idom(v).expect("non-root")))
        })
        .collect();
    rows.sort_unstable();
    let mut out = String::new();
    for (v, dv) in rows {
        writeln!(out, "{v} {dv}").unwrap();
    }
    Ok(out)
}

/// `lowhigh`: the constructed order, one vertex per line, self-checked.
pub fn cmd_lowhigh(graph: &Path) -> Result<String, CliError> {
    let pg = load_graph(graph)?;
    let mut d = dominator_tree(&pg.graph);
    let order = construct_low_high(&pg.graph, &mut d)
        .map_err(|e| CliError::Internal(format!("{e}")))?;
    check_low_high(&pg.graph, &d, &order)
        .map_err(|e| CliError::Internal(format!("self-check failed: {e}")))?;
    let mut out = String::new();
    for v in order.sequence() {
        writeln!(out, "{}", pg.ext(v)).unwrap();
    }
    Ok(out)
}

/// `validset`: the arc count, then one arc per line, self-verified for
/// validity and minimal size before printing.
pub fn cmd_validset(graph: &Path, tree: &Path) -> Result<String, CliError> {
    let pg = load_graph(graph)?;
    let t = load_tree(tree, &pg)?;
    let mut d = dominator_tree(&pg.graph);
    let order = construct_low_high(&pg.graph, &mut d)
        .map_err(|e| CliError::Internal(format!("{e}")))?;
    let set = compute_valid_set(&pg.graph, &t, &d, &order).map_err(|e| match e {
        ValidSetError::NoQualifyingArc(_) => CliError::Internal(format!("{e}")),
        other => CliError::Input(format!("{other}")),
    })?;
    let valid = is_valid_set(&pg.graph, &t, &set)
        .map_err(|e| CliError::Internal(format!("{e}")))?;
    if !valid {
        return Err(CliError::Internal("computed arc set failed validity".into()));
    }
    if set.len() != lower_bound(&t, &d) {
        return Err(CliError::Internal(
            "computed arc set misses the size lower bound".into(),
        ));
    }
    let mut rows: Vec<(u32, u32)> = set
        .iter()
        .map(|a| (pg.ext(a.tail), pg.ext(a.head)))
        .collect();
    rows.sort_unstable();
    let mut out = format!("{}\n", rows.len());
    for (x, v) in rows {
        writeln!(out, "{x} {v}").unwrap();
    }
    Ok(out)
}

/// `verify`: exit 0 when the arc set is valid for the tree; otherwise
/// report the first vertex whose immediate dominator changes and exit 1.
pub fn cmd_verify(graph: &Path, tree: &Path, arcset: &Path) -> Result<String, CliError> {
    let pg = load_graph(graph)?;
    let t = load_tree(tree, &pg)?;
    let arcs = parse_arcset(&read_input(arcset)?, &pg)?;
    for a in &arcs {
        if !pg.graph.has_arc(a.tail, a.head) {
            return Err(CliError::Input(format!(
                "arc ({}, {}) not in graph",
                pg.ext(a.tail),
                pg.ext(a.head)
            )));
        }
    }
    let candidate = ArcSet::from_arcs(arcs);
    if is_valid_set(&pg.graph, &t, &candidate)
        .map_err(|e| CliError::Input(format!("{e}")))?
    {
        return Ok(String::new());
    }
    // locate the first discrepancy for the report
    let mut sub_arcs: Vec<domcert_core::Arc> = t.arcs().collect();
    sub_arcs.extend(candidate.iter());
    let sub = pg
        .graph
        .subgraph(&sub_arcs)
        .map_err(|e| CliError::Input(format!("{e}")))?;
    let d_full = dominator_tree(&pg.graph);
    let d_sub = dominator_tree(&sub);
    let mut rows: Vec<(u32, u32, u32)> = (2..=pg.graph.vertex_count())
        .filter_map(|v| {
            let v = VertexId(v);
            let a = d_full.idom(v).expect("non-root");
            let b = d_sub.idom(v).expect("non-root");
            (a != b).then(|| (pg.ext(v), pg.ext(a), pg.ext(b)))
        })
        .collect();
    rows.sort_unstable();
    let (v, a, b) = rows[0];
    Err(CliError::Verification(format!(
        "vertex {v}: immediate dominator {a} in the graph, {b} in the subgraph"
    )))
}

/// `divergent`: parent lines of the two trees under `B:` and `R:`
/// headers, self-checked for divergence.
pub fn cmd_divergent(graph: &Path, restrict: Option<&Path>) -> Result<String, CliError> {
    let pg = load_graph(graph)?;
    let allowed = match restrict {
        None => None,
        Some(path) => {
            let mut arcs = parse_arcset(&read_input(path)?, &pg)?;
            for a in &arcs {
                if !pg.graph.has_arc(a.tail, a.head) {
                    return Err(CliError::Input(format!(
                        "arc ({}, {}) not in graph",
                        pg.ext(a.tail),
                        pg.ext(a.head)
                    )));
                }
            }
            arcs.sort_unstable();
            arcs.dedup();
            Some(arcs)
        }
    };
    let mut d = dominator_tree(&pg.graph);
    let order = construct_low_high(&pg.graph, &mut d)
        .map_err(|e| CliError::Internal(format!("{e}")))?;
    let pair = build_divergent_trees(&pg.graph, &d, &order, allowed.as_deref()).map_err(
        |DivergentError::ChoiceUnavailable(v)| {
            CliError::Verification(format!(
                "no qualifying arc choice for vertex {} in the allowed set",
                pg.ext(v)
            ))
        },
    )?;
    check_divergent(&pg.graph, &d, &pair)
        .map_err(|e| CliError::Internal(format!("self-check failed: {e}")))?;
    let mut out = String::new();
    let emit = |out: &mut String, header: &str, parent: &dyn Fn(VertexId) -> Option<VertexId>| {
        writeln!(out, "{header}").unwrap();
        let mut rows: Vec<(u32, u32)> = (2..=pg.graph.vertex_count())
            .map(|v| {
                let v = VertexId(v);
                (pg.ext(v), pg.ext(parent(v).expect("non-root")))
            })
            .collect();
        rows.sort_unstable();
        for (v, p) in rows {
            writeln!(out, "{v} {p}").unwrap();
        }
    };
    emit(&mut out, "B:", &|v| pair.b_parent(v));
    emit(&mut out, "R:", &|v| pair.r_parent(v));
    Ok(out)
}

/// `gen`: writes `<out>.fg` (or `.dot`), plus `<out>.tree` when a
/// strategy is given. Deterministic per seed.
pub fn cmd_gen(
    n: u32,
    m: usize,
    seed: u64,
    tree: Option<&str>,
    out: &Path,
    dot: bool,
) -> Result<String, CliError> {
    if n == 0 {
        return Err(CliError::Input("vertex count must be positive".into()));
    }
    if n > 1 && m < n as usize - 1 {
        return Err(CliError::Input(format!(
            "need at least {} arcs to span {n} vertices",
            n - 1
        )));
    }
    let g = random_flowgraph(n, m, seed).map_err(|e| CliError::Input(format!("{e}")))?;
    let t = match tree {
        None => None,
        Some("bfs") => Some(extract_spanning_tree(&g, TreeStrategy::Bfs)),
        Some("dfs") => Some(extract_spanning_tree(&g, TreeStrategy::Dfs)),
        Some("random") => Some(extract_spanning_tree(&g, TreeStrategy::Random(seed))),
        Some(other) => {
            return Err(CliError::Input(format!("unknown tree strategy {other:?}")))
        }
    };
    let graph_path = append_ext(out, if dot { "dot" } else { "fg" });
    let payload = if dot {
        serialize_dot(&g, t.as_ref())
    } else {
        serialize_edgelist(&g)
    };
    std::fs::write(&graph_path, payload)
        .map_err(|e| CliError::Input(format!("{}: {e}", graph_path.display())))?;
    if let Some(t) = &t {
        let mut text = String::new();
        for a in t.arcs() {
            writeln!(text, "{} {}", a.tail.0, a.head.0).unwrap();
        }
        let tree_path = append_ext(out, "tree");
        std::fs::write(&tree_path, text)
            .map_err(|e| CliError::Input(format!("{}: {e}", tree_path.display())))?;
    }
    Ok(String::new())
}

fn append_ext(prefix: &Path, ext: &str) -> std::path::PathBuf {
    let mut s = prefix.as_os_str().to_os_string();
    s.push(".");
    s.push(ext);
    std::path::PathBuf::from(s)
}

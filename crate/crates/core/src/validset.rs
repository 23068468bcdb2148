//! Minimum valid sets.
//!
//! A set `A'` of non-tree arcs is valid for a spanning tree `T` when the
//! subgraph `(V, A_T ∪ A')` has the same dominators as the full graph.
//! The minimum size is forced: every vertex whose tree parent differs
//! from its immediate dominator needs one entering arc, and one entering
//! arc per such vertex suffices when the picks bracket a low-high order.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use crate::dominators::{dominator_tree, DominatorTree};
use crate::graph::{Arc, FlowGraph, GraphError, SpanningTree, VertexId};
use crate::lowhigh::LowHighOrder;

/// A set of arcs, ordered for deterministic iteration and comparison.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ArcSet {
    arcs: BTreeSet<Arc>,
}

impl ArcSet {
    pub fn new() -> ArcSet {
        ArcSet::default()
    }

    pub fn from_arcs(arcs: impl IntoIterator<Item = Arc>) -> ArcSet {
        ArcSet {
            arcs: arcs.into_iter().collect(),
        }
    }

    pub fn insert(&mut self, a: Arc) -> bool {
        self.arcs.insert(a)
    }

    pub fn contains(&self, a: Arc) -> bool {
        self.arcs.contains(&a)
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    /// Ascending arc order.
    pub fn iter(&self) -> impl Iterator<Item = Arc> + '_ {
        self.arcs.iter().copied()
    }
}

impl fmt::Display for ArcSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, a) in self.arcs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValidSetError {
    /// No in-arc of `v` satisfies the case that applies to it. Cannot
    /// happen when the order is a genuine low-high order of D.
    NoQualifyingArc(VertexId),
    /// A candidate arc is not an arc of the graph.
    Graph(GraphError),
    /// Brute-force enumeration is guarded to few non-tree arcs.
    TooLarge { non_tree: usize, limit: usize },
}

impl fmt::Display for ValidSetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidSetError::NoQualifyingArc(v) => {
                write!(f, "no qualifying in-arc for vertex {v}")
            }
            ValidSetError::Graph(e) => write!(f, "{e}"),
            ValidSetError::TooLarge { non_tree, limit } => write!(
                f,
                "instance too large for brute force: {non_tree} non-tree arcs > {limit}"
            ),
        }
    }
}

impl From<GraphError> for ValidSetError {
    fn from(e: GraphError) -> ValidSetError {
        ValidSetError::Graph(e)
    }
}

/// Number of vertices whose tree parent differs from their immediate
/// dominator. Every valid set has at least this many arcs: such a vertex
/// keeps its dominators only if some non-tree arc enters it.
pub fn lower_bound(t: &SpanningTree, d: &DominatorTree) -> usize {
    let n = d.vertex_count();
    (2..=n)
        .filter(|&v| t.parent(VertexId(v)) != d.idom(VertexId(v)))
        .count()
}

/// Computes a minimum valid set for `t`, one arc per vertex with
/// `t(v) != d(v)`. `order` must be a low-high order adopted as the
/// stored preorder of `d` (see [`construct_low_high`]); the picked arc
/// either is the parent arc `(d(v), v)` or pairs with the tree arc to
/// bracket `v` in the order. Ties break deterministically: the closest
/// qualifying in-arc in order position.
///
/// [`construct_low_high`]: crate::lowhigh::construct_low_high
pub fn compute_valid_set(
    g: &FlowGraph,
    t: &SpanningTree,
    d: &DominatorTree,
    order: &LowHighOrder,
) -> Result<ArcSet, ValidSetError> {
    let n = g.vertex_count();
    let mut out = ArcSet::new();
    for v in 2..=n {
        let v = VertexId(v);
        let dv = d.idom(v).expect("non-root");
        let tv = t.parent(v).expect("non-root");
        if tv == dv {
            continue;
        }
        if g.has_arc(dv, v) {
            out.insert(Arc { tail: dv, head: v });
            continue;
        }
        let rv = order.position(v);
        let pick = if order.position(tv) > rv {
            // tree arc is the high: pick the closest in-arc from below.
            // t(v) cannot be a descendant of v here, or T would cycle
            // through v's subtree
            debug_assert!(!d.is_descendant(v, tv));
            g.in_neighbors(v)
                .iter()
                .copied()
                .filter(|&x| order.position(x) < rv)
                .max_by_key(|&x| order.position(x))
        } else {
            // tree arc is the low: pick the closest non-descendant from
            // above
            g.in_neighbors(v)
                .iter()
                .copied()
                .filter(|&x| order.position(x) > rv && !d.is_descendant(v, x))
                .min_by_key(|&x| order.position(x))
        };
        match pick {
            Some(x) => {
                out.insert(Arc { tail: x, head: v });
            }
            None => return Err(ValidSetError::NoQualifyingArc(v)),
        }
    }
    Ok(out)
}

/// Checks validity from the definition: the subgraph on the tree arcs
/// plus `candidate` must reproduce the immediate dominators of `g`.
pub fn is_valid_set(
    g: &FlowGraph,
    t: &SpanningTree,
    candidate: &ArcSet,
) -> Result<bool, ValidSetError> {
    let mut arcs: Vec<Arc> = t.arcs().collect();
    for a in candidate.iter() {
        if !g.has_arc(a.tail, a.head) {
            return Err(ValidSetError::Graph(GraphError::ArcNotInGraph(a)));
        }
        arcs.push(a);
    }
    let sub = g.subgraph(&arcs)?;
    let d_sub = dominator_tree(&sub);
    let d_full = dominator_tree(g);
    Ok((2..=g.vertex_count())
        .all(|v| d_sub.idom(VertexId(v)) == d_full.idom(VertexId(v))))
}

/// Tries candidate sets of increasing size, lexicographically within a
/// size, and returns the first valid one. Guarded to at most 40 non-tree
/// arcs; still exponential in the answer size, so callers should keep n
/// small.
pub fn brute_force_min_valid_set(
    g: &FlowGraph,
    t: &SpanningTree,
) -> Result<ArcSet, ValidSetError> {
    const LIMIT: usize = 40;
    let non_tree: Vec<Arc> = g
        .arcs()
        .iter()
        .copied()
        .filter(|&a| !t.contains_arc(a))
        .collect();
    if non_tree.len() > LIMIT {
        return Err(ValidSetError::TooLarge {
            non_tree: non_tree.len(),
            limit: LIMIT,
        });
    }
    // the full dominator tree is the fixed reference for every candidate
    let d_full = dominator_tree(g);
    let tree_arcs: Vec<Arc> = t.arcs().collect();
    let n = g.vertex_count();
    let mut scratch: Vec<Arc> = Vec::with_capacity(tree_arcs.len() + non_tree.len());
    let mut check = |idx: &[usize]| -> bool {
        scratch.clear();
        scratch.extend_from_slice(&tree_arcs);
        scratch.extend(idx.iter().map(|&i| non_tree[i]));
        let sub = g.subgraph(&scratch).expect("arcs taken from g");
        let d_sub = dominator_tree(&sub);
        (2..=n).all(|v| d_sub.idom(VertexId(v)) == d_full.idom(VertexId(v)))
    };
    // advance `idx` to the next k-combination of 0..n in lexicographic
    // order; false once exhausted
    fn next_combination(idx: &mut [usize], n: usize) -> bool {
        let k = idx.len();
        let mut i = k;
        while i > 0 {
            i -= 1;
            if idx[i] < i + n - k {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                return true;
            }
        }
        false
    }

    for k in 0..=non_tree.len() {
        // the arc list is sorted, so lexicographic index combinations are
        // also lexicographic on arc sets
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            if check(&idx) {
                return Ok(ArcSet::from_arcs(idx.iter().map(|&i| non_tree[i])));
            }
            if !next_combination(&mut idx, non_tree.len()) {
                break;
            }
        }
    }
    // the set of all non-tree arcs restores g itself, so this is
    // unreachable for well-formed inputs
    Err(ValidSetError::NoQualifyingArc(VertexId(1)))
}

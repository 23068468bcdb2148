//! Flow graphs and rooted spanning trees.
//!
//! Vertices are dense 1-based integers. A [`FlowGraph`] always has start
//! vertex 1 internally: constructors that accept an arbitrary start vertex
//! swap its label with 1 before validation. Every vertex must be reachable
//! from the start; graphs violating this are rejected at construction.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// 1-based vertex identifier, contiguous in `[1, n]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Directed arc `(tail, head)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arc {
    pub tail: VertexId,
    pub head: VertexId,
}

impl Arc {
    pub fn new(tail: u32, head: u32) -> Self {
        Arc {
            tail: VertexId(tail),
            head: VertexId(head),
        }
    }
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.tail, self.head)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphError {
    /// Vertex id is zero or exceeds `n`.
    VertexOutOfRange { id: u32, n: u32 },
    /// A vertex is not reachable from the start vertex.
    Unreachable(VertexId),
    /// A tree arc is not an arc of the underlying graph.
    ArcNotInGraph(Arc),
    /// A vertex was assigned two parents in a tree description.
    TwoParents(VertexId),
    /// Following parent links does not reach the root.
    TreeCycle(VertexId),
    /// A tree over `n` vertices needs exactly `n - 1` parent arcs.
    WrongArcCount { expected: usize, got: usize },
    /// More arcs requested than a simple digraph on `n` vertices can hold.
    TooManyArcs { n: u32, m: usize },
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::VertexOutOfRange { id, n } => {
                write!(f, "vertex {id} out of range [1, {n}]")
            }
            GraphError::Unreachable(v) => write!(f, "vertex {v} unreachable from start vertex"),
            GraphError::ArcNotInGraph(a) => write!(f, "arc {a} not in graph"),
            GraphError::TwoParents(v) => write!(f, "vertex {v} has two parents"),
            GraphError::TreeCycle(v) => write!(f, "parent chain from vertex {v} never reaches the root"),
            GraphError::WrongArcCount { expected, got } => {
                write!(f, "expected {expected} tree arcs, got {got}")
            }
            GraphError::TooManyArcs { n, m } => {
                write!(f, "{m} arcs exceed simple-digraph capacity of {n} vertices")
            }
        }
    }
}

/// Directed graph with start vertex `s = 1` from which every vertex is
/// reachable. Arcs are de-duplicated and self-loop free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowGraph {
    n: u32,
    arcs: Vec<Arc>,
    /// CSR indices into `out_targets`: out-neighbors of v are
    /// `out_targets[out_start[v] .. out_start[v + 1]]`, ascending.
    out_start: Vec<u32>,
    out_targets: Vec<VertexId>,
    in_start: Vec<u32>,
    in_sources: Vec<VertexId>,
    dropped_self_loops: usize,
    dropped_duplicates: usize,
}

impl FlowGraph {
    /// Builds a flow graph from raw arcs. If `start != 1`, the labels of
    /// `start` and 1 are swapped so the start vertex is always 1.
    /// Self-loops are dropped and duplicate arcs collapsed; the counts are
    /// retained for diagnostics. Fails if any vertex id is out of range or
    /// any vertex is unreachable from the start.
    pub fn new(n: u32, start: u32, raw_arcs: &[(u32, u32)]) -> Result<FlowGraph, GraphError> {
        if start == 0 || start > n {
            return Err(GraphError::VertexOutOfRange { id: start, n });
        }
        let relabel = |id: u32| -> u32 {
            if id == start {
                1
            } else if id == 1 {
                start
            } else {
                id
            }
        };
        let mut dropped_self_loops = 0;
        let mut set = BTreeSet::new();
        for &(t, h) in raw_arcs {
            if t == 0 || t > n {
                return Err(GraphError::VertexOutOfRange { id: t, n });
            }
            if h == 0 || h > n {
                return Err(GraphError::VertexOutOfRange { id: h, n });
            }
            if t == h {
                dropped_self_loops += 1;
                continue;
            }
            set.insert((relabel(t), relabel(h)));
        }
        let dropped_duplicates = raw_arcs.len() - dropped_self_loops - set.len();
        let arcs: Vec<Arc> = set.iter().map(|&(t, h)| Arc::new(t, h)).collect();

        let mut g = FlowGraph {
            n,
            arcs,
            out_start: Vec::new(),
            out_targets: Vec::new(),
            in_start: Vec::new(),
            in_sources: Vec::new(),
            dropped_self_loops,
            dropped_duplicates,
        };
        g.build_adjacency();

        // every vertex must be reachable from s
        let mut seen = vec![false; n as usize + 1];
        let mut stack = vec![VertexId(1)];
        seen[1] = true;
        while let Some(v) = stack.pop() {
            for &w in g.out_neighbors(v) {
                if !seen[w.index()] {
                    seen[w.index()] = true;
                    stack.push(w);
                }
            }
        }
        for v in 1..=n {
            if !seen[v as usize] {
                return Err(GraphError::Unreachable(VertexId(v)));
            }
        }
        Ok(g)
    }

    fn build_adjacency(&mut self) {
        let n = self.n as usize;
        let mut out_start = vec![0u32; n + 2];
        let mut in_start = vec![0u32; n + 2];
        for a in &self.arcs {
            out_start[a.tail.index() + 1] += 1;
            in_start[a.head.index() + 1] += 1;
        }
        for v in 1..=n + 1 {
            out_start[v] += out_start[v - 1];
            in_start[v] += in_start[v - 1];
        }
        let mut out_targets = vec![VertexId(0); self.arcs.len()];
        let mut in_sources = vec![VertexId(0); self.arcs.len()];
        let mut out_pos = out_start.clone();
        let mut in_pos = in_start.clone();
        // arcs are sorted, so out lists come out ascending; in lists are
        // filled in arc order which is ascending by (tail, head), hence
        // each in list is ascending by tail as well
        for a in &self.arcs {
            out_targets[out_pos[a.tail.index()] as usize] = a.head;
            out_pos[a.tail.index()] += 1;
            in_sources[in_pos[a.head.index()] as usize] = a.tail;
            in_pos[a.head.index()] += 1;
        }
        self.out_start = out_start;
        self.out_targets = out_targets;
        self.in_start = in_start;
        self.in_sources = in_sources;
    }

    #[inline]
    pub fn vertex_count(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    #[inline]
    pub fn start(&self) -> VertexId {
        VertexId(1)
    }

    /// Arcs in ascending `(tail, head)` order.
    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (1..=self.n).map(VertexId)
    }

    #[inline]
    pub fn out_neighbors(&self, v: VertexId) -> &[VertexId] {
        let i = v.index();
        &self.out_targets[self.out_start[i] as usize..self.out_start[i + 1] as usize]
    }

    #[inline]
    pub fn in_neighbors(&self, v: VertexId) -> &[VertexId] {
        let i = v.index();
        &self.in_sources[self.in_start[i] as usize..self.in_start[i + 1] as usize]
    }

    pub fn has_arc(&self, tail: VertexId, head: VertexId) -> bool {
        self.out_neighbors(tail).binary_search(&head).is_ok()
    }

    pub fn dropped_self_loops(&self) -> usize {
        self.dropped_self_loops
    }

    pub fn dropped_duplicates(&self) -> usize {
        self.dropped_duplicates
    }

    /// Vertices reachable from `from` along paths that avoid `forbidden`
    /// entirely. `from` itself is included (unless it is forbidden, which
    /// the caller must not ask for).
    pub fn reachable_set(
        &self,
        from: VertexId,
        forbidden: Option<VertexId>,
    ) -> BTreeSet<VertexId> {
        debug_assert!(Some(from) != forbidden);
        let mut seen = vec![false; self.n as usize + 1];
        if let Some(x) = forbidden {
            seen[x.index()] = true;
        }
        let mut out = BTreeSet::new();
        let mut stack = vec![from];
        seen[from.index()] = true;
        out.insert(from);
        while let Some(v) = stack.pop() {
            for &w in self.out_neighbors(v) {
                if !seen[w.index()] {
                    seen[w.index()] = true;
                    out.insert(w);
                    stack.push(w);
                }
            }
        }
        out
    }

    /// The subgraph on the same vertex set containing exactly the given
    /// arcs. All arcs must belong to `self`.
    pub fn subgraph(&self, arcs: &[Arc]) -> Result<FlowGraph, GraphError> {
        for a in arcs {
            if !self.has_arc(a.tail, a.head) {
                return Err(GraphError::ArcNotInGraph(*a));
            }
        }
        let raw: Vec<(u32, u32)> = arcs.iter().map(|a| (a.tail.0, a.head.0)).collect();
        FlowGraph::new(self.n, 1, &raw)
    }
}

/// Spanning tree of a [`FlowGraph`], rooted at the start vertex, stored as
/// a parent map `v -> t(v)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningTree {
    /// `parent[v]` for v != root; `parent[root] = 0` sentinel.
    parent: Vec<u32>,
}

impl SpanningTree {
    /// Builds a spanning tree of `g` from `(parent, child)` pairs. Each
    /// pair must be an arc of `g`, each non-root vertex must get exactly
    /// one parent, and parent chains must reach the root.
    pub fn new(g: &FlowGraph, pairs: &[(u32, u32)]) -> Result<SpanningTree, GraphError> {
        let n = g.vertex_count();
        if pairs.len() != n as usize - 1 {
            return Err(GraphError::WrongArcCount {
                expected: n as usize - 1,
                got: pairs.len(),
            });
        }
        let mut parent = vec![0u32; n as usize + 1];
        for &(p, c) in pairs {
            if p == 0 || p > n {
                return Err(GraphError::VertexOutOfRange { id: p, n });
            }
            if c == 0 || c > n {
                return Err(GraphError::VertexOutOfRange { id: c, n });
            }
            if !g.has_arc(VertexId(p), VertexId(c)) {
                return Err(GraphError::ArcNotInGraph(Arc::new(p, c)));
            }
            if c == 1 {
                return Err(GraphError::TwoParents(VertexId(1)));
            }
            if parent[c as usize] != 0 {
                return Err(GraphError::TwoParents(VertexId(c)));
            }
            parent[c as usize] = p;
        }
        let t = SpanningTree { parent };
        // acyclicity: every parent chain must hit the root; vertices on
        // an already-verified chain are skipped, so this is linear
        let mut ok = vec![false; n as usize + 1];
        ok[1] = true;
        let mut path = Vec::new();
        for v in 2..=n {
            let mut cur = v;
            path.clear();
            while !ok[cur as usize] {
                path.push(cur);
                cur = t.parent[cur as usize];
                if path.len() >= n as usize {
                    return Err(GraphError::TreeCycle(VertexId(v)));
                }
            }
            for &u in &path {
                ok[u as usize] = true;
            }
        }
        Ok(t)
    }

    /// Constructs directly from a parent array (`parent[0]` and
    /// `parent[root]` ignored); used by tree-extraction strategies that
    /// build valid trees by construction.
    pub(crate) fn from_parent_array(parent: Vec<u32>) -> SpanningTree {
        SpanningTree { parent }
    }

    #[inline]
    pub fn root(&self) -> VertexId {
        VertexId(1)
    }

    pub fn vertex_count(&self) -> u32 {
        self.parent.len() as u32 - 1
    }

    /// Parent `t(v)`; `None` for the root.
    #[inline]
    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        if v.0 == 1 {
            None
        } else {
            Some(VertexId(self.parent[v.index()]))
        }
    }

    /// Tree arcs `(t(v), v)` in ascending child order.
    pub fn arcs(&self) -> impl Iterator<Item = Arc> + '_ {
        (2..self.parent.len() as u32).map(move |v| Arc::new(self.parent[v as usize], v))
    }

    pub fn contains_arc(&self, a: Arc) -> bool {
        a.head.0 != 1 && self.parent[a.head.index()] == a.tail.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub fn e2() -> FlowGraph {
        FlowGraph::new(4, 1, &[(1, 2), (2, 3), (1, 3), (3, 4), (2, 4)]).unwrap()
    }

    #[test]
    fn builds_and_indexes_e2() {
        let g = e2();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.arc_count(), 5);
        assert_eq!(g.out_neighbors(VertexId(1)), &[VertexId(2), VertexId(3)]);
        assert_eq!(g.in_neighbors(VertexId(4)), &[VertexId(2), VertexId(3)]);
        assert!(g.has_arc(VertexId(2), VertexId(4)));
        assert!(!g.has_arc(VertexId(4), VertexId(2)));
    }

    #[test]
    fn normalizes_duplicates_and_self_loops() {
        let g = FlowGraph::new(3, 1, &[(1, 2), (1, 2), (2, 2), (2, 3)]).unwrap();
        assert_eq!(g.arc_count(), 2);
        assert_eq!(g.dropped_duplicates(), 1);
        assert_eq!(g.dropped_self_loops(), 1);
    }

    #[test]
    fn rejects_unreachable_vertex() {
        let err = FlowGraph::new(3, 1, &[(1, 2)]).unwrap_err();
        assert_eq!(err, GraphError::Unreachable(VertexId(3)));
    }

    #[test]
    fn relabels_nontrivial_start() {
        let g = FlowGraph::new(3, 2, &[(2, 1), (2, 3)]).unwrap();
        assert_eq!(g.start(), VertexId(1));
        // old 2 is new 1, old 1 is new 2
        assert!(g.has_arc(VertexId(1), VertexId(2)));
        assert!(g.has_arc(VertexId(1), VertexId(3)));
    }

    #[test]
    fn reachable_set_avoiding_vertex() {
        let g = e2();
        let r: Vec<u32> = g
            .reachable_set(VertexId(1), Some(VertexId(2)))
            .into_iter()
            .map(|v| v.0)
            .collect();
        assert_eq!(r, [1, 3, 4]);
        let all: Vec<u32> = g
            .reachable_set(VertexId(1), None)
            .into_iter()
            .map(|v| v.0)
            .collect();
        assert_eq!(all, [1, 2, 3, 4]);
    }

    #[test]
    fn reachable_set_e6() {
        let g = FlowGraph::new(4, 1, &[(1, 2), (2, 3), (1, 4), (3, 4)]).unwrap();
        let r: Vec<u32> = g
            .reachable_set(VertexId(1), Some(VertexId(2)))
            .into_iter()
            .map(|v| v.0)
            .collect();
        assert_eq!(r, [1, 4]);
    }

    #[test]
    fn spanning_tree_validation() {
        let g = e2();
        let t = SpanningTree::new(&g, &[(1, 2), (2, 3), (3, 4)]).unwrap();
        assert_eq!(t.parent(VertexId(4)), Some(VertexId(3)));
        assert_eq!(t.parent(VertexId(1)), None);

        assert_eq!(
            SpanningTree::new(&g, &[(1, 2), (2, 3), (4, 3)]).unwrap_err(),
            GraphError::ArcNotInGraph(Arc::new(4, 3))
        );
        assert_eq!(
            SpanningTree::new(&g, &[(1, 2), (2, 3)]).unwrap_err(),
            GraphError::WrongArcCount {
                expected: 3,
                got: 2
            }
        );
        assert_eq!(
            SpanningTree::new(&g, &[(1, 2), (1, 3), (1, 3)]).unwrap_err(),
            GraphError::TwoParents(VertexId(3))
        );
    }
}

//! Dominator trees.
//!
//! The fast path is the semi-NCA algorithm: a classical semi-dominator
//! pass with path compression followed by an NCA walk that
//! turns semi-dominators into immediate dominators. The naive
//! vertex-removal oracle computes the same tree from the definition of
//! domination and is meant for small instances and cross-checks.

use alloc::vec;
use alloc::vec::Vec;

use crate::graph::{FlowGraph, VertexId};

/// Dominator tree over the vertices of a flow graph, rooted at the start
/// vertex, with a preorder index for constant-time descendant queries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominatorTree {
    /// `idom[v]` for v != root; `idom[root] = 0`.
    idom: Vec<u32>,
    /// Children of each vertex, ascending.
    children: Vec<Vec<VertexId>>,
    /// Preorder rank in `[1, n]` of each vertex. Initially the canonical
    /// preorder (children visited in ascending id); may later be replaced
    /// by any other preorder of the same tree, e.g. a low-high order.
    pre: Vec<u32>,
    /// Subtree size of each vertex (preorder independent).
    size: Vec<u32>,
}

impl DominatorTree {
    fn from_idom(n: u32, idom: Vec<u32>) -> DominatorTree {
        let mut children: Vec<Vec<VertexId>> = vec![Vec::new(); n as usize + 1];
        for v in 2..=n {
            children[idom[v as usize] as usize].push(VertexId(v));
        }
        let mut t = DominatorTree {
            idom,
            children,
            pre: vec![0; n as usize + 1],
            size: vec![0; n as usize + 1],
        };
        t.recompute_index();
        t
    }

    /// Recomputes `pre` (canonical preorder, ascending children) and
    /// `size` by an iterative traversal.
    fn recompute_index(&mut self) {
        let n = self.vertex_count();
        let mut next = 1u32;
        // (vertex, next child index)
        let mut stack: Vec<(VertexId, usize)> = vec![(VertexId(1), 0)];
        self.pre[1] = next;
        while let Some(&mut (v, ref mut ci)) = stack.last_mut() {
            if *ci < self.children[v.index()].len() {
                let c = self.children[v.index()][*ci];
                *ci += 1;
                next += 1;
                self.pre[c.index()] = next;
                stack.push((c, 0));
            } else {
                stack.pop();
            }
        }
        debug_assert_eq!(next, n);
        for v in (1..=n).rev() {
            // children have larger ids than nothing in particular; compute
            // sizes bottom-up over idom links instead
            self.size[v as usize] = 1;
        }
        // accumulate subtree sizes in decreasing preorder
        let mut by_pre: Vec<VertexId> = vec![VertexId(0); n as usize + 1];
        for v in 1..=n {
            by_pre[self.pre[v as usize] as usize] = VertexId(v);
        }
        for r in (2..=n).rev() {
            let v = by_pre[r as usize];
            let p = self.idom[v.index()] as usize;
            self.size[p] += self.size[v.index()];
        }
    }

    pub fn vertex_count(&self) -> u32 {
        self.idom.len() as u32 - 1
    }

    pub fn root(&self) -> VertexId {
        VertexId(1)
    }

    /// Immediate dominator `d(v)`; `None` for the root.
    #[inline]
    pub fn idom(&self, v: VertexId) -> Option<VertexId> {
        if v.0 == 1 {
            None
        } else {
            Some(VertexId(self.idom[v.index()]))
        }
    }

    #[inline]
    pub fn children(&self, v: VertexId) -> &[VertexId] {
        &self.children[v.index()]
    }

    /// Rank of `v` in the stored preorder.
    #[inline]
    pub fn preorder_rank(&self, v: VertexId) -> u32 {
        self.pre[v.index()]
    }

    #[inline]
    pub fn subtree_size(&self, v: VertexId) -> u32 {
        self.size[v.index()]
    }

    /// True iff `w` lies in the subtree of `v` (v counts as its own
    /// descendant). O(1) via preorder intervals.
    #[inline]
    pub fn is_descendant(&self, v: VertexId, w: VertexId) -> bool {
        let pv = self.pre[v.index()];
        let pw = self.pre[w.index()];
        pv <= pw && pw < pv + self.size[v.index()]
    }

    /// Vertices in the stored preorder.
    pub fn preorder(&self) -> Vec<VertexId> {
        let n = self.vertex_count();
        let mut by_pre = vec![VertexId(0); n as usize + 1];
        for v in 1..=n {
            by_pre[self.pre[v as usize] as usize] = VertexId(v);
        }
        by_pre.remove(0);
        by_pre
    }

    /// Replaces the stored preorder by `pos` (rank per vertex, 1-based).
    /// Returns false, leaving the tree untouched, if `pos` is not a
    /// preorder of this tree.
    pub fn adopt_preorder(&mut self, pos: &[u32]) -> bool {
        let n = self.vertex_count();
        if pos.len() != n as usize + 1 || pos[1] != 1 {
            return false;
        }
        let mut seen = vec![false; n as usize + 1];
        for v in 1..=n {
            let r = pos[v as usize];
            if r == 0 || r > n || seen[r as usize] {
                return false;
            }
            seen[r as usize] = true;
        }
        // parent-before-child plus contiguity: the ranks inside each
        // subtree must form the interval [pos(v), pos(v) + size(v))
        let mut min_rank: Vec<u32> = pos.to_vec();
        let mut max_rank: Vec<u32> = pos.to_vec();
        let mut by_old = vec![VertexId(0); n as usize + 1];
        for v in 1..=n {
            by_old[self.pre[v as usize] as usize] = VertexId(v);
        }
        for r in (2..=n).rev() {
            let v = by_old[r as usize];
            let p = self.idom[v.index()] as usize;
            min_rank[p] = min_rank[p].min(min_rank[v.index()]);
            max_rank[p] = max_rank[p].max(max_rank[v.index()]);
        }
        for v in 1..=n as usize {
            if min_rank[v] != pos[v] || max_rank[v] - pos[v] + 1 != self.size[v] {
                return false;
            }
        }
        for v in 1..=n as usize {
            self.pre[v] = pos[v];
        }
        true
    }
}

/// Computes the dominator tree of `g` by semi-NCA.
pub fn dominator_tree(g: &FlowGraph) -> DominatorTree {
    let n = g.vertex_count() as usize;
    if n == 1 {
        return DominatorTree::from_idom(1, vec![0, 0]);
    }

    // iterative DFS from the start vertex, ascending neighbor order
    let mut dfn = vec![usize::MAX; n + 1]; // vertex -> dfs number (0-based)
    let mut vert = vec![VertexId(0); n]; // dfs number -> vertex
    let mut parent = vec![0usize; n]; // dfs number -> dfs number
    let mut stack: Vec<(VertexId, usize)> = Vec::new();
    dfn[1] = 0;
    vert[0] = VertexId(1);
    let mut count = 1usize;
    stack.push((VertexId(1), 0));
    while let Some(&mut (v, ref mut ni)) = stack.last_mut() {
        let neigh = g.out_neighbors(v);
        if *ni < neigh.len() {
            let w = neigh[*ni];
            *ni += 1;
            if dfn[w.index()] == usize::MAX {
                dfn[w.index()] = count;
                vert[count] = w;
                parent[count] = dfn[v.index()];
                count += 1;
                stack.push((w, 0));
            }
        } else {
            stack.pop();
        }
    }
    debug_assert_eq!(count, n); // FlowGraph guarantees reachability

    // semi-dominators via path compression over the DFS-tree forest
    let mut sdom: Vec<usize> = (0..n).collect();
    let mut label: Vec<usize> = (0..n).collect(); // min sdom on compressed path
    let mut ancestor: Vec<usize> = vec![usize::MAX; n];
    let mut comp_stack: Vec<usize> = Vec::new();

    for w in (1..n).rev() {
        let v = vert[w];
        for &u in g.in_neighbors(v) {
            let j = dfn[u.index()];
            let cand = if j <= w {
                j
            } else {
                // eval with iterative path compression
                let mut x = j;
                while ancestor[x] != usize::MAX && ancestor[ancestor[x]] != usize::MAX {
                    comp_stack.push(x);
                    x = ancestor[x];
                }
                while let Some(y) = comp_stack.pop() {
                    let a = ancestor[y];
                    if sdom[label[a]] < sdom[label[y]] {
                        label[y] = label[a];
                    }
                    ancestor[y] = ancestor[a];
                }
                sdom[label[j]]
            };
            if cand < sdom[w] {
                sdom[w] = cand;
            }
        }
        ancestor[w] = parent[w];
    }

    // NCA pass: in preorder, climb provisional idoms until at or above
    // the semi-dominator
    let mut idom_dfn: Vec<usize> = vec![0; n];
    for w in 1..n {
        let mut a = parent[w];
        while a > sdom[w] {
            a = idom_dfn[a];
        }
        idom_dfn[w] = a;
    }

    let mut idom = vec![0u32; n + 1];
    for w in 1..n {
        idom[vert[w].index()] = vert[idom_dfn[w]].0;
    }
    DominatorTree::from_idom(n as u32, idom)
}

/// Computes the dominator tree from first principles: `v` dominates `w`
/// iff `w` is unreachable once `v` is removed. Quadratic-ish; intended
/// for small instances as an independent oracle.
pub fn dominator_tree_naive(g: &FlowGraph) -> DominatorTree {
    let n = g.vertex_count();
    // dom_count[v] = number of dominators of v (including itself)
    let mut dominators: Vec<Vec<VertexId>> = vec![Vec::new(); n as usize + 1];
    for v in 1..=n {
        dominators[v as usize].push(VertexId(v));
    }
    for v in g.vertices() {
        if v == g.start() {
            // the start vertex dominates everything
            for w in 2..=n {
                dominators[w as usize].push(v);
            }
            continue;
        }
        let reach = g.reachable_set(g.start(), Some(v)).into_iter().collect::<Vec<_>>();
        let mut reachable = vec![false; n as usize + 1];
        for w in reach {
            reachable[w.index()] = true;
        }
        for w in 1..=n {
            if w != v.0 && !reachable[w as usize] {
                dominators[w as usize].push(v);
            }
        }
    }
    // the proper dominators of w form a chain; the immediate dominator is
    // the deepest one, i.e. the one with the most dominators of its own
    let mut idom = vec![0u32; n as usize + 1];
    for w in 2..=n {
        let mut best = VertexId(1);
        for &d in &dominators[w as usize] {
            if d.0 != w && dominators[d.index()].len() > dominators[best.index()].len() {
                best = d;
            }
        }
        idom[w as usize] = best.0;
    }
    DominatorTree::from_idom(n, idom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::FlowGraph;

    fn idoms(t: &DominatorTree) -> Vec<(u32, u32)> {
        (2..=t.vertex_count())
            .map(|v| (v, t.idom(VertexId(v)).unwrap().0))
            .collect()
    }

    #[test]
    fn e2_flat() {
        let g = FlowGraph::new(4, 1, &[(1, 2), (2, 3), (1, 3), (3, 4), (2, 4)]).unwrap();
        assert_eq!(idoms(&dominator_tree(&g)), [(2, 1), (3, 1), (4, 1)]);
        assert_eq!(idoms(&dominator_tree_naive(&g)), [(2, 1), (3, 1), (4, 1)]);
    }

    #[test]
    fn e4_chain() {
        let g = FlowGraph::new(3, 1, &[(1, 2), (2, 3)]).unwrap();
        assert_eq!(idoms(&dominator_tree(&g)), [(2, 1), (3, 2)]);
        assert_eq!(idoms(&dominator_tree_naive(&g)), [(2, 1), (3, 2)]);
    }

    #[test]
    fn e6_deep() {
        let g = FlowGraph::new(4, 1, &[(1, 2), (2, 3), (1, 4), (3, 4)]).unwrap();
        assert_eq!(idoms(&dominator_tree(&g)), [(2, 1), (3, 2), (4, 1)]);
        assert_eq!(idoms(&dominator_tree_naive(&g)), [(2, 1), (3, 2), (4, 1)]);
    }

    #[test]
    fn e1_star_naive() {
        let g = FlowGraph::new(3, 1, &[(1, 2), (1, 3)]).unwrap();
        assert_eq!(idoms(&dominator_tree_naive(&g)), [(2, 1), (3, 1)]);
    }

    #[test]
    fn descendant_queries_e6() {
        let g = FlowGraph::new(4, 1, &[(1, 2), (2, 3), (1, 4), (3, 4)]).unwrap();
        let d = dominator_tree(&g);
        assert!(d.is_descendant(VertexId(2), VertexId(3)));
        assert!(!d.is_descendant(VertexId(2), VertexId(4)));
        assert!(d.is_descendant(VertexId(3), VertexId(3)));
        assert!(!d.is_descendant(VertexId(3), VertexId(2)));
    }

    #[test]
    fn adopt_preorder_rejects_non_preorders() {
        let g = FlowGraph::new(4, 1, &[(1, 2), (2, 3), (1, 4), (3, 4)]).unwrap();
        let mut d = dominator_tree(&g);
        // D: 1 -> {2, 4}, 2 -> {3}. [1,2,3,4] and [1,4,2,3] are preorders;
        // [1,2,4,3] splits 2's subtree.
        assert!(d.clone().adopt_preorder(&[0, 1, 2, 3, 4]));
        assert!(d.clone().adopt_preorder(&[0, 1, 3, 4, 2]));
        assert!(!d.adopt_preorder(&[0, 1, 2, 4, 3]));
    }
}

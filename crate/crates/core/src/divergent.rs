//! Divergent spanning trees.
//!
//! Two spanning trees B and R rooted at `s` are divergent if, for every
//! vertex `v`, the root paths to `v` in B and R have only the dominators
//! of `v` in common. Given a low-high order the construction is local:
//! take the parent arc when present, otherwise bracket `v` with one
//! in-arc from below and one from above in the order.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::dominators::DominatorTree;
use crate::graph::{Arc, FlowGraph, VertexId};
use crate::lowhigh::LowHighOrder;

/// Parent maps `b(v)` and `r(v)` of the two trees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreePair {
    b: Vec<u32>,
    r: Vec<u32>,
}

impl TreePair {
    pub fn new(b: Vec<u32>, r: Vec<u32>) -> TreePair {
        TreePair { b, r }
    }

    pub fn vertex_count(&self) -> u32 {
        self.b.len() as u32 - 1
    }

    /// Parent of `v` in B; `None` for the root.
    pub fn b_parent(&self, v: VertexId) -> Option<VertexId> {
        if v.0 == 1 {
            None
        } else {
            Some(VertexId(self.b[v.index()]))
        }
    }

    /// Parent of `v` in R; `None` for the root.
    pub fn r_parent(&self, v: VertexId) -> Option<VertexId> {
        if v.0 == 1 {
            None
        } else {
            Some(VertexId(self.r[v.index()]))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivergentError {
    /// The restricted arc set offers neither the parent arc nor a
    /// qualifying low/high pair for this vertex.
    ChoiceUnavailable(VertexId),
}

impl fmt::Display for DivergentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DivergentError::ChoiceUnavailable(v) => {
                write!(f, "no qualifying arc choice for vertex {v} in the allowed set")
            }
        }
    }
}

/// First divergence failure found.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivergenceViolation {
    /// The root paths to `vertex` share `shared`, which does not dominate
    /// `vertex`.
    ExcessIntersection { vertex: VertexId, shared: VertexId },
    /// A parent chain does not reach the root or uses a non-arc.
    BrokenTree(VertexId),
}

impl fmt::Display for DivergenceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DivergenceViolation::ExcessIntersection { vertex, shared } => write!(
                f,
                "paths to vertex {vertex} share non-dominator {shared}"
            ),
            DivergenceViolation::BrokenTree(v) => {
                write!(f, "parent chain of vertex {v} is not a tree path to the root")
            }
        }
    }
}

/// Builds two divergent spanning trees of `g`. For each `v != s`: if the
/// parent arc `(d(v), v)` exists in `g` it is used for both trees;
/// otherwise one in-arc ordered before `v` and one in-arc from a
/// non-descendant ordered after `v` are chosen, preferring the closest
/// bracketing pair. `allowed` restricts the bracketing choices (the
/// parent arc, having no alternative, is exempt from it).
pub fn build_divergent_trees(
    g: &FlowGraph,
    d: &DominatorTree,
    order: &LowHighOrder,
    allowed: Option<&[Arc]>,
) -> Result<TreePair, DivergentError> {
    let n = g.vertex_count();
    let permitted = |a: Arc| -> bool {
        match allowed {
            None => true,
            Some(set) => set.binary_search(&a).is_ok(),
        }
    };
    let mut b = vec![0u32; n as usize + 1];
    let mut r = vec![0u32; n as usize + 1];
    for v in 2..=n {
        let v = VertexId(v);
        let dv = d.idom(v).expect("non-root");
        if g.has_arc(dv, v) {
            b[v.index()] = dv.0;
            r[v.index()] = dv.0;
            continue;
        }
        let rv = order.position(v);
        let mut low: Option<VertexId> = None; // max position below v
        let mut high: Option<VertexId> = None; // min position above, non-descendant
        for &u in g.in_neighbors(v) {
            if !permitted(Arc { tail: u, head: v }) {
                continue;
            }
            let ru = order.position(u);
            if ru < rv {
                if low.map_or(true, |x| order.position(x) < ru) {
                    low = Some(u);
                }
            } else if !d.is_descendant(v, u)
                && high.map_or(true, |x| order.position(x) > ru)
            {
                high = Some(u);
            }
        }
        match (low, high) {
            (Some(u), Some(w)) => {
                b[v.index()] = u.0;
                r[v.index()] = w.0;
            }
            _ => return Err(DivergentError::ChoiceUnavailable(v)),
        }
    }
    Ok(TreePair { b, r })
}

/// Verifies divergence from first principles: for every `v`, the
/// intersection of the two root paths must be exactly the dominators of
/// `v` (its ancestor chain in D, inclusive).
pub fn check_divergent(
    g: &FlowGraph,
    d: &DominatorTree,
    pair: &TreePair,
) -> Result<(), DivergenceViolation> {
    let n = g.vertex_count();
    let root_path = |parent: &dyn Fn(VertexId) -> Option<VertexId>,
                     v: VertexId|
     -> Option<Vec<VertexId>> {
        let mut path = vec![v];
        let mut cur = v;
        while let Some(p) = parent(cur) {
            if path.len() > n as usize || !g.has_arc(p, cur) {
                return None;
            }
            path.push(p);
            cur = p;
        }
        if cur == VertexId(1) {
            Some(path)
        } else {
            None
        }
    };
    let mut on_b = vec![false; n as usize + 1];
    let mut is_dom = vec![false; n as usize + 1];
    for v in 1..=n {
        let v = VertexId(v);
        let pb = root_path(&|x| pair.b_parent(x), v)
            .ok_or(DivergenceViolation::BrokenTree(v))?;
        let pr = root_path(&|x| pair.r_parent(x), v)
            .ok_or(DivergenceViolation::BrokenTree(v))?;
        for x in &pb {
            on_b[x.index()] = true;
        }
        let mut cur = Some(v);
        while let Some(x) = cur {
            is_dom[x.index()] = true;
            cur = d.idom(x);
        }
        let mut violation = None;
        for x in &pr {
            if on_b[x.index()] && !is_dom[x.index()] {
                violation = Some(DivergenceViolation::ExcessIntersection {
                    vertex: v,
                    shared: *x,
                });
                break;
            }
        }
        for x in &pb {
            on_b[x.index()] = false;
        }
        let mut cur = Some(v);
        while let Some(x) = cur {
            is_dom[x.index()] = false;
            cur = d.idom(x);
        }
        if let Some(err) = violation {
            return Err(err);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dominators::dominator_tree;
    use crate::graph::FlowGraph;
    use crate::lowhigh::LowHighOrder;

    fn e2() -> FlowGraph {
        FlowGraph::new(4, 1, &[(1, 2), (2, 3), (1, 3), (3, 4), (2, 4)]).unwrap()
    }

    fn order_1243() -> LowHighOrder {
        LowHighOrder::from_sequence(&[VertexId(1), VertexId(2), VertexId(4), VertexId(3)])
    }

    #[test]
    fn e2_unrestricted() {
        let g = e2();
        let d = dominator_tree(&g);
        let pair = build_divergent_trees(&g, &d, &order_1243(), None).unwrap();
        assert_eq!(pair.b_parent(VertexId(2)), Some(VertexId(1)));
        assert_eq!(pair.b_parent(VertexId(3)), Some(VertexId(1)));
        assert_eq!(pair.b_parent(VertexId(4)), Some(VertexId(2)));
        assert_eq!(pair.r_parent(VertexId(4)), Some(VertexId(3)));
        assert_eq!(check_divergent(&g, &d, &pair), Ok(()));
    }

    #[test]
    fn e4_parent_arcs_everywhere() {
        let g = FlowGraph::new(3, 1, &[(1, 2), (2, 3)]).unwrap();
        let d = dominator_tree(&g);
        let order = LowHighOrder::from_sequence(&[VertexId(1), VertexId(2), VertexId(3)]);
        let pair = build_divergent_trees(&g, &d, &order, None).unwrap();
        assert_eq!(pair.b, pair.r);
        assert_eq!(pair.b_parent(VertexId(3)), Some(VertexId(2)));
        assert_eq!(check_divergent(&g, &d, &pair), Ok(()));
    }

    #[test]
    fn e3_restricted_to_tree_plus_valid_set() {
        // allowed = T' + {(3,4)}; mirrors restricting the construction to
        // the sparse certified subgraph
        let g = e2();
        let d = dominator_tree(&g);
        let allowed = [
            Arc::new(1, 2),
            Arc::new(1, 3),
            Arc::new(2, 4),
            Arc::new(3, 4),
        ];
        let pair = build_divergent_trees(&g, &d, &order_1243(), Some(&allowed)).unwrap();
        assert_eq!(pair.b_parent(VertexId(4)), Some(VertexId(2)));
        assert_eq!(pair.r_parent(VertexId(4)), Some(VertexId(3)));
        assert_eq!(check_divergent(&g, &d, &pair), Ok(()));
    }

    #[test]
    fn restriction_to_tree_alone_fails_at_4() {
        // 2 and 3 take their parent arcs, but 4 has only (3,4) available:
        // a high with no low
        let g = e2();
        let d = dominator_tree(&g);
        let allowed = [Arc::new(1, 2), Arc::new(2, 3), Arc::new(3, 4)];
        assert_eq!(
            build_divergent_trees(&g, &d, &order_1243(), Some(&allowed)),
            Err(DivergentError::ChoiceUnavailable(VertexId(4)))
        );
    }

    #[test]
    fn checker_rejects_shared_non_dominator() {
        let g = e2();
        let d = dominator_tree(&g);
        // both trees equal to T: already the paths to 3 share 2, which
        // does not dominate 3
        let b = alloc::vec![0, 0, 1, 2, 3];
        let pair = TreePair::new(b.clone(), b);
        match check_divergent(&g, &d, &pair) {
            Err(DivergenceViolation::ExcessIntersection { vertex, shared }) => {
                assert_eq!(vertex, VertexId(3));
                assert_eq!(shared, VertexId(2));
            }
            other => panic!("expected excess intersection, got {other:?}"),
        }
    }

    #[test]
    fn star_trivially_divergent() {
        let g = FlowGraph::new(3, 1, &[(1, 2), (1, 3)]).unwrap();
        let d = dominator_tree(&g);
        let b = alloc::vec![0, 0, 1, 1];
        let pair = TreePair::new(b.clone(), b);
        assert_eq!(check_divergent(&g, &d, &pair), Ok(()));
    }
}

//! Dominator-based certification toolkit for flow graphs.
//!
//! Given a flow graph `G` with start vertex `s` and a spanning tree `T`
//! rooted at `s`, the central question answered here is: what is the
//! smallest set of non-tree arcs `A'` such that `T` plus `A'` preserves
//! every dominator relation of `G`? The crate computes that set together
//! with the structures that certify it: the dominator tree, a low-high
//! order of it, and a pair of divergent spanning trees.
//!
//! Every fast algorithm has a brute-force counterpart intended for
//! small instances, so results can be cross-checked independently.
#![no_std]

extern crate alloc;

pub mod divergent;
pub mod dominators;
pub mod gen;
pub mod graph;
pub mod lowhigh;
pub mod validset;

pub use divergent::{
    build_divergent_trees, check_divergent, DivergenceViolation, DivergentError, TreePair,
};
pub use dominators::{dominator_tree, dominator_tree_naive, DominatorTree};
pub use gen::{extract_spanning_tree, random_flowgraph, TreeStrategy};
pub use graph::{Arc, FlowGraph, GraphError, SpanningTree, VertexId};
pub use lowhigh::{
    brute_force_low_high, check_low_high, construct_low_high, derived_graph, DerivedGraph,
    LowHighError, LowHighOrder, LowHighViolation,
};
pub use validset::{
    brute_force_min_valid_set, compute_valid_set, is_valid_set, lower_bound, ArcSet,
    ValidSetError,
};

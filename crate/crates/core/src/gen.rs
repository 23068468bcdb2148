//! Seeded random instance generation and spanning-tree extraction.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{FlowGraph, GraphError, SpanningTree, VertexId};

/// How [`extract_spanning_tree`] picks tree arcs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeStrategy {
    Bfs,
    Dfs,
    Random(u64),
}

/// Generates a flow graph with `n` vertices and `m` arcs, deterministic
/// per seed: a random arborescence rooted at 1 first, then `m - (n - 1)`
/// further distinct non-self-loop arcs.
pub fn random_flowgraph(n: u32, m: usize, seed: u64) -> Result<FlowGraph, GraphError> {
    let capacity = n as usize * (n as usize - 1);
    if m > capacity {
        return Err(GraphError::TooManyArcs { n, m });
    }
    assert!(n >= 1 && (n == 1 || m >= n as usize - 1), "need m >= n - 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut arcs: BTreeSet<(u32, u32)> = BTreeSet::new();
    for v in 2..=n {
        let p = rng.gen_range(1..v);
        arcs.insert((p, v));
    }
    let extra = m - arcs.len();
    if extra > (capacity - arcs.len()) / 2 {
        // dense request: enumerate the free slots and sample without
        // replacement, rejection sampling would crawl here
        let mut free: Vec<(u32, u32)> = Vec::with_capacity(capacity - arcs.len());
        for t in 1..=n {
            for h in 1..=n {
                if t != h && !arcs.contains(&(t, h)) {
                    free.push((t, h));
                }
            }
        }
        for _ in 0..extra {
            let i = rng.gen_range(0..free.len());
            arcs.insert(free.swap_remove(i));
        }
    } else {
        while arcs.len() < m {
            let t = rng.gen_range(1..=n);
            let h = rng.gen_range(1..=n);
            if t != h {
                arcs.insert((t, h));
            }
        }
    }
    let raw: Vec<(u32, u32)> = arcs.into_iter().collect();
    FlowGraph::new(n, 1, &raw)
}

/// Extracts a spanning tree of `g` rooted at the start vertex.
/// All strategies are deterministic; `Random` additionally takes a seed.
pub fn extract_spanning_tree(g: &FlowGraph, strategy: TreeStrategy) -> SpanningTree {
    let n = g.vertex_count() as usize;
    let mut parent = vec![0u32; n + 1];
    let mut seen = vec![false; n + 1];
    seen[1] = true;
    match strategy {
        TreeStrategy::Bfs => {
            let mut queue = alloc::collections::VecDeque::new();
            queue.push_back(VertexId(1));
            while let Some(v) = queue.pop_front() {
                for &w in g.out_neighbors(v) {
                    if !seen[w.index()] {
                        seen[w.index()] = true;
                        parent[w.index()] = v.0;
                        queue.push_back(w);
                    }
                }
            }
        }
        TreeStrategy::Dfs => {
            let mut stack: Vec<(VertexId, usize)> = vec![(VertexId(1), 0)];
            while let Some(&mut (v, ref mut ni)) = stack.last_mut() {
                let neigh = g.out_neighbors(v);
                if *ni < neigh.len() {
                    let w = neigh[*ni];
                    *ni += 1;
                    if !seen[w.index()] {
                        seen[w.index()] = true;
                        parent[w.index()] = v.0;
                        stack.push((w, 0));
                    }
                } else {
                    stack.pop();
                }
            }
        }
        TreeStrategy::Random(seed) => {
            // randomized Prim-style growth: keep the frontier arcs from
            // visited to unvisited and pick one uniformly
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut frontier: Vec<(VertexId, VertexId)> = g
                .out_neighbors(VertexId(1))
                .iter()
                .map(|&w| (VertexId(1), w))
                .collect();
            while !frontier.is_empty() {
                let i = rng.gen_range(0..frontier.len());
                let (v, w) = frontier.swap_remove(i);
                if seen[w.index()] {
                    continue;
                }
                seen[w.index()] = true;
                parent[w.index()] = v.0;
                for &x in g.out_neighbors(w) {
                    if !seen[x.index()] {
                        frontier.push((w, x));
                    }
                }
            }
        }
    }
    SpanningTree::from_parent_array(parent)
}

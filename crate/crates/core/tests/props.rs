//! Cross-checks the fast algorithms against the brute-force oracles and
//! the definitional checkers on seeded random corpora.

use domcert_core::*;
use proptest::prelude::*;

fn instance(n: u32, extra: usize, seed: u64) -> (FlowGraph, SpanningTree) {
    let cap = n as usize * (n as usize - 1);
    let m = (n as usize - 1 + extra).min(cap);
    let g = random_flowgraph(n, m, seed).unwrap();
    let strat = match seed % 3 {
        0 => TreeStrategy::Bfs,
        1 => TreeStrategy::Dfs,
        _ => TreeStrategy::Random(seed),
    };
    let t = extract_spanning_tree(&g, strat);
    (g, t)
}

proptest! {
    #[test]
    fn reachability_properties(n in 1u32..30, extra in 0usize..80, seed in 0u64..1000) {
        let (g, _) = instance(n, extra, seed);
        let all = g.reachable_set(g.start(), None);
        prop_assert_eq!(all.len() as u32, g.vertex_count());
        if n > 1 {
            let x = VertexId(2 + (seed % (n as u64 - 1)) as u32);
            prop_assert!(!g.reachable_set(g.start(), Some(x)).contains(&x));
        }
    }

    #[test]
    fn dominators_match_naive_oracle(n in 1u32..11, extra in 0usize..90, seed in 0u64..1000) {
        let (g, _) = instance(n, extra, seed);
        let fast = dominator_tree(&g);
        let naive = dominator_tree_naive(&g);
        for v in 2..=n {
            prop_assert_eq!(fast.idom(VertexId(v)), naive.idom(VertexId(v)));
        }
        // idom(v) really dominates v under the removal definition
        for v in 2..=n {
            let d = fast.idom(VertexId(v)).unwrap();
            if d != g.start() {
                prop_assert!(!g.reachable_set(g.start(), Some(d)).contains(&VertexId(v)));
            }
        }
    }

    #[test]
    fn descendant_queries_match_idom_chains(n in 1u32..11, extra in 0usize..90, seed in 0u64..500) {
        let (g, _) = instance(n, extra, seed);
        let d = dominator_tree(&g);
        for v in 1..=n {
            for w in 1..=n {
                let (v, w) = (VertexId(v), VertexId(w));
                let mut chain = false;
                let mut cur = Some(w);
                while let Some(x) = cur {
                    if x == v {
                        chain = true;
                        break;
                    }
                    cur = d.idom(x);
                }
                prop_assert_eq!(d.is_descendant(v, w), chain);
            }
        }
    }

    #[test]
    fn constructed_low_high_passes_checker(n in 1u32..40, extra in 0usize..150, seed in 0u64..1000) {
        let (g, _) = instance(n, extra, seed);
        let mut d = dominator_tree(&g);
        let order = construct_low_high(&g, &mut d).unwrap();
        prop_assert_eq!(check_low_high(&g, &d, &order), Ok(()));
    }

    #[test]
    fn low_high_always_exists_small(n in 1u32..9, extra in 0usize..60, seed in 0u64..400) {
        let (g, _) = instance(n, extra, seed);
        let d = dominator_tree(&g);
        let found = brute_force_low_high(&g, &d).unwrap();
        prop_assert!(found.is_some());
        let order = found.unwrap();
        prop_assert_eq!(check_low_high(&g, &d, &order), Ok(()));
    }

    #[test]
    fn checker_rejects_parent_swaps(n in 2u32..20, extra in 0usize..60, seed in 0u64..400) {
        let (g, _) = instance(n, extra, seed);
        let mut d = dominator_tree(&g);
        let order = construct_low_high(&g, &mut d).unwrap();
        // swapping any non-root vertex with its parent breaks parent-first
        let v = VertexId(2 + (seed % (n as u64 - 1)) as u32);
        let p = d.idom(v).unwrap();
        let mut pos = order.positions().to_vec();
        pos.swap(v.index(), p.index());
        let shuffled = LowHighOrder::from_positions(pos);
        prop_assert!(matches!(
            check_low_high(&g, &d, &shuffled),
            Err(LowHighViolation::NotPreorder(_))
        ));
    }

    #[test]
    fn valid_set_identities(n in 1u32..40, extra in 0usize..150, seed in 0u64..1000) {
        let (g, t) = instance(n, extra, seed);
        let mut d = dominator_tree(&g);
        let order = construct_low_high(&g, &mut d).unwrap();
        let set = compute_valid_set(&g, &t, &d, &order).unwrap();
        prop_assert_eq!(set.len(), lower_bound(&t, &d));
        prop_assert!(set.len() <= n as usize - 1 || n == 1);
        prop_assert!(is_valid_set(&g, &t, &set).unwrap());
        // set invariants: disjoint from tree arcs, at most one arc per
        // head, none entering the start
        let mut heads = std::collections::BTreeSet::new();
        for a in set.iter() {
            prop_assert!(!t.contains_arc(a));
            prop_assert!(a.head != g.start());
            prop_assert!(heads.insert(a.head));
        }
    }

    #[test]
    fn exactly_one_case_fires(n in 2u32..20, extra in 0usize..80, seed in 0u64..500) {
        let (g, t) = instance(n, extra, seed);
        let mut d = dominator_tree(&g);
        let order = construct_low_high(&g, &mut d).unwrap();
        let set = compute_valid_set(&g, &t, &d, &order).unwrap();
        for v in 2..=n {
            let v = VertexId(v);
            let dv = d.idom(v).unwrap();
            let tv = t.parent(v).unwrap();
            let added = set.iter().filter(|a| a.head == v).count();
            if tv == dv {
                // Case 1: nothing enters v
                prop_assert_eq!(added, 0);
            } else {
                prop_assert_eq!(added, 1);
                let arc = set.iter().find(|a| a.head == v).unwrap();
                if g.has_arc(dv, v) {
                    // Case 2: the parent arc itself
                    prop_assert_eq!(arc.tail, dv);
                } else if order.position(tv) > order.position(v) {
                    // Case 3a: a low arc; and t(v) cannot be a descendant
                    prop_assert!(order.position(arc.tail) < order.position(v));
                    prop_assert!(!d.is_descendant(v, tv));
                } else {
                    // Case 3b: a high arc from a non-descendant
                    prop_assert!(order.position(arc.tail) > order.position(v));
                    prop_assert!(!d.is_descendant(v, arc.tail));
                }
            }
        }
    }

    #[test]
    fn minimality_matches_brute_force(n in 1u32..7, extra in 0usize..18, seed in 0u64..300) {
        let (g, t) = instance(n, extra, seed);
        let mut d = dominator_tree(&g);
        let order = construct_low_high(&g, &mut d).unwrap();
        let fast = compute_valid_set(&g, &t, &d, &order).unwrap();
        let oracle = brute_force_min_valid_set(&g, &t).unwrap();
        prop_assert_eq!(fast.len(), oracle.len());
    }

    #[test]
    fn divergent_trees_unrestricted_and_restricted(n in 1u32..30, extra in 0usize..100, seed in 0u64..500) {
        let (g, t) = instance(n, extra, seed);
        let mut d = dominator_tree(&g);
        let order = construct_low_high(&g, &mut d).unwrap();
        let pair = build_divergent_trees(&g, &d, &order, None).unwrap();
        prop_assert_eq!(check_divergent(&g, &d, &pair), Ok(()));
        // restricted to the certified subgraph, the build must still work
        let set = compute_valid_set(&g, &t, &d, &order).unwrap();
        let mut allowed: Vec<Arc> = t.arcs().chain(set.iter()).collect();
        allowed.sort_unstable();
        let pair = build_divergent_trees(&g, &d, &order, Some(&allowed)).unwrap();
        prop_assert_eq!(check_divergent(&g, &d, &pair), Ok(()));
        for v in 2..=n {
            let v = VertexId(v);
            for p in [pair.b_parent(v).unwrap(), pair.r_parent(v).unwrap()] {
                let arc = Arc { tail: p, head: v };
                prop_assert!(allowed.binary_search(&arc).is_ok());
            }
        }
    }
}

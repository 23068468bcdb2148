//! Low-high orders of a dominator tree.
//!
//! A low-high order is a preorder of the dominator tree D in which every
//! vertex `v != s` either has the arc `(d(v), v)` in the graph, or has
//! in-arcs `(u, v)` and `(w, v)` with `u < v < w` and `w` not a
//! descendant of `v` in D.
//!
//! Construction works top-down over D. Within each sibling group the
//! derived graph reduces every in-arc to a tail that is either the common
//! parent or a sibling, so ordering the group is a self-contained
//! problem: place each child so that, unless it has a parent arc, some
//! derived in-neighbor precedes it and some follows it. The fast path
//! is a greedy bidirectional peel guarded by witness forests; a complete
//! backtracking peel over the same moves serves as the fallback. A work
//! budget guards against pathological inputs and is surfaced as an
//! internal-inconsistency error rather than looping.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::dominators::DominatorTree;
use crate::graph::{Arc, FlowGraph, VertexId};

/// Total order on vertices used by the valid-set and divergent-tree
/// constructions. `u < v` means `position(u) < position(v)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LowHighOrder {
    /// rank in `[1, n]` per vertex; `pos[0] = 0` unused.
    pos: Vec<u32>,
}

impl LowHighOrder {
    /// From the sequence of vertices in order (first = the start vertex).
    pub fn from_sequence(seq: &[VertexId]) -> LowHighOrder {
        let mut pos = vec![0u32; seq.len() + 1];
        for (i, v) in seq.iter().enumerate() {
            pos[v.index()] = i as u32 + 1;
        }
        LowHighOrder { pos }
    }

    /// From per-vertex ranks (index 0 unused).
    pub fn from_positions(pos: Vec<u32>) -> LowHighOrder {
        LowHighOrder { pos }
    }

    pub fn vertex_count(&self) -> u32 {
        self.pos.len() as u32 - 1
    }

    #[inline]
    pub fn position(&self, v: VertexId) -> u32 {
        self.pos[v.index()]
    }

    pub fn positions(&self) -> &[u32] {
        &self.pos
    }

    /// Vertices in ascending rank.
    pub fn sequence(&self) -> Vec<VertexId> {
        let n = self.vertex_count() as usize;
        let mut seq = vec![VertexId(0); n];
        for v in 1..=n {
            seq[self.pos[v] as usize - 1] = VertexId(v as u32);
        }
        seq
    }
}

/// First reason a candidate order fails to be a low-high order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LowHighViolation {
    /// The positions are not a bijection onto `[1, n]` with the start
    /// vertex first, or the order is not a preorder of D at `v`.
    NotPreorder(VertexId),
    /// `v` has no parent arc and no in-arc ordered before it.
    MissingLowArc(VertexId),
    /// `v` has no parent arc and no in-arc from a non-descendant ordered
    /// after it.
    MissingHighArc(VertexId),
}

impl fmt::Display for LowHighViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LowHighViolation::NotPreorder(v) => write!(f, "not a preorder of D at vertex {v}"),
            LowHighViolation::MissingLowArc(v) => write!(f, "vertex {v}: missing low arc"),
            LowHighViolation::MissingHighArc(v) => write!(f, "vertex {v}: missing high arc"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LowHighError {
    /// Brute-force enumeration is guarded to small instances.
    TooLarge { n: u32, limit: u32 },
    /// The construction could not place a vertex. A low-high order always
    /// exists for a valid flow graph, so this indicates a bug.
    Internal(&'static str),
}

impl fmt::Display for LowHighError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LowHighError::TooLarge { n, limit } => {
                write!(f, "instance too large for brute force: n = {n} > {limit}")
            }
            LowHighError::Internal(msg) => write!(f, "internal inconsistency: {msg}"),
        }
    }
}

/// The derived graph: each original arc `(u, v)` with `v != s` and `u`
/// not a proper descendant of `v` becomes `(u', v)` where `u'` is `u`
/// itself if `u = d(v)` and otherwise the ancestor of `u` that is a
/// sibling of `v` (a child of `d(v)`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedGraph {
    arcs: Vec<Arc>,
}

impl DerivedGraph {
    /// Derived arcs, ascending and de-duplicated.
    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn in_neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.arcs
            .iter()
            .filter(move |a| a.head == v)
            .map(|a| a.tail)
    }
}

fn derive_arcs<'a>(
    arcs: impl Iterator<Item = &'a Arc>,
    d: &DominatorTree,
) -> BTreeSet<Arc> {
    // children of each vertex sorted by the stored preorder rank, so the
    // sibling ancestor of u can be located by binary search on intervals
    let n = d.vertex_count();
    let mut kids_by_pre: Vec<Vec<VertexId>> = vec![Vec::new(); n as usize + 1];
    for v in 1..=n {
        let v = VertexId(v);
        let mut ks: Vec<VertexId> = d.children(v).to_vec();
        ks.sort_by_key(|c| d.preorder_rank(*c));
        kids_by_pre[v.index()] = ks;
    }
    let mut out = BTreeSet::new();
    for a in arcs {
        let (u, v) = (a.tail, a.head);
        if v.0 == 1 {
            continue;
        }
        if d.is_descendant(v, u) {
            continue; // u = v impossible (no self-loops), so u is below v
        }
        let p = d.idom(v).expect("non-root");
        let tail = if u == p {
            u
        } else {
            // u lies strictly inside the subtree of p; find the child of
            // p whose interval contains u
            let ks = &kids_by_pre[p.index()];
            let ru = d.preorder_rank(u);
            let i = ks.partition_point(|c| d.preorder_rank(*c) <= ru);
            debug_assert!(i > 0);
            let c = ks[i - 1];
            debug_assert!(d.is_descendant(c, u));
            c
        };
        out.insert(Arc {
            tail,
            head: v,
        });
    }
    out
}

/// Computes the derived graph of `g` over its dominator tree.
pub fn derived_graph(g: &FlowGraph, d: &DominatorTree) -> DerivedGraph {
    DerivedGraph {
        arcs: derive_arcs(g.arcs().iter(), d).into_iter().collect(),
    }
}

/// Checks all three low-high invariants; on failure reports the first
/// violation (vertices scanned in ascending id).
pub fn check_low_high(
    g: &FlowGraph,
    d: &DominatorTree,
    order: &LowHighOrder,
) -> Result<(), LowHighViolation> {
    let n = g.vertex_count();
    let pos = order.positions();
    if pos.len() != n as usize + 1 || pos[1] != 1 {
        return Err(LowHighViolation::NotPreorder(VertexId(1)));
    }
    let mut seen = vec![false; n as usize + 1];
    for v in 1..=n {
        let r = pos[v as usize];
        if r == 0 || r > n || seen[r as usize] {
            return Err(LowHighViolation::NotPreorder(VertexId(v)));
        }
        seen[r as usize] = true;
    }
    // preorder of D: parent before child and contiguous subtree intervals
    for v in 2..=n {
        let p = d.idom(VertexId(v)).expect("non-root");
        if pos[p.index()] >= pos[v as usize] {
            return Err(LowHighViolation::NotPreorder(VertexId(v)));
        }
    }
    // interval check via min/max rank over each subtree
    let mut min_rank: Vec<u32> = pos.to_vec();
    let mut max_rank: Vec<u32> = pos.to_vec();
    for v in d.preorder().into_iter().rev() {
        if let Some(p) = d.idom(v) {
            let (mn, mx) = (min_rank[v.index()], max_rank[v.index()]);
            min_rank[p.index()] = min_rank[p.index()].min(mn);
            max_rank[p.index()] = max_rank[p.index()].max(mx);
        }
    }
    for v in 1..=n {
        let vi = v as usize;
        if min_rank[vi] != pos[vi] || max_rank[vi] - pos[vi] + 1 != d.subtree_size(VertexId(v)) {
            return Err(LowHighViolation::NotPreorder(VertexId(v)));
        }
    }
    // low-high property
    for v in 2..=n {
        let v = VertexId(v);
        let p = d.idom(v).expect("non-root");
        if g.has_arc(p, v) {
            continue;
        }
        let rv = pos[v.index()];
        let has_low = g.in_neighbors(v).iter().any(|&u| pos[u.index()] < rv);
        if !has_low {
            return Err(LowHighViolation::MissingLowArc(v));
        }
        let has_high = g
            .in_neighbors(v)
            .iter()
            .any(|&w| pos[w.index()] > rv && !d.is_descendant(v, w));
        if !has_high {
            return Err(LowHighViolation::MissingHighArc(v));
        }
    }
    Ok(())
}

/// Which end of the order a vertex was committed to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Side {
    Prefix,
    Suffix,
}

const UNPLACED: u8 = 0;

/// Per-sibling-group ordering state for the bidirectional peel.
///
/// The order grows from both ends. A prefix placement of a non-exempt
/// child needs an in-neighbor already in the prefix (its low witness)
/// and any in-neighbor still unplaced or in the suffix, which is then
/// guaranteed to end up after it (its high). Suffix placements mirror
/// that. A placement is also vetoed when it would consume the last
/// future witness of some other unplaced child.
struct GroupSolver {
    exempt: Vec<bool>,
    out_sibs: Vec<Vec<u32>>,
    /// `UNPLACED`, or 1 + side as u8.
    state: Vec<u8>,
    /// in-neighbors in the prefix / suffix / unplaced, per child.
    pin: Vec<u32>,
    sin: Vec<u32>,
    uin: Vec<u32>,
    /// candidates with a witness available, keyed (class, id) with
    /// class 0 = needs witnesses, 1 = exempt, so constrained children
    /// are preferred while exempt ones are held back as anchors.
    p_ready: BTreeSet<(u8, u32)>,
    s_ready: BTreeSet<(u8, u32)>,
}

impl GroupSolver {
    fn class(&self, c: u32) -> u8 {
        u8::from(self.exempt[c as usize])
    }

    fn refresh(&mut self, c: u32) {
        let key = (self.class(c), c);
        let unplaced = self.state[c as usize] == UNPLACED;
        let i = c as usize;
        if unplaced && (self.exempt[i] || self.pin[i] > 0) {
            self.p_ready.insert(key);
        } else {
            self.p_ready.remove(&key);
        }
        if unplaced && (self.exempt[i] || self.sin[i] > 0) {
            self.s_ready.insert(key);
        } else {
            self.s_ready.remove(&key);
        }
    }

    /// Full legality beyond ready-set membership: the child must keep a
    /// witness promise for itself on the opposite end, and must not
    /// strand any out-neighbor whose last opposite-end witness it is.
    fn legal(&self, c: u32, side: Side) -> bool {
        let i = c as usize;
        if !self.exempt[i] {
            let promise = match side {
                Side::Prefix => self.uin[i] + self.sin[i],
                Side::Suffix => self.uin[i] + self.pin[i],
            };
            if promise == 0 {
                return false;
            }
        }
        self.out_sibs[i].iter().all(|&w| {
            let w = w as usize;
            if self.state[w] != UNPLACED || self.exempt[w] {
                return true;
            }
            let left = match side {
                Side::Prefix => self.uin[w] + self.sin[w],
                Side::Suffix => self.uin[w] + self.pin[w],
            };
            left >= 2
        })
    }

    fn place(&mut self, c: u32, side: Side) {
        self.state[c as usize] = 1 + side as u8;
        for i in 0..self.out_sibs[c as usize].len() {
            let w = self.out_sibs[c as usize][i];
            self.uin[w as usize] -= 1;
            match side {
                Side::Prefix => self.pin[w as usize] += 1,
                Side::Suffix => self.sin[w as usize] += 1,
            }
            self.refresh(w);
        }
        self.refresh(c);
    }

    fn unplace(&mut self, c: u32, side: Side) {
        self.state[c as usize] = UNPLACED;
        for i in 0..self.out_sibs[c as usize].len() {
            let w = self.out_sibs[c as usize][i];
            self.uin[w as usize] += 1;
            match side {
                Side::Prefix => self.pin[w as usize] -= 1,
                Side::Suffix => self.sin[w as usize] -= 1,
            }
            self.refresh(w);
        }
        self.refresh(c);
    }

    /// Deeper prune: in any completion, the high witness of an unplaced
    /// non-exempt child is an in-neighbor placed after it, whose own
    /// high is another such in-neighbor, and so on; the chain must end
    /// at a child that is exempt or already has a suffix in-neighbor.
    /// Lows mirror that with prefix in-neighbors. Both are checked by a
    /// multi-source sweep from the anchors along unplaced out-arcs.
    fn feasible(&self, ok: &mut Vec<bool>, work: &mut Vec<u32>) -> bool {
        self.chains_reach(&self.sin, ok, work) && self.chains_reach(&self.pin, ok, work)
    }

    fn chains_reach(&self, anchor_in: &[u32], ok: &mut Vec<bool>, work: &mut Vec<u32>) -> bool {
        let k = self.exempt.len();
        ok.clear();
        ok.resize(k, false);
        work.clear();
        for c in 0..k {
            if self.state[c] == UNPLACED && (self.exempt[c] || anchor_in[c] > 0) {
                ok[c] = true;
                work.push(c as u32);
            }
        }
        while let Some(u) = work.pop() {
            for &w in &self.out_sibs[u as usize] {
                let w = w as usize;
                if self.state[w] == UNPLACED && !ok[w] {
                    ok[w] = true;
                    work.push(w as u32);
                }
            }
        }
        (0..k).all(|c| self.state[c] != UNPLACED || self.exempt[c] || ok[c])
    }

    /// Next untried legal move, prefix candidates before suffix ones,
    /// each end by ascending (class, id). Costs one budget unit per
    /// candidate inspected.
    fn next_move(&self, tried: &[(Side, u32)], budget: &mut u64) -> Option<(Side, u32)> {
        for (side, ready) in [(Side::Prefix, &self.p_ready), (Side::Suffix, &self.s_ready)] {
            for &(_, c) in ready.iter() {
                if *budget == 0 {
                    return None;
                }
                *budget -= 1;
                if !tried.contains(&(side, c)) && self.legal(c, side) {
                    return Some((side, c));
                }
            }
        }
        None
    }
}

/// Orders one sibling group. `k` children with local ids `0..k`.
///
/// Within the group every derived in-arc tail is the parent or a
/// sibling, and siblings are pairwise unrelated in D, so an order is
/// valid iff every non-exempt child has a sibling in-neighbor somewhere
/// before it and one somewhere after it. The fast path is a greedy
/// bidirectional peel guarded by witness forests; the backtracking peel
/// is the fallback.
fn order_sibling_group(
    exempt: Vec<bool>,
    in_sibs: Vec<Vec<u32>>,
    budget: &mut u64,
) -> Result<Vec<u32>, LowHighError> {
    let k = exempt.len();
    if k <= 1 {
        return Ok((0..k as u32).collect());
    }
    let mut out_sibs: Vec<Vec<u32>> = vec![Vec::new(); k];
    for (v, ins) in in_sibs.iter().enumerate() {
        for &u in ins {
            out_sibs[u as usize].push(v as u32);
        }
    }
    if let Some(order) = greedy_order(&exempt, &in_sibs, &out_sibs, budget) {
        return Ok(order);
    }
    search_order(exempt, in_sibs, out_sibs, budget)
}

const NO_WIT: u32 = u32::MAX;

/// Greedy bidirectional peel guarded by witness forests.
///
/// Every non-exempt unplaced child keeps one witness in-neighbor per
/// side. `wit_h[x]` points one step along a chain of unplaced
/// in-neighbors that ends at a child which is exempt or already has a
/// suffix in-neighbor; in any completion that chain realizes a high for
/// `x`, so its existence certifies that `x` is not yet doomed. `NO_WIT`
/// encodes that `x` itself is such a chain end. `wit_l` mirrors this
/// with the prefix. A prefix placement anchors the low chains of its
/// out-neighbors outright (they gain a prefix in-neighbor) and can only
/// break high chains passing through the placed child; those are
/// re-attached locally and the move is vetoed when any chain cannot be
/// restored. Suffix placements mirror that. Returns `None` when stuck
/// or out of budget; the complete search is the fallback.
struct Greedy<'a> {
    exempt: &'a [bool],
    in_sibs: &'a [Vec<u32>],
    out_sibs: &'a [Vec<u32>],
    state: Vec<u8>,
    pin: Vec<u32>,
    sin: Vec<u32>,
    p_ready: BTreeSet<(u8, u8, u32)>,
    s_ready: BTreeSet<(u8, u8, u32)>,
    wit_h: Vec<u32>,
    wit_l: Vec<u32>,
    cnt_h: Vec<u32>,
    cnt_l: Vec<u32>,
    broken: Vec<bool>,
}

impl Greedy<'_> {
    /// Ready keys sort break-free candidates (no chain points at them)
    /// first, then non-exempt before exempt, then by id.
    fn refresh(&mut self, c: u32) {
        let i = c as usize;
        let unplaced = self.state[i] == UNPLACED;
        let class = u8::from(self.exempt[i]);
        let pk = (u8::from(self.cnt_h[i] > 0), class, c);
        if unplaced && (self.exempt[i] || self.pin[i] > 0) {
            self.p_ready.insert(pk);
            self.p_ready.remove(&(1 - pk.0, class, c));
        } else {
            self.p_ready.remove(&(0, class, c));
            self.p_ready.remove(&(1, class, c));
        }
        let sk = (u8::from(self.cnt_l[i] > 0), class, c);
        if unplaced && (self.exempt[i] || self.sin[i] > 0) {
            self.s_ready.insert(sk);
            self.s_ready.remove(&(1 - sk.0, class, c));
        } else {
            self.s_ready.remove(&(0, class, c));
            self.s_ready.remove(&(1, class, c));
        }
    }

    fn set_wit(&mut self, high: bool, x: u32, new: u32) {
        let (wit, cnt) = if high {
            (&mut self.wit_h, &mut self.cnt_h)
        } else {
            (&mut self.wit_l, &mut self.cnt_l)
        };
        let old = wit[x as usize];
        wit[x as usize] = new;
        let mut touched = [NO_WIT, NO_WIT];
        if old != NO_WIT {
            cnt[old as usize] -= 1;
            touched[0] = old;
        }
        if new != NO_WIT {
            cnt[new as usize] += 1;
            touched[1] = new;
        }
        for t in touched {
            if t != NO_WIT {
                self.refresh(t);
            }
        }
    }

    /// Commits `c` on `side` unless that would strand someone.
    fn try_place(&mut self, c: u32, side: Side, budget: &mut u64) -> bool {
        let ci = c as usize;
        let high = side == Side::Prefix;
        self.state[ci] = 1 + side as u8;
        for &w in &self.out_sibs[ci] {
            let w = w as usize;
            match side {
                Side::Prefix => self.pin[w] += 1,
                Side::Suffix => self.sin[w] += 1,
            }
        }
        // the opposite-side chains of out-neighbors now anchor directly
        let mut anchored: Vec<u32> = Vec::new();
        for i in 0..self.out_sibs[ci].len() {
            let w = self.out_sibs[ci][i];
            let wit = if high { &self.wit_l } else { &self.wit_h };
            if self.state[w as usize] == UNPLACED && wit[w as usize] == c {
                self.set_wit(!high, w, NO_WIT);
                anchored.push(w);
            }
        }
        // everything whose chain runs through c is stale, found by
        // reverse reachability over witness pointers; the full closure is
        // needed so re-attach targets never lead back into stale chains
        let mut closure: Vec<u32> = Vec::new();
        {
            let wit = if high { &self.wit_h } else { &self.wit_l };
            for i in 0..self.out_sibs[ci].len() {
                let w = self.out_sibs[ci][i];
                let wi = w as usize;
                if self.state[wi] == UNPLACED && !self.exempt[wi] && wit[wi] == c {
                    self.broken[wi] = true;
                    closure.push(w);
                }
            }
            let mut qi = 0;
            while qi < closure.len() {
                let b = closure[qi];
                qi += 1;
                for &y in &self.out_sibs[b as usize] {
                    let yi = y as usize;
                    if self.state[yi] == UNPLACED
                        && !self.exempt[yi]
                        && wit[yi] == b
                        && !self.broken[yi]
                    {
                        self.broken[yi] = true;
                        closure.push(y);
                    }
                }
            }
        }
        let mut log: Vec<(u32, u32)> = Vec::new();
        let mut left = closure.len();
        let mut failed = false;
        while left > 0 {
            let before = left;
            for i in 0..closure.len() {
                let x = closure[i];
                let xi = x as usize;
                if !self.broken[xi] {
                    continue;
                }
                *budget = budget.saturating_sub(1 + self.in_sibs[xi].len() as u64 / 8);
                let end_anchor = if high { self.sin[xi] > 0 } else { self.pin[xi] > 0 };
                let target = if end_anchor {
                    Some(NO_WIT)
                } else {
                    self.in_sibs[xi]
                        .iter()
                        .copied()
                        .find(|&u| self.state[u as usize] == UNPLACED && !self.broken[u as usize])
                };
                if let Some(t) = target {
                    let wit = if high { &self.wit_h } else { &self.wit_l };
                    log.push((x, wit[xi]));
                    self.set_wit(high, x, t);
                    self.broken[xi] = false;
                    left -= 1;
                }
            }
            if left == before {
                failed = true;
                break;
            }
        }
        *budget = budget.saturating_sub(1 + closure.len() as u64);
        for &x in &closure {
            self.broken[x as usize] = false;
        }
        if failed {
            // veto: roll everything back
            for (x, old) in log.into_iter().rev() {
                self.set_wit(high, x, old);
            }
            for w in anchored {
                self.set_wit(!high, w, c);
            }
            for &w in &self.out_sibs[ci] {
                let w = w as usize;
                match side {
                    Side::Prefix => self.pin[w] -= 1,
                    Side::Suffix => self.sin[w] -= 1,
                }
            }
            self.state[ci] = UNPLACED;
            self.refresh(c);
            for i in 0..self.out_sibs[ci].len() {
                let w = self.out_sibs[ci][i];
                self.refresh(w);
            }
            return false;
        }
        for i in 0..self.out_sibs[ci].len() {
            let w = self.out_sibs[ci][i];
            self.refresh(w);
        }
        self.refresh(c);
        true
    }
}

fn greedy_order(
    exempt: &[bool],
    in_sibs: &[Vec<u32>],
    out_sibs: &[Vec<u32>],
    budget: &mut u64,
) -> Option<Vec<u32>> {
    let k = exempt.len();
    // initial witness forest: BFS from the exempt children; every child
    // is reachable that way in a genuine derived group
    let mut wit_h = vec![NO_WIT; k];
    let mut reach: Vec<bool> = exempt.to_vec();
    let mut bfs: Vec<u32> = (0..k as u32).filter(|&c| exempt[c as usize]).collect();
    let mut qi = 0;
    while qi < bfs.len() {
        let u = bfs[qi];
        qi += 1;
        for &y in &out_sibs[u as usize] {
            if !reach[y as usize] {
                reach[y as usize] = true;
                wit_h[y as usize] = u;
                bfs.push(y);
            }
        }
    }
    if bfs.len() < k {
        return None;
    }
    let wit_l = wit_h.clone();
    let mut cnt_h = vec![0u32; k];
    for y in 0..k {
        if wit_h[y] != NO_WIT {
            cnt_h[wit_h[y] as usize] += 1;
        }
    }
    let cnt_l = cnt_h.clone();

    let mut g = Greedy {
        exempt,
        in_sibs,
        out_sibs,
        state: vec![UNPLACED; k],
        pin: vec![0u32; k],
        sin: vec![0u32; k],
        p_ready: BTreeSet::new(),
        s_ready: BTreeSet::new(),
        wit_h,
        wit_l,
        cnt_h,
        cnt_l,
        broken: vec![false; k],
    };
    for c in 0..k as u32 {
        g.refresh(c);
    }

    let mut prefix: Vec<u32> = Vec::with_capacity(k);
    let mut suffix: Vec<u32> = Vec::new();
    // persistent cursors into each side's breaking region
    let mut cur_p: (u8, u8, u32) = (1, 0, 0);
    let mut cur_s: (u8, u8, u32) = (1, 0, 0);
    while prefix.len() + suffix.len() < k {
        if *budget == 0 {
            return None;
        }
        let mut committed = false;
        // keep the two ends balanced so both anchor kinds spread
        let sides = if suffix.len() < prefix.len() {
            [Side::Suffix, Side::Prefix]
        } else {
            [Side::Prefix, Side::Suffix]
        };
        // break-free candidates (nobody's chain points at them) commit
        // without any repair; take those first
        for side in sides {
            let set = match side {
                Side::Prefix => &g.p_ready,
                Side::Suffix => &g.s_ready,
            };
            let Some(&key) = set.iter().next() else { continue };
            if key.0 != 0 {
                continue;
            }
            *budget = budget.saturating_sub(1);
            if g.try_place(key.2, side, budget) {
                match side {
                    Side::Prefix => prefix.push(key.2),
                    Side::Suffix => suffix.push(key.2),
                }
                committed = true;
                break;
            }
        }
        // otherwise resume scanning the breaking regions where we left
        // off, wrapping once, so vetoed candidates are not re-tried on
        // every placement
        'slow: for side in if committed { [].as_slice() } else { sides.as_slice() } {
            let side = *side;
            let start = match side {
                Side::Prefix => cur_p,
                Side::Suffix => cur_s,
            };
            let mut from = start;
            let mut wrapped = false;
            loop {
                let set = match side {
                    Side::Prefix => &g.p_ready,
                    Side::Suffix => &g.s_ready,
                };
                let next = set
                    .range((core::ops::Bound::Excluded(from), core::ops::Bound::Unbounded))
                    .next()
                    .copied();
                let key = match next {
                    Some(key) if !(wrapped && key > start) => key,
                    _ if !wrapped => {
                        wrapped = true;
                        from = (0, u8::MAX, u32::MAX);
                        continue;
                    }
                    _ => break,
                };
                from = key;
                *budget = budget.saturating_sub(1);
                if *budget == 0 {
                    return None;
                }
                if g.try_place(key.2, side, budget) {
                    match side {
                        Side::Prefix => {
                            prefix.push(key.2);
                            cur_p = key;
                        }
                        Side::Suffix => {
                            suffix.push(key.2);
                            cur_s = key;
                        }
                    }
                    committed = true;
                    break 'slow;
                }
            }
        }
        if !committed {
            return None;
        }
    }
    prefix.extend(suffix.iter().rev());
    Some(prefix)
}

/// Bidirectional peel with backtracking; prefix-only traces alone can
/// reproduce every valid order, so the search is complete. Used when
/// the repair path gives up.
fn search_order(
    exempt: Vec<bool>,
    in_sibs: Vec<Vec<u32>>,
    out_sibs: Vec<Vec<u32>>,
    budget: &mut u64,
) -> Result<Vec<u32>, LowHighError> {
    let k = exempt.len();
    let mut uin = vec![0u32; k];
    for (v, ins) in in_sibs.iter().enumerate() {
        uin[v] = ins.len() as u32;
    }
    let mut solver = GroupSolver {
        exempt,
        out_sibs,
        state: vec![UNPLACED; k],
        pin: vec![0u32; k],
        sin: vec![0u32; k],
        uin,
        p_ready: BTreeSet::new(),
        s_ready: BTreeSet::new(),
    };
    for c in 0..k as u32 {
        solver.refresh(c);
    }

    let mut prefix: Vec<u32> = Vec::with_capacity(k);
    let mut suffix: Vec<u32> = Vec::new();
    // one frame per committed move, recording the moves already tried
    let mut moves: Vec<(Side, u32)> = Vec::with_capacity(k);
    let mut tried_stack: Vec<Vec<(Side, u32)>> = vec![Vec::new()];
    let (mut ok, mut work) = (Vec::new(), Vec::new());
    let sweep_cost = 1 + (k as u64 + solver.out_sibs.iter().map(|o| o.len() as u64).sum::<u64>()) / 16;
    loop {
        if moves.len() == k {
            prefix.extend(suffix.iter().rev());
            return Ok(prefix);
        }
        let tried = tried_stack.last().expect("frame");
        let found = solver.next_move(tried, budget);
        if found.is_none() && *budget == 0 {
            return Err(LowHighError::Internal(
                "sibling-group search budget exhausted",
            ));
        }
        match found {
            Some((side, c)) => {
                tried_stack.last_mut().expect("frame").push((side, c));
                solver.place(c, side);
                *budget = budget.saturating_sub(sweep_cost);
                if !solver.feasible(&mut ok, &mut work) {
                    solver.unplace(c, side);
                    continue;
                }
                match side {
                    Side::Prefix => prefix.push(c),
                    Side::Suffix => suffix.push(c),
                }
                moves.push((side, c));
                tried_stack.push(Vec::new());
            }
            None => {
                // dead end: undo the most recent move
                tried_stack.pop();
                if tried_stack.is_empty() {
                    return Err(LowHighError::Internal(
                        "sibling group admits no low-high arrangement",
                    ));
                }
                let (side, c) = moves.pop().expect("non-empty");
                match side {
                    Side::Prefix => prefix.pop(),
                    Side::Suffix => suffix.pop(),
                };
                solver.unplace(c, side);
            }
        }
    }
}

/// Constructs a low-high order of D top-down over its sibling groups.
/// The returned order is adopted as the stored preorder of `d`, so
/// subsequent descendant queries and order comparisons share one index.
pub fn construct_low_high(
    g: &FlowGraph,
    d: &mut DominatorTree,
) -> Result<LowHighOrder, LowHighError> {
    let n = g.vertex_count();
    // derived in-adjacency, de-duplicated per head
    let derived = derive_arcs(g.arcs().iter(), d);
    let mut in_derived: Vec<Vec<VertexId>> = vec![Vec::new(); n as usize + 1];
    for a in &derived {
        in_derived[a.head.index()].push(a.tail);
    }

    // order every sibling group; local ids are positions in d.children(p)
    let mut child_order: Vec<Vec<VertexId>> = vec![Vec::new(); n as usize + 1];
    let mut local_of: Vec<u32> = vec![u32::MAX; n as usize + 1];
    let mut budget: u64 = 1_000_000 + 64 * (n as u64 + g.arcs().len() as u64);
    for p in 1..=n {
        let p = VertexId(p);
        let kids = d.children(p);
        if kids.is_empty() {
            continue;
        }
        let k = kids.len();
        for (i, c) in kids.iter().enumerate() {
            local_of[c.index()] = i as u32;
        }
        let mut exempt = vec![false; k];
        let mut in_sibs: Vec<Vec<u32>> = vec![Vec::new(); k];
        for (i, c) in kids.iter().enumerate() {
            exempt[i] = g.has_arc(p, *c);
            for t in &in_derived[c.index()] {
                if *t != p {
                    in_sibs[i].push(local_of[t.index()]);
                }
            }
        }
        let locals = order_sibling_group(exempt, in_sibs, &mut budget)?;
        child_order[p.index()] = locals.into_iter().map(|i| kids[i as usize]).collect();
        for c in d.children(p) {
            local_of[c.index()] = u32::MAX;
        }
    }

    // assemble the preorder: expand each vertex followed by its subtree,
    // children in their group order
    let mut pos = vec![0u32; n as usize + 1];
    let mut next = 0u32;
    let mut stack: Vec<VertexId> = vec![VertexId(1)];
    while let Some(v) = stack.pop() {
        next += 1;
        pos[v.index()] = next;
        for c in child_order[v.index()].iter().rev() {
            stack.push(*c);
        }
    }
    debug_assert_eq!(next, n);

    if !d.adopt_preorder(&pos) {
        return Err(LowHighError::Internal(
            "constructed order is not a preorder of D",
        ));
    }
    Ok(LowHighOrder::from_positions(pos))
}

/// Enumerates all permutations and returns the lexicographically first
/// low-high order, or `None` if no permutation qualifies. Guarded to
/// `n <= 9`.
pub fn brute_force_low_high(
    g: &FlowGraph,
    d: &DominatorTree,
) -> Result<Option<LowHighOrder>, LowHighError> {
    const LIMIT: u32 = 9;
    let n = g.vertex_count();
    if n > LIMIT {
        return Err(LowHighError::TooLarge { n, limit: LIMIT });
    }
    let mut seq: Vec<VertexId> = vec![VertexId(1)];
    let mut used = vec![false; n as usize + 1];
    used[1] = true;
    fn rec(
        g: &FlowGraph,
        d: &DominatorTree,
        seq: &mut Vec<VertexId>,
        used: &mut Vec<bool>,
        n: u32,
    ) -> Option<LowHighOrder> {
        if seq.len() == n as usize {
            let order = LowHighOrder::from_sequence(seq);
            if check_low_high(g, d, &order).is_ok() {
                return Some(order);
            }
            return None;
        }
        for v in 2..=n {
            if !used[v as usize] {
                used[v as usize] = true;
                seq.push(VertexId(v));
                if let Some(found) = rec(g, d, seq, used, n) {
                    return Some(found);
                }
                seq.pop();
                used[v as usize] = false;
            }
        }
        None
    }
    Ok(rec(g, d, &mut seq, &mut used, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dominators::dominator_tree;
    use crate::graph::FlowGraph;

    fn e2() -> FlowGraph {
        FlowGraph::new(4, 1, &[(1, 2), (2, 3), (1, 3), (3, 4), (2, 4)]).unwrap()
    }

    fn e6() -> FlowGraph {
        FlowGraph::new(4, 1, &[(1, 2), (2, 3), (1, 4), (3, 4)]).unwrap()
    }

    fn seq(order: &LowHighOrder) -> Vec<u32> {
        order.sequence().into_iter().map(|v| v.0).collect()
    }

    #[test]
    fn derived_graph_fixed_points() {
        // flat dominator tree: every tail is already the root or a sibling
        let g = e2();
        let d = dominator_tree(&g);
        let dg = derived_graph(&g, &d);
        assert_eq!(dg.arcs(), g.arcs());

        let chain = FlowGraph::new(3, 1, &[(1, 2), (2, 3)]).unwrap();
        let dc = dominator_tree(&chain);
        assert_eq!(derived_graph(&chain, &dc).arcs(), chain.arcs());
    }

    #[test]
    fn derived_graph_collapses_deep_tail() {
        let g = e6();
        let d = dominator_tree(&g);
        let dg = derived_graph(&g, &d);
        // (3,4) collapses to (2,4): 2 is the child of 1 above 3
        let expect = [
            Arc::new(1, 2),
            Arc::new(1, 4),
            Arc::new(2, 3),
            Arc::new(2, 4),
        ];
        assert_eq!(dg.arcs(), expect);
    }

    #[test]
    fn derivation_is_idempotent() {
        for (n, raw) in [
            (4, alloc::vec![(1u32, 2u32), (2, 3), (1, 4), (3, 4)]),
            (4, alloc::vec![(1, 2), (2, 3), (1, 3), (3, 4), (2, 4)]),
        ] {
            let g = FlowGraph::new(n, 1, &raw).unwrap();
            let d = dominator_tree(&g);
            let once = derive_arcs(g.arcs().iter(), &d);
            let twice = derive_arcs(once.iter(), &d);
            assert_eq!(once, twice);
        }
    }

    #[test]
    fn check_accepts_and_rejects_on_e2() {
        let g = e2();
        let d = dominator_tree(&g);
        let good = LowHighOrder::from_sequence(&[
            VertexId(1),
            VertexId(2),
            VertexId(4),
            VertexId(3),
        ]);
        assert_eq!(check_low_high(&g, &d, &good), Ok(()));

        let bad = LowHighOrder::from_sequence(&[
            VertexId(1),
            VertexId(2),
            VertexId(3),
            VertexId(4),
        ]);
        assert_eq!(
            check_low_high(&g, &d, &bad),
            Err(LowHighViolation::MissingHighArc(VertexId(4)))
        );
    }

    #[test]
    fn check_accepts_chain() {
        let g = FlowGraph::new(3, 1, &[(1, 2), (2, 3)]).unwrap();
        let d = dominator_tree(&g);
        let order = LowHighOrder::from_sequence(&[VertexId(1), VertexId(2), VertexId(3)]);
        assert_eq!(check_low_high(&g, &d, &order), Ok(()));
    }

    #[test]
    fn check_rejects_non_preorder() {
        let g = e6();
        let d = dominator_tree(&g);
        // splits the subtree of 2
        let order = LowHighOrder::from_sequence(&[
            VertexId(1),
            VertexId(2),
            VertexId(4),
            VertexId(3),
        ]);
        assert!(matches!(
            check_low_high(&g, &d, &order),
            Err(LowHighViolation::NotPreorder(_))
        ));
    }

    #[test]
    fn construct_on_worked_examples() {
        let g = e2();
        let mut d = dominator_tree(&g);
        let order = construct_low_high(&g, &mut d).unwrap();
        assert_eq!(seq(&order), [1, 3, 4, 2]);
        assert_eq!(check_low_high(&g, &d, &order), Ok(()));

        let g = FlowGraph::new(3, 1, &[(1, 2), (2, 3)]).unwrap();
        let mut d = dominator_tree(&g);
        assert_eq!(seq(&construct_low_high(&g, &mut d).unwrap()), [1, 2, 3]);

        let g = e6();
        let mut d = dominator_tree(&g);
        let order = construct_low_high(&g, &mut d).unwrap();
        assert_eq!(seq(&order), [1, 2, 3, 4]);
        assert_eq!(check_low_high(&g, &d, &order), Ok(()));
    }

    #[test]
    fn brute_force_on_worked_examples() {
        let g = e2();
        let d = dominator_tree(&g);
        let order = brute_force_low_high(&g, &d).unwrap().unwrap();
        assert_eq!(seq(&order), [1, 2, 4, 3]);

        let g = FlowGraph::new(3, 1, &[(1, 2), (1, 3)]).unwrap();
        let d = dominator_tree(&g);
        assert_eq!(seq(&brute_force_low_high(&g, &d).unwrap().unwrap()), [1, 2, 3]);

        let g = FlowGraph::new(3, 1, &[(1, 2), (2, 3)]).unwrap();
        let d = dominator_tree(&g);
        assert_eq!(seq(&brute_force_low_high(&g, &d).unwrap().unwrap()), [1, 2, 3]);
    }

    #[test]
    fn brute_force_size_guard() {
        let g = crate::gen::random_flowgraph(10, 20, 1).unwrap();
        let d = dominator_tree(&g);
        assert_eq!(
            brute_force_low_high(&g, &d),
            Err(LowHighError::TooLarge { n: 10, limit: 9 })
        );
    }
}

use std::cell::RefCell;
use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::diagram::{PersistenceDiagram, PersistencePair};
use super::extrema::for_each_extremum;
use super::radix::RadixHeap;
use crate::error::Result;
use crate::series::TimeSeries;

const NIL: u32 = u32::MAX;

/// Extrema per block in the first pass; about 100 KiB of nodes.
const BLOCK: usize = 4096;

#[derive(Debug, Clone, Copy)]
struct Node {
    height: f64,
    prev: u32,
    next: u32,
}

/// Queue key: the gap's IEEE bits (monotone for non-negative floats) in the
/// high half, then the complement of the node so that among equal gaps the
/// rightmost pair is cancelled first. The complement keeps keys monotone:
/// a re-queued node lies left of the one just cancelled.
fn key(gap: f64, node: u32) -> u128 {
    ((gap.to_bits() as u128) << 64) | (u64::MAX - node as u64) as u128
}

fn key_node(key: u128) -> u32 {
    (u64::MAX - key as u64) as u32
}

/// Working arrays reused across calls on the same thread; the bootstrap and
/// the calibration loops compute thousands of diagrams per thread.
#[derive(Default)]
struct Scratch {
    nodes: Vec<Node>,
    index: Vec<usize>,
    alive: Vec<bool>,
    heap: Vec<Reverse<(u64, u32)>>,
}

thread_local! {
    static SCRATCH: RefCell<Scratch> = RefCell::new(Scratch::default());
}

struct Chain {
    nodes: Vec<Node>,
    /// Sample index of each node, kept apart to keep `Node` small.
    index: Vec<usize>,
    alive: Vec<bool>,
    remaining: usize,
    pairs: Vec<PersistencePair>,
}

impl Chain {
    /// Gap between `a` and `b`; infinite when either is a sentinel or missing.
    fn gap(&self, a: u32, b: u32) -> f64 {
        if a == NIL || b == NIL {
            return f64::INFINITY;
        }
        (self.nodes[a as usize].height - self.nodes[b as usize].height).abs()
    }

    /// Record `node` with its successor as a pair and splice both out.
    /// Returns the new neighbours.
    fn cancel(&mut self, node: u32) -> (u32, u32) {
        let a = self.nodes[node as usize];
        let succ = a.next;
        let b = self.nodes[succ as usize];
        let (lo, hi) = if a.height < b.height { (node, succ) } else { (succ, node) };
        self.pairs.push(PersistencePair {
            birth: a.height.min(b.height),
            death: a.height.max(b.height),
            birth_index: self.index[lo as usize],
            death_index: self.index[hi as usize],
        });
        // interior pairs always have both neighbours (the sentinels)
        let (before, after) = (a.prev, b.next);
        self.alive[node as usize] = false;
        self.alive[succ as usize] = false;
        self.nodes[before as usize].next = after;
        if after != NIL {
            self.nodes[after as usize].prev = before;
        }
        self.remaining -= 2;
        (before, after)
    }

    /// Smallest-gap cancellation restricted to pairs inside `start..end`.
    /// A popped pair is cancelled only when its gap is also no larger than
    /// the gaps to its outer neighbours, some of which lie outside the
    /// block; such a pair is a persistence pair whatever happens elsewhere.
    fn cancel_block(&mut self, start: usize, end: usize, heap: &mut BinaryHeap<Reverse<(u64, u32)>>) {
        heap.clear();
        for i in start..end - 1 {
            let g = self.gap(i as u32, i as u32 + 1);
            if g.is_finite() {
                heap.push(Reverse((g.to_bits(), i as u32)));
            }
        }
        let inside = |i: u32| i != NIL && (start..end).contains(&(i as usize));
        while let Some(Reverse((bits, node))) = heap.pop() {
            if !self.alive[node as usize] {
                continue;
            }
            let succ = self.nodes[node as usize].next;
            if !inside(succ) || self.gap(node, succ).to_bits() != bits {
                continue;
            }
            let g = f64::from_bits(bits);
            let before = self.nodes[node as usize].prev;
            let after = self.nodes[succ as usize].next;
            if self.gap(before, node) < g || self.gap(succ, after) < g {
                continue;
            }
            let (before, after) = self.cancel(node);
            if inside(before) && inside(after) {
                let g = self.gap(before, after);
                if g.is_finite() {
                    heap.push(Reverse((g.to_bits(), before)));
                }
            }
        }
    }

    /// Global smallest-gap cancellation over whatever is left.
    fn cancel_all(&mut self) {
        let mut queue = RadixHeap::new();
        let mut i = 0;
        while i != NIL {
            let next = self.nodes[i as usize].next;
            let g = self.gap(i, next);
            if g.is_finite() {
                queue.push(key(g, i));
            }
            i = next;
        }
        while self.remaining > 3 {
            let Some(k) = queue.pop() else { break };
            let node = key_node(k);
            if !self.alive[node as usize] {
                continue;
            }
            let succ = self.nodes[node as usize].next;
            if self.gap(node, succ).to_bits() != (k >> 64) as u64 {
                continue;
            }
            let (before, after) = self.cancel(node);
            let g = self.gap(before, after);
            if g.is_finite() {
                queue.push(key(g, before));
            }
        }
    }
}

/// Sublevel-set persistence in Θ(n log n).
///
/// Works on the doubly linked list of alternating extrema. The adjacent
/// min/max pair with the smallest height gap is always a persistence pair;
/// it is recorded, spliced out, and the predecessor is re-queued against its
/// new successor. More generally any adjacent pair whose gap is no larger
/// than both neighbouring gaps is a persistence pair, and the diagram does
/// not depend on the order of such cancellations.
///
/// A first pass runs the queue inside blocks of consecutive extrema so that
/// the bulk of the work stays in cache; a second pass runs it over the
/// remaining list. The second queue is a monotone radix heap: the new gap is
/// never smaller than the one just removed. Stale entries are skipped
/// lazily: an entry is current when its node is alive and its gap matches
/// the node's gap to its present successor. Boundary sentinels have infinite
/// gaps and are never queued, so the loop ends when only the sentinels and
/// at most one interior extremum remain.
pub fn sublevel_persistence(series: &TimeSeries) -> Result<PersistenceDiagram> {
    persistence_blocked(series, BLOCK)
}

fn persistence_blocked(series: &TimeSeries, block: usize) -> Result<PersistenceDiagram> {
    let mut scratch = SCRATCH.with(|s| s.take());
    let (mut nodes, mut index) = (std::mem::take(&mut scratch.nodes), std::mem::take(&mut scratch.index));
    nodes.clear();
    index.clear();
    for_each_extremum(series, |e| {
        let i = nodes.len() as u32;
        nodes.push(Node { height: e.height, prev: i.wrapping_sub(1), next: i + 1 });
        index.push(e.index);
    })?;
    let m = nodes.len();
    assert!(m < NIL as usize, "series too long for 32-bit extremum ids");
    nodes[m - 1].next = NIL;
    let mut alive = std::mem::take(&mut scratch.alive);
    alive.clear();
    alive.resize(m, true);
    let mut chain = Chain { nodes, index, alive, remaining: m, pairs: Vec::with_capacity(m / 2) };

    if block >= 2 {
        let mut heap = BinaryHeap::from(std::mem::take(&mut scratch.heap));
        for start in (0..m).step_by(block) {
            chain.cancel_block(start, (start + block).min(m), &mut heap);
        }
        scratch.heap = heap.into_vec();
    }
    chain.cancel_all();

    let Chain { nodes, index, alive, pairs, .. } = chain;
    let (essential_birth, essential_index) = (0..m)
        .filter(|&i| alive[i])
        .map(|i| (nodes[i].height, index[i]))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .map(|(h, i)| (h, h.is_finite().then_some(i)))
        .unwrap_or((f64::NEG_INFINITY, None));
    scratch.nodes = nodes;
    scratch.index = index;
    scratch.alive = alive;
    SCRATCH.with(|s| *s.borrow_mut() = scratch);

    Ok(PersistenceDiagram::new(pairs, essential_birth, essential_index, series.len()))
}

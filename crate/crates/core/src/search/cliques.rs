//! Transversal cliques in multipartite graphs.

use std::ops::ControlFlow;

use super::bitset::BitSet;
use crate::error::{Error, Result};

/// Default refusal threshold on the vertex count (the adjacency matrix is dense).
pub const DEFAULT_VERTEX_CAP: usize = 1 << 16;

/// Graph whose vertices are split into independent parts; vertex `i` of part
/// `p` has global index `offsets[p] + i`.
#[derive(Clone, Debug)]
pub struct MultipartiteGraph {
    offsets: Vec<usize>,
    adj: Vec<BitSet>,
}

impl MultipartiteGraph {
    pub fn new(part_sizes: &[usize]) -> Result<Self> {
        let mut offsets = vec![0];
        for &s in part_sizes {
            offsets.push(offsets.last().unwrap() + s);
        }
        let total = *offsets.last().unwrap();
        if total > DEFAULT_VERTEX_CAP {
            return Err(Error::Guardrail {
                what: "multipartite graph vertices",
                count: total as u128,
                cap: DEFAULT_VERTEX_CAP as u128,
            });
        }
        Ok(MultipartiteGraph { offsets, adj: vec![BitSet::new(total); total] })
    }

    /// Builds the graph from an edge predicate on `(part, index)` pairs from distinct parts.
    pub fn from_fn(part_sizes: &[usize], mut edge: impl FnMut((usize, usize), (usize, usize)) -> bool) -> Result<Self> {
        let mut g = Self::new(part_sizes)?;
        for pa in 0..part_sizes.len() {
            for pb in pa + 1..part_sizes.len() {
                for ia in 0..part_sizes[pa] {
                    for ib in 0..part_sizes[pb] {
                        if edge((pa, ia), (pb, ib)) {
                            g.add_edge((pa, ia), (pb, ib));
                        }
                    }
                }
            }
        }
        Ok(g)
    }

    pub fn parts(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn part_size(&self, p: usize) -> usize {
        self.offsets[p + 1] - self.offsets[p]
    }

    pub fn add_edge(&mut self, a: (usize, usize), b: (usize, usize)) {
        assert_ne!(a.0, b.0, "edges inside a part are not allowed");
        let (u, v) = (self.offsets[a.0] + a.1, self.offsets[b.0] + b.1);
        self.adj[u].insert(v);
        self.adj[v].insert(u);
    }

    pub fn has_edge(&self, a: (usize, usize), b: (usize, usize)) -> bool {
        self.adj[self.offsets[a.0] + a.1].contains(self.offsets[b.0] + b.1)
    }
}

struct Walk<'a, F> {
    g: &'a MultipartiteGraph,
    order: Vec<usize>,
    masks: Vec<BitSet>,
    tuple: Vec<usize>,
    visit: F,
    count: u64,
}

impl<F: FnMut(&[usize]) -> ControlFlow<()>> Walk<'_, F> {
    fn go(&mut self, depth: usize, cand: &BitSet) -> ControlFlow<()> {
        if depth == self.order.len() {
            self.count += 1;
            return (self.visit)(&self.tuple);
        }
        let p = self.order[depth];
        let mut here = cand.clone();
        here.intersect_with(&self.masks[p]);
        let off = self.g.offsets[p];
        for v in here.iter() {
            let mut next = cand.clone();
            next.intersect_with(&self.g.adj[v]);
            // every later part must keep a candidate
            let dead = self.order[depth + 1..].iter().any(|&r| {
                let mut t = next.clone();
                t.intersect_with(&self.masks[r]);
                t.is_empty()
            });
            if dead {
                continue;
            }
            self.tuple[p] = v - off;
            self.go(depth + 1, &next)?;
        }
        ControlFlow::Continue(())
    }
}

/// Visits every clique with one vertex per part as a tuple of in-part indices
/// (indexed by part). Parts are searched in ascending size order.
pub fn enumerate_partite_cliques<F>(g: &MultipartiteGraph, visit: F) -> u64
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    let k = g.parts();
    if (0..k).any(|p| g.part_size(p) == 0) {
        return 0;
    }
    let total = *g.offsets.last().unwrap();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by_key(|&p| g.part_size(p));
    let masks = (0..k).map(|p| BitSet::from_indices(total, g.offsets[p]..g.offsets[p + 1])).collect();
    let mut walk = Walk { g, order, masks, tuple: vec![0; k], visit, count: 0 };
    let all = BitSet::from_indices(total, 0..total);
    let _ = walk.go(0, &all);
    walk.count
}

pub fn count_partite_cliques(g: &MultipartiteGraph) -> u64 {
    enumerate_partite_cliques(g, |_| ControlFlow::Continue(()))
}

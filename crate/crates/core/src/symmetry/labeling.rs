//! Canonical labeling of code graphs by individualization and refinement.
//!
//! Each search-tree node is an equitable ordered partition; children
//! individualize one vertex of the target cell and refine again. Leaves are
//! discrete partitions and the canonical leaf is the maximum over
//! `(refinement traces, relabeled graph)`. Automorphisms come from pairs of
//! leaves with equal relabeled graphs. They prune children in known orbits,
//! and the group order is the product of the first-path orbit lengths, which
//! is exact.

use std::cmp::Ordering;
use std::collections::{HashSet, VecDeque};

use num_bigint::BigUint;

use super::graph::ColoredGraph;

#[derive(Clone)]
struct Partition {
    lab: Vec<u32>,
    pos: Vec<u32>,
    /// vertex -> start position of its cell
    cell: Vec<u32>,
    /// cell start -> cell length
    len: Vec<u32>,
    cells: usize,
    /// number of individualized vertices
    depth: u32,
    /// symbol vertices occupy positions below this
    nsym: usize,
}

impl Partition {
    fn by_color(colors: &[u32], nsym: usize) -> Self {
        let nv = colors.len();
        let mut lab: Vec<u32> = (0..nv as u32).collect();
        lab.sort_by_key(|&v| (colors[v as usize], v));
        let mut pos = vec![0u32; nv];
        let mut cell = vec![0u32; nv];
        let mut len = vec![0u32; nv];
        let mut cells = 0;
        let mut start = 0usize;
        for p in 0..nv {
            let v = lab[p] as usize;
            pos[v] = p as u32;
            if p > 0 && colors[v] != colors[lab[p - 1] as usize] {
                len[start] = (p - start) as u32;
                start = p;
            }
            if p == start {
                cells += 1;
            }
            cell[v] = start as u32;
        }
        if nv > 0 {
            len[start] = (nv - start) as u32;
        }
        Partition { lab, pos, cell, len, cells, depth: 0, nsym }
    }

    fn is_discrete(&self) -> bool {
        self.cells == self.lab.len()
    }

    fn cell_starts(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.cells);
        let mut p = 0usize;
        while p < self.lab.len() {
            out.push(p as u32);
            p += self.len[p] as usize;
        }
        out
    }

    /// The first largest non-singleton cell at the root; below it the first
    /// smallest non-singleton word cell, falling back to the first largest
    /// symbol cell. Small word cells tend to be single orbits of the point
    /// stabilizer, which keeps the tree narrow for codes with large groups.
    fn target_cell(&self) -> Option<usize> {
        let mut largest: Option<(usize, u32)> = None;
        let mut smallest_word: Option<(usize, u32)> = None;
        let mut p = 0usize;
        while p < self.lab.len() {
            let l = self.len[p];
            if l > 1 {
                if largest.map_or(true, |(_, bl)| l > bl) {
                    largest = Some((p, l));
                }
                if p >= self.nsym && smallest_word.map_or(true, |(_, bl)| l < bl) {
                    smallest_word = Some((p, l));
                }
            }
            p += l as usize;
        }
        let pick = if self.depth == 0 { largest } else { smallest_word.or(largest) };
        pick.map(|(p, _)| p)
    }

    fn swap(&mut self, a: usize, b: usize) {
        let (va, vb) = (self.lab[a], self.lab[b]);
        self.lab[a] = vb;
        self.lab[b] = va;
        self.pos[vb as usize] = a as u32;
        self.pos[va as usize] = b as u32;
    }

    /// Makes `v` a singleton at the front of its cell; returns the singleton's start.
    fn individualize(&mut self, v: u32) -> u32 {
        let c = self.cell[v as usize] as usize;
        let l = self.len[c] as usize;
        debug_assert!(l > 1);
        let p = self.pos[v as usize] as usize;
        self.swap(c, p);
        self.len[c] = 1;
        self.len[c + 1] = (l - 1) as u32;
        for i in c + 1..c + l {
            let u = self.lab[i] as usize;
            self.cell[u] = (c + 1) as u32;
        }
        self.cells += 1;
        self.depth += 1;
        c as u32
    }
}

fn mix(h: u64, x: u64) -> u64 {
    let mut z = h ^ x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

struct Refiner {
    count: Vec<u32>,
    touched: Vec<u32>,
    touched_cells: Vec<u32>,
    marked: Vec<u32>,
    fill: Vec<u32>,
    in_queue: Vec<bool>,
    queue: VecDeque<u32>,
    frags: Vec<(u32, u32, u32)>,
}

impl Refiner {
    fn new(nv: usize) -> Self {
        Refiner {
            count: vec![0; nv],
            touched: Vec::new(),
            touched_cells: Vec::new(),
            marked: vec![0; nv],
            fill: vec![0; nv],
            in_queue: vec![false; nv],
            queue: VecDeque::new(),
            frags: Vec::new(),
        }
    }

    /// Refines `p` to the coarsest equitable partition below it, starting from
    /// the given splitter cells. Returns a trace hash that depends only on the
    /// labeled-isomorphism type of the input.
    fn refine(&mut self, g: &ColoredGraph, p: &mut Partition, splitters: &[u32]) -> u64 {
        let mut h = 0x51_7cc1_b727_220a_u64;
        self.queue.clear();
        for &s in splitters {
            self.queue.push_back(s);
            self.in_queue[s as usize] = true;
        }
        while let Some(w) = self.queue.pop_front() {
            self.in_queue[w as usize] = false;
            if p.is_discrete() {
                continue;
            }
            let w = w as usize;
            let wlen = p.len[w] as usize;
            for i in w..w + wlen {
                let v = p.lab[i] as usize;
                for &u in g.neighbors(v) {
                    let c = &mut self.count[u as usize];
                    if *c == 0 {
                        self.touched.push(u);
                    }
                    *c += 1;
                }
            }
            for &u in &self.touched {
                let c = p.cell[u as usize] as usize;
                if self.marked[c] == 0 {
                    self.touched_cells.push(c as u32);
                }
                self.marked[c] += 1;
            }
            for idx in 0..self.touched.len() {
                let u = self.touched[idx] as usize;
                let c = p.cell[u] as usize;
                if p.len[c] == 1 {
                    continue;
                }
                self.fill[c] += 1;
                let target = c + p.len[c] as usize - self.fill[c] as usize;
                let from = p.pos[u] as usize;
                p.swap(from, target);
            }
            self.touched_cells.sort_unstable();
            for ti in 0..self.touched_cells.len() {
                let c = self.touched_cells[ti] as usize;
                let clen = p.len[c] as usize;
                let m = self.marked[c] as usize;
                self.marked[c] = 0;
                self.fill[c] = 0;
                if clen == 1 {
                    continue;
                }
                let back = c + clen - m;
                let count = &self.count;
                p.lab[back..c + clen].sort_unstable_by_key(|&v| count[v as usize]);
                for i in back..c + clen {
                    let v = p.lab[i];
                    p.pos[v as usize] = i as u32;
                }
                self.frags.clear();
                if back > c {
                    self.frags.push((c as u32, (back - c) as u32, 0));
                }
                let mut i = back;
                while i < c + clen {
                    let k = self.count[p.lab[i] as usize];
                    let mut j = i + 1;
                    while j < c + clen && self.count[p.lab[j] as usize] == k {
                        j += 1;
                    }
                    self.frags.push((i as u32, (j - i) as u32, k));
                    i = j;
                }
                if self.frags.len() == 1 {
                    continue;
                }
                h = mix(h, c as u64);
                h = mix(h, self.frags.len() as u64);
                for &(_, size, k) in &self.frags {
                    h = mix(h, ((k as u64) << 32) | size as u64);
                }
                for &(start, size, _) in &self.frags {
                    p.len[start as usize] = size;
                    if start as usize != c {
                        for i in start..start + size {
                            let v = p.lab[i as usize] as usize;
                            p.cell[v] = start;
                        }
                    }
                }
                p.cells += self.frags.len() - 1;
                if self.in_queue[c] {
                    for &(start, _, _) in &self.frags[1..] {
                        self.queue.push_back(start);
                        self.in_queue[start as usize] = true;
                    }
                } else {
                    let mut largest = 0;
                    for (fi, f) in self.frags.iter().enumerate() {
                        if f.1 > self.frags[largest].1 {
                            largest = fi;
                        }
                    }
                    for (fi, &(start, _, _)) in self.frags.iter().enumerate() {
                        if fi != largest {
                            self.queue.push_back(start);
                            self.in_queue[start as usize] = true;
                        }
                    }
                }
            }
            for &u in &self.touched {
                self.count[u as usize] = 0;
            }
            self.touched.clear();
            self.touched_cells.clear();
        }
        for s in self.queue.drain(..) {
            self.in_queue[s as usize] = false;
        }
        mix(h, p.cells as u64)
    }
}

/// Relabeled graph of a discrete partition. Symbol vertices sit at the
/// first `n*q` positions; each contributes the rank of its coordinate, and each
/// word position contributes its color and the sorted positions of its symbols.
/// Together these determine every edge.
fn certificate(g: &ColoredGraph, p: &Partition) -> Vec<u32> {
    let (n, q, m) = g.code_params();
    let nsym = n * q;
    let mut out = Vec::with_capacity(nsym + m * (n + 1));
    let mut rank = vec![u32::MAX; n];
    let mut next = 0;
    for &v in &p.lab[..nsym] {
        let c = v as usize / q;
        if rank[c] == u32::MAX {
            rank[c] = next;
            next += 1;
        }
        out.push(rank[c]);
    }
    for &v in &p.lab[nsym..] {
        out.push(g.color(v as usize));
        let start = out.len();
        out.extend(g.neighbors(v as usize).iter().map(|&u| p.pos[u as usize]));
        out[start..].sort_unstable();
    }
    out
}

struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
    done: Vec<bool>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n as u32).collect(), size: vec![1; n], done: vec![false; n] }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        let (big, small) = if self.size[ra as usize] >= self.size[rb as usize] { (ra, rb) } else { (rb, ra) };
        self.parent[small as usize] = big;
        self.size[big as usize] += self.size[small as usize];
        self.done[big as usize] |= self.done[small as usize];
    }

    fn add_perm(&mut self, perm: &[u32]) {
        for (v, &w) in perm.iter().enumerate() {
            if v as u32 != w {
                self.union(v as u32, w);
            }
        }
    }
}

/// Result of a canonical labeling run.
pub struct Labeling {
    /// Canonical order: position -> vertex.
    pub lab: Vec<u32>,
    /// Automorphism generators as vertex permutations.
    pub generators: Vec<Vec<u32>>,
    /// Exact order of the automorphism group.
    pub group_order: BigUint,
    /// Search-tree nodes visited.
    pub nodes: u64,
}

struct Search<'a> {
    g: &'a ColoredGraph,
    refiner: Refiner,
    first_invs: Vec<u64>,
    first_cert: Vec<u32>,
    first_lab: Vec<u32>,
    best_invs: Vec<u64>,
    best_cert: Vec<u32>,
    best_lab: Vec<u32>,
    gens: Vec<Vec<u32>>,
    /// first-path prefix fixed by generators added since the last drain
    pending: Vec<usize>,
    nodes: u64,
}

impl<'a> Search<'a> {
    fn add_generator(&mut self, perm: Vec<u32>) {
        debug_assert!(self.g.is_automorphism(&perm));
        if perm.iter().enumerate().all(|(v, &w)| v as u32 == w) {
            return;
        }
        self.gens.push(perm);
        self.pending.push(self.gens.len() - 1);
    }

    fn perm_between(from_lab: &[u32], to_lab: &[u32]) -> Vec<u32> {
        let mut perm = vec![0u32; from_lab.len()];
        for (a, b) in from_lab.iter().zip(to_lab) {
            perm[*a as usize] = *b;
        }
        perm
    }

    /// Orbit of `seeds` under the stored generators that fix `path` pointwise.
    fn orbit_closure(&self, path: &[u32], seeds: &[u32], into: &mut HashSet<u32>) {
        let fixing: Vec<&Vec<u32>> = self.gens.iter().filter(|g| path.iter().all(|&v| g[v as usize] == v)).collect();
        let mut stack: Vec<u32> = seeds.iter().copied().filter(|&s| into.insert(s)).collect();
        while let Some(x) = stack.pop() {
            for g in &fixing {
                let y = g[x as usize];
                if into.insert(y) {
                    stack.push(y);
                }
            }
        }
    }

    /// Compares a node's trace prefix with the best leaf's trace.
    fn cmp_best(&self, invs: &[u64]) -> Ordering {
        let m = invs.len().min(self.best_invs.len());
        match invs[..m].cmp(&self.best_invs[..m]) {
            Ordering::Equal if invs.len() > self.best_invs.len() => Ordering::Greater,
            o => o,
        }
    }

    /// Explores a subtree off the first path. Returns true as soon as a leaf
    /// equivalent to the first leaf is met.
    fn dfs(&mut self, node: &Partition, path: &mut Vec<u32>, invs: &mut Vec<u64>, eq_first: bool) -> bool {
        self.nodes += 1;
        if node.is_discrete() {
            return self.leaf(node, invs, eq_first);
        }
        let t = node.target_cell().expect("non-discrete partition has a target");
        let mut members: Vec<u32> = node.lab[t..t + node.len[t] as usize].to_vec();
        members.sort_unstable();
        let level = invs.len();
        let mut covered: HashSet<u32> = HashSet::new();
        for w in members {
            if covered.contains(&w) {
                continue;
            }
            let mut child = node.clone();
            let s = child.individualize(w);
            let inv = self.refiner.refine(self.g, &mut child, &[s]);
            let child_eq = eq_first && self.first_invs.get(level) == Some(&inv);
            invs.push(inv);
            // the best leaf may have changed since the parent was compared
            if child_eq || self.cmp_best(invs) != Ordering::Less {
                path.push(w);
                let found = self.dfs(&child, path, invs, child_eq);
                path.pop();
                if found {
                    invs.pop();
                    return true;
                }
            }
            invs.pop();
            // children in the orbit of an explored one lead to equivalent leaves
            let explored: Vec<u32> = covered.iter().copied().chain([w]).collect();
            self.orbit_closure(path, &explored, &mut covered);
        }
        false
    }

    fn leaf(&mut self, node: &Partition, invs: &[u64], eq_first: bool) -> bool {
        let cert = certificate(self.g, node);
        if eq_first && invs.len() == self.first_invs.len() && cert == self.first_cert {
            let perm = Self::perm_between(&self.first_lab, &node.lab);
            self.add_generator(perm);
            return true;
        }
        let order = match invs.cmp(&self.best_invs[..]) {
            Ordering::Equal => cert.cmp(&self.best_cert),
            o => o,
        };
        match order {
            Ordering::Greater => {
                self.best_invs = invs.to_vec();
                self.best_cert = cert;
                self.best_lab = node.lab.clone();
            }
            Ordering::Equal => {
                let perm = Self::perm_between(&self.best_lab, &node.lab);
                self.add_generator(perm);
            }
            Ordering::Less => {}
        }
        false
    }
}

pub fn canonical_labeling(g: &ColoredGraph) -> Labeling {
    let nv = g.vertex_count();
    let mut refiner = Refiner::new(nv);
    let (n, q, _) = g.code_params();
    let mut root = Partition::by_color(g.colors(), n * q);
    let starts = root.cell_starts();
    let inv0 = refiner.refine(g, &mut root, &starts);

    // first path
    let mut path_nodes: Vec<Partition> = Vec::new();
    let mut path_targets: Vec<usize> = Vec::new();
    let mut path_vertices: Vec<u32> = Vec::new();
    let mut invs = vec![inv0];
    let mut node = root;
    let mut nodes = 1u64;
    while let Some(t) = node.target_cell() {
        let v = node.lab[t];
        let mut child = node.clone();
        let s = child.individualize(v);
        invs.push(refiner.refine(g, &mut child, &[s]));
        path_nodes.push(node);
        path_targets.push(t);
        path_vertices.push(v);
        node = child;
        nodes += 1;
    }
    let first_cert = certificate(g, &node);
    let mut search = Search {
        g,
        refiner,
        first_invs: invs.clone(),
        best_invs: invs,
        best_cert: first_cert.clone(),
        first_cert,
        best_lab: node.lab.clone(),
        first_lab: node.lab,
        gens: Vec::new(),
        pending: Vec::new(),
        nodes,
    };

    let mut order = BigUint::from(1u32);
    for level in (0..path_nodes.len()).rev() {
        let prefix = &path_vertices[..level];
        let fixes_prefix = |perm: &[u32]| prefix.iter().all(|&v| perm[v as usize] == v);
        let mut uf = UnionFind::new(nv);
        for gen in &search.gens {
            if fixes_prefix(gen) {
                uf.add_perm(gen);
            }
        }
        search.pending.clear();
        let vl = path_vertices[level];
        let r = uf.find(vl);
        uf.done[r as usize] = true;
        let t = path_targets[level];
        let parent = &path_nodes[level];
        let mut members: Vec<u32> = parent.lab[t..t + parent.len[t] as usize].to_vec();
        members.sort_unstable();
        for w in members {
            let rw = uf.find(w);
            if uf.done[rw as usize] {
                continue;
            }
            let mut child = parent.clone();
            let s = child.individualize(w);
            let inv = search.refiner.refine(g, &mut child, &[s]);
            let mut invs: Vec<u64> = search.first_invs[..=level].to_vec();
            let eq_first = search.first_invs.get(level + 1) == Some(&inv);
            invs.push(inv);
            if eq_first || search.cmp_best(&invs) != Ordering::Less {
                let mut path = path_vertices[..level].to_vec();
                path.push(w);
                search.dfs(&child, &mut path, &mut invs, eq_first);
            }
            let rw = uf.find(w);
            uf.done[rw as usize] = true;
            for gi in std::mem::take(&mut search.pending) {
                if fixes_prefix(&search.gens[gi]) {
                    let gen = search.gens[gi].clone();
                    uf.add_perm(&gen);
                }
            }
        }
        let r = uf.find(vl);
        order *= uf.size[r as usize];
    }

    Labeling { lab: search.best_lab, generators: search.gens, group_order: order, nodes: search.nodes }
}

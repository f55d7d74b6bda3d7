use crate::code::Code;

/// Vertex-colored graph of a code.
///
/// Vertices `0..n*q` are the symbol vertices: coordinate `i` owns the clique
/// `i*q..(i+1)*q`. Vertex `n*q + w` stands for codeword `w` and is joined to the
/// symbol vertex of each of its coordinates. Symbol vertices get color 0 and
/// codeword vertices color 1 (or 2 when marked).
#[derive(Clone, Debug)]
pub struct ColoredGraph {
    n: usize,
    q: usize,
    m: usize,
    offsets: Vec<u32>,
    adj: Vec<u32>,
    colors: Vec<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexPart {
    Symbol { coord: usize, symbol: usize },
    Word(usize),
}

impl ColoredGraph {
    pub fn from_code(code: &Code) -> Self {
        Self::build(code, None)
    }

    /// Same graph with the codeword vertices of `marked` words in their own color.
    pub fn from_code_marked(code: &Code, marked: &[bool]) -> Self {
        assert_eq!(marked.len(), code.len());
        Self::build(code, Some(marked))
    }

    fn build(code: &Code, marked: Option<&[bool]>) -> Self {
        let (n, q, m) = (code.n(), code.q(), code.len());
        let nsym = n * q;
        let total = nsym + m;
        let mut offsets = Vec::with_capacity(total + 1);
        offsets.push(0u32);
        let sym_deg = (q - 1) as u32;
        // per-symbol occurrence counts give the symbol-vertex degrees
        let mut occ = vec![0u32; nsym];
        for w in code.words() {
            for (i, &s) in w.iter().enumerate() {
                occ[i * q + s as usize] += 1;
            }
        }
        for v in 0..nsym {
            let last = *offsets.last().unwrap();
            offsets.push(last + sym_deg + occ[v]);
        }
        for _ in 0..m {
            let last = *offsets.last().unwrap();
            offsets.push(last + n as u32);
        }
        let mut adj = vec![0u32; *offsets.last().unwrap() as usize];
        let mut fill: Vec<u32> = offsets[..total].to_vec();
        for i in 0..n {
            for a in 0..q {
                for b in 0..q {
                    if a != b {
                        let v = i * q + a;
                        adj[fill[v] as usize] = (i * q + b) as u32;
                        fill[v] += 1;
                    }
                }
            }
        }
        for (wi, w) in code.words().enumerate() {
            let wv = nsym + wi;
            for (i, &s) in w.iter().enumerate() {
                let sv = i * q + s as usize;
                adj[fill[wv] as usize] = sv as u32;
                fill[wv] += 1;
                adj[fill[sv] as usize] = wv as u32;
                fill[sv] += 1;
            }
        }
        let mut colors = vec![0u32; total];
        for wi in 0..m {
            colors[nsym + wi] = match marked {
                Some(mk) if mk[wi] => 2,
                _ => 1,
            };
        }
        ColoredGraph { n, q, m, offsets, adj, colors }
    }

    pub fn vertex_count(&self) -> usize {
        self.colors.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.len() / 2
    }

    pub fn color(&self, v: usize) -> u32 {
        self.colors[v]
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[self.offsets[v] as usize..self.offsets[v + 1] as usize]
    }

    pub fn degree(&self, v: usize) -> usize {
        (self.offsets[v + 1] - self.offsets[v]) as usize
    }

    pub fn code_params(&self) -> (usize, usize, usize) {
        (self.n, self.q, self.m)
    }

    pub fn part(&self, v: usize) -> VertexPart {
        let nsym = self.n * self.q;
        if v < nsym {
            VertexPart::Symbol { coord: v / self.q, symbol: v % self.q }
        } else {
            VertexPart::Word(v - nsym)
        }
    }

    /// True when `perm` (vertex -> vertex) preserves colors and adjacency.
    pub fn is_automorphism(&self, perm: &[u32]) -> bool {
        if perm.len() != self.vertex_count() {
            return false;
        }
        let mut buf_a = Vec::new();
        let mut buf_b = Vec::new();
        (0..self.vertex_count()).all(|v| {
            let w = perm[v] as usize;
            if self.colors[v] != self.colors[w] || self.degree(v) != self.degree(w) {
                return false;
            }
            buf_a.clear();
            buf_a.extend(self.neighbors(v).iter().map(|&u| perm[u as usize]));
            buf_a.sort_unstable();
            buf_b.clear();
            buf_b.extend_from_slice(self.neighbors(w));
            buf_b.sort_unstable();
            buf_a == buf_b
        })
    }
}

/// Fixed-width bitset over `u64` blocks.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BitSet {
    blocks: Vec<u64>,
}

impl BitSet {
    pub fn new(bits: usize) -> Self {
        BitSet { blocks: vec![0; bits.div_ceil(64)] }
    }

    pub fn from_indices(bits: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut b = Self::new(bits);
        for i in idx {
            b.insert(i);
        }
        b
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.blocks[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.blocks[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn is_disjoint(&self, other: &BitSet) -> bool {
        self.blocks.iter().zip(&other.blocks).all(|(a, b)| a & b == 0)
    }

    pub fn union_with(&mut self, other: &BitSet) {
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a |= b;
        }
    }

    pub fn difference_with(&mut self, other: &BitSet) {
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a &= !b;
        }
    }

    pub fn intersect_with(&mut self, other: &BitSet) {
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a &= b;
        }
    }

    pub fn count(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.iter().all(|&b| b == 0)
    }

    /// Lowest index not in the set, below `bits`.
    pub fn first_zero(&self, bits: usize) -> Option<usize> {
        for (bi, &b) in self.blocks.iter().enumerate() {
            if b != u64::MAX {
                let i = bi * 64 + (!b).trailing_zeros() as usize;
                return (i < bits).then_some(i);
            }
        }
        None
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks.iter().enumerate().flat_map(|(bi, &b)| {
            let mut rest = b;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let t = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(bi * 64 + t)
            })
        })
    }
}

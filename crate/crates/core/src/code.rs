//! Codes over the alphabet `{0..q-1}` and the structural operations on them.
//!
//! A [`Code`] keeps its words in one flat buffer, sorted lexicographically and
//! duplicate-free, so two codes are equal exactly when they contain the same
//! words.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Largest supported alphabet.
pub const MAX_Q: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Code {
    q: usize,
    n: usize,
    data: Vec<u8>,
}

/// Dimension, minimum distance and the MDS verdict for a code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MdsProfile {
    pub k: usize,
    pub d: usize,
    pub is_mds: bool,
}

/// A partition of a code's word indices into `q` parts; part `i` is labeled
/// with symbol `i` when the partition is used to extend the code.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LabeledPartition {
    pub parts: Vec<Vec<u32>>,
}

pub fn hamming(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// Integer `k` with `q^k == m`, if any.
pub fn exact_log(q: usize, m: usize) -> Option<usize> {
    let mut k = 0;
    let mut p = 1usize;
    while p < m {
        p = p.checked_mul(q)?;
        k += 1;
    }
    (p == m).then_some(k)
}

fn check_params(q: usize, n: usize) -> Result<()> {
    if !(2..=MAX_Q).contains(&q) {
        return Err(Error::param(format!("alphabet size q={q} outside 2..={MAX_Q}")));
    }
    if n == 0 {
        return Err(Error::param("length n must be at least 1"));
    }
    Ok(())
}

impl Code {
    pub fn new<I, W>(q: usize, n: usize, words: I) -> Result<Self>
    where
        I: IntoIterator<Item = W>,
        W: AsRef<[u8]>,
    {
        let mut data = Vec::new();
        for (i, w) in words.into_iter().enumerate() {
            let w = w.as_ref();
            if w.len() != n {
                return Err(Error::InvalidCode(format!("word {i} has length {}, expected {n}", w.len())));
            }
            data.extend_from_slice(w);
        }
        Self::from_flat(q, n, data)
    }

    /// Builds a code from concatenated words in any order; duplicates are an error.
    pub fn from_flat(q: usize, n: usize, data: Vec<u8>) -> Result<Self> {
        check_params(q, n)?;
        if data.is_empty() || data.len() % n != 0 {
            return Err(Error::InvalidCode("a code needs at least one word".into()));
        }
        if let Some(s) = data.iter().find(|&&s| s as usize >= q) {
            return Err(Error::InvalidCode(format!("symbol {s} out of range for q={q}")));
        }
        let mut words: Vec<&[u8]> = data.chunks_exact(n).collect();
        let sorted = words.windows(2).all(|w| w[0] < w[1]);
        if sorted {
            return Ok(Code { q, n, data });
        }
        words.sort_unstable();
        if let Some(w) = words.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidCode(format!("duplicate word {:?}", w[0])));
        }
        let data = words.concat();
        Ok(Code { q, n, data })
    }

    /// Caller guarantees sorted, distinct, in-range words.
    pub(crate) fn from_sorted_unchecked(q: usize, n: usize, data: Vec<u8>) -> Self {
        debug_assert!(data.chunks_exact(n).zip(data.chunks_exact(n).skip(1)).all(|(a, b)| a < b));
        Code { q, n, data }
    }

    /// Sorts the words but does not check for duplicates beyond a debug assertion.
    pub(crate) fn from_unsorted_unchecked(q: usize, n: usize, data: Vec<u8>) -> Self {
        let mut words: Vec<&[u8]> = data.chunks_exact(n).collect();
        words.sort_unstable();
        debug_assert!(words.windows(2).all(|w| w[0] != w[1]));
        Code { q, n, data: words.concat() }
    }

    /// The whole space `A^n`.
    pub fn full_space(q: usize, n: usize) -> Result<Self> {
        check_params(q, n)?;
        let m = q.checked_pow(n as u32).ok_or_else(|| Error::param("q^n overflows"))?;
        let mut data = Vec::with_capacity(m * n);
        let mut w = vec![0u8; n];
        for _ in 0..m {
            data.extend_from_slice(&w);
            for i in (0..n).rev() {
                w[i] += 1;
                if (w[i] as usize) < q {
                    break;
                }
                w[i] = 0;
            }
        }
        Ok(Code { q, n, data })
    }

    /// The repetition code `{(s, s, ..., s)}`.
    pub fn repetition(q: usize, n: usize) -> Result<Self> {
        check_params(q, n)?;
        let data = (0..q as u8).flat_map(|s| std::iter::repeat(s).take(n)).collect();
        Ok(Code { q, n, data })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of words `M`.
    pub fn len(&self) -> usize {
        self.data.len() / self.n
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn word(&self, i: usize) -> &[u8] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn words(&self) -> std::slice::ChunksExact<'_, u8> {
        self.data.chunks_exact(self.n)
    }

    pub fn as_flat(&self) -> &[u8] {
        &self.data
    }

    pub fn into_flat(self) -> Vec<u8> {
        self.data
    }

    pub fn index_of(&self, w: &[u8]) -> Option<usize> {
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.word(mid).cmp(w) {
                Ordering::Less => lo = mid + 1,
                Ordering::Greater => hi = mid,
                Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    pub fn contains(&self, w: &[u8]) -> bool {
        self.index_of(w).is_some()
    }

    /// The subcode formed by the given word indices (ascending indices keep it sorted).
    pub fn subcode(&self, indices: &[u32]) -> Code {
        let mut data = Vec::with_capacity(indices.len() * self.n);
        for &i in indices {
            data.extend_from_slice(self.word(i as usize));
        }
        if indices.windows(2).all(|w| w[0] < w[1]) {
            Code::from_sorted_unchecked(self.q, self.n, data)
        } else {
            Code::from_unsorted_unchecked(self.q, self.n, data)
        }
    }

    /// Minimum Hamming distance; a single-word code reports `n`.
    pub fn min_distance(&self) -> usize {
        let m = self.len();
        if m < 2 {
            return self.n;
        }
        let mut best = self.n;
        for i in 0..m {
            let a = self.word(i);
            for j in i + 1..m {
                let d = hamming(a, self.word(j));
                if d < best {
                    best = d;
                    if best == 1 {
                        return 1;
                    }
                }
            }
        }
        best
    }

    /// Histogram of pairwise distances: entry `t` counts unordered pairs at distance `t`.
    pub fn distance_distribution(&self) -> Vec<u64> {
        let mut hist = vec![0u64; self.n + 1];
        let m = self.len();
        for i in 0..m {
            let a = self.word(i);
            for j in i + 1..m {
                hist[hamming(a, self.word(j))] += 1;
            }
        }
        hist
    }

    pub fn cross_distance(&self, other: &Code) -> Result<usize> {
        if self.n != other.n || self.q != other.q {
            return Err(Error::param(format!(
                "cross distance between (n={}, q={}) and (n={}, q={})",
                self.n, self.q, other.n, other.q
            )));
        }
        let mut best = self.n;
        for a in self.words() {
            for b in other.words() {
                best = best.min(hamming(a, b));
                if best == 0 {
                    return Ok(0);
                }
            }
        }
        Ok(best)
    }

    /// Singleton-equality test: `M = q^k` and `d = n - k + 1`.
    ///
    /// A single word is treated as the 0-dimensional MDS code with `d = n + 1`.
    /// When `M` is a power of `q` the distance condition is decided through
    /// `k`-coordinate projections, which is linear in `M`.
    pub fn is_mds(&self) -> MdsProfile {
        let m = self.len();
        if m == 1 {
            return MdsProfile { k: 0, d: self.n + 1, is_mds: true };
        }
        if let Some(k) = exact_log(self.q, m) {
            if k <= self.n && self.is_mds_by_projection() {
                return MdsProfile { k, d: self.n + 1 - k, is_mds: true };
            }
        }
        self.is_mds_by_distance()
    }

    /// Same verdict as [`Code::is_mds`], computed from the quadratic distance scan.
    pub fn is_mds_by_distance(&self) -> MdsProfile {
        let m = self.len();
        if m == 1 {
            return MdsProfile { k: 0, d: self.n + 1, is_mds: true };
        }
        let d = self.min_distance();
        let k = self.n + 1 - d;
        let is_mds = exact_log(self.q, m) == Some(k);
        MdsProfile { k, d, is_mds }
    }

    /// Direct MDS check: every `k`-subset of coordinates hits each `k`-tuple exactly once.
    pub fn is_mds_by_projection(&self) -> bool {
        let Some(k) = exact_log(self.q, self.len()) else {
            return false;
        };
        if k > self.n {
            return false;
        }
        let mut seen = vec![false; self.len()];
        let mut ok = true;
        for_each_subset(self.n, k, |coords| {
            if !ok {
                return;
            }
            seen.iter_mut().for_each(|s| *s = false);
            for w in self.words() {
                let idx = coords.iter().fold(0usize, |acc, &c| acc * self.q + w[c] as usize);
                if std::mem::replace(&mut seen[idx], true) {
                    ok = false;
                    return;
                }
            }
        });
        ok
    }

    fn mds_dimension(&self, what: &str) -> Result<usize> {
        let p = self.is_mds();
        if !p.is_mds {
            return Err(Error::InvalidCode(format!("{what}: input is not MDS")));
        }
        Ok(p.k)
    }

    /// Deletes coordinate `pos`. Requires an MDS code with `k < n`.
    pub fn puncture(&self, pos: usize) -> Result<Code> {
        if pos >= self.n {
            return Err(Error::param(format!("position {pos} out of range for n={}", self.n)));
        }
        let k = self.mds_dimension("puncture")?;
        if k >= self.n || self.n == 1 {
            return Err(Error::param("puncturing a full space would merge words"));
        }
        Ok(self.puncture_unchecked(pos))
    }

    pub(crate) fn puncture_unchecked(&self, pos: usize) -> Code {
        let mut data = Vec::with_capacity(self.len() * (self.n - 1));
        for w in self.words() {
            data.extend_from_slice(&w[..pos]);
            data.extend_from_slice(&w[pos + 1..]);
        }
        if pos == self.n - 1 {
            // prefixes of a sorted list stay sorted
            Code::from_sorted_unchecked(self.q, self.n - 1, data)
        } else {
            Code::from_unsorted_unchecked(self.q, self.n - 1, data)
        }
    }

    /// The words with symbol `s` at `pos`, with `pos` deleted.
    pub fn shorten(&self, pos: usize, s: u8) -> Result<Code> {
        if pos >= self.n || s as usize >= self.q {
            return Err(Error::param(format!("shorten at ({pos}, {s}) out of range")));
        }
        let k = self.mds_dimension("shorten")?;
        if k == 0 || self.n == 1 {
            return Err(Error::param("cannot shorten a 0-dimensional code"));
        }
        Ok(self.shorten_unchecked(pos, s).0)
    }

    /// Shortened code plus the indices (into `self`) of the retained words.
    pub(crate) fn shorten_unchecked(&self, pos: usize, s: u8) -> (Code, Vec<u32>) {
        let mut data = Vec::new();
        let mut kept = Vec::new();
        for (i, w) in self.words().enumerate() {
            if w[pos] == s {
                data.extend_from_slice(&w[..pos]);
                data.extend_from_slice(&w[pos + 1..]);
                kept.push(i as u32);
            }
        }
        // words sharing a fixed symbol keep their relative order after the deletion
        (Code::from_sorted_unchecked(self.q, self.n - 1, data), kept)
    }

    /// `⋃_i P_i‖i`: appends symbol `i` to the words of part `i`.
    pub fn extend_with_partition(&self, p: &LabeledPartition) -> Result<Code> {
        p.validate(self)?;
        Ok(self.extend_unchecked(&p.parts))
    }

    pub(crate) fn extend_unchecked<P: AsRef<[u32]>>(&self, parts: &[P]) -> Code {
        let mut label = vec![0u8; self.len()];
        for (i, part) in parts.iter().enumerate() {
            for &w in part.as_ref() {
                label[w as usize] = i as u8;
            }
        }
        let n1 = self.n + 1;
        let mut data = Vec::with_capacity(self.len() * n1);
        for (w, &l) in self.words().zip(&label) {
            data.extend_from_slice(w);
            data.push(l);
        }
        Code::from_sorted_unchecked(self.q, n1, data)
    }

    /// All concatenations `c‖d`.
    pub fn direct_sum(&self, other: &Code) -> Result<Code> {
        if self.q != other.q {
            return Err(Error::param(format!("alphabet mismatch: {} vs {}", self.q, other.q)));
        }
        let n = self.n + other.n;
        let mut data = Vec::with_capacity(self.len() * other.len() * n);
        for a in self.words() {
            for b in other.words() {
                data.extend_from_slice(a);
                data.extend_from_slice(b);
            }
        }
        Ok(Code::from_sorted_unchecked(self.q, n, data))
    }

    /// Combines an `(n1, n1-1)` and an `(n2, n2-1)` MDS code into an
    /// `(n1+n2-2, n1+n2-3)` MDS code as `⋃_i C_i D_i` over last-coordinate shortenings.
    pub fn glue_shortenings(&self, other: &Code) -> Result<Code> {
        if self.q != other.q {
            return Err(Error::param(format!("alphabet mismatch: {} vs {}", self.q, other.q)));
        }
        for (c, name) in [(self, "first"), (other, "second")] {
            let p = c.is_mds();
            if !p.is_mds || p.d != 2 || c.n < 2 {
                return Err(Error::InvalidCode(format!("{name} input must be an (n, n-1) MDS code with d = 2")));
            }
        }
        let n = self.n + other.n - 2;
        let mut data = Vec::new();
        for i in 0..self.q as u8 {
            let (a, _) = self.shorten_unchecked(self.n - 1, i);
            let (b, _) = other.shorten_unchecked(other.n - 1, i);
            data.extend_from_slice(a.direct_sum(&b)?.as_flat());
        }
        let out = Code::from_unsorted_unchecked(self.q, n, data);
        debug_assert!(out.is_mds().is_mds);
        Ok(out)
    }
}

impl fmt::Debug for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Code(q={}, n={}, M={})", self.q, self.n, self.len())
    }
}

impl LabeledPartition {
    pub fn new(parts: Vec<Vec<u32>>) -> Self {
        LabeledPartition { parts }
    }

    /// Checks the parts cover every word once and are MDS of dimension `k - 1`.
    pub fn validate(&self, code: &Code) -> Result<()> {
        let q = code.q();
        if self.parts.len() != q {
            return Err(Error::Partition {
                part: self.parts.len(),
                reason: format!("expected {q} parts, found {}", self.parts.len()),
            });
        }
        let k = code.mds_dimension("partition parent")?;
        if k == 0 {
            return Err(Error::param("a 0-dimensional code has no partition into q parts"));
        }
        let mut owner = vec![usize::MAX; code.len()];
        for (i, part) in self.parts.iter().enumerate() {
            if part.is_empty() {
                return Err(Error::Partition { part: i, reason: "empty".into() });
            }
            for &w in part {
                let slot = owner
                    .get_mut(w as usize)
                    .ok_or_else(|| Error::Partition { part: i, reason: format!("word index {w} out of range") })?;
                if *slot != usize::MAX {
                    return Err(Error::Partition {
                        part: i,
                        reason: format!("word {w} already belongs to part {slot}"),
                    });
                }
                *slot = i;
            }
        }
        if let Some(w) = owner.iter().position(|&o| o == usize::MAX) {
            return Err(Error::Partition { part: 0, reason: format!("word {w} is not covered") });
        }
        for (i, part) in self.parts.iter().enumerate() {
            let mut idx = part.clone();
            idx.sort_unstable();
            let p = code.subcode(&idx).is_mds();
            if !p.is_mds || p.k + 1 != k {
                return Err(Error::Partition { part: i, reason: format!("not an MDS code of dimension {}", k - 1) });
            }
        }
        Ok(())
    }

    /// Reads the partition induced on `C` by its extension `E` (last coordinate).
    pub fn induced_by_extension(ext: &Code) -> (Code, LabeledPartition) {
        let n = ext.n() - 1;
        let base = ext.puncture_unchecked(n);
        let mut parts = vec![Vec::new(); ext.q()];
        for (i, w) in ext.words().enumerate() {
            parts[w[n] as usize].push(i as u32);
        }
        (base, LabeledPartition { parts })
    }
}

/// Calls `f` on every `k`-subset of `0..n`, in lexicographic order.
pub fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        while i > 0 && idx[i - 1] == i - 1 + n - k {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cayley_z(q: usize) -> Code {
        let words: Vec<Vec<u8>> =
            (0..q).flat_map(|x| (0..q).map(move |y| vec![x as u8, y as u8, ((x + y) % q) as u8])).collect();
        Code::new(q, 3, words).unwrap()
    }

    #[test]
    fn repetition_distance() {
        let c = Code::new(3, 3, [[0, 0, 0], [1, 1, 1], [2, 2, 2]]).unwrap();
        assert_eq!(c.min_distance(), 3);
        assert_eq!(Code::full_space(2, 2).unwrap().min_distance(), 1);
    }

    #[test]
    fn new_sorts_and_rejects_duplicates() {
        let c = Code::new(3, 2, [[2, 1], [0, 1], [1, 0]]).unwrap();
        assert_eq!(c.word(0), &[0, 1]);
        assert_eq!(c.word(2), &[2, 1]);
        assert!(Code::new(3, 2, [[0, 1], [0, 1]]).is_err());
        assert!(Code::new(3, 2, [[0, 3]]).is_err());
        assert!(Code::new(3, 2, Vec::<Vec<u8>>::new()).is_err());
    }

    #[test]
    fn cross_distance_cases() {
        let a = Code::new(3, 3, [[0, 0, 0]]).unwrap();
        let b = Code::new(3, 3, [[1, 1, 1]]).unwrap();
        assert_eq!(a.cross_distance(&b).unwrap(), 3);
        assert_eq!(a.cross_distance(&a).unwrap(), 0);
        let c = Code::new(3, 2, [[1, 1]]).unwrap();
        assert!(a.cross_distance(&c).is_err());
    }

    #[test]
    fn mds_profiles() {
        let full = Code::full_space(3, 3).unwrap();
        assert_eq!(full.is_mds(), MdsProfile { k: 3, d: 1, is_mds: true });
        let c = Code::new(2, 2, [[0, 0], [0, 1]]).unwrap();
        assert!(!c.is_mds().is_mds);
        let z4 = cayley_z(4);
        assert_eq!(z4.is_mds(), MdsProfile { k: 2, d: 2, is_mds: true });
        assert!(z4.is_mds_by_projection());
        assert!(!c.is_mds_by_projection());
        for code in [&full, &c, &z4] {
            assert_eq!(code.is_mds(), code.is_mds_by_distance());
        }
    }

    #[test]
    fn puncture_and_shorten() {
        let c = Code::new(3, 3, [[0, 0, 0], [1, 1, 1], [2, 2, 2]]).unwrap();
        let p = c.puncture(2).unwrap();
        assert_eq!(p, Code::new(3, 2, [[0, 0], [1, 1], [2, 2]]).unwrap());
        assert!(Code::full_space(3, 2).unwrap().puncture(0).is_err());

        let z4 = cayley_z(4);
        for i in 0..4u8 {
            let row = z4.shorten(2, i).unwrap();
            let expect: Vec<Vec<u8>> = (0..4u8).map(|x| vec![x, (i + 4 - x) % 4]).collect();
            assert_eq!(row, Code::new(4, 2, expect).unwrap());
        }
        for pos in 0..3 {
            let mut union = Vec::new();
            for s in 0..4u8 {
                let sh = z4.shorten(pos, s).unwrap();
                assert_eq!(sh.len(), 4);
                union.extend(sh.words().map(|w| w.to_vec()));
            }
            assert_eq!(Code::new(4, 2, union).unwrap(), z4.puncture(pos).unwrap());
        }
        let single = Code::new(3, 2, [[0, 1]]).unwrap();
        assert!(single.shorten(0, 0).is_err());
    }

    #[test]
    fn extension_of_full_square_is_cayley_z3() {
        let c = Code::full_space(3, 2).unwrap();
        let idx = |w: [u8; 2]| c.index_of(&w).unwrap() as u32;
        let p = LabeledPartition::new(vec![
            vec![idx([0, 0]), idx([1, 1]), idx([2, 2])],
            vec![idx([0, 1]), idx([1, 2]), idx([2, 0])],
            vec![idx([0, 2]), idx([1, 0]), idx([2, 1])],
        ]);
        let e = c.extend_with_partition(&p).unwrap();
        assert_eq!(e.is_mds(), MdsProfile { k: 2, d: 2, is_mds: true });
        assert_eq!(e.puncture(2).unwrap(), c);
        let (base, back) = LabeledPartition::induced_by_extension(&e);
        assert_eq!(base, c);
        assert_eq!(back, p);

        let mut bad = p.clone();
        bad.parts[1][0] = bad.parts[0][0];
        assert!(matches!(c.extend_with_partition(&bad), Err(Error::Partition { .. })));
    }

    #[test]
    fn direct_sum_sizes() {
        let r = Code::new(3, 2, [[0, 0], [1, 1], [2, 2]]).unwrap();
        let s = r.direct_sum(&r).unwrap();
        assert_eq!((s.len(), s.n(), s.min_distance()), (9, 4, 2));
        let one = Code::new(3, 1, [[2]]).unwrap();
        let t = one.direct_sum(&r).unwrap();
        assert_eq!(t.len(), r.len());
        assert!(t.words().zip(r.words()).all(|(a, b)| a[0] == 2 && &a[1..] == b));
        assert!(r.direct_sum(&Code::repetition(4, 2).unwrap()).is_err());
    }

    #[test]
    fn glued_shortenings_of_cyclic_squares() {
        let z3 = cayley_z(3);
        let out = z3.glue_shortenings(&z3).unwrap();
        assert_eq!((out.len(), out.n()), (27, 4));
        assert_eq!(out.is_mds(), MdsProfile { k: 3, d: 2, is_mds: true });
        let z4 = cayley_z(4);
        let out = z4.glue_shortenings(&z4).unwrap();
        assert_eq!((out.len(), out.n()), (64, 4));
        assert!(out.is_mds().is_mds);
        assert!(Code::repetition(3, 3).unwrap().glue_shortenings(&z3).is_err());
    }

    #[test]
    fn subsets_enumerated() {
        let mut seen = Vec::new();
        for_each_subset(4, 2, |s| seen.push(s.to_vec()));
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[0], vec![0, 1]);
        assert_eq!(seen[5], vec![2, 3]);
        let mut count = 0;
        for_each_subset(3, 0, |_| count += 1);
        assert_eq!(count, 1);
        for_each_subset(3, 3, |_| count += 1);
        assert_eq!(count, 2);
    }
}

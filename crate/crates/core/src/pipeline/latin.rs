//! Classification of Latin squares of order `q`, i.e. of `(3,2)_q` MDS codes.
//!
//! Any two rows of a Latin square differ by a derangement of the symbols; its
//! cycle type is invariant under isotopy, and the three conjugates give the
//! same notion for columns and symbols. Every class has a member whose first
//! two rows are the identity and a fixed derangement of the smallest cycle
//! type occurring anywhere in the square, with the remaining rows ordered by
//! their first entry. Only those squares are built (pruning any pair of rows
//! with a smaller type) and then deduplicated by canonical form.

use std::collections::BTreeMap;

use num_bigint::BigUint;

use crate::code::Code;
use crate::error::{Error, Result};
use crate::symmetry::{canonical_form, CanonicalForm};

use super::registry::{Provenance, Registry};

pub const MAX_LATIN_ORDER: usize = 7;

#[derive(Clone, Debug)]
pub struct LatinClassification {
    pub registry: Registry,
    /// Latin squares with first row and first column in natural order.
    pub reduced_count: u64,
}

/// Number of reduced Latin squares of order `q` (first row and column fixed).
pub fn count_reduced_latin_squares(q: usize) -> Result<u64> {
    if !(1..=MAX_LATIN_ORDER).contains(&q) {
        return Err(Error::SeedRequired(q));
    }
    let full = (1u32 << q) - 1;
    let mut rows: Vec<u32> = (0..q).map(|r| if r == 0 { full } else { 1 << r }).collect();
    let mut cols: Vec<u32> = (0..q).map(|c| if c == 0 { full } else { 1 << c }).collect();
    fn go(cell: usize, q: usize, full: u32, rows: &mut [u32], cols: &mut [u32]) -> u64 {
        if cell == q * q {
            return 1;
        }
        let (r, c) = (cell / q, cell % q);
        if r == 0 || c == 0 {
            return go(cell + 1, q, full, rows, cols);
        }
        let mut free = full & !rows[r] & !cols[c];
        let mut total = 0;
        while free != 0 {
            let bit = free & free.wrapping_neg();
            free ^= bit;
            rows[r] |= bit;
            cols[c] |= bit;
            total += go(cell + 1, q, full, rows, cols);
            rows[r] ^= bit;
            cols[c] ^= bit;
        }
        total
    }
    Ok(go(0, q, full, &mut rows, &mut cols))
}

type CycleType = Vec<u8>;

fn cycle_type(perm: &[u8]) -> CycleType {
    let mut seen = 0u32;
    let mut lens = Vec::new();
    for s in 0..perm.len() {
        if seen & (1 << s) != 0 {
            continue;
        }
        let mut len = 0;
        let mut x = s;
        while seen & (1 << x) == 0 {
            seen |= 1 << x;
            x = perm[x] as usize;
            len += 1;
        }
        lens.push(len);
    }
    lens.sort_unstable();
    lens
}

/// Cycle types of fixed-point-free permutations of `q` points, ascending.
fn derangement_types(q: usize) -> Vec<CycleType> {
    fn parts(rest: usize, min: usize, cur: &mut Vec<u8>, out: &mut Vec<CycleType>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for p in min..=rest {
            cur.push(p as u8);
            parts(rest - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    parts(q, 2, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// Permutation with the cycles of `t` laid out on consecutive points.
fn perm_of_type(t: &CycleType) -> Vec<u8> {
    let mut p = Vec::new();
    let mut start = 0u8;
    for &len in t {
        for i in 0..len {
            p.push(start + (i + 1) % len);
        }
        start += len;
    }
    p
}

/// Smallest cycle type over all pairs of lines in all three directions.
fn min_line_type(sq: &[u8], q: usize) -> CycleType {
    let mut best: Option<CycleType> = None;
    // role: (fixed coordinate, from coordinate, to coordinate) over triples (r, c, s)
    for role in 0..3 {
        let mut f = vec![vec![0u8; q]; q];
        for r in 0..q {
            for c in 0..q {
                let t = [r as u8, c as u8, sq[r * q + c]];
                let (a, u, v) = match role {
                    0 => (t[0], t[1], t[2]),
                    1 => (t[1], t[0], t[2]),
                    _ => (t[2], t[0], t[1]),
                };
                f[a as usize][u as usize] = v;
            }
        }
        for a in 0..q {
            for b in a + 1..q {
                let mut pi = vec![0u8; q];
                for u in 0..q {
                    pi[f[a][u] as usize] = f[b][u];
                }
                let t = cycle_type(&pi);
                if best.as_ref().is_none_or(|bt| t < *bt) {
                    best = Some(t);
                }
            }
        }
    }
    best.unwrap_or_default()
}

/// Cycles of a permutation, each starting at its smallest point.
fn cycles(perm: &[u8]) -> Vec<Vec<u8>> {
    let mut seen = 0u32;
    let mut out = Vec::new();
    for s in 0..perm.len() {
        if seen & (1 << s) != 0 {
            continue;
        }
        let mut cyc = Vec::new();
        let mut x = s;
        while seen & (1 << x) == 0 {
            seen |= 1 << x;
            cyc.push(x as u8);
            x = perm[x] as usize;
        }
        out.push(cyc);
    }
    out
}

/// Calls `f` with every `γ` satisfying `γ π γ⁻¹ = σ`, given the cycles of both.
fn conjugators(from: &[Vec<u8>], to: &[Vec<u8>], f: &mut impl FnMut(&[u8]) -> bool) -> bool {
    fn go(
        i: usize,
        from: &[Vec<u8>],
        to: &[Vec<u8>],
        used: &mut [bool],
        gamma: &mut [u8],
        f: &mut impl FnMut(&[u8]) -> bool,
    ) -> bool {
        if i == from.len() {
            return f(gamma);
        }
        let l = from[i].len();
        for j in 0..to.len() {
            if used[j] || to[j].len() != l {
                continue;
            }
            used[j] = true;
            for o in 0..l {
                for (k, &x) in from[i].iter().enumerate() {
                    gamma[x as usize] = to[j][(k + o) % l];
                }
                if !go(i + 1, from, to, used, gamma, f) {
                    used[j] = false;
                    return false;
                }
            }
            used[j] = false;
        }
        true
    }
    let mut gamma = vec![0u8; from.iter().map(Vec::len).sum()];
    go(0, from, to, &mut vec![false; to.len()], &mut gamma, f)
}

/// True when no normal form of `sq` (any conjugate, any ordered pair of
/// lines of type `t` taken as the first two rows) is lexicographically
/// smaller than `sq` itself.
fn is_least_normal_form(sq: &[u8], q: usize, t: &CycleType, sigma_cycles: &[Vec<u8>]) -> bool {
    let mut lines = vec![vec![0u8; q]; q];
    let mut inv = vec![vec![0u8; q]; q];
    let mut pi = vec![0u8; q];
    let mut beta = vec![0u8; q];
    let mut first = vec![(0u8, 0u8); q];
    let mut row_of = vec![0u8; q];
    let mut norm = vec![0u8; q * q];
    for (f, u, v) in [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)] {
        for r in 0..q {
            for c in 0..q {
                let tr = [r as u8, c as u8, sq[r * q + c]];
                lines[tr[f] as usize][tr[u] as usize] = tr[v];
                inv[tr[f] as usize][tr[v] as usize] = tr[u];
            }
        }
        for a in 0..q {
            for b in 0..q {
                if a == b {
                    continue;
                }
                for x in 0..q {
                    pi[x] = inv[a][lines[b][x] as usize];
                }
                if cycle_type(&pi) != *t {
                    continue;
                }
                let smaller = !conjugators(&cycles(&pi), sigma_cycles, &mut |gamma| {
                    for x in 0..q {
                        beta[lines[a][x] as usize] = gamma[x];
                    }
                    let mut x0 = 0;
                    while gamma[x0] != 0 {
                        x0 += 1;
                    }
                    let mut rest = 0;
                    for e in 0..q {
                        if e != a && e != b {
                            first[rest] = (beta[lines[e][x0] as usize], e as u8);
                            rest += 1;
                        }
                    }
                    first[..rest].sort_unstable();
                    row_of[a] = 0;
                    row_of[b] = 1;
                    for (i, &(_, e)) in first[..rest].iter().enumerate() {
                        row_of[e as usize] = (i + 2) as u8;
                    }
                    for e in 0..q {
                        let row = row_of[e] as usize * q;
                        for x in 0..q {
                            norm[row + gamma[x] as usize] = beta[lines[e][x] as usize];
                        }
                    }
                    norm[..] >= *sq
                });
                if smaller {
                    return false;
                }
            }
        }
    }
    true
}

struct Builder<'a> {
    q: usize,
    t: &'a CycleType,
    sigma_cycles: Vec<Vec<u8>>,
    sq: Vec<u8>,
    rows: Vec<u32>,
    cols: Vec<u32>,
    found: &'a mut BTreeMap<[u8; 32], CanonicalForm>,
}

impl Builder<'_> {
    fn row_ok(&self, r: usize) -> bool {
        let q = self.q;
        (0..r).all(|a| {
            let mut pi = vec![0u8; q];
            for c in 0..q {
                pi[self.sq[a * q + c] as usize] = self.sq[r * q + c];
            }
            cycle_type(&pi) >= *self.t
        })
    }

    fn go(&mut self, cell: usize) {
        let q = self.q;
        if cell == q * q {
            if min_line_type(&self.sq, q) == *self.t && is_least_normal_form(&self.sq, q, self.t, &self.sigma_cycles) {
                let words: Vec<[u8; 3]> = (0..q * q).map(|i| [(i / q) as u8, (i % q) as u8, self.sq[i]]).collect();
                let code = Code::new(q, 3, words).expect("a Latin square is a valid code");
                let f = canonical_form(&code);
                self.found.entry(f.cert).or_insert(f);
            }
            return;
        }
        let (r, c) = (cell / q, cell % q);
        if c == 0 {
            // fixed first entry
            return self.go(cell + 1);
        }
        let mut free = ((1u32 << q) - 1) & !self.rows[r] & !self.cols[c];
        while free != 0 {
            let bit = free & free.wrapping_neg();
            free ^= bit;
            self.sq[cell] = bit.trailing_zeros() as u8;
            self.rows[r] |= bit;
            self.cols[c] |= bit;
            if c + 1 < q || self.row_ok(r) {
                self.go(cell + 1);
            }
            self.rows[r] ^= bit;
            self.cols[c] ^= bit;
        }
    }
}

/// All classes of `(3,2)_q` MDS codes, for `q ≤ 7`.
pub fn classify_latin_squares(q: usize) -> Result<LatinClassification> {
    if q < 2 {
        return Err(Error::param("Latin squares need q >= 2"));
    }
    if q > MAX_LATIN_ORDER {
        return Err(Error::SeedRequired(q));
    }
    let mut found = BTreeMap::new();
    for t in derangement_types(q) {
        let sigma = perm_of_type(&t);
        let mut sq = vec![0u8; q * q];
        let mut rows = vec![0u32; q];
        let mut cols = vec![0u32; q];
        let mut first: Vec<u8> = (0..q as u8).filter(|&s| s != 0 && s != sigma[0]).collect();
        first.insert(0, sigma[0]);
        first.insert(0, 0);
        for r in 0..q {
            sq[r * q] = first[r];
            rows[r] |= 1 << first[r];
            cols[0] |= 1 << first[r];
        }
        for c in 1..q {
            for (r, v) in [(0, c as u8), (1, sigma[c])] {
                sq[r * q + c] = v;
                rows[r] |= 1 << v;
                cols[c] |= 1 << v;
            }
        }
        let mut b = Builder { q, t: &t, sigma_cycles: cycles(&sigma), sq, rows, cols, found: &mut found };
        b.go(2 * q);
    }
    let reduced_count = count_reduced_latin_squares(q)?;
    let registry =
        Registry::from_forms(q, 3, 2, found.into_values(), "Latin square classification", Provenance::Generated)?;
    let fq: BigUint = (1..=q as u32).product();
    let expected = BigUint::from(reduced_count) * &fq * (fq.clone() / q as u32);
    let total = registry.labeled_total()?;
    if total != expected {
        return Err(Error::Verify(format!(
            "order-{q} Latin square classes cover {total} labeled squares, expected {expected}"
        )));
    }
    Ok(LatinClassification { registry, reduced_count })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduced_counts() {
        let want = [0u64, 1, 1, 1, 4, 56, 9408];
        for (q, &w) in want.iter().enumerate().skip(1) {
            assert_eq!(count_reduced_latin_squares(q).unwrap(), w, "q={q}");
        }
    }

    #[test]
    fn small_class_counts() {
        for (q, classes) in [(2, 1), (3, 1), (4, 2), (5, 2)] {
            assert_eq!(classify_latin_squares(q).unwrap().registry.records.len(), classes, "q={q}");
        }
        assert!(matches!(classify_latin_squares(8), Err(Error::SeedRequired(8))));
    }

    #[test]
    fn derangement_types_of_seven() {
        let t = derangement_types(7);
        assert_eq!(t, vec![vec![2, 2, 3], vec![2, 5], vec![3, 4], vec![7]]);
        assert_eq!(cycle_type(&perm_of_type(&t[0])), t[0]);
    }
}

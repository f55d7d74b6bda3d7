//! Exact cover enumeration by bitset descent.
//!
//! The search always branches on the lowest uncovered element and tries the
//! sets containing it in index order, so each unordered cover is produced once
//! and the visit order depends only on the instance.

use std::ops::ControlFlow;

use super::bitset::BitSet;
use crate::error::{Error, Result};

/// Default refusal threshold on the number of sets.
pub const DEFAULT_SET_CAP: usize = 1 << 26;

#[derive(Clone, Debug)]
pub struct ExactCoverInstance {
    universe: usize,
    sets: Vec<Vec<u32>>,
    bits: Vec<BitSet>,
    /// element -> indices of the sets containing it, ascending
    containing: Vec<Vec<u32>>,
}

impl ExactCoverInstance {
    pub fn new(universe: usize, sets: Vec<Vec<u32>>) -> Result<Self> {
        Self::with_cap(universe, sets, DEFAULT_SET_CAP)
    }

    pub fn with_cap(universe: usize, mut sets: Vec<Vec<u32>>, cap: usize) -> Result<Self> {
        if sets.len() > cap {
            return Err(Error::Guardrail { what: "exact cover sets", count: sets.len() as u128, cap: cap as u128 });
        }
        let mut containing = vec![Vec::new(); universe];
        let mut bits = Vec::with_capacity(sets.len());
        for (si, s) in sets.iter_mut().enumerate() {
            s.sort_unstable();
            s.dedup();
            if let Some(&e) = s.iter().find(|&&e| e as usize >= universe) {
                return Err(Error::param(format!("set {si} contains {e}, outside universe of size {universe}")));
            }
            for &e in s.iter() {
                containing[e as usize].push(si as u32);
            }
            bits.push(BitSet::from_indices(universe, s.iter().map(|&e| e as usize)));
        }
        let mut sorted: Vec<&Vec<u32>> = sets.iter().collect();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::param("duplicate sets in exact cover instance"));
        }
        Ok(ExactCoverInstance { universe, sets, bits, containing })
    }

    /// Reads the fixture format: `u=<n>` followed by one set per line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let head = lines.next().unwrap_or("");
        let universe = head
            .strip_prefix("u=")
            .and_then(|u| u.parse().ok())
            .ok_or_else(|| Error::param(format!("expected `u=<n>`, found `{head}`")))?;
        let sets = lines
            .map(|l| {
                l.split_whitespace()
                    .map(|t| t.parse::<u32>().map_err(|_| Error::param(format!("bad element `{t}`"))))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(universe, sets)
    }

    pub fn universe_size(&self) -> usize {
        self.universe
    }

    pub fn sets(&self) -> &[Vec<u32>] {
        &self.sets
    }
}

struct Walk<'a, F> {
    inst: &'a ExactCoverInstance,
    visit: F,
    chosen: Vec<usize>,
    count: u64,
}

impl<F: FnMut(&[usize]) -> ControlFlow<()>> Walk<'_, F> {
    fn go(&mut self, covered: &mut BitSet) -> ControlFlow<()> {
        let Some(e) = covered.first_zero(self.inst.universe) else {
            self.count += 1;
            return (self.visit)(&self.chosen);
        };
        for &si in &self.inst.containing[e] {
            let s = &self.inst.bits[si as usize];
            if !s.is_disjoint(covered) {
                continue;
            }
            covered.union_with(s);
            self.chosen.push(si as usize);
            let flow = self.go(covered);
            self.chosen.pop();
            covered.difference_with(s);
            flow?;
        }
        ControlFlow::Continue(())
    }
}

/// Visits every exact cover once, as set indices in the order chosen. Returns
/// the number of covers visited (including the one that stopped the walk).
pub fn enumerate_exact_covers<F>(inst: &ExactCoverInstance, visit: F) -> u64
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    enumerate_exact_covers_with(inst, &[], visit)
}

/// Like [`enumerate_exact_covers`], restricted to covers containing every set
/// in `forced` (which must be pairwise disjoint; otherwise nothing is visited).
pub fn enumerate_exact_covers_with<F>(inst: &ExactCoverInstance, forced: &[usize], visit: F) -> u64
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    let mut covered = BitSet::new(inst.universe);
    for &f in forced {
        if !inst.bits[f].is_disjoint(&covered) {
            return 0;
        }
        covered.union_with(&inst.bits[f]);
    }
    let mut walk = Walk { inst, visit, chosen: forced.to_vec(), count: 0 };
    let _ = walk.go(&mut covered);
    walk.count
}

pub fn count_exact_covers(inst: &ExactCoverInstance) -> u64 {
    enumerate_exact_covers(inst, |_| ControlFlow::Continue(()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_example() {
        let inst = ExactCoverInstance::parse("u=3\n0\n1\n2\n0 1\n1 2\n0 1 2\n").unwrap();
        let mut seen = Vec::new();
        let n = enumerate_exact_covers(&inst, |c| {
            seen.push(c.to_vec());
            ControlFlow::Continue(())
        });
        assert_eq!(n, 4);
        assert_eq!(seen, vec![vec![0, 1, 2], vec![0, 4], vec![3, 2], vec![5]]);
    }

    #[test]
    fn edge_cases() {
        assert_eq!(count_exact_covers(&ExactCoverInstance::new(0, vec![]).unwrap()), 1);
        assert_eq!(count_exact_covers(&ExactCoverInstance::new(2, vec![]).unwrap()), 0);
        assert!(ExactCoverInstance::new(2, vec![vec![0, 2]]).is_err());
        assert!(ExactCoverInstance::new(2, vec![vec![0], vec![0]]).is_err());
        assert!(matches!(ExactCoverInstance::with_cap(2, vec![vec![0], vec![1]], 1), Err(Error::Guardrail { .. })));
    }

    #[test]
    fn stop_early() {
        let inst = ExactCoverInstance::new(2, vec![vec![0], vec![1], vec![0, 1]]).unwrap();
        assert_eq!(enumerate_exact_covers(&inst, |_| ControlFlow::Break(())), 1);
    }

    #[test]
    fn forced_sets() {
        let inst = ExactCoverInstance::new(3, vec![vec![0], vec![1], vec![2], vec![0, 1], vec![1, 2]]).unwrap();
        assert_eq!(enumerate_exact_covers_with(&inst, &[2], |_| ControlFlow::Continue(())), 2);
        assert_eq!(enumerate_exact_covers_with(&inst, &[3, 4], |_| ControlFlow::Continue(())), 0);
    }
}

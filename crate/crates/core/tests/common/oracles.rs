//! Independent reference computations shared by the oracle suites and the
//! acceptance run. Each check panics on the first disagreement.

use std::collections::{BTreeSet, HashMap};
use std::ops::ControlFlow;
use std::path::Path;

use mds_atlas::code::hamming;
use mds_atlas::pipeline::{
    consistency_check, find_partitions, initial_k2_partitions, PartitionLimits, PartitionSet, PartsDb, Registry,
};
use mds_atlas::search::{enumerate_exact_covers, enumerate_partite_cliques, ExactCoverInstance, MultipartiteGraph};
use mds_atlas::Code;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every subcode of `c` with `q^(k-1)` words and minimum distance `n-k+2`.
/// Such a subcode has each `(k-1)`-prefix exactly once, so one word is
/// chosen per prefix.
pub fn mds_subcodes(c: &Code, k: usize) -> Vec<Vec<u32>> {
    let (q, n) = (c.q(), c.n());
    let need = n - k + 2;
    let mut groups: HashMap<&[u8], Vec<u32>> = HashMap::new();
    for (i, w) in c.words().enumerate() {
        groups.entry(&w[..k - 1]).or_default().push(i as u32);
    }
    let mut keys: Vec<&[u8]> = groups.keys().copied().collect();
    keys.sort();
    assert_eq!(keys.len(), q.pow(k as u32 - 1));
    let groups: Vec<Vec<u32>> = keys.iter().map(|k| groups[k].clone()).collect();
    let mut out = Vec::new();
    fn go(c: &Code, groups: &[Vec<u32>], need: usize, chosen: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if chosen.len() == groups.len() {
            let mut s = chosen.clone();
            s.sort_unstable();
            out.push(s);
            return;
        }
        for &w in &groups[chosen.len()] {
            if chosen.iter().all(|&u| hamming(c.word(u as usize), c.word(w as usize)) >= need) {
                chosen.push(w);
                go(c, groups, need, chosen, out);
                chosen.pop();
            }
        }
    }
    go(c, &groups, need, &mut Vec::new(), &mut out);
    out
}

/// Every partition of `c` into `q` of the given subcodes.
pub fn partitions_of(c: &Code, subs: &[Vec<u32>]) -> BTreeSet<Vec<Vec<u32>>> {
    let mut containing: Vec<Vec<usize>> = vec![Vec::new(); c.len()];
    for (i, s) in subs.iter().enumerate() {
        for &w in s {
            containing[w as usize].push(i);
        }
    }
    let mut out = BTreeSet::new();
    fn go(
        subs: &[Vec<u32>],
        containing: &[Vec<usize>],
        used: &mut Vec<bool>,
        chosen: &mut Vec<usize>,
        out: &mut BTreeSet<Vec<Vec<u32>>>,
    ) {
        let Some(first) = used.iter().position(|&u| !u) else {
            let mut p: Vec<Vec<u32>> = chosen.iter().map(|&i| subs[i].clone()).collect();
            p.sort();
            out.insert(p);
            return;
        };
        for &si in &containing[first] {
            if subs[si].iter().any(|&w| used[w as usize]) {
                continue;
            }
            for &w in &subs[si] {
                used[w as usize] = true;
            }
            chosen.push(si);
            go(subs, containing, used, chosen, out);
            chosen.pop();
            for &w in &subs[si] {
                used[w as usize] = false;
            }
        }
    }
    go(subs, &containing, &mut vec![false; c.len()], &mut Vec::new(), &mut out);
    out
}

/// Compares stored and fresh partition sets of every representative with
/// `n ≤ 5` against the subcode oracle. Returns the number of classes checked.
pub fn check_partitions(root: &Path, q: usize) -> usize {
    let mut checked = 0;
    for reg in super::all_registries(root, q) {
        // the full space 𝒜⁴ over four symbols has 1.5 million partitions;
        // its step is covered by the double count instead
        if reg.n > 5 || (reg.n == reg.k && reg.n > 3) || !reg.is_extended() {
            continue;
        }
        let lower = if reg.k > 2 { Registry::load(root, q, reg.n - 1, reg.k - 1).unwrap() } else { None };
        let db = lower.as_ref().map(|l| PartsDb::from_registry(l).unwrap());
        for rec in &reg.records {
            let subs = mds_subcodes(&rec.rep, reg.k);
            let want = partitions_of(&rec.rep, &subs);
            let stored = rec.partitions.as_ref().unwrap();
            let fresh = find_partitions(&rec.rep, db.as_ref(), &PartitionLimits::default()).unwrap();
            for set in [stored, &fresh] {
                assert_eq!(set.count, want.len().into(), "{} class {}", reg.label(), rec.id);
                assert!(set.complete);
                let got: BTreeSet<Vec<Vec<u32>>> = set.partitions.iter().cloned().collect();
                assert_eq!(got, want, "{} class {}", reg.label(), rec.id);
            }
            let pool: BTreeSet<Vec<u32>> = want.iter().flatten().cloned().collect();
            assert_eq!(stored.pool, pool.into_iter().collect::<Vec<_>>());
            checked += 1;
        }
    }
    checked
}

/// Every subfamily checked directly.
pub fn brute_covers(universe: usize, sets: &[Vec<u32>]) -> BTreeSet<BTreeSet<usize>> {
    let mut out = BTreeSet::new();
    for mask in 0u32..1 << sets.len() {
        let mut hit = vec![0; universe];
        for (i, s) in sets.iter().enumerate() {
            if mask >> i & 1 == 1 {
                for &e in s {
                    hit[e as usize] += 1;
                }
            }
        }
        if hit.iter().all(|&h| h == 1) {
            out.insert((0..sets.len()).filter(|i| mask >> i & 1 == 1).collect());
        }
    }
    out
}

/// Random exact-cover instances against brute force. Returns how many had
/// at least one cover.
pub fn random_exact_covers(seed: u64, trials: usize) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nonempty = 0;
    for _ in 0..trials {
        let universe = rng.gen_range(1..=8);
        let want = rng.gen_range(1..=14);
        let mut seen = BTreeSet::new();
        for _ in 0..want {
            let s: BTreeSet<u32> = (0..universe as u32).filter(|_| rng.gen_bool(0.3)).collect();
            if !s.is_empty() {
                seen.insert(s.into_iter().collect::<Vec<u32>>());
            }
        }
        let sets: Vec<Vec<u32>> = seen.into_iter().collect();
        let inst = ExactCoverInstance::new(universe, sets.clone()).unwrap();
        let mut got = BTreeSet::new();
        let count = enumerate_exact_covers(&inst, |c| {
            assert!(got.insert(c.iter().copied().collect::<BTreeSet<_>>()), "cover visited twice");
            ControlFlow::Continue(())
        });
        let want = brute_covers(universe, &sets);
        assert_eq!(got, want, "universe {universe}, sets {sets:?}");
        assert_eq!(count as usize, want.len());
        nonempty += usize::from(!want.is_empty());
    }
    nonempty
}

/// Random multipartite graphs against brute force over all transversals.
/// Returns how many had at least one clique.
pub fn random_partite_cliques(seed: u64, trials: usize) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nonempty = 0;
    for _ in 0..trials {
        let parts = rng.gen_range(1..=4);
        let sizes: Vec<usize> = (0..parts).map(|_| rng.gen_range(0..=4)).collect();
        let density = rng.gen_range(0.3..0.9);
        let g = MultipartiteGraph::from_fn(&sizes, |_, _| rng.gen_bool(density)).unwrap();
        let mut got = BTreeSet::new();
        enumerate_partite_cliques(&g, |t| {
            assert!(got.insert(t.to_vec()), "clique visited twice");
            ControlFlow::Continue(())
        });
        let mut want = BTreeSet::new();
        let total: usize = sizes.iter().product();
        for mut code in 0..total {
            let mut t = Vec::with_capacity(parts);
            for &s in &sizes {
                t.push(code % s);
                code /= s;
            }
            let ok = (0..parts).all(|a| (a + 1..parts).all(|b| g.has_edge((a, t[a]), (b, t[b]))));
            if ok {
                want.insert(t);
            }
        }
        assert_eq!(got, want, "sizes {sizes:?}");
        nonempty += usize::from(!want.is_empty());
    }
    nonempty
}

/// `initial_k2_partitions` against a direct partition search for every
/// consecutive pair of `k = 2` registries. Returns the pairs compared.
pub fn check_initial_k2(root: &Path, q: usize) -> usize {
    let mut pairs = 0;
    for n in 2..=q + 1 {
        let (Some(lower), Some(upper)) =
            (Registry::load(root, q, n, 2).unwrap(), Registry::load(root, q, n + 1, 2).unwrap())
        else {
            continue;
        };
        let sets = initial_k2_partitions(&upper, &lower, 1 << 20).unwrap();
        assert_eq!(sets.len(), lower.records.len());
        for (rec, set) in lower.records.iter().zip(&sets) {
            let direct = find_partitions(&rec.rep, None, &PartitionLimits::default()).unwrap();
            assert!(direct.complete);
            let a: BTreeSet<_> = set.partitions.iter().collect();
            let b: BTreeSet<_> = direct.partitions.iter().collect();
            assert_eq!(a, b, "({n},2)_{q} class {}", rec.id);
            assert_eq!(set.count, direct.count);
        }
        pairs += 1;
    }
    pairs
}

/// The double count of the `(n,k) -> (n+1,k)` step must reject a doubled
/// automorphism order, a dropped partition and a missing new class.
pub fn check_perturbations(old: &Registry, new: &Registry) {
    assert!(consistency_check(old, new).unwrap().pass());
    old.verify().unwrap();

    // an automorphism order off by a factor, on a class with partitions
    let mut bad = old.clone();
    bad.records.iter_mut().find(|r| r.extendable() == Some(true)).unwrap().aut_order *= 2u32;
    assert!(consistency_check(&bad, new).map_or(true, |r| !r.pass()));
    assert!(bad.verify().is_err());

    // one partition dropped from a class that has some
    let mut bad = old.clone();
    let rec = bad.records.iter_mut().find(|r| r.extendable() == Some(true)).unwrap();
    let mut list = rec.partitions.clone().unwrap().partitions;
    list.pop();
    rec.partitions = Some(PartitionSet::from_list(list));
    assert!(!consistency_check(&bad, new).unwrap().pass());

    // one class missing on the new side
    let mut bad = new.clone();
    bad.records.pop();
    assert!(!consistency_check(old, &bad).unwrap().pass());
}

//! Partitions of an `(n,k)_q` MDS code into `(n,k-1)_q` MDS subcodes.
//!
//! Candidate subcodes come from the partitions already known for the
//! shortened codes `C_j` (phase 1), glued along the last coordinate by a
//! clique search (phase 2); partitions are exact covers of `C` by candidates
//! (phase 3). Counting and orbit representatives are computed under `Aut(C)`
//! so that codes with astronomically many partitions stay tractable.

use std::collections::{BTreeSet, HashMap};
use std::ops::ControlFlow;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::code::{for_each_subset, Code, LabeledPartition};
use crate::error::{Error, Result};
use crate::search::{enumerate_exact_covers, enumerate_exact_covers_with, enumerate_partite_cliques};
use crate::search::{ExactCoverInstance, MultipartiteGraph};
use crate::symmetry::{automorphism_group, canonical_form, isometry_coset, Cert, Isometry};

use super::registry::Registry;

/// Unordered partitions of one representative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionSet {
    /// Number of unordered partitions `N(C)`.
    pub count: BigUint,
    /// Every partition when `complete`, otherwise one per `Aut(C)`-orbit. Each
    /// partition is a sorted list of sorted word-index lists.
    pub partitions: Vec<Vec<Vec<u32>>>,
    pub complete: bool,
    /// Every part that occurs in some partition, sorted. Invariant under `Aut(C)`.
    pub pool: Vec<Vec<u32>>,
    /// One partition per `Aut(C)`-orbit; empty when loaded from disk.
    pub orbit_reps: Vec<Vec<Vec<u32>>>,
}

impl PartitionSet {
    pub fn empty() -> Self {
        PartitionSet {
            count: BigUint::zero(),
            partitions: Vec::new(),
            complete: true,
            pool: Vec::new(),
            orbit_reps: Vec::new(),
        }
    }

    /// Builds a complete set from an explicit list (parts are normalized).
    pub fn from_list(list: impl IntoIterator<Item = Vec<Vec<u32>>>) -> Self {
        let set: BTreeSet<Vec<Vec<u32>>> = list.into_iter().map(normalize).collect();
        let partitions: Vec<_> = set.into_iter().collect();
        let pool: BTreeSet<Vec<u32>> = partitions.iter().flatten().cloned().collect();
        PartitionSet {
            count: BigUint::from(partitions.len()),
            orbit_reps: Vec::new(),
            complete: true,
            pool: pool.into_iter().collect(),
            partitions,
        }
    }
}

fn normalize(mut p: Vec<Vec<u32>>) -> Vec<Vec<u32>> {
    for part in &mut p {
        part.sort_unstable();
    }
    p.sort();
    p
}

/// Refusal thresholds for one partition search.
#[derive(Clone, Debug)]
pub struct PartitionLimits {
    /// Partitions are listed in full up to this count; beyond it only orbit
    /// representatives are kept.
    pub store_cap: u64,
    /// Bound on the covers visited while counting one candidate orbit.
    pub cover_cap: u64,
    /// Bound on the number of candidate subcodes.
    pub candidate_cap: usize,
}

impl Default for PartitionLimits {
    fn default() -> Self {
        PartitionLimits { store_cap: 200_000, cover_cap: 1 << 24, candidate_cap: crate::search::DEFAULT_SET_CAP }
    }
}

/// Known part pools of the classes one level down, keyed by certificate.
pub struct PartsDb<'a> {
    entries: HashMap<Cert, (&'a Code, &'a [Vec<u32>])>,
    params: (usize, usize, usize),
}

impl<'a> PartsDb<'a> {
    pub fn from_registry(reg: &'a Registry) -> Result<Self> {
        let mut entries = HashMap::new();
        for rec in &reg.records {
            let set = rec.partitions.as_ref().ok_or_else(|| {
                Error::Dependency(format!(
                    "partitions of class {} of ({},{})_{} are not known; run that step first",
                    rec.id, reg.n, reg.k, reg.q
                ))
            })?;
            entries.insert(rec.cert, (&rec.rep, set.pool.as_slice()));
        }
        Ok(PartsDb { entries, params: (reg.q, reg.n, reg.k) })
    }
}

/// All partitions of `c` (MDS, dimension `k ≥ 2`) into MDS subcodes of
/// dimension `k-1`. For `k ≥ 3` the pools of the `(n-1,k-1)_q` classes are
/// required; for `k = 2` the parts of each `C_j` are its single words.
pub fn find_partitions(c: &Code, db: Option<&PartsDb>, limits: &PartitionLimits) -> Result<PartitionSet> {
    let profile = c.is_mds();
    if !profile.is_mds || profile.k < 2 {
        return Err(Error::param(format!(
            "partitions need an MDS code of dimension at least 2 (got k={}, mds={})",
            profile.k, profile.is_mds
        )));
    }
    let layers = layer_parts(c, profile.k, db)?;
    let cands = glue_layers(c, profile.k, &layers, limits)?;
    let (gens, _) = automorphism_group(c, None);
    partitions_from_candidates(c, &cands, &gens, limits)
}

/// Phase 1: for each `j`, every part occurring in a partition of `C_j`, as
/// word indices of `c`.
///
/// A single isometry per `j` is enough: the pool of a representative is a
/// union of `Aut`-orbits, so every isometry onto `C_j` maps it to the same set.
fn layer_parts(c: &Code, k: usize, db: Option<&PartsDb>) -> Result<Vec<Vec<Vec<u32>>>> {
    let (q, n) = (c.q(), c.n());
    (0..q)
        .map(|j| {
            let (cj, kept) = c.shorten_unchecked(n - 1, j as u8);
            if k == 2 {
                return Ok(kept.iter().map(|&w| vec![w]).collect());
            }
            let db = db.ok_or_else(|| {
                Error::Dependency(format!("partitions of the ({},{})_{q} classes are required", n - 1, k - 1))
            })?;
            if db.params != (q, n - 1, k - 1) {
                return Err(Error::Dependency(format!(
                    "part pools are for ({},{})_{}, need ({},{})_{q}",
                    db.params.1,
                    db.params.2,
                    db.params.0,
                    n - 1,
                    k - 1
                )));
            }
            let form = canonical_form(&cj);
            let (rep, pool) = db.entries.get(&form.cert).filter(|(rep, _)| **rep == form.canon).ok_or_else(|| {
                Error::Incomplete(format!(
                    "a shortened code of length {} matches no class of the ({},{})_{q} registry",
                    n - 1,
                    n - 1,
                    k - 1
                ))
            })?;
            let map = form.to_canon.inverse().word_map(rep, &cj);
            let mut parts: Vec<Vec<u32>> = pool
                .iter()
                .map(|p| {
                    let mut v: Vec<u32> = p.iter().map(|&w| kept[map[w as usize] as usize]).collect();
                    v.sort_unstable();
                    v
                })
                .collect();
            parts.sort();
            Ok(parts)
        })
        .collect()
}

/// Phase 2: candidate subcodes `⋃_j D_j‖j` from transversal cliques.
///
/// Two parts of dimension `k-2` and length `n-1` are at distance `≥ n-k+1`
/// iff they agree on no `k-1` coordinates. Each part is a function from any
/// `k-2` coordinates `T` to another coordinate `x`, so the test compares the
/// tables of these functions entrywise over all `(T, x)`.
fn glue_layers(c: &Code, k: usize, layers: &[Vec<Vec<u32>>], limits: &PartitionLimits) -> Result<Vec<Vec<u32>>> {
    let (q, n) = (c.q(), c.n());
    let kk = k - 2;
    let width = q.pow(kk as u32);
    let mut subsets: Vec<Vec<usize>> = Vec::new();
    for_each_subset(n - 1, kk + 1, |s| subsets.push(s.to_vec()));
    let tables: Vec<Vec<Vec<u8>>> = layers
        .iter()
        .map(|parts| {
            parts
                .iter()
                .map(|part| {
                    let mut t = vec![0u8; subsets.len() * width];
                    for &w in part {
                        let word = c.word(w as usize);
                        for (si, s) in subsets.iter().enumerate() {
                            let idx = s[..kk].iter().rev().fold(0, |acc, &p| acc * q + word[p] as usize);
                            t[si * width + idx] = word[s[kk]];
                        }
                    }
                    t
                })
                .collect()
        })
        .collect();
    let sizes: Vec<usize> = layers.iter().map(Vec::len).collect();
    let graph = MultipartiteGraph::from_fn(&sizes, |(pa, ia), (pb, ib)| {
        tables[pa][ia].iter().zip(&tables[pb][ib]).all(|(x, y)| x != y)
    })?;
    let mut cands = Vec::new();
    let mut overflow = false;
    enumerate_partite_cliques(&graph, |tuple| {
        if cands.len() == limits.candidate_cap {
            overflow = true;
            return ControlFlow::Break(());
        }
        let mut d: Vec<u32> = tuple.iter().enumerate().flat_map(|(j, &i)| layers[j][i].iter().copied()).collect();
        d.sort_unstable();
        cands.push(d);
        ControlFlow::Continue(())
    });
    if overflow {
        return Err(Error::Guardrail {
            what: "candidate subcodes",
            count: limits.candidate_cap as u128 + 1,
            cap: limits.candidate_cap as u128,
        });
    }
    cands.sort();
    debug_assert!(cands.iter().all(|d| c.subcode(d).is_mds().k == k - 1));
    Ok(cands)
}

fn sorted_image(perm: &[u32], p: &[u32]) -> Vec<u32> {
    let mut v: Vec<u32> = p.iter().map(|&x| perm[x as usize]).collect();
    v.sort_unstable();
    v
}

/// Action of isometries on a candidate family, as permutations of its indices.
/// `None` entries mark candidates whose image left the family.
fn candidate_action(c: &Code, cands: &[Vec<u32>], index: &HashMap<&[u32], u32>, g: &Isometry) -> Vec<Option<u32>> {
    let wperm = g.word_map(c, c);
    cands.iter().map(|d| index.get(sorted_image(&wperm, d).as_slice()).copied()).collect()
}

struct UnionFind(Vec<u32>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n as u32).collect())
    }

    fn find(&mut self, x: u32) -> u32 {
        let mut r = x;
        while self.0[r as usize] != r {
            r = self.0[r as usize];
        }
        let mut x = x;
        while self.0[x as usize] != r {
            let next = self.0[x as usize];
            self.0[x as usize] = r;
            x = next;
        }
        r
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // keep the smaller index as root so roots are deterministic
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi as usize] = lo;
        }
    }
}

/// Phase 3 with orbit counting.
///
/// Candidates are first reduced to their largest `Aut(C)`-invariant subset
/// (a candidate whose image is missing cannot occur in any partition). For
/// each candidate orbit `o` with representative `D0`, the covers containing
/// `D0` whose other parts lie in orbits `≥ o` form a set `X_o` on which two
/// covers lie in the same `Aut(C)`-orbit iff they are related by `Stab(D0)` or
/// by re-rooting at another part of orbit `o`. A partition orbit meeting `X_o`
/// in `K` covers, with `m` parts in orbit `o`, has `|o|·|K|/m` elements.
fn partitions_from_candidates(
    c: &Code,
    cands: &[Vec<u32>],
    gens: &[Isometry],
    limits: &PartitionLimits,
) -> Result<PartitionSet> {
    let q = c.q();
    let index: HashMap<&[u32], u32> = cands.iter().enumerate().map(|(i, d)| (d.as_slice(), i as u32)).collect();
    let actions: Vec<Vec<Option<u32>>> = gens.iter().map(|g| candidate_action(c, cands, &index, g)).collect();
    let mut alive = vec![true; cands.len()];
    loop {
        let mut changed = false;
        for i in 0..cands.len() {
            if alive[i] && actions.iter().any(|a| a[i].is_none_or(|j| !alive[j as usize])) {
                alive[i] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let core: Vec<usize> = (0..cands.len()).filter(|&i| alive[i]).collect();
    let mut local = vec![u32::MAX; cands.len()];
    for (ci, &i) in core.iter().enumerate() {
        local[i] = ci as u32;
    }
    let perms: Vec<Vec<u32>> =
        actions.iter().map(|a| core.iter().map(|&i| local[a[i].unwrap() as usize]).collect()).collect();
    let inverses: Vec<Vec<u32>> = perms
        .iter()
        .map(|p| {
            let mut inv = vec![0u32; p.len()];
            for (i, &j) in p.iter().enumerate() {
                inv[j as usize] = i as u32;
            }
            inv
        })
        .collect();

    // candidate orbits, numbered by smallest member; Schreier tree per orbit
    let mut orbit_of = vec![u32::MAX; core.len()];
    let mut parent: Vec<(u32, u32)> = vec![(u32::MAX, 0); core.len()];
    let mut orbits: Vec<Vec<u32>> = Vec::new();
    for start in 0..core.len() {
        if orbit_of[start] != u32::MAX {
            continue;
        }
        let o = orbits.len() as u32;
        orbit_of[start] = o;
        let mut members = vec![start as u32];
        let mut head = 0;
        while head < members.len() {
            let x = members[head];
            head += 1;
            for (gi, p) in perms.iter().enumerate() {
                let y = p[x as usize];
                if orbit_of[y as usize] == u32::MAX {
                    orbit_of[y as usize] = o;
                    parent[y as usize] = (x, gi as u32);
                    members.push(y);
                }
            }
        }
        orbits.push(members);
    }

    let words_of = |ci: u32| cands[core[ci as usize]].clone();
    let mut count = BigUint::zero();
    let mut reps: Vec<Vec<Vec<u32>>> = Vec::new();
    let mut used_orbits = vec![false; orbits.len()];
    for (o, members) in orbits.iter().enumerate() {
        let d0 = members[0];
        let allowed: Vec<u32> = (0..core.len() as u32).filter(|&ci| orbit_of[ci as usize] as usize >= o).collect();
        let inst = ExactCoverInstance::with_cap(
            c.len(),
            allowed.iter().map(|&ci| words_of(ci)).collect(),
            limits.candidate_cap,
        )?;
        let forced = allowed.binary_search(&d0).unwrap();
        let mut covers: Vec<Vec<u32>> = Vec::new();
        let mut overflow = false;
        enumerate_exact_covers_with(&inst, &[forced], |chosen| {
            if covers.len() as u64 == limits.cover_cap {
                overflow = true;
                return ControlFlow::Break(());
            }
            let mut cover: Vec<u32> = chosen.iter().map(|&s| allowed[s]).collect();
            cover.sort_unstable();
            covers.push(cover);
            ControlFlow::Continue(())
        });
        if overflow {
            return Err(Error::Guardrail {
                what: "covers through one candidate",
                count: limits.cover_cap as u128 + 1,
                cap: limits.cover_cap as u128,
            });
        }
        if covers.is_empty() {
            continue;
        }
        covers.sort();
        let cover_index: HashMap<&[u32], u32> =
            covers.iter().enumerate().map(|(i, p)| (p.as_slice(), i as u32)).collect();

        let mut marks = vec![false; c.len()];
        for &w in &cands[core[d0 as usize]] {
            marks[w as usize] = true;
        }
        let (stab, _) = automorphism_group(c, Some(&marks));
        let stab_perms: Vec<Vec<u32>> = stab
            .iter()
            .map(|g| {
                candidate_action(c, cands, &index, g)
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| alive[i])
                    .map(|(_, img)| local[img.expect("stabilizer element leaves the candidate family") as usize])
                    .collect()
            })
            .collect();

        let mut uf = UnionFind::new(covers.len());
        let lookup = |p: &[u32]| -> Result<u32> {
            cover_index.get(p).copied().ok_or_else(|| Error::Verify("partition image outside its orbit slice".into()))
        };
        for (pi, p) in covers.iter().enumerate() {
            for s in &stab_perms {
                uf.union(pi as u32, lookup(&sorted_image(s, p))?);
            }
            for &d in p {
                if d == d0 || orbit_of[d as usize] as usize != o {
                    continue;
                }
                let mut cur = p.clone();
                let mut x = d;
                while x != d0 {
                    let (par, gi) = parent[x as usize];
                    cur = sorted_image(&inverses[gi as usize], &cur);
                    x = par;
                }
                uf.union(pi as u32, lookup(&cur)?);
            }
        }
        let mut class_size: HashMap<u32, u64> = HashMap::new();
        for pi in 0..covers.len() as u32 {
            *class_size.entry(uf.find(pi)).or_default() += 1;
        }
        let mut roots: Vec<(u32, u64)> = class_size.into_iter().collect();
        roots.sort_unstable();
        for (root, size) in roots {
            let rep = &covers[root as usize];
            let m = rep.iter().filter(|&&d| orbit_of[d as usize] as usize == o).count() as u64;
            let total = BigUint::from(members.len()) * size;
            if !(&total % m).is_zero() {
                return Err(Error::Verify(format!("partition orbit size {total}/{m} is not integral")));
            }
            count += total / m;
            reps.push(normalize(rep.iter().map(|&d| words_of(d)).collect()));
        }
        for p in &covers {
            for &d in p {
                used_orbits[orbit_of[d as usize] as usize] = true;
            }
        }
    }
    debug_assert!(reps.iter().all(|p| p.len() == q));

    let mut pool: Vec<Vec<u32>> = orbits
        .iter()
        .enumerate()
        .filter(|&(o, _)| used_orbits[o])
        .flat_map(|(_, m)| m.iter().map(|&ci| words_of(ci)))
        .collect();
    pool.sort();
    reps.sort();

    let complete = count.to_u64().is_some_and(|c| c <= limits.store_cap);
    let partitions = if complete {
        let inst = ExactCoverInstance::with_cap(
            c.len(),
            core.iter().map(|&i| cands[i].clone()).collect(),
            limits.candidate_cap,
        )?;
        let mut all: Vec<Vec<Vec<u32>>> = Vec::new();
        enumerate_exact_covers(&inst, |chosen| {
            all.push(normalize(chosen.iter().map(|&s| cands[core[s]].clone()).collect()));
            ControlFlow::Continue(())
        });
        if BigUint::from(all.len()) != count {
            return Err(Error::Verify(format!(
                "orbit counting gives {count} partitions but {} were enumerated",
                all.len()
            )));
        }
        all.sort();
        all
    } else {
        reps.clone()
    };
    Ok(PartitionSet { count, partitions, complete, pool, orbit_reps: reps })
}

/// Partitions of the `(n,2)_q` classes induced by the `(n+1,2)_q` classes.
///
/// Each representative `Ĉ` of length `n+1` and each coordinate `i` give a
/// punctured code `C'` with the partition induced by coordinate `i`. All
/// isometries taking `C'` to its class representative carry that partition to
/// a partition of the representative; unlike the single isometry used for the
/// pools, every coset element is needed here because a single partition is
/// not invariant under automorphisms. Returns one complete set per record of
/// `lower`, in record order.
pub fn initial_k2_partitions(upper: &Registry, lower: &Registry, coset_cap: u64) -> Result<Vec<PartitionSet>> {
    if upper.k != 2 || lower.k != 2 || upper.n != lower.n + 1 || upper.q != lower.q {
        return Err(Error::param("initial partitions need registries (n+1,2) and (n,2) of one alphabet"));
    }
    let by_cert: HashMap<Cert, usize> = lower.records.iter().enumerate().map(|(i, r)| (r.cert, i)).collect();
    let mut found: Vec<BTreeSet<Vec<Vec<u32>>>> = vec![BTreeSet::new(); lower.records.len()];
    let n1 = upper.n;
    for rec in &upper.records {
        for pos in 0..n1 {
            // move coordinate `pos` to the end, then read off the induced partition
            let mut coord: Vec<u8> = (0..n1 as u8).collect();
            coord.remove(pos);
            coord.push(pos as u8);
            let inv: Vec<u8> = {
                let mut v = vec![0u8; n1];
                for (i, &c) in coord.iter().enumerate() {
                    v[c as usize] = i as u8;
                }
                v
            };
            let g = Isometry::new(inv, (0..n1).map(|_| (0..upper.q as u8).collect()).collect())?;
            let moved = g.apply(&rec.rep)?;
            let (punct, part) = LabeledPartition::induced_by_extension(&moved);
            let form = canonical_form(&punct);
            let target = *by_cert.get(&form.cert).ok_or_else(|| {
                Error::Incomplete(format!("a puncture of ({},2)_{} class {} matches no class", n1, upper.q, rec.id))
            })?;
            let rep = &lower.records[target].rep;
            for h in isometry_coset(&punct, rep)?.elements(coset_cap)? {
                let map = h.word_map(&punct, rep);
                let image: Vec<Vec<u32>> = part.parts.iter().map(|p| sorted_image(&map, p)).collect();
                found[target].insert(normalize(image));
            }
        }
    }
    Ok(found.into_iter().map(PartitionSet::from_list).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cayley(q: usize, op: impl Fn(usize, usize) -> usize) -> Code {
        let words: Vec<[u8; 3]> =
            (0..q).flat_map(|x| (0..q).map(move |y| (x, y))).map(|(x, y)| [x as u8, y as u8, op(x, y) as u8]).collect();
        Code::new(q, 3, words).unwrap()
    }

    #[test]
    fn full_square_q3_has_two_partitions() {
        let c = Code::full_space(3, 2).unwrap();
        let set = find_partitions(&c, None, &PartitionLimits::default()).unwrap();
        assert_eq!(set.count, BigUint::from(2u32));
        assert!(set.complete);
        assert_eq!(set.partitions.len(), 2);
        assert_eq!(set.orbit_reps.len(), 1);
        assert_eq!(set.pool.len(), 6);
    }

    #[test]
    fn cyclic_square_of_order_four_has_no_transversal() {
        let c = cayley(4, |x, y| (x + y) % 4);
        let set = find_partitions(&c, None, &PartitionLimits::default()).unwrap();
        assert!(set.count.is_zero());
        assert!(set.pool.is_empty());
    }

    #[test]
    fn orbit_count_matches_listing_for_klein_square() {
        let c = cayley(4, |x, y| x ^ y);
        let limits = PartitionLimits { store_cap: 0, ..Default::default() };
        let reps = find_partitions(&c, None, &limits).unwrap();
        let full = find_partitions(&c, None, &PartitionLimits::default()).unwrap();
        assert!(!reps.complete && full.complete);
        assert_eq!(reps.count, full.count);
        assert_eq!(reps.pool, full.pool);
        for p in &full.partitions {
            LabeledPartition::new(p.clone()).validate(&c).unwrap();
        }
    }

    #[test]
    fn k3_needs_part_pools() {
        let c = Code::full_space(3, 3).unwrap();
        assert!(matches!(find_partitions(&c, None, &PartitionLimits::default()), Err(Error::Dependency(_))));
    }
}

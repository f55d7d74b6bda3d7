use std::collections::{BTreeMap, BTreeSet};

use mds_atlas::symmetry::{canonical_form, find_isomorphism, group_elements, group_order, isometry_between, Isometry};
use mds_atlas::Code;
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn permutations(m: usize) -> Vec<Vec<u8>> {
    if m == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(m - 1) {
        for pos in 0..m {
            let mut v = p.clone();
            v.insert(pos, (m - 1) as u8);
            out.push(v);
        }
    }
    out
}

/// Every element of `G_n`.
fn whole_group(n: usize, q: usize) -> Vec<Isometry> {
    let coords = permutations(n);
    let syms = permutations(q);
    let mut out = Vec::new();
    for cp in &coords {
        let mut idx = vec![0usize; n];
        loop {
            out.push(Isometry::new(cp.clone(), idx.iter().map(|&i| syms[i].clone()).collect()).unwrap());
            let mut j = 0;
            while j < n && idx[j] + 1 == syms.len() {
                idx[j] = 0;
                j += 1;
            }
            if j == n {
                break;
            }
            idx[j] += 1;
        }
    }
    out
}

fn random_code(rng: &mut impl Rng, q: usize, n: usize) -> Code {
    let total = q.pow(n as u32);
    let words: Vec<Vec<u8>> = (0..total)
        .filter(|_| rng.gen_bool(0.4))
        .map(|mut x| {
            (0..n)
                .map(|_| {
                    let s = (x % q) as u8;
                    x /= q;
                    s
                })
                .collect()
        })
        .collect();
    if words.is_empty() {
        return Code::new(q, n, [vec![0u8; n]]).unwrap();
    }
    Code::new(q, n, words).unwrap()
}

#[test]
fn orbit_stabilizer_by_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (q, n, trials) in [(2, 2, 6), (2, 3, 8), (2, 4, 8), (3, 2, 8), (3, 3, 8), (3, 4, 3)] {
        let group = whole_group(n, q);
        assert_eq!(BigUint::from(group.len()), group_order(n, q));
        for _ in 0..trials {
            let c = random_code(&mut rng, q, n);
            let f = canonical_form(&c);
            let mut orbit = BTreeSet::new();
            let mut stab = 0usize;
            for g in &group {
                let img = g.apply(&c).unwrap();
                if img == c {
                    stab += 1;
                }
                orbit.insert(img.into_flat());
            }
            assert_eq!(f.aut_order, BigUint::from(stab), "q={q} n={n} M={}", c.len());
            assert_eq!(orbit.len() * stab, group.len());
            for g in &f.aut_gens {
                assert_eq!(g.apply(&c).unwrap(), c);
            }
            if stab <= 5000 {
                assert_eq!(group_elements(&f.aut_gens, n, q).len(), stab);
            }
            for _ in 0..5 {
                let g = &group[rng.gen_range(0..group.len())];
                assert_eq!(canonical_form(&g.apply(&c).unwrap()).cert, f.cert);
            }
        }
    }
}

fn latin_squares(q: usize) -> Vec<Code> {
    let mut out = Vec::new();
    let mut sq = vec![0u8; q * q];
    fn go(q: usize, cell: usize, sq: &mut Vec<u8>, out: &mut Vec<Code>) {
        if cell == q * q {
            let words: Vec<[u8; 3]> = (0..q * q).map(|i| [(i / q) as u8, (i % q) as u8, sq[i]]).collect();
            out.push(Code::new(q, 3, words).unwrap());
            return;
        }
        let (r, c) = (cell / q, cell % q);
        for s in 0..q as u8 {
            if (0..c).any(|x| sq[r * q + x] == s) || (0..r).any(|y| sq[y * q + c] == s) {
                continue;
            }
            sq[cell] = s;
            go(q, cell + 1, sq, out);
        }
    }
    go(q, 0, &mut sq, &mut out);
    out
}

#[test]
fn latin_square_classes_partition_all_labeled_squares() {
    for (q, labeled, classes) in [(3, 12usize, 1usize), (4, 576, 2)] {
        let all = latin_squares(q);
        assert_eq!(all.len(), labeled);
        let mut by_cert: BTreeMap<[u8; 32], (usize, BigUint)> = BTreeMap::new();
        for c in &all {
            let f = canonical_form(c);
            by_cert.entry(f.cert).or_insert((0, f.aut_order)).0 += 1;
        }
        assert_eq!(by_cert.len(), classes);
        for (count, aut) in by_cert.values() {
            assert_eq!(BigUint::from(*count) * aut, group_order(3, q));
        }
    }
}

#[test]
fn isomorphisms_map_codes_onto_each_other() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..40 {
        let (q, n) = [(2, 4), (3, 3), (4, 3), (5, 2)][rng.gen_range(0..4)];
        let c = random_code(&mut rng, q, n);
        let g = Isometry::random(n, q, &mut rng);
        let d = g.apply(&c).unwrap();
        let (fc, fd) = (canonical_form(&c), canonical_form(&d));
        assert_eq!(fc.canon, fd.canon);
        let h = isometry_between(&fc, &fd).unwrap();
        assert_eq!(h.apply(&c).unwrap(), d);
        let h = find_isomorphism(&c, &d).unwrap().unwrap();
        assert_eq!(h.apply(&c).unwrap(), d);
    }
}

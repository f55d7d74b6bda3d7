use mds_atlas::format::{parse_code, write_code};
use mds_atlas::symmetry::{canonical_form, find_isomorphism, Isometry};
use mds_atlas::Code;
use num_bigint::BigUint;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn code_from_indices(q: usize, n: usize, idx: impl IntoIterator<Item = usize>) -> Code {
    let words: Vec<Vec<u8>> = idx
        .into_iter()
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
    Code::new(q, n, words).unwrap()
}

fn code_strategy() -> impl Strategy<Value = Code> {
    (2usize..=4, 1usize..=4)
        .prop_flat_map(|(q, n)| {
            let total = q.pow(n as u32);
            (Just(q), Just(n), proptest::collection::btree_set(0..total, 1..=total.min(24)))
        })
        .prop_map(|(q, n, idx)| code_from_indices(q, n, idx))
}

/// Two codes with the same alphabet, length and size.
fn code_pair_strategy() -> impl Strategy<Value = (Code, Code)> {
    (2usize..=3, 2usize..=3)
        .prop_flat_map(|(q, n)| {
            let total = q.pow(n as u32);
            (Just(q), Just(n), 1..=total.min(6))
        })
        .prop_flat_map(|(q, n, m)| {
            let total = q.pow(n as u32);
            let set = proptest::collection::btree_set(0..total, m..=m);
            (Just(q), Just(n), set.clone(), set)
        })
        .prop_map(|(q, n, a, b)| (code_from_indices(q, n, a), code_from_indices(q, n, b)))
}

fn isometry(c: &Code, seed: u64) -> Isometry {
    Isometry::random(c.n(), c.q(), &mut ChaCha8Rng::seed_from_u64(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn isometries_preserve_distances(c in code_strategy(), seed: u64) {
        let g = isometry(&c, seed);
        let d = g.apply(&c).unwrap();
        prop_assert_eq!(d.len(), c.len());
        prop_assert_eq!(d.distance_distribution(), c.distance_distribution());
        prop_assert_eq!(g.inverse().apply(&d).unwrap(), c);
    }

    #[test]
    fn composition_acts_in_order(c in code_strategy(), s1: u64, s2: u64) {
        let (g, h) = (isometry(&c, s1), isometry(&c, s2));
        let once = g.compose(&h).apply(&c).unwrap();
        let twice = g.apply(&h.apply(&c).unwrap()).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn canonical_form_is_a_class_invariant(c in code_strategy(), seed: u64) {
        let d = isometry(&c, seed).apply(&c).unwrap();
        let (fc, fd) = (canonical_form(&c), canonical_form(&d));
        prop_assert_eq!(&fc.canon, &fd.canon);
        prop_assert_eq!(fc.cert, fd.cert);
        prop_assert_eq!(&fc.aut_order, &fd.aut_order);
        prop_assert_eq!(fc.to_canon.apply(&c).unwrap(), fc.canon.clone());
        for g in &fc.aut_gens {
            prop_assert_eq!(g.apply(&c).unwrap(), c.clone());
        }
        prop_assert!(fc.aut_order > BigUint::from(0u32));
    }

    #[test]
    fn equal_certificates_iff_isomorphic((a, b) in code_pair_strategy()) {
        let same = canonical_form(&a).cert == canonical_form(&b).cert;
        let iso = find_isomorphism(&a, &b).unwrap();
        prop_assert_eq!(same, iso.is_some());
        if let Some(g) = iso {
            prop_assert_eq!(g.apply(&a).unwrap(), b);
        }
    }

    #[test]
    fn text_format_round_trips(c in code_strategy()) {
        let text = write_code(&c, &["note".to_string()]);
        prop_assert_eq!(parse_code(&text, "mem").unwrap(), c);
    }
}

use std::collections::{HashSet, VecDeque};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use sha2::{Digest, Sha256};

use super::graph::{ColoredGraph, VertexPart};
use super::isometry::Isometry;
use super::labeling::{canonical_labeling, Labeling};
use crate::code::Code;
use crate::error::{Error, Result};
use crate::format::write_code;

pub type Cert = [u8; 32];

#[derive(Clone, Debug)]
pub struct CanonicalForm {
    pub canon: Code,
    /// SHA-256 of the canonical `.mds` serialization.
    pub cert: Cert,
    pub aut_gens: Vec<Isometry>,
    pub aut_order: BigUint,
    /// Maps the input code onto `canon`.
    pub to_canon: Isometry,
}

pub fn cert_of(canon: &Code) -> Cert {
    Sha256::digest(write_code(canon, &[]).as_bytes()).into()
}

pub fn cert_hex(cert: &Cert) -> String {
    cert.iter().map(|b| format!("{b:02x}")).collect()
}

/// Reads the isometry off a vertex permutation that preserves the symbol cliques.
fn vertex_perm_to_isometry(g: &ColoredGraph, perm: &[u32]) -> Isometry {
    let (n, q, _) = g.code_params();
    let mut coord = vec![0u8; n];
    let mut syms = vec![vec![0u8; q]; n];
    for i in 0..n {
        for s in 0..q {
            match g.part(perm[i * q + s] as usize) {
                VertexPart::Symbol { coord: j, symbol: t } => {
                    coord[i] = j as u8;
                    syms[j][s] = t as u8;
                }
                VertexPart::Word(_) => unreachable!("automorphism mixes colors"),
            }
        }
    }
    Isometry::new(coord, syms).expect("clique-preserving vertex permutation")
}

/// The isometry sending each coordinate to the rank of its first symbol vertex
/// in `lab`, and each symbol to its rank within that coordinate.
fn labeling_to_isometry(g: &ColoredGraph, lab: &[u32]) -> Isometry {
    let (n, q, _) = g.code_params();
    let mut coord = vec![u8::MAX; n];
    let mut syms = vec![vec![0u8; q]; n];
    let mut next_coord = 0u8;
    let mut seen_in = vec![0u8; n];
    for &v in lab {
        if let VertexPart::Symbol { coord: i, symbol: s } = g.part(v as usize) {
            if coord[i] == u8::MAX {
                coord[i] = next_coord;
                next_coord += 1;
            }
            syms[i][s] = seen_in[i];
            seen_in[i] += 1;
        }
    }
    // symbol maps are indexed by the image coordinate
    let mut by_image = vec![Vec::new(); n];
    for i in 0..n {
        by_image[coord[i] as usize] = std::mem::take(&mut syms[i]);
    }
    Isometry::new(coord, by_image).expect("labeling covers every symbol vertex")
}

fn labeling_of(code: &Code, marks: Option<&[bool]>) -> (ColoredGraph, Labeling) {
    let g = match marks {
        Some(m) => ColoredGraph::from_code_marked(code, m),
        None => ColoredGraph::from_code(code),
    };
    let l = canonical_labeling(&g);
    (g, l)
}

pub fn canonical_form(code: &Code) -> CanonicalForm {
    let (g, l) = labeling_of(code, None);
    let to_canon = labeling_to_isometry(&g, &l.lab);
    let canon = to_canon.apply_unchecked(code);
    let aut_gens = l.generators.iter().map(|p| vertex_perm_to_isometry(&g, p)).collect();
    CanonicalForm { cert: cert_of(&canon), canon, aut_gens, aut_order: l.group_order, to_canon }
}

/// Stabilizer of `code` that also maps the marked words onto marked words.
pub fn automorphism_group(code: &Code, marks: Option<&[bool]>) -> (Vec<Isometry>, BigUint) {
    let (g, l) = labeling_of(code, marks);
    let gens = l.generators.iter().map(|p| vertex_perm_to_isometry(&g, p)).collect();
    (gens, l.group_order)
}

fn check_same_shape(c: &Code, d: &Code) -> Result<()> {
    if (c.q(), c.n(), c.len()) != (d.q(), d.n(), d.len()) {
        return Err(Error::param(format!(
            "codes have different parameters: (q={}, n={}, M={}) vs (q={}, n={}, M={})",
            c.q(),
            c.n(),
            c.len(),
            d.q(),
            d.n(),
            d.len()
        )));
    }
    Ok(())
}

/// Some `g` with `g·c = d`, or `None` when the codes are inequivalent.
pub fn find_isomorphism(c: &Code, d: &Code) -> Result<Option<Isometry>> {
    check_same_shape(c, d)?;
    if c.distance_distribution() != d.distance_distribution() {
        return Ok(None);
    }
    let (fc, fd) = (canonical_form(c), canonical_form(d));
    Ok(isometry_between(&fc, &fd))
}

/// Isometry from the code behind `fc` to the code behind `fd`, if their
/// canonical forms agree.
pub fn isometry_between(fc: &CanonicalForm, fd: &CanonicalForm) -> Option<Isometry> {
    if fc.cert != fd.cert || fc.canon != fd.canon {
        return None;
    }
    Some(fd.to_canon.inverse().compose(&fc.to_canon))
}

/// All isometries mapping one code onto another, as `Aut(D)∘g0`.
#[derive(Clone, Debug)]
pub struct IsometryCoset {
    pub g0: Isometry,
    pub aut_gens: Vec<Isometry>,
    pub aut_order: BigUint,
}

pub fn isometry_coset(c: &Code, d: &Code) -> Result<IsometryCoset> {
    check_same_shape(c, d)?;
    let fc = canonical_form(c);
    let fd = canonical_form(d);
    let g0 = isometry_between(&fc, &fd).ok_or(Error::Inequivalent)?;
    Ok(IsometryCoset { g0, aut_gens: fd.aut_gens, aut_order: fd.aut_order })
}

impl IsometryCoset {
    pub fn len(&self) -> &BigUint {
        &self.aut_order
    }

    /// Every coset element exactly once. Refuses groups larger than `cap`.
    pub fn elements(&self, cap: u64) -> Result<Vec<Isometry>> {
        let order = self.aut_order.to_u64().filter(|&o| o <= cap).ok_or(Error::Guardrail {
            what: "automorphism group elements",
            count: self.aut_order.to_u128().unwrap_or(u128::MAX),
            cap: cap as u128,
        })?;
        let group = group_elements(&self.aut_gens, self.g0.n(), self.g0.q());
        debug_assert_eq!(group.len() as u64, order);
        Ok(group.iter().map(|h| h.compose(&self.g0)).collect())
    }
}

/// Closure of the generated group, in breadth-first order from the identity.
pub fn group_elements(gens: &[Isometry], n: usize, q: usize) -> Vec<Isometry> {
    let id = Isometry::identity(n, q);
    let mut seen: HashSet<Isometry> = HashSet::from([id.clone()]);
    let mut out = vec![id.clone()];
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = g.compose(&x);
            if seen.insert(y.clone()) {
                out.push(y.clone());
                queue.push_back(y);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetry::isometry::group_order;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cayley(q: usize, op: impl Fn(usize, usize) -> usize) -> Code {
        let words: Vec<[u8; 3]> =
            (0..q).flat_map(|x| (0..q).map(move |y| (x, y))).map(|(x, y)| [x as u8, y as u8, op(x, y) as u8]).collect();
        Code::new(q, 3, words).unwrap()
    }

    #[test]
    fn invariant_under_random_isometries() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let code = cayley(4, |x, y| x ^ y);
        let base = canonical_form(&code);
        assert_eq!(base.to_canon.apply(&code).unwrap(), base.canon);
        for _ in 0..100 {
            let g = Isometry::random(3, 4, &mut rng);
            let f = canonical_form(&g.apply(&code).unwrap());
            assert_eq!(f.canon, base.canon);
            assert_eq!(f.aut_order, base.aut_order);
        }
    }

    #[test]
    fn full_square_aut() {
        let f = canonical_form(&Code::full_space(3, 2).unwrap());
        assert_eq!(f.aut_order, BigUint::from(72u32));
    }

    #[test]
    fn z4_and_klein_differ() {
        let z4 = cayley(4, |x, y| (x + y) % 4);
        let k4 = cayley(4, |x, y| x ^ y);
        assert_ne!(canonical_form(&z4).cert, canonical_form(&k4).cert);
        assert!(find_isomorphism(&z4, &k4).unwrap().is_none());
    }

    #[test]
    fn generators_fix_code_and_order_divides() {
        let code = cayley(5, |x, y| (x + 2 * y) % 5);
        let f = canonical_form(&code);
        for g in &f.aut_gens {
            assert_eq!(g.apply(&code).unwrap(), code);
        }
        assert_eq!(group_order(3, 5) % &f.aut_order, BigUint::from(0u32));
        let all = group_elements(&f.aut_gens, 3, 5);
        assert_eq!(BigUint::from(all.len()), f.aut_order);
    }

    #[test]
    fn coset_of_self_is_aut() {
        let code = cayley(3, |x, y| (x + y) % 3);
        let coset = isometry_coset(&code, &code).unwrap();
        let els = coset.elements(1 << 20).unwrap();
        assert_eq!(BigUint::from(els.len()), coset.aut_order);
        for g in &els {
            assert_eq!(g.apply(&code).unwrap(), code);
        }
    }

    #[test]
    fn parameter_mismatch_is_an_error() {
        let a = Code::full_space(3, 2).unwrap();
        let b = Code::full_space(3, 3).unwrap();
        assert!(matches!(find_isomorphism(&a, &b), Err(Error::Param(_))));
    }
}

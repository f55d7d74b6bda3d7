use std::fmt;

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::code::Code;
use crate::error::{Error, Result};

/// An element of `G_n`: a coordinate permutation followed by one symbol
/// permutation per (new) coordinate.
///
/// Acting on a word: `(g·c)[coord_perm[i]] = symbol_perms[coord_perm[i]][c[i]]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Isometry {
    coord_perm: Vec<u8>,
    symbol_perms: Vec<Vec<u8>>,
}

fn is_perm(p: &[u8]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter().all(|&x| (x as usize) < p.len() && !std::mem::replace(&mut seen[x as usize], true))
}

/// `|G_n| = n! · (q!)^n`.
pub fn group_order(n: usize, q: usize) -> BigUint {
    let fact = |m: usize| (1..=m).fold(BigUint::from(1u32), |acc, i| acc * i);
    fact(n) * num_traits::pow(fact(q), n)
}

impl Isometry {
    pub fn new(coord_perm: Vec<u8>, symbol_perms: Vec<Vec<u8>>) -> Result<Self> {
        let n = coord_perm.len();
        if n == 0 || symbol_perms.len() != n || !is_perm(&coord_perm) {
            return Err(Error::param("coordinate permutation is not a permutation of 0..n"));
        }
        let q = symbol_perms[0].len();
        if symbol_perms.iter().any(|s| s.len() != q || !is_perm(s)) {
            return Err(Error::param("symbol maps must be permutations of 0..q"));
        }
        Ok(Isometry { coord_perm, symbol_perms })
    }

    pub fn identity(n: usize, q: usize) -> Self {
        Isometry { coord_perm: (0..n as u8).collect(), symbol_perms: vec![(0..q as u8).collect(); n] }
    }

    pub fn random<R: Rng + ?Sized>(n: usize, q: usize, rng: &mut R) -> Self {
        let mut g = Self::identity(n, q);
        g.coord_perm.shuffle(rng);
        for s in &mut g.symbol_perms {
            s.shuffle(rng);
        }
        g
    }

    pub fn n(&self) -> usize {
        self.coord_perm.len()
    }

    pub fn q(&self) -> usize {
        self.symbol_perms[0].len()
    }

    pub fn coord_perm(&self) -> &[u8] {
        &self.coord_perm
    }

    pub fn symbol_perm(&self, new_coord: usize) -> &[u8] {
        &self.symbol_perms[new_coord]
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n(), self.q())
    }

    pub fn apply_word(&self, w: &[u8], out: &mut [u8]) {
        for (i, &s) in w.iter().enumerate() {
            let j = self.coord_perm[i] as usize;
            out[j] = self.symbol_perms[j][s as usize];
        }
    }

    pub fn apply(&self, code: &Code) -> Result<Code> {
        if code.n() != self.n() || code.q() != self.q() {
            return Err(Error::param(format!(
                "isometry on (n={}, q={}) applied to code with (n={}, q={})",
                self.n(),
                self.q(),
                code.n(),
                code.q()
            )));
        }
        Ok(self.apply_unchecked(code))
    }

    pub(crate) fn apply_unchecked(&self, code: &Code) -> Code {
        let n = code.n();
        let mut data = vec![0u8; code.as_flat().len()];
        for (w, out) in code.words().zip(data.chunks_exact_mut(n)) {
            self.apply_word(w, out);
        }
        Code::from_unsorted_unchecked(code.q(), n, data)
    }

    /// Where each word index of `code` lands in `image` (which must equal `self·code`).
    pub fn word_map(&self, code: &Code, image: &Code) -> Vec<u32> {
        let mut buf = vec![0u8; code.n()];
        code.words()
            .map(|w| {
                self.apply_word(w, &mut buf);
                image.index_of(&buf).expect("image code does not contain mapped word") as u32
            })
            .collect()
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Isometry) -> Isometry {
        let n = self.n();
        let mut coord_perm = vec![0u8; n];
        let mut symbol_perms = vec![Vec::new(); n];
        for i in 0..n {
            let mid = other.coord_perm[i] as usize;
            let fin = self.coord_perm[mid] as usize;
            coord_perm[i] = fin as u8;
            symbol_perms[fin] = other.symbol_perms[mid].iter().map(|&s| self.symbol_perms[fin][s as usize]).collect();
        }
        Isometry { coord_perm, symbol_perms }
    }

    pub fn inverse(&self) -> Isometry {
        let n = self.n();
        let q = self.q();
        let mut coord_perm = vec![0u8; n];
        let mut symbol_perms = vec![vec![0u8; q]; n];
        for i in 0..n {
            let j = self.coord_perm[i] as usize;
            coord_perm[j] = i as u8;
            for s in 0..q {
                symbol_perms[i][self.symbol_perms[j][s] as usize] = s as u8;
            }
        }
        Isometry { coord_perm, symbol_perms }
    }

    /// Parses the log format `pi=<perm>; s0=<perm>; ...`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut fields = text.split(';').map(str::trim).filter(|f| !f.is_empty());
        let parse_perm = |field: &str, key: &str| -> Result<Vec<u8>> {
            let body = field
                .strip_prefix(key)
                .and_then(|f| f.strip_prefix('='))
                .ok_or_else(|| Error::param(format!("expected `{key}=`, found `{field}`")))?;
            body.split_whitespace()
                .map(|t| t.parse::<u8>().map_err(|_| Error::param(format!("bad image `{t}`"))))
                .collect()
        };
        let pi = parse_perm(fields.next().unwrap_or(""), "pi")?;
        let mut sym = Vec::new();
        for (i, f) in fields.enumerate() {
            sym.push(parse_perm(f, &format!("s{i}"))?);
        }
        Isometry::new(pi, sym)
    }
}

impl fmt::Display for Isometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |p: &[u8]| p.iter().map(u8::to_string).collect::<Vec<_>>().join(" ");
        write!(f, "pi={}", join(&self.coord_perm))?;
        for (i, s) in self.symbol_perms.iter().enumerate() {
            write!(f, "; s{i}={}", join(s))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Isometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Isometry({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn group_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let code = Code::full_space(4, 3).unwrap().subcode(&[0, 5, 9, 17, 33, 62]);
        for _ in 0..50 {
            let g = Isometry::random(3, 4, &mut rng);
            let h = Isometry::random(3, 4, &mut rng);
            let lhs = g.apply(&h.apply(&code).unwrap()).unwrap();
            assert_eq!(lhs, g.compose(&h).apply(&code).unwrap());
            assert!(g.compose(&g.inverse()).is_identity());
            assert!(g.inverse().compose(&g).is_identity());
            assert_eq!(g.apply(&code).unwrap().min_distance(), code.min_distance());
        }
        assert_eq!(Isometry::identity(3, 4).apply(&code).unwrap(), code);
    }

    #[test]
    fn text_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = Isometry::random(4, 5, &mut rng);
        let text = g.to_string();
        assert!(text.starts_with("pi="));
        assert_eq!(text.matches(';').count(), 4);
        assert_eq!(Isometry::parse(&text).unwrap(), g);
        assert!(Isometry::parse("pi=0 0; s0=0 1; s1=1 0").is_err());
    }

    #[test]
    fn order_of_g() {
        assert_eq!(group_order(2, 3), BigUint::from(72u32));
        assert_eq!(group_order(3, 4), BigUint::from(6u32 * 24 * 24 * 24));
    }

    #[test]
    fn size_mismatch_rejected() {
        let code = Code::full_space(3, 2).unwrap();
        assert!(Isometry::identity(3, 3).apply(&code).is_err());
    }
}

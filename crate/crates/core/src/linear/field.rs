use crate::error::{Error, Result};

/// Finite field of order `q ∈ {2,3,4,5,7,8,9}` as lookup tables.
///
/// Elements of `GF(p^m)` are integers whose base-`p` digits are polynomial
/// coefficients (lowest degree first), reduced modulo a fixed polynomial:
/// `x²+x+1` for 4, `x³+x+1` for 8, `x²+x+2` for 9.
#[derive(Clone, Debug)]
pub struct Field {
    q: usize,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

fn prime_power(q: usize) -> Option<(usize, usize, &'static [usize])> {
    // (p, m, low coefficients of the monic modulus)
    match q {
        2 | 3 | 5 | 7 => Some((q, 1, &[])),
        4 => Some((2, 2, &[1, 1])),
        8 => Some((2, 3, &[1, 1, 0])),
        9 => Some((3, 2, &[2, 1])),
        _ => None,
    }
}

fn digits(mut x: usize, p: usize, m: usize) -> Vec<usize> {
    (0..m)
        .map(|_| {
            let d = x % p;
            x /= p;
            d
        })
        .collect()
}

fn undigits(d: &[usize], p: usize) -> usize {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

impl Field {
    pub fn new(q: usize) -> Result<Self> {
        let (p, m, modulus) = prime_power(q)
            .ok_or_else(|| Error::param(format!("no field of order {q} supported (use 2,3,4,5,7,8,9)")))?;
        let mut add = vec![0u8; q * q];
        let mut mul = vec![0u8; q * q];
        for a in 0..q {
            let da = digits(a, p, m);
            for b in 0..q {
                let db = digits(b, p, m);
                let sum: Vec<usize> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a * q + b] = undigits(&sum, p) as u8;
                let mut prod = vec![0usize; 2 * m];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                // x^m = -(low coefficients)
                for deg in (m..2 * m).rev() {
                    let c = prod[deg];
                    if c == 0 {
                        continue;
                    }
                    prod[deg] = 0;
                    for (i, &r) in modulus.iter().enumerate() {
                        prod[deg - m + i] = (prod[deg - m + i] + c * (p - r)) % p;
                    }
                }
                mul[a * q + b] = undigits(&prod[..m], p) as u8;
            }
        }
        let mut neg = vec![0u8; q];
        let mut inv = vec![0u8; q];
        for a in 0..q {
            neg[a] = (0..q).find(|&b| add[a * q + b] == 0).unwrap() as u8;
            if a > 0 {
                inv[a] = (0..q)
                    .find(|&b| mul[a * q + b] == 1)
                    .ok_or_else(|| Error::param(format!("modulus for GF({q}) is reducible")))?
                    as u8;
            }
        }
        let f = Field { q, add, mul, neg, inv };
        f.check_axioms()?;
        Ok(f)
    }

    fn check_axioms(&self) -> Result<()> {
        let q = self.q as u8;
        for a in 0..q {
            for b in 0..q {
                if self.add(a, b) != self.add(b, a) || self.mul(a, b) != self.mul(b, a) {
                    return Err(Error::param("field tables are not commutative"));
                }
                for c in 0..q {
                    let assoc = self.add(self.add(a, b), c) == self.add(a, self.add(b, c))
                        && self.mul(self.mul(a, b), c) == self.mul(a, self.mul(b, c));
                    let dist = self.mul(a, self.add(b, c)) == self.add(self.mul(a, b), self.mul(a, c));
                    if !assoc || !dist {
                        return Err(Error::param("field tables violate associativity or distributivity"));
                    }
                }
            }
            if self.add(a, 0) != a || self.mul(a, 1) != a {
                return Err(Error::param("0 and 1 are not identities"));
            }
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.q
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg[b as usize])
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        self.neg[a as usize]
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: u8) -> Option<u8> {
        (a != 0).then(|| self.inv[a as usize])
    }

    pub fn pow(&self, a: u8, e: usize) -> u8 {
        (0..e).fold(1, |acc, _| self.mul(acc, a))
    }

    /// Determinant of a square matrix given as rows.
    pub fn det(&self, rows: &[Vec<u8>]) -> u8 {
        let n = rows.len();
        let mut m: Vec<Vec<u8>> = rows.to_vec();
        let mut det = 1u8;
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| m[r][col] != 0) else {
                return 0;
            };
            if piv != col {
                m.swap(piv, col);
                det = self.neg(det);
            }
            let pv = m[col][col];
            det = self.mul(det, pv);
            let pinv = self.inv(pv).unwrap();
            for r in col + 1..n {
                let factor = self.mul(m[r][col], pinv);
                if factor == 0 {
                    continue;
                }
                for c in col..n {
                    let t = self.mul(factor, m[col][c]);
                    m[r][c] = self.sub(m[r][c], t);
                }
            }
        }
        det
    }

    /// Rank of a matrix given as rows.
    pub fn rank(&self, rows: &[Vec<u8>]) -> usize {
        let mut m: Vec<Vec<u8>> = rows.to_vec();
        let cols = m.first().map_or(0, Vec::len);
        let mut rank = 0;
        for col in 0..cols {
            let Some(piv) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
                continue;
            };
            m.swap(piv, rank);
            let pinv = self.inv(m[rank][col]).unwrap();
            for r in 0..m.len() {
                if r != rank && m[r][col] != 0 {
                    let factor = self.mul(m[r][col], pinv);
                    for c in col..cols {
                        let t = self.mul(factor, m[rank][c]);
                        m[r][c] = self.sub(m[r][c], t);
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_products() {
        assert_eq!(Field::new(7).unwrap().mul(3, 5), 1);
        let f4 = Field::new(4).unwrap();
        assert_eq!(f4.mul(2, 2), 3);
        let f8 = Field::new(8).unwrap();
        assert_eq!(f8.pow(2, 3), 3);
        assert!(Field::new(6).is_err());
    }

    #[test]
    fn all_supported_fields_build() {
        for q in [2, 3, 4, 5, 7, 8, 9] {
            let f = Field::new(q).unwrap();
            for a in 1..q as u8 {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
        }
    }

    #[test]
    fn det_and_rank_agree() {
        let f = Field::new(5).unwrap();
        let m = vec![vec![1, 2], vec![2, 4]];
        assert_eq!(f.det(&m), 0);
        assert_eq!(f.rank(&m), 1);
        let m = vec![vec![1, 2], vec![3, 4]];
        assert_eq!(f.det(&m), f.sub(4, 6 % 5));
        assert_eq!(f.rank(&m), 2);
    }
}

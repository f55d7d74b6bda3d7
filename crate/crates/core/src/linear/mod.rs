//! Linear MDS codes: Reed–Solomon seeds, exhaustive systematic enumeration
//! and linearity testing by certificate membership.

pub mod field;

use num_traits::ToPrimitive;
use rayon::prelude::*;

pub use field::Field;

use crate::code::{for_each_subset, Code};
use crate::error::{Error, Result};
use crate::symmetry::{canonical_form, CanonicalForm};

/// Default bound on the number of normalized matrices `enumerate_linear_mds` visits.
pub const DEFAULT_LINEAR_CAP: u64 = 1 << 20;

/// Code spanned by the rows of `gen` (all `q^k` combinations).
pub fn code_from_generator(field: &Field, gen: &[Vec<u8>]) -> Result<Code> {
    let q = field.order();
    let k = gen.len();
    let n = gen.first().map_or(0, Vec::len);
    if n == 0 {
        return Err(Error::param("generator matrix has no columns"));
    }
    let total = q.checked_pow(k as u32).ok_or_else(|| Error::param("code too large"))?;
    let mut data = Vec::with_capacity(total * n);
    let mut msg = vec![0u8; k];
    let mut word = vec![0u8; n];
    for idx in 0..total {
        let mut x = idx;
        for m in msg.iter_mut().rev() {
            *m = (x % q) as u8;
            x /= q;
        }
        word.iter_mut().for_each(|w| *w = 0);
        for (row, &m) in gen.iter().zip(&msg) {
            if m == 0 {
                continue;
            }
            for (w, &g) in word.iter_mut().zip(row) {
                *w = field.add(*w, field.mul(m, g));
            }
        }
        data.extend_from_slice(&word);
    }
    Code::from_flat(q, n, data)
}

/// Extended Reed–Solomon code: evaluations of all polynomials of degree `< k`
/// at the first `min(n, q)` field elements, plus the coefficient of `x^{k-1}`
/// when `n = q + 1`.
pub fn rs_code(q: usize, n: usize, k: usize) -> Result<Code> {
    let field = Field::new(q)?;
    if n > q + 1 || k == 0 || k > n {
        return Err(Error::param(format!("no Reed-Solomon code with q={q}, n={n}, k={k} (need 1 <= k <= n <= q+1)")));
    }
    let gen: Vec<Vec<u8>> = (0..k)
        .map(|i| {
            let mut row: Vec<u8> = (0..n.min(q) as u8).map(|a| field.pow(a, i)).collect();
            if n == q + 1 {
                row.push(u8::from(i == k - 1));
            }
            row
        })
        .collect();
    code_from_generator(&field, &gen)
}

fn all_minors_nonsingular(field: &Field, a: &[Vec<u8>]) -> bool {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    for size in 1..=rows.min(cols) {
        let mut ok = true;
        for_each_subset(rows, size, |rs| {
            if !ok {
                return;
            }
            for_each_subset(cols, size, |cs| {
                if !ok {
                    return;
                }
                let sub: Vec<Vec<u8>> = rs.iter().map(|&r| cs.iter().map(|&c| a[r][c]).collect()).collect();
                ok = field.det(&sub) != 0;
            });
        });
        if !ok {
            return false;
        }
    }
    true
}

fn systematic(k: usize, a: &[Vec<u8>]) -> Vec<Vec<u8>> {
    (0..k)
        .map(|i| {
            let mut row = vec![0u8; k];
            row[i] = 1;
            row.extend_from_slice(&a[i]);
            row
        })
        .collect()
}

/// Class representatives of all linear `(n,k)_q` MDS codes.
///
/// Scaling rows and columns of `A` in `[I | A]` stays inside one equivalence
/// class, so the first row and column of `A` are fixed to ones and only the
/// remaining `(k-1)(n-k-1)` entries range over the nonzero elements.
pub fn enumerate_linear_mds(q: usize, n: usize, k: usize, cap: u64) -> Result<Vec<CanonicalForm>> {
    let field = Field::new(q)?;
    if k == 0 || k > n {
        return Err(Error::param(format!("need 1 <= k <= n, got n={n}, k={k}")));
    }
    let r = n - k;
    if r == 0 || k == 1 || r == 1 {
        // the only candidate is the all-ones A (or the full space)
        let a = vec![vec![1u8; r]; k];
        let code = code_from_generator(&field, &systematic(k, &a))?;
        return Ok(vec![canonical_form(&code)]);
    }
    let free = (k - 1) * (r - 1);
    let total = num_traits::pow(num_bigint::BigUint::from(q - 1), free);
    let count = total.to_u64().filter(|&t| t <= cap).ok_or_else(|| Error::Guardrail {
        what: "normalized systematic matrices",
        count: total.to_u128().unwrap_or(u128::MAX),
        cap: cap as u128,
    })?;
    let decode = |mut idx: u64| {
        let mut a = vec![vec![1u8; r]; k];
        for i in 1..k {
            for j in 1..r {
                a[i][j] = 1 + (idx % (q as u64 - 1)) as u8;
                idx /= q as u64 - 1;
            }
        }
        a
    };
    let mut forms: Vec<CanonicalForm> = (0..count)
        .into_par_iter()
        .filter_map(|idx| {
            let a = decode(idx);
            if !all_minors_nonsingular(&field, &a) {
                return None;
            }
            let code = code_from_generator(&field, &systematic(k, &a)).ok()?;
            debug_assert!(code.is_mds().is_mds);
            Some(canonical_form(&code))
        })
        .collect();
    forms.sort_by(|x, y| x.cert.cmp(&y.cert));
    forms.dedup_by(|x, y| x.cert == y.cert);
    Ok(forms)
}

/// Whether `code` is equivalent to a linear code. Reed–Solomon codes are tried
/// first; otherwise the systematic enumeration decides, and parameters beyond
/// `cap` come back as [`Error::Inconclusive`].
pub fn is_linear_equivalent(code: &Code, cap: u64) -> Result<bool> {
    let (q, n) = (code.q(), code.n());
    let profile = code.is_mds();
    if !profile.is_mds {
        // a linear code has q^k words; non-MDS inputs are outside this test
        return Err(Error::InvalidCode("linearity test expects an MDS code".into()));
    }
    Field::new(q).map_err(|_| Error::Inconclusive(format!("q={q} is not a supported field order")))?;
    let k = profile.k;
    if k == 0 {
        return Ok(true);
    }
    let cert = canonical_form(code).cert;
    if n <= q + 1 && canonical_form(&rs_code(q, n, k)?).cert == cert {
        return Ok(true);
    }
    match enumerate_linear_mds(q, n, k, cap) {
        Ok(forms) => Ok(forms.iter().any(|f| f.cert == cert)),
        Err(Error::Guardrail { count, .. }) => Err(Error::Inconclusive(format!(
            "linear ({n},{k})_{q} enumeration needs {count} matrices, above the cap {cap}"
        ))),
        Err(e) => Err(e),
    }
}

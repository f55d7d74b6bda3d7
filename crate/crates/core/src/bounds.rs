//! Counts and lower bounds for `(n, n-1)_q` MDS codes (minimum distance 2).
//!
//! `N_n` is the number of labeled codes and `M_n` the number of classes.
//! Gluing the last-coordinate shortenings of an `(a, a-1)` and a `(b, b-1)`
//! code gives an `(a+b-2, a+b-3)` code, and exactly `q!` pairs give the same
//! result, so `N_n ≥ N_a·N_b / q!` whenever `a + b = n + 2`. Every class has at
//! most `|G_n|` members, so `M_n ≥ N_n / |G_n|`.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::Path;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;

use crate::error::{Error, Result};
use crate::pipeline::{classify_latin_squares, Registry};
use crate::symmetry::group_order;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bound {
    Exact(BigUint),
    AtLeast(BigUint),
}

impl Bound {
    pub fn value(&self) -> &BigUint {
        match self {
            Bound::Exact(v) | Bound::AtLeast(v) => v,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Bound::Exact(_))
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Exact(v) => write!(f, "{v}"),
            Bound::AtLeast(v) => write!(f, "≥ {}", two_figures_down(v)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundSource {
    /// Exact, from a stored classification.
    Classified,
    /// Gluing a code of length `first` with one of length `n - first + 2`.
    Split { first: usize },
    /// The double-exponential bound on `N_n`.
    DoubleExponential,
}

impl fmt::Display for BoundSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundSource::Classified => write!(f, "classified"),
            BoundSource::Split { first } => write!(f, "split@{first}"),
            BoundSource::DoubleExponential => write!(f, "double-exponential"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BoundsRow {
    pub n: usize,
    /// `N_n`
    pub labeled: Bound,
    /// `M_n`
    pub classes: Bound,
    pub source: BoundSource,
}

#[derive(Clone, Debug)]
pub struct BoundsLedger {
    pub q: usize,
    pub rows: BTreeMap<usize, BoundsRow>,
}

/// Exact number of labeled codes in the classes of `reg`.
pub fn labeled_count(reg: &Registry) -> Result<BigUint> {
    reg.labeled_total()
}

fn factorial(m: usize) -> BigUint {
    (1..=m).fold(BigUint::one(), |acc, i| acc * i)
}

/// `max N_a·N_b / q!` over `a + b = n + 2` with `a, b ≥ 3` both known, and
/// the maximizing `a`. Values in `known` may be exact counts or lower bounds.
pub fn split_lower_bound(q: usize, n: usize, known: &BTreeMap<usize, BigUint>) -> Result<(BigUint, usize)> {
    let fq = factorial(q);
    let mut best: Option<(BigUint, usize)> = None;
    for a in 3..n {
        let b = n + 2 - a;
        if b < 3 {
            continue;
        }
        let (Some(na), Some(nb)) = (known.get(&a), known.get(&b)) else { continue };
        let v = na * nb / &fq;
        if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
            best = Some((v, a));
        }
    }
    best.ok_or_else(|| Error::param(format!("no known pair of lengths sums to {} for q={q}", n + 2)))
}

/// `⌈N / |G_n|⌉`.
pub fn class_lower_bound(q: usize, n: usize, labeled: &BigUint) -> BigUint {
    Integer::div_ceil(labeled, &group_order(n, q))
}

/// `2^⌊e⌋` where `log₂ N_n ≥ e`: `e = (q/2)^(n-1)` for even `q` and
/// `((q-3)(q-1)/4)^((n-1)/2)` for odd `q`.
pub fn double_exponential_lower_bound(q: usize, n: usize) -> Result<BigUint> {
    if q < 4 {
        return Err(Error::param(format!("the double-exponential bound needs q >= 4, got {q}")));
    }
    if n < 1 {
        return Err(Error::param("length must be positive"));
    }
    let e = if q % 2 == 0 {
        num_traits::pow(BigUint::from(q / 2), n - 1)
    } else {
        let base = BigUint::from((q - 3) * (q - 1) / 4);
        if (n - 1) % 2 == 0 {
            num_traits::pow(base, (n - 1) / 2)
        } else {
            num_traits::pow(base, n - 1).sqrt()
        }
    };
    let e: usize = e
        .try_into()
        .map_err(|_| Error::param(format!("2^(bound exponent) for q={q}, n={n} is too large to represent")))?;
    Ok(BigUint::one() << e)
}

/// Exact `(N_n, M_n)` for every `(n, n-1)_q` registry under `root` with `3 ≤ n ≤ max_n`.
pub fn classified_counts(root: &Path, q: usize, max_n: usize) -> Result<BTreeMap<usize, (BigUint, usize)>> {
    let mut out = BTreeMap::new();
    for n in 3..=max_n {
        if let Some(reg) = Registry::load(root, q, n, n - 1)? {
            out.insert(n, (labeled_count(&reg)?, reg.records.len()));
        }
    }
    Ok(out)
}

/// Exact `(N_3, M_3)` from the Latin square classification; orders above 7 need seeds.
pub fn latin_square_counts(q: usize) -> Result<(BigUint, usize)> {
    let c = classify_latin_squares(q)?;
    Ok((labeled_count(&c.registry)?, c.registry.records.len()))
}

/// Rows `3..=max_n` for alphabet `q`: exact values where classified, and
/// otherwise the best available lower bound, each feeding the next lengths.
pub fn bounds_ledger(q: usize, max_n: usize, exact: &BTreeMap<usize, (BigUint, usize)>) -> Result<BoundsLedger> {
    let mut known: BTreeMap<usize, BigUint> = BTreeMap::new();
    let mut rows = BTreeMap::new();
    for n in 3..=max_n {
        let row = if let Some((labeled, classes)) = exact.get(&n) {
            let classes = BigUint::from(*classes);
            if *labeled < classes || *labeled > &classes * group_order(n, q) {
                return Err(Error::Verify(format!(
                    "({n},{})_{q}: {labeled} labeled codes cannot form {classes} classes",
                    n - 1
                )));
            }
            BoundsRow {
                n,
                labeled: Bound::Exact(labeled.clone()),
                classes: Bound::Exact(classes),
                source: BoundSource::Classified,
            }
        } else {
            let split = split_lower_bound(q, n, &known).ok();
            let dexp = if q >= 4 { Some(double_exponential_lower_bound(q, n)?) } else { None };
            let (labeled, source) = match (split, dexp) {
                (Some((s, _)), Some(d)) if d > s => (d, BoundSource::DoubleExponential),
                (Some((s, first)), _) => (s, BoundSource::Split { first }),
                (None, Some(d)) => (d, BoundSource::DoubleExponential),
                (None, None) => continue,
            };
            let classes = class_lower_bound(q, n, &labeled);
            BoundsRow { n, labeled: Bound::AtLeast(labeled), classes: Bound::AtLeast(classes), source }
        };
        known.insert(n, row.labeled.value().clone());
        rows.insert(n, row);
    }
    Ok(BoundsLedger { q, rows })
}

/// Two significant figures, rounded down, as `d.d×10^e`; values below 100
/// are printed in full.
pub fn two_figures_down(v: &BigUint) -> String {
    let s = v.to_string();
    if s.len() < 3 {
        return s;
    }
    let b = s.as_bytes();
    format!("{}.{}×10^{}", b[0] as char, b[1] as char, s.len() - 1)
}

/// Class counts as a table with rows `n` and columns `q`, followed by the
/// source of every bound.
pub fn render_class_table(ledgers: &[BoundsLedger]) -> String {
    let mut out = String::from("Equivalence classes of (n,n-1)_q MDS codes\n");
    let ns: Vec<usize> = {
        let mut v: Vec<usize> = ledgers.iter().flat_map(|l| l.rows.keys().copied()).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let cell = |l: &BoundsLedger, n: usize| l.rows.get(&n).map(|r| r.classes.to_string()).unwrap_or_default();
    let width =
        ledgers.iter().flat_map(|l| ns.iter().map(move |&n| cell(l, n).chars().count())).max().unwrap_or(1).max(3) + 2;
    let _ = write!(out, "{:>5}", "n\\q");
    for l in ledgers {
        let _ = write!(out, "{:>width$}", l.q);
    }
    out.push('\n');
    for &n in &ns {
        let _ = write!(out, "{n:>5}");
        for l in ledgers {
            let c = cell(l, n);
            let pad = width.saturating_sub(c.chars().count());
            let _ = write!(out, "{}{c}", " ".repeat(pad));
        }
        out.push('\n');
    }
    let mut notes = Vec::new();
    for l in ledgers {
        for r in l.rows.values() {
            if r.source != BoundSource::Classified {
                notes.push(format!("  q={} n={}: {}", l.q, r.n, r.source));
            }
        }
    }
    if !notes.is_empty() {
        out.push_str("bounds:\n");
        for line in notes {
            out.push_str(&line);
            out.push('\n');
        }
    }
    out
}

/// One TSV row per cell: `q, n, exact, classes, labeled, source`, with full
/// integer values.
pub fn class_table_tsv(ledgers: &[BoundsLedger]) -> String {
    let mut out = String::from("q\tn\texact\tclasses\tlabeled\tsource\n");
    for l in ledgers {
        for r in l.rows.values() {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}",
                l.q,
                r.n,
                if r.classes.is_exact() { "yes" } else { "no" },
                r.classes.value(),
                r.labeled.value(),
                r.source
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn latin_count(q: usize, reduced: u64) -> BigUint {
        BigUint::from(reduced) * factorial(q) * factorial(q - 1)
    }

    #[test]
    fn latin_counts_match_reduced_counts() {
        for (q, reduced, classes) in [(3, 1, 1), (4, 4, 2), (5, 56, 2), (6, 9408, 12)] {
            assert_eq!(latin_square_counts(q).unwrap(), (latin_count(q, reduced), classes));
        }
    }

    #[test]
    fn double_exponential_values() {
        assert_eq!(double_exponential_lower_bound(4, 3).unwrap(), BigUint::from(16u32));
        assert_eq!(double_exponential_lower_bound(5, 3).unwrap(), BigUint::from(4u32));
        assert_eq!(double_exponential_lower_bound(8, 4).unwrap(), BigUint::one() << 64);
        for n in 2..8 {
            assert_eq!(double_exponential_lower_bound(4, n).unwrap(), BigUint::one() << (1usize << (n - 1)));
        }
        // (2·4/4)^(3/2) = 2√2, floored to 2
        assert_eq!(double_exponential_lower_bound(5, 4).unwrap(), BigUint::from(4u32));
        assert!(double_exponential_lower_bound(3, 3).is_err());
    }

    #[test]
    fn class_bound_rounds_up() {
        let g = group_order(4, 5);
        assert_eq!(class_lower_bound(5, 4, &g), BigUint::one());
        assert_eq!(class_lower_bound(5, 4, &(&g + 1u32)), BigUint::from(2u32));
        assert_eq!(class_lower_bound(5, 4, &BigUint::zero()), BigUint::zero());
    }

    #[test]
    fn single_split() {
        let known = BTreeMap::from([(3, BigUint::from(576u32))]);
        let (b, at) = split_lower_bound(4, 4, &known).unwrap();
        assert_eq!((b, at), (BigUint::from(576u32 * 576 / 24), 3));
        assert!(split_lower_bound(4, 5, &known).is_err());
    }

    #[test]
    fn split_is_monotone_in_known_values() {
        let mut known = BTreeMap::from([(3, BigUint::from(576u32))]);
        known.insert(4, BigUint::from(13_824u32));
        let (small, _) = split_lower_bound(4, 5, &known).unwrap();
        known.insert(4, BigUint::from(55_296u32));
        let (large, _) = split_lower_bound(4, 5, &known).unwrap();
        assert!(large >= small);
    }

    #[test]
    fn order_seven_four_dimensional_bound() {
        let exact = BTreeMap::from([(3, (latin_count(7, 16_942_080), 147))]);
        let l = bounds_ledger(7, 7, &exact).unwrap();
        assert_eq!(l.rows[&4].source, BoundSource::Split { first: 3 });
        assert_eq!(l.rows[&4].classes.to_string(), "≥ 4.8×10^7");
        assert_eq!(l.rows[&5].classes.to_string(), "≥ 2.3×10^13");
    }

    #[test]
    fn lower_bounds_stay_below_classified_values() {
        // q=4: N_3 = 576, N_4 = 55296, N_5 = 36972288
        let full = BTreeMap::from([
            (3, (latin_count(4, 4), 2)),
            (4, (BigUint::from(55_296u32), 5)),
            (5, (BigUint::from(36_972_288u32), 26)),
        ]);
        for drop in [4, 5] {
            let mut partial = full.clone();
            partial.retain(|&n, _| n < drop);
            let l = bounds_ledger(4, 5, &partial).unwrap();
            assert!(l.rows[&drop].labeled.value() <= &full[&drop].0);
            assert!(l.rows[&drop].classes.value() <= &BigUint::from(full[&drop].1));
        }
    }

    #[test]
    fn exact_values_are_sandwiched() {
        let bad = BTreeMap::from([(3, (BigUint::from(1u32), 2))]);
        assert!(bounds_ledger(4, 3, &bad).is_err());
    }

    #[test]
    fn figures_round_down() {
        assert_eq!(two_figures_down(&BigUint::from(48_427_895u32)), "4.8×10^7");
        assert_eq!(two_figures_down(&BigUint::from(1_999u32)), "1.9×10^3");
        assert_eq!(two_figures_down(&BigUint::from(86u32)), "86");
    }
}

//! Class-count and extendability tables over a registry root.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::symmetry::canonical_form;

use super::registry::Registry;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub value: usize,
    /// Obtained by the partition search rather than by a cited classification.
    pub new: bool,
}

#[derive(Clone, Debug, Default)]
pub struct Tables {
    pub q: usize,
    /// Classes of nontrivial `(n,k)_q` codes, keyed by `(n,k)`.
    pub classes: BTreeMap<(usize, usize), Cell>,
    /// Classes admitting at least one extension.
    pub extendable: BTreeMap<(usize, usize), Cell>,
}

/// Parameters of every registry stored for alphabet `q`.
pub fn registry_params(root: &Path, q: usize) -> Result<Vec<(usize, usize)>> {
    let dir = root.join(q.to_string());
    if !dir.is_dir() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for e in fs::read_dir(&dir).map_err(|e| Error::io(&dir, e))? {
        let name = e.map_err(|e| Error::io(&dir, e))?.file_name().to_string_lossy().into_owned();
        let Some((n, k)) = name.split_once('_') else { continue };
        if let (Ok(n), Ok(k)) = (n.parse(), k.parse()) {
            if Registry::exists(root, q, n, k) {
                out.push((n, k));
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Distinct classes among all punctures of the representatives.
fn punctured_classes(reg: &Registry) -> Result<usize> {
    let mut certs = BTreeSet::new();
    for r in &reg.records {
        for pos in 0..reg.n {
            certs.insert(canonical_form(&r.rep.puncture(pos)?).cert);
        }
    }
    Ok(certs.len())
}

/// Builds both tables from the registries under `root`.
///
/// A class is extendable iff it is equivalent to a puncture of a longer
/// code, so cells without their own partition search are read off the
/// registry one coordinate longer when that one exists.
pub fn tables(root: &Path, q: usize) -> Result<Tables> {
    let params = registry_params(root, q)?;
    let regs: BTreeMap<(usize, usize), Registry> = params
        .iter()
        .map(|&(n, k)| Ok(((n, k), Registry::load(root, q, n, k)?.expect("listed registry"))))
        .collect::<Result<_>>()?;
    let mut t = Tables { q, ..Default::default() };
    for (&(n, k), reg) in &regs {
        if k < 2 || n <= k {
            continue;
        }
        let d = n - k + 1;
        let generated = reg.source.starts_with("extension");
        t.classes.insert((n, k), Cell { value: reg.records.len(), new: generated && k >= 3 && d >= 4 && n <= q + 1 });
    }
    let mut ext_params: BTreeSet<(usize, usize)> = BTreeSet::new();
    for &(n, k) in regs.keys() {
        ext_params.insert((n, k));
        if n > 1 {
            ext_params.insert((n - 1, k));
        }
    }
    for (n, k) in ext_params {
        if k < 2 || n <= k {
            continue;
        }
        let d = n - k + 1;
        let cell = match (regs.get(&(n, k)), regs.get(&(n + 1, k))) {
            (Some(reg), _) if reg.is_extended() && !reg.records.is_empty() => Cell {
                value: reg.records.iter().filter(|r| r.extendable() == Some(true)).count(),
                new: k >= 3 && d >= 3 && n <= q,
            },
            (_, Some(longer)) => Cell { value: punctured_classes(longer)?, new: false },
            _ => continue,
        };
        t.extendable.insert((n, k), cell);
    }
    Ok(t)
}

fn render_one(title: &str, cells: &BTreeMap<(usize, usize), Cell>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{title}");
    if cells.is_empty() {
        let _ = writeln!(out, "(no registries)");
        return out;
    }
    let ks: BTreeSet<usize> = cells.keys().map(|&(_, k)| k).collect();
    let ns: BTreeSet<usize> = cells.keys().map(|&(n, _)| n).collect();
    let (kmin, kmax) = (*ks.first().unwrap(), *ks.last().unwrap());
    let width = cells.values().map(|c| c.value.to_string().len()).max().unwrap_or(1).max(3) + 2;
    let _ = write!(out, "{:>5}", "n\\k");
    for k in kmin..=kmax {
        let _ = write!(out, "{k:>width$}");
    }
    let _ = writeln!(out, "  new");
    for n in ns {
        let _ = write!(out, "{n:>5}");
        let mut new = Vec::new();
        for k in kmin..=kmax {
            match cells.get(&(n, k)) {
                Some(c) => {
                    let _ = write!(out, "{:>width$}", c.value);
                    if c.new {
                        new.push(format!("k={k}"));
                    }
                }
                None => {
                    let _ = write!(out, "{:>width$}", "");
                }
            }
        }
        let _ = writeln!(out, "  {}", new.join(","));
    }
    out
}

/// Both tables as aligned text: rows `n`, columns `k`, and a `new` column
/// naming the cells obtained by the partition search.
pub fn render_tables(t: &Tables) -> String {
    let mut out = render_one(&format!("Inequivalent extendable nontrivial (n,k)_{} MDS codes", t.q), &t.extendable);
    out.push('\n');
    out.push_str(&render_one(&format!("Equivalence classes of nontrivial (n,k)_{} MDS codes", t.q), &t.classes));
    out
}

/// Both tables as TSV rows `table, n, k, value, new`.
pub fn tables_tsv(t: &Tables) -> String {
    let mut out = String::from("table\tn\tk\tvalue\tnew\n");
    for (name, cells) in [("extendable", &t.extendable), ("classes", &t.classes)] {
        for (&(n, k), c) in cells {
            let _ = writeln!(out, "{name}\t{n}\t{k}\t{}\t{}", c.value, if c.new { "yes" } else { "no" });
        }
    }
    out
}

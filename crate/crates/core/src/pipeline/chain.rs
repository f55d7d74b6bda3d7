//! Chains of extension steps, `(n,k) → (n+1,k) → …`, for every dimension.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::{info, warn};
use num_bigint::BigUint;

use crate::code::Code;
use crate::error::{Error, Result};
use crate::format::read_code_file;
use crate::linear::{is_linear_equivalent, rs_code, Field, DEFAULT_LINEAR_CAP};
use crate::symmetry::canonical_form;

use super::latin::{classify_latin_squares, MAX_LATIN_ORDER};
use super::partitions::PartsDb;
use super::registry::{Provenance, Registry};
use super::step::{extension_step, StepOptions};

/// How the `k = 2` chain starts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum K2Bootstrap {
    /// From the full space `𝒜²`, whose extensions are all Latin squares.
    Trivial,
    /// From the classified Latin squares of order `q`.
    Latin,
}

/// Where chains of dimension `k ≥ 3` find their `d = 3` starting codes when
/// the full space is out of reach.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeedSource {
    None,
    /// One Reed–Solomon code per dimension, for alphabets whose `d = 3`
    /// classes are known to be unique.
    ReedSolomon,
    /// `.mds` files, grouped by parameters.
    Dir(PathBuf),
}

#[derive(Clone, Debug)]
pub struct ChainConfig {
    pub root: PathBuf,
    pub k2_bootstrap: K2Bootstrap,
    pub seeds: SeedSource,
    pub step: StepOptions,
    /// Recompute steps that are already recorded.
    pub force: bool,
    /// A chain may start from the full space `𝒜^k` only if there are at most
    /// this many labeled `(k,k-1)_q` codes (they all become candidates).
    pub trivial_cap: u64,
    pub max_k: usize,
    pub max_n: Option<usize>,
}

impl ChainConfig {
    pub fn new(q: usize, root: impl Into<PathBuf>) -> Self {
        ChainConfig {
            root: root.into(),
            k2_bootstrap: if q <= 5 { K2Bootstrap::Trivial } else { K2Bootstrap::Latin },
            seeds: SeedSource::ReedSolomon,
            step: StepOptions::default(),
            force: false,
            trivial_cap: 1 << 20,
            max_k: q,
            max_n: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct StepLog {
    pub from: (usize, usize),
    pub classes: usize,
    pub labeled: BigUint,
    pub seconds: f64,
    pub reused: bool,
}

#[derive(Clone, Debug, Default)]
pub struct ChainSummary {
    pub steps: Vec<StepLog>,
    pub notes: Vec<String>,
}

/// Sphere-packing bound: an `(n,k)_q` code with `d = n-k+1` has disjoint
/// balls of radius `⌊(d-1)/2⌋` around its `q^k` words.
pub fn sphere_packing_excludes(q: usize, n: usize, k: usize) -> bool {
    if k > n {
        return true;
    }
    let t = (n - k) / 2;
    let mut ball = BigUint::from(0u32);
    let mut binom = BigUint::from(1u32);
    for i in 0..=t {
        if i > 0 {
            binom = binom * (n - i + 1) / i;
        }
        ball += &binom * BigUint::from(q - 1).pow(i as u32);
    }
    BigUint::from(q).pow(k as u32) * ball > BigUint::from(q).pow(n as u32)
}

/// Builds a registry from seed codes of one parameter set after checking that
/// each is MDS, that no two are equivalent and, when asked, that each is
/// equivalent to a linear code.
pub fn ingest_seeds(codes: &[(String, Code)], verify_linear: bool) -> Result<Registry> {
    let (first_name, first) = codes.first().ok_or_else(|| Error::param("no seed codes given"))?;
    let p0 = first.is_mds();
    let (q, n, k) = (first.q(), first.n(), p0.k);
    let mut forms = Vec::new();
    let mut seen: BTreeMap<[u8; 32], &str> = BTreeMap::new();
    for (name, c) in codes {
        let p = c.is_mds();
        if !p.is_mds {
            return Err(Error::InvalidCode(format!("seed {name} is not an MDS code")));
        }
        if (c.q(), c.n(), p.k) != (q, n, k) {
            return Err(Error::InvalidCode(format!(
                "seed {name} is ({},{})_{} but {first_name} is ({n},{k})_{q}",
                c.n(),
                p.k,
                c.q()
            )));
        }
        if verify_linear {
            match is_linear_equivalent(c, DEFAULT_LINEAR_CAP) {
                Ok(true) => {}
                Ok(false) => return Err(Error::InvalidCode(format!("seed {name} is not equivalent to a linear code"))),
                Err(Error::Inconclusive(msg)) => warn!("seed {name}: linearity not decided ({msg})"),
                Err(e) => return Err(e),
            }
        }
        let f = canonical_form(c);
        if let Some(other) = seen.insert(f.cert, name) {
            return Err(Error::InvalidCode(format!("seeds {other} and {name} are equivalent")));
        }
        forms.push(f);
    }
    let names: Vec<&str> = codes.iter().map(|(n, _)| n.as_str()).collect();
    Registry::from_forms(q, n, k, forms, format!("seed: {}", names.join(", ")), Provenance::SeedIngested)
}

/// Seed files in `dir` for alphabet `q`, grouped by `(n,k)`.
pub fn read_seed_dir(dir: &Path, q: usize) -> Result<BTreeMap<(usize, usize), Vec<(String, Code)>>> {
    let mut groups: BTreeMap<(usize, usize), Vec<(String, Code)>> = BTreeMap::new();
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "mds"))
        .collect();
    paths.sort();
    for p in paths {
        let c = read_code_file(&p)?;
        if c.q() != q {
            continue;
        }
        let prof = c.is_mds();
        let name = p.file_name().unwrap().to_string_lossy().into_owned();
        if !prof.is_mds {
            return Err(Error::InvalidCode(format!("seed {name} is not an MDS code")));
        }
        groups.entry((c.n(), prof.k)).or_default().push((name, c));
    }
    Ok(groups)
}

fn load(root: &Path, q: usize, n: usize, k: usize) -> Result<Option<Registry>> {
    Registry::load(root, q, n, k)
}

fn require(root: &Path, q: usize, n: usize, k: usize) -> Result<Registry> {
    load(root, q, n, k)?.ok_or_else(|| Error::Dependency(format!("registry ({n},{k})_{q} is missing")))
}

/// Chooses and records the first registry of the dimension-`k` chain;
/// returns its length, or `None` when the chain has nothing to extend.
fn start_chain(q: usize, k: usize, cfg: &ChainConfig, summary: &mut ChainSummary) -> Result<Option<usize>> {
    let root = &cfg.root;
    let seeds = match &cfg.seeds {
        SeedSource::Dir(d) => read_seed_dir(d, q)?,
        _ => BTreeMap::new(),
    };
    let seed_group = seeds.iter().find(|((_, sk), _)| *sk == k);
    let save_new = |reg: Registry| -> Result<usize> {
        let n = reg.n;
        if cfg.force || !Registry::exists(root, q, n, k) {
            reg.save(root)?;
        }
        Ok(n)
    };
    if let Some(((n, _), codes)) = seed_group {
        if cfg.force || !Registry::exists(root, q, *n, k) {
            info!("ingesting {} seed(s) for ({n},{k})_{q}", codes.len());
            ingest_seeds(codes, q == 7 && *n == k + 2)?.save(root)?;
        }
        return Ok(Some(*n));
    }
    if k == 2 {
        return bootstrap(q, cfg.k2_bootstrap, root, cfg.force).map(|r| Some(r.n));
    }
    // a code of dimension k with d >= 3 shortens to one of dimension k-1 with d >= 3
    let below = load(root, q, k + 1, k - 1)?;
    if below.is_none_or(|r| r.records.is_empty()) {
        summary.notes.push(format!("k={k}: no ({},{})_{q} codes, so no codes with d >= 3", k + 1, k - 1));
        return Ok(None);
    }
    let trivial_ok = match (load(root, q, k - 1, k - 1)?, load(root, q, k, k - 1)?) {
        (Some(base), Some(hyper)) => base.is_extended() && hyper.labeled_total()? <= BigUint::from(cfg.trivial_cap),
        _ => false,
    };
    if trivial_ok {
        return save_new(full_space_registry(q, k)?).map(Some);
    }
    if cfg.seeds == SeedSource::ReedSolomon && k + 2 <= q + 1 && Field::new(q).is_ok() {
        let rs = rs_code(q, k + 2, k)?;
        let reg = ingest_seeds(&[(format!("rs({q},{},{k})", k + 2), rs)], false)?;
        summary.notes.push(format!("k={k}: started from the Reed-Solomon ({},{k})_{q} code", k + 2));
        return save_new(reg).map(Some);
    }
    if sphere_packing_excludes(q, k + 2, k) {
        let reg = Registry::empty(q, k + 2, k, "excluded by the sphere-packing bound", Provenance::Generated);
        save_new(reg)?;
        summary.notes.push(format!("k={k}: ({},{k})_{q} codes are excluded by the sphere-packing bound", k + 2));
        return Ok(None);
    }
    summary.notes.push(format!("k={k}: no starting registry (provide seeds with d=3)"));
    Ok(None)
}

/// Records the first registry of the `k = 2` chain (the full space `𝒜²` or
/// the classified Latin squares) unless it is already stored.
pub fn bootstrap(q: usize, how: K2Bootstrap, root: &Path, force: bool) -> Result<Registry> {
    let n = match how {
        K2Bootstrap::Trivial => 2,
        K2Bootstrap::Latin => 3,
    };
    if !force {
        if let Some(reg) = load(root, q, n, 2)? {
            return Ok(reg);
        }
    }
    let reg = match how {
        K2Bootstrap::Trivial => full_space_registry(q, 2)?,
        K2Bootstrap::Latin => {
            if q > MAX_LATIN_ORDER {
                return Err(Error::SeedRequired(q));
            }
            let t = Instant::now();
            let lc = classify_latin_squares(q)?;
            info!(
                "classified Latin squares of order {q}: {} classes from {} reduced squares ({:.1}s)",
                lc.registry.records.len(),
                lc.reduced_count,
                t.elapsed().as_secs_f64()
            );
            lc.registry
        }
    };
    reg.save(root)?;
    Ok(reg)
}

/// Re-checks every registry under `root`: representatives, automorphism
/// orders and partitions, and the double count of every stored step.
/// Returns the labels checked.
pub fn verify_root(root: &Path) -> Result<Vec<String>> {
    let mut qs: Vec<usize> = fs::read_dir(root)
        .map_err(|e| Error::io(root, e))?
        .filter_map(|e| e.ok()?.file_name().to_str()?.parse().ok())
        .collect();
    qs.sort_unstable();
    let mut checked = Vec::new();
    for q in qs {
        for (n, k) in super::report::registry_params(root, q)? {
            let dir = Registry::dir(root, q, n, k);
            let located = |e: Error| Error::Verify(format!("{}: {e}", dir.display()));
            let reg = require(root, q, n, k).map_err(located)?;
            reg.verify().map_err(located)?;
            if reg.is_extended() {
                if let Some(next) = load(root, q, n + 1, k).map_err(located)? {
                    let report = super::step::consistency_check(&reg, &next).map_err(located)?;
                    if !report.pass() {
                        return Err(located(Error::Consistency {
                            step: format!("{} -> {}", reg.label(), next.label()),
                            lhs: report.lhs,
                            rhs: report.rhs,
                        }));
                    }
                }
            }
            checked.push(format!("{} ({} classes)", reg.label(), reg.records.len()));
        }
    }
    Ok(checked)
}

fn full_space_registry(q: usize, k: usize) -> Result<Registry> {
    let c = Code::full_space(q, k)?;
    Registry::from_forms(q, k, k, [canonical_form(&c)], "full space", Provenance::Generated)
}

/// Runs every chain for alphabet `q`, extending each until no codes remain.
/// Completed steps found under the root are reused unless `force` is set.
pub fn run_chain(q: usize, cfg: &ChainConfig) -> Result<ChainSummary> {
    let root = &cfg.root;
    let mut summary = ChainSummary::default();
    for k in 2..=cfg.max_k {
        let Some(mut n) = start_chain(q, k, cfg, &mut summary)? else {
            break;
        };
        loop {
            if cfg.max_n.is_some_and(|m| n + 1 > m) {
                break;
            }
            let mut reg = require(root, q, n, k)?;
            if reg.records.is_empty() {
                break;
            }
            if !cfg.force && reg.is_extended() {
                if let Some(next) = load(root, q, n + 1, k)? {
                    summary.steps.push(StepLog {
                        from: (n, k),
                        classes: next.records.len(),
                        labeled: next.labeled_total()?,
                        seconds: 0.0,
                        reused: true,
                    });
                    n += 1;
                    continue;
                }
            }
            let lower = if k > 2 { Some(require(root, q, n - 1, k - 1)?) } else { None };
            let db = lower.as_ref().map(PartsDb::from_registry).transpose()?;
            let t = Instant::now();
            let next = extension_step(&mut reg, db.as_ref(), &cfg.step)?;
            let seconds = t.elapsed().as_secs_f64();
            info!("{} -> {}: {} classes ({seconds:.2}s)", reg.label(), next.label(), next.records.len());
            next.save(root)?;
            reg.save(root)?;
            summary.steps.push(StepLog {
                from: (n, k),
                classes: next.records.len(),
                labeled: next.labeled_total()?,
                seconds,
                reused: false,
            });
            n += 1;
        }
    }
    Ok(summary)
}

/// Runs the single step `(n,k) → (n+1,k)` over existing registries.
pub fn run_step(q: usize, n: usize, k: usize, root: &Path, opts: &StepOptions) -> Result<Registry> {
    let mut reg = require(root, q, n, k)?;
    let lower = if k > 2 { Some(require(root, q, n - 1, k - 1)?) } else { None };
    let db = lower.as_ref().map(PartsDb::from_registry).transpose()?;
    let next = extension_step(&mut reg, db.as_ref(), opts)?;
    next.save(root)?;
    reg.save(root)?;
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_packing() {
        assert!(sphere_packing_excludes(7, 9, 7));
        assert!(!sphere_packing_excludes(7, 9, 6));
        assert!(sphere_packing_excludes(5, 7, 5));
        assert!(!sphere_packing_excludes(7, 8, 6));
    }
}

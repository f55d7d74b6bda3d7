use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::symmetry::{canonical_form, group_order};

use super::partitions::{find_partitions, PartitionLimits, PartitionSet, PartsDb};
use super::registry::{Provenance, Registry};

#[derive(Clone, Debug, Default)]
pub struct StepOptions {
    pub limits: PartitionLimits,
    /// Worker threads; 0 uses the global pool.
    pub workers: usize,
}

/// Both sides of the double count for one extension step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConsistencyReport {
    /// `Σ_new |G_{n+1}| / |Aut|`
    pub lhs: BigUint,
    /// `q! · Σ_old |G_n| · N / |Aut|`
    pub rhs: BigUint,
}

impl ConsistencyReport {
    pub fn pass(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// Counts the labeled `(n+1,k)_q` codes two ways: from the new classes, and as
/// `q!` labelings of every partition of every labeled `(n,k)_q` code.
pub fn consistency_check(old: &Registry, new: &Registry) -> Result<ConsistencyReport> {
    if (new.q, new.n, new.k) != (old.q, old.n + 1, old.k) {
        return Err(Error::param(format!("{} does not extend {}", new.label(), old.label())));
    }
    let lhs = new.labeled_total()?;
    let g = group_order(old.n, old.q);
    let mut sum = BigUint::zero();
    for r in &old.records {
        let n = r
            .num_partitions()
            .ok_or_else(|| Error::Incomplete(format!("{} class {} has no partition count", old.label(), r.id)))?;
        if r.aut_order.is_zero() || !(&g % &r.aut_order).is_zero() {
            return Err(Error::Verify(format!("{} class {}: bad automorphism order", old.label(), r.id)));
        }
        sum += &g / &r.aut_order * n;
    }
    let fact: BigUint = (1..=old.q as u32).product();
    Ok(ConsistencyReport { lhs, rhs: sum * fact })
}

fn run_in_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::param(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(f))
}

/// Finds the partitions of every representative of `reg` (stored into its
/// records) and returns the registry of their extensions. The double count
/// must balance; otherwise nothing is changed and the step fails.
pub fn extension_step(reg: &mut Registry, db: Option<&PartsDb>, opts: &StepOptions) -> Result<Registry> {
    let sets: Vec<PartitionSet> = run_in_pool(opts.workers, || {
        reg.records.par_iter().map(|r| find_partitions(&r.rep, db, &opts.limits)).collect::<Result<Vec<_>>>()
    })??;
    let jobs: Vec<(usize, usize)> =
        sets.iter().enumerate().flat_map(|(ri, s)| (0..s.orbit_reps.len()).map(move |pi| (ri, pi))).collect();
    let forms = run_in_pool(opts.workers, || {
        jobs.par_iter()
            .map(|&(ri, pi)| canonical_form(&reg.records[ri].rep.extend_unchecked(&sets[ri].orbit_reps[pi])))
            .collect::<Vec<_>>()
    })?;
    let mut new = Registry::from_forms(
        reg.q,
        reg.n + 1,
        reg.k,
        forms,
        format!("extension of ({},{})", reg.n, reg.k),
        Provenance::Generated,
    )?;
    let mut trial = reg.clone();
    for (r, s) in trial.records.iter_mut().zip(sets) {
        r.partitions = Some(s);
    }
    let report = consistency_check(&trial, &new)?;
    if !report.pass() {
        return Err(Error::Consistency {
            step: format!("{} -> {}", reg.label(), new.label()),
            lhs: report.lhs,
            rhs: report.rhs,
        });
    }
    new.consistency = Some((report.lhs, report.rhs));
    *reg = trial;
    Ok(new)
}

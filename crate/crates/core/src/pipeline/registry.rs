//! Persistent per-`(q,n,k)` class registries.
//!
//! ```text
//! <root>/<q>/<n>_<k>/index.tsv              id, file, aut_order, num_partitions, extendable
//! <root>/<q>/<n>_<k>/<id>.mds               canonical representative
//! <root>/<q>/<n>_<k>/partitions/<id>.txt    one partition per line, parts separated by `|`
//! <root>/<q>/<n>_<k>/partitions/<id>.pool.txt   parts, one per line (only for partial listings)
//! <root>/<q>/<n>_<k>/ledger.txt             key=value totals and check results
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use num_traits::Zero;

use crate::code::{Code, LabeledPartition};
use crate::error::{Error, Result};
use crate::format::{read_code_file, write_code_file};
use crate::symmetry::{canonical_form, cert_of, group_order, CanonicalForm, Cert};

use super::partitions::PartitionSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Generated,
    SeedIngested,
}

impl Provenance {
    fn as_str(self) -> &'static str {
        match self {
            Provenance::Generated => "generated",
            Provenance::SeedIngested => "seed-ingested",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "generated" => Some(Provenance::Generated),
            "seed-ingested" => Some(Provenance::SeedIngested),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ClassRecord {
    pub id: usize,
    /// Canonical representative.
    pub rep: Code,
    pub cert: Cert,
    pub aut_order: BigUint,
    /// Filled once the step out of this registry has run.
    pub partitions: Option<PartitionSet>,
    pub provenance: Provenance,
}

impl ClassRecord {
    pub fn num_partitions(&self) -> Option<&BigUint> {
        self.partitions.as_ref().map(|p| &p.count)
    }

    pub fn extendable(&self) -> Option<bool> {
        self.num_partitions().map(|n| !n.is_zero())
    }
}

#[derive(Clone, Debug)]
pub struct Registry {
    pub q: usize,
    pub n: usize,
    pub k: usize,
    pub records: Vec<ClassRecord>,
    /// How the classes were obtained, e.g. `extension of (4,2)`.
    pub source: String,
    pub provenance: Provenance,
    /// The double-count check that admitted this registry, as `(lhs, rhs)`.
    pub consistency: Option<(BigUint, BigUint)>,
}

impl Registry {
    pub fn empty(q: usize, n: usize, k: usize, source: impl Into<String>, provenance: Provenance) -> Self {
        Registry { q, n, k, records: Vec::new(), source: source.into(), provenance, consistency: None }
    }

    /// Registry of the given canonical forms, ordered by certificate.
    pub fn from_forms(
        q: usize,
        n: usize,
        k: usize,
        forms: impl IntoIterator<Item = CanonicalForm>,
        source: impl Into<String>,
        provenance: Provenance,
    ) -> Result<Self> {
        let mut by_cert: BTreeMap<Cert, CanonicalForm> = BTreeMap::new();
        for f in forms {
            let p = f.canon.is_mds();
            if (f.canon.q(), f.canon.n()) != (q, n) || !p.is_mds || p.k != k {
                return Err(Error::InvalidCode(format!("class does not belong to ({n},{k})_{q}")));
            }
            if let Some(old) = by_cert.get(&f.cert) {
                if old.canon != f.canon {
                    return Err(Error::Verify("certificate collision between distinct codes".into()));
                }
            }
            by_cert.insert(f.cert, f);
        }
        let records = by_cert
            .into_values()
            .enumerate()
            .map(|(id, f)| ClassRecord {
                id,
                rep: f.canon,
                cert: f.cert,
                aut_order: f.aut_order,
                partitions: None,
                provenance,
            })
            .collect();
        let mut reg = Self::empty(q, n, k, source, provenance);
        reg.records = records;
        Ok(reg)
    }

    pub fn d(&self) -> usize {
        self.n + 1 - self.k
    }

    pub fn label(&self) -> String {
        format!("({},{})_{}", self.n, self.k, self.q)
    }

    /// Partitions are known for every record.
    pub fn is_extended(&self) -> bool {
        self.records.iter().all(|r| r.partitions.is_some())
    }

    /// `Σ |G_n| / |Aut|`, the number of labeled codes in all classes.
    pub fn labeled_total(&self) -> Result<BigUint> {
        let g = group_order(self.n, self.q);
        let mut total = BigUint::zero();
        for r in &self.records {
            if r.aut_order.is_zero() || !(&g % &r.aut_order).is_zero() {
                return Err(Error::Verify(format!(
                    "{} class {}: automorphism order {} does not divide |G_n| = {g}",
                    self.label(),
                    r.id,
                    r.aut_order
                )));
            }
            total += &g / &r.aut_order;
        }
        Ok(total)
    }

    pub fn dir(root: &Path, q: usize, n: usize, k: usize) -> PathBuf {
        root.join(q.to_string()).join(format!("{n}_{k}"))
    }

    pub fn exists(root: &Path, q: usize, n: usize, k: usize) -> bool {
        Self::dir(root, q, n, k).join("ledger.txt").is_file()
    }

    /// Writes the registry, replacing any previous copy.
    pub fn save(&self, root: &Path) -> Result<()> {
        let dir = Self::dir(root, self.q, self.n, self.k);
        let tmp = dir.with_extension("tmp");
        if tmp.exists() {
            fs::remove_dir_all(&tmp).map_err(|e| Error::io(&tmp, e))?;
        }
        let pdir = tmp.join("partitions");
        fs::create_dir_all(&pdir).map_err(|e| Error::io(&pdir, e))?;
        let mut index = String::from("id\tfile\taut_order\tnum_partitions\textendable\n");
        for r in &self.records {
            let file = format!("{}.mds", r.id);
            write_code_file(&tmp.join(&file), &r.rep, &[])?;
            let (np, ext) = match &r.partitions {
                Some(p) => (p.count.to_string(), if p.count.is_zero() { "no" } else { "yes" }.to_string()),
                None => ("-".into(), "-".into()),
            };
            let _ = writeln!(index, "{}\t{file}\t{}\t{np}\t{ext}", r.id, r.aut_order);
            if let Some(p) = &r.partitions {
                write_partitions(&pdir, r.id, p)?;
            }
        }
        let write = |name: &str, text: &str| {
            let path = tmp.join(name);
            fs::write(&path, text).map_err(|e| Error::io(&path, e))
        };
        write("index.tsv", &index)?;
        let mut ledger = String::new();
        let _ = writeln!(ledger, "q={}\nn={}\nk={}", self.q, self.n, self.k);
        let _ = writeln!(ledger, "classes={}", self.records.len());
        let _ = writeln!(ledger, "source={}", self.source);
        let _ = writeln!(ledger, "provenance={}", self.provenance.as_str());
        let _ = writeln!(ledger, "labeled_total={}", self.labeled_total()?);
        let _ = writeln!(ledger, "extended={}", if self.is_extended() { "yes" } else { "no" });
        if let Some((lhs, rhs)) = &self.consistency {
            let _ = writeln!(ledger, "consistency_lhs={lhs}\nconsistency_rhs={rhs}");
            let _ = writeln!(ledger, "consistency={}", if lhs == rhs { "pass" } else { "fail" });
        }
        write("ledger.txt", &ledger)?;
        if dir.exists() {
            fs::remove_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        }
        fs::rename(&tmp, &dir).map_err(|e| Error::io(&dir, e))
    }

    /// Reads a registry; `None` when absent. Totals are recomputed and compared
    /// with the ledger.
    pub fn load(root: &Path, q: usize, n: usize, k: usize) -> Result<Option<Registry>> {
        let dir = Self::dir(root, q, n, k);
        let ledger_path = dir.join("ledger.txt");
        if !ledger_path.is_file() {
            return Ok(None);
        }
        let ledger = read_kv(&ledger_path)?;
        let get = |key: &str| {
            ledger.get(key).cloned().ok_or_else(|| Error::Parse {
                path: ledger_path.display().to_string(),
                line: 0,
                msg: format!("missing `{key}`"),
            })
        };
        let bad = |path: &Path, line: usize, msg: String| Error::Parse { path: path.display().to_string(), line, msg };
        for (key, want) in [("q", q), ("n", n), ("k", k)] {
            if get(key)? != want.to_string() {
                return Err(bad(&ledger_path, 0, format!("`{key}` does not match the directory")));
            }
        }
        let provenance =
            Provenance::parse(&get("provenance")?).ok_or_else(|| bad(&ledger_path, 0, "bad provenance".into()))?;
        let index_path = dir.join("index.tsv");
        let index = fs::read_to_string(&index_path).map_err(|e| Error::io(&index_path, e))?;
        let mut records = Vec::new();
        for (ln, line) in index.lines().enumerate().skip(1) {
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 5 {
                return Err(bad(&index_path, ln + 1, "expected 5 columns".into()));
            }
            let id: usize = cols[0].parse().map_err(|_| bad(&index_path, ln + 1, "bad id".into()))?;
            if id != records.len() {
                return Err(bad(&index_path, ln + 1, "ids must be 0,1,2,...".into()));
            }
            let rep = read_code_file(&dir.join(cols[1]))?;
            let aut_order: BigUint = cols[2].parse().map_err(|_| bad(&index_path, ln + 1, "bad aut_order".into()))?;
            let partitions = if cols[3] == "-" {
                None
            } else {
                let set = read_partitions(&dir.join("partitions"), id)?;
                if set.count.to_string() != cols[3] {
                    return Err(bad(&index_path, ln + 1, "num_partitions disagrees with the partition file".into()));
                }
                Some(set)
            };
            let want_ext = match &partitions {
                Some(p) if p.count.is_zero() => "no",
                Some(_) => "yes",
                None => "-",
            };
            if cols[4] != want_ext {
                return Err(bad(&index_path, ln + 1, "extendable flag disagrees with num_partitions".into()));
            }
            records.push(ClassRecord { id, cert: cert_of(&rep), rep, aut_order, partitions, provenance });
        }
        let consistency = match (ledger.get("consistency_lhs"), ledger.get("consistency_rhs")) {
            (Some(l), Some(r)) => Some((
                l.parse().map_err(|_| bad(&ledger_path, 0, "bad consistency_lhs".into()))?,
                r.parse().map_err(|_| bad(&ledger_path, 0, "bad consistency_rhs".into()))?,
            )),
            _ => None,
        };
        let reg = Registry { q, n, k, records, source: get("source")?, provenance, consistency };
        if get("classes")? != reg.records.len().to_string() {
            return Err(bad(&ledger_path, 0, "class count disagrees with index.tsv".into()));
        }
        if get("labeled_total")? != reg.labeled_total()?.to_string() {
            return Err(Error::Verify(format!("{}: labeled total disagrees with the ledger", reg.label())));
        }
        Ok(Some(reg))
    }

    /// Full re-check: every representative is MDS with the right parameters
    /// and canonical, automorphism orders are exact, classes are distinct,
    /// listed partitions are valid and the stored double count balances.
    pub fn verify(&self) -> Result<()> {
        let label = self.label();
        let mut certs = std::collections::HashSet::new();
        for r in &self.records {
            let p = r.rep.is_mds();
            if (r.rep.q(), r.rep.n()) != (self.q, self.n) || !p.is_mds || p.k != self.k {
                return Err(Error::Verify(format!("{label} class {}: not an MDS code of these parameters", r.id)));
            }
            let f = canonical_form(&r.rep);
            if f.canon != r.rep {
                return Err(Error::Verify(format!("{label} class {}: representative is not canonical", r.id)));
            }
            if f.aut_order != r.aut_order {
                return Err(Error::Verify(format!(
                    "{label} class {}: stored automorphism order {} but computed {}",
                    r.id, r.aut_order, f.aut_order
                )));
            }
            if !certs.insert(f.cert) {
                return Err(Error::Verify(format!("{label} class {}: duplicate class", r.id)));
            }
            if let Some(set) = &r.partitions {
                if set.complete && BigUint::from(set.partitions.len()) != set.count {
                    return Err(Error::Verify(format!("{label} class {}: partition count mismatch", r.id)));
                }
                for p in &set.partitions {
                    LabeledPartition::new(p.clone())
                        .validate(&r.rep)
                        .map_err(|e| Error::Verify(format!("{label} class {}: {e}", r.id)))?;
                }
            }
        }
        if let Some((lhs, rhs)) = &self.consistency {
            if lhs != rhs {
                return Err(Error::Verify(format!("{label}: recorded double count {lhs} != {rhs}")));
            }
        }
        Ok(())
    }
}

fn read_kv(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect())
}

fn join_part(p: &[u32]) -> String {
    p.iter().map(u32::to_string).collect::<Vec<_>>().join(" ")
}

fn write_partitions(dir: &Path, id: usize, set: &PartitionSet) -> Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "# count={}", set.count);
    let _ = writeln!(out, "# listed={}", if set.complete { "all" } else { "orbit-representatives" });
    for p in &set.partitions {
        let blocks: Vec<String> = p.iter().map(|part| join_part(part)).collect();
        let _ = writeln!(out, "{}", blocks.join(" | "));
    }
    let path = dir.join(format!("{id}.txt"));
    fs::write(&path, out).map_err(|e| Error::io(&path, e))?;
    if !set.complete {
        let mut pool = String::new();
        for part in &set.pool {
            let _ = writeln!(pool, "{}", join_part(part));
        }
        let path = dir.join(format!("{id}.pool.txt"));
        fs::write(&path, pool).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

fn parse_part(s: &str, path: &Path, line: usize) -> Result<Vec<u32>> {
    s.split_whitespace()
        .map(|t| {
            t.parse::<u32>().map_err(|_| Error::Parse {
                path: path.display().to_string(),
                line,
                msg: format!("bad word index `{t}`"),
            })
        })
        .collect()
}

fn read_partitions(dir: &Path, id: usize) -> Result<PartitionSet> {
    let path = dir.join(format!("{id}.txt"));
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let mut count = None;
    let mut complete = None;
    let mut partitions = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        if let Some(c) = line.strip_prefix("# count=") {
            count = c.parse::<BigUint>().ok();
        } else if let Some(l) = line.strip_prefix("# listed=") {
            complete = Some(l == "all");
        } else if !line.starts_with('#') && !line.trim().is_empty() {
            let p = line.split('|').map(|b| parse_part(b, &path, ln + 1)).collect::<Result<Vec<_>>>()?;
            partitions.push(p);
        }
    }
    let (Some(count), Some(complete)) = (count, complete) else {
        return Err(Error::Parse { path: path.display().to_string(), line: 1, msg: "missing header".into() });
    };
    let pool = if complete {
        let set: std::collections::BTreeSet<Vec<u32>> = partitions.iter().flatten().cloned().collect();
        set.into_iter().collect()
    } else {
        let ppath = dir.join(format!("{id}.pool.txt"));
        let text = fs::read_to_string(&ppath).map_err(|e| Error::io(&ppath, e))?;
        text.lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(ln, l)| parse_part(l, &ppath, ln + 1))
            .collect::<Result<Vec<_>>>()?
    };
    let orbit_reps = if complete { Vec::new() } else { partitions.clone() };
    Ok(PartitionSet { count, partitions, complete, pool, orbit_reps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::partitions::{find_partitions, PartitionLimits};

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let c = Code::full_space(3, 2).unwrap();
        let mut reg = Registry::from_forms(3, 2, 2, [canonical_form(&c)], "full space", Provenance::Generated).unwrap();
        reg.records[0].partitions = Some(find_partitions(&c, None, &PartitionLimits::default()).unwrap());
        reg.save(dir.path()).unwrap();
        let back = Registry::load(dir.path(), 3, 2, 2).unwrap().unwrap();
        assert_eq!(back.records.len(), 1);
        let (a, b) = (back.records[0].partitions.as_ref().unwrap(), reg.records[0].partitions.as_ref().unwrap());
        assert_eq!((&a.count, &a.partitions, &a.pool), (&b.count, &b.partitions, &b.pool));
        assert_eq!(back.labeled_total().unwrap(), BigUint::from(1u32));
        back.verify().unwrap();
        assert!(Registry::load(dir.path(), 3, 3, 2).unwrap().is_none());
    }
}

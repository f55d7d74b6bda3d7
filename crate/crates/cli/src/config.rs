//! Run configuration: a TOML file merged under command-line flags.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use mds_atlas::pipeline::{ChainConfig, K2Bootstrap, PartitionLimits, SeedSource, StepOptions};
use mds_atlas::{Error, Result};

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum BootstrapMode {
    Latin,
    Trivial,
}

impl From<BootstrapMode> for K2Bootstrap {
    fn from(m: BootstrapMode) -> Self {
        match m {
            BootstrapMode::Latin => K2Bootstrap::Latin,
            BootstrapMode::Trivial => K2Bootstrap::Trivial,
        }
    }
}

/// Every key is optional; flags given on the command line win.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub q: Option<usize>,
    pub root: Option<PathBuf>,
    pub workers: Option<usize>,
    pub force: Option<bool>,
    pub bootstrap: Option<BootstrapMode>,
    pub seeds: Option<PathBuf>,
    /// Start chains from Reed-Solomon codes when no other start exists.
    pub rs_seeds: Option<bool>,
    pub store_cap: Option<u64>,
    pub cover_cap: Option<u64>,
    pub candidate_cap: Option<usize>,
    pub trivial_cap: Option<u64>,
    pub max_k: Option<usize>,
    pub max_n: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: RunConfig = toml::from_str(&text).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            line: 0,
            msg: e.message().to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Param(m));
        if let Some(q) = self.q {
            if !(2..=mds_atlas::code::MAX_Q).contains(&q) {
                return bad(format!("q must be between 2 and {}, got {q}", mds_atlas::code::MAX_Q));
            }
        }
        if self.workers.is_some_and(|w| w > 4096) {
            return bad("workers must be at most 4096".into());
        }
        for (name, v) in
            [("store_cap", self.store_cap), ("cover_cap", self.cover_cap), ("trivial_cap", self.trivial_cap)]
        {
            if v == Some(0) {
                return bad(format!("{name} must be positive"));
            }
        }
        if self.candidate_cap == Some(0) {
            return bad("candidate_cap must be positive".into());
        }
        if let (Some(k), Some(q)) = (self.max_k, self.q) {
            if k < 2 || k > q {
                return bad(format!("max_k must lie in 2..={q}"));
            }
        }
        Ok(())
    }

    pub fn step_options(&self) -> StepOptions {
        let d = PartitionLimits::default();
        StepOptions {
            limits: PartitionLimits {
                store_cap: self.store_cap.unwrap_or(d.store_cap),
                cover_cap: self.cover_cap.unwrap_or(d.cover_cap),
                candidate_cap: self.candidate_cap.unwrap_or(d.candidate_cap),
            },
            workers: self.workers.unwrap_or(0),
        }
    }

    pub fn chain_config(&self, q: usize, root: &Path) -> ChainConfig {
        let mut c = ChainConfig::new(q, root);
        if let Some(b) = self.bootstrap {
            c.k2_bootstrap = b.into();
        }
        c.seeds = match (&self.seeds, self.rs_seeds) {
            (Some(dir), _) => SeedSource::Dir(dir.clone()),
            (None, Some(false)) => SeedSource::None,
            (None, _) => SeedSource::ReedSolomon,
        };
        c.step = self.step_options();
        c.force = self.force.unwrap_or(false);
        if let Some(t) = self.trivial_cap {
            c.trivial_cap = t;
        }
        if let Some(k) = self.max_k {
            c.max_k = k;
        }
        c.max_n = self.max_n;
        c
    }
}

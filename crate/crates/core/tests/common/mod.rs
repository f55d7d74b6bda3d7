#![allow(dead_code)]

pub mod oracles;

use std::path::Path;

use mds_atlas::pipeline::{registry_params, run_chain, ChainConfig, Registry};
use tempfile::TempDir;

/// Runs every chain for `q` into a fresh directory.
pub fn build_atlas(q: usize) -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    run_chain(q, &ChainConfig::new(q, dir.path())).unwrap();
    dir
}

pub fn all_registries(root: &Path, q: usize) -> Vec<Registry> {
    registry_params(root, q)
        .unwrap()
        .into_iter()
        .map(|(n, k)| Registry::load(root, q, n, k).unwrap().unwrap())
        .collect()
}

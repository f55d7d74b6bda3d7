//! Classification by iterated extension: Latin-square bootstrap, partition
//! search, extension steps with isomorph rejection and double counting,
//! registries and chains.

pub mod chain;
pub mod latin;
pub mod partitions;
pub mod registry;
pub mod report;
pub mod step;

pub use chain::{bootstrap, run_chain, run_step, verify_root, ChainConfig, ChainSummary, K2Bootstrap, SeedSource};
pub use latin::{classify_latin_squares, count_reduced_latin_squares, LatinClassification};
pub use partitions::{find_partitions, initial_k2_partitions, PartitionLimits, PartitionSet, PartsDb};
pub use registry::{ClassRecord, Provenance, Registry};
pub use report::{registry_params, render_tables, tables, tables_tsv, Tables};
pub use step::{consistency_check, extension_step, ConsistencyReport, StepOptions};

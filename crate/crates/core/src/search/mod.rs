//! Exhaustive enumeration kernels: exact covers and transversal cliques.

pub mod bitset;
pub mod cliques;
pub mod exact_cover;

pub use bitset::BitSet;
pub use cliques::{count_partite_cliques, enumerate_partite_cliques, MultipartiteGraph};
pub use exact_cover::{
    count_exact_covers, enumerate_exact_covers, enumerate_exact_covers_with, ExactCoverInstance, DEFAULT_SET_CAP,
};

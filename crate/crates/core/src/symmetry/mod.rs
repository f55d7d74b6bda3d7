//! Code equivalence under coordinate and symbol permutations.

pub mod canon;
pub mod graph;
pub mod isometry;
pub mod labeling;

pub use canon::{
    automorphism_group, canonical_form, cert_hex, cert_of, find_isomorphism, group_elements, isometry_between,
    isometry_coset, CanonicalForm, Cert, IsometryCoset,
};
pub use graph::ColoredGraph;
pub use isometry::{group_order, Isometry};

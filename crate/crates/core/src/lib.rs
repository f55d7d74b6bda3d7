//! Classification of q-ary MDS codes up to equivalence by iterated extension.

pub mod bounds;
pub mod code;
pub mod error;
pub mod format;
pub mod linear;
pub mod pipeline;
pub mod search;
pub mod symmetry;

pub use code::{Code, LabeledPartition, MdsProfile};
pub use error::{Error, Result};

//! Proper colorings of random graphs: whitening to covers, clusters, cores,
//! and first-moment rate functions.

// `!(x >= 0.0)` style guards are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coloring;
pub mod core_builder;
pub mod covers;
pub mod error;
pub mod graph;
pub mod moments;
pub mod rng;
pub mod whitening;

pub use coloring::{count_proper, enumerate_proper, is_proper, Coloring};
pub use error::{Error, Result};
pub use graph::MultiGraph;
pub use whitening::{whiten, PartialColoring};

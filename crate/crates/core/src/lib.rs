//! All-pairs minimum cuts via Gomory-Hu cut trees, including a reduction
//! from graphs embedded on orientable surfaces to a family of annotated
//! planar instances whose cut trees are merged into one.

#![allow(clippy::needless_range_loop)]

pub mod api;
pub mod cuttree;
pub mod error;
pub mod flow;
pub mod generate;
pub mod genus;
pub mod graph;
pub mod homology;
pub mod hpath;
pub mod io;
pub mod merge;
pub mod oracle;
pub mod pipeline;
pub mod query;
pub mod weight;

pub use error::{Error, Result};
pub use graph::{EdgeSet, EmbeddedGraph, FaceSet};

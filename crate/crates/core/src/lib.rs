//! Analytics over a global ownership network built from shareholding records.
//!
//! Edges are stored in capital-flow orientation (subsidiary → shareholder), so a
//! node's in-degree counts the companies it owns and its out-degree counts its
//! shareholders. Structural statistics run over every link; key-company
//! identification runs over the substantial (≥ threshold %) view.

// `!(x > 0.0)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod community;
pub mod components;
pub mod error;
pub mod graph;
pub mod jurisdiction;
pub mod keyfirms;
pub mod mnc;
pub mod netstats;
pub mod pipeline;
pub mod synth;

pub use error::{Error, Result};
pub use graph::{
    Adjacency, Jurisdiction, NodeIx, NodeRecord, OwnershipEdge, OwnershipGraph, SubstantialView,
};

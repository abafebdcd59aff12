//! Software model of a heterogeneous-graph accelerator frontend.
//!
//! The crate covers four stages that sit in front of HGNN feature processing:
//!
//! - [`model`]: typed heterogeneous graphs, metapaths, semantic graphs, the
//!   on-disk graph format and a seeded synthetic generator.
//! - [`builder`]: a callback trie over vertex-type sequences that plans the
//!   composition of long metapaths from already materialized shorter ones,
//!   plus the boolean sparse join that composes them with cost counters.
//! - [`restructure`]: maximum bipartite matching (decoupling) and the
//!   backbone-based three-way edge partition (recoupling).
//! - [`sim`]: a fully associative LRU buffer replaying the neighbor
//!   aggregation access trace of original and restructured layouts.
//!
//! [`cli`] ties the stages together behind the `hetg` binary.

pub mod builder;
pub mod cli;
pub mod error;
pub mod model;
pub mod restructure;
pub mod sim;

pub use error::{Error, Result};
pub use model::{Csr, HetGraph, Metapath, Relation, SemanticGraph, VertexType};

//! Knowledge-base agnostic, deterministic entity linking.
//!
//! The crate is split along the two phases of the engine:
//!
//! * **Offline**: [`ingest`] parses an N-Triples knowledge base, builds the
//!   KB graph and harvests surface forms, person-name permutations, rare
//!   references, context documents and popularity scores. [`index`] turns
//!   that raw material into the five queryable indexes and persists them as
//!   a plain-text bundle directory.
//! * **Online**: [`candidate`] implements the tiered candidate search
//!   (acronym, label, stemmed label, context) with its filters, and
//!   [`disambiguation`] builds the per-document candidate graph, expands it
//!   into the KB by breadth-first search and scores it with HITS or
//!   PageRank. [`pipeline::Linker`] wires both into a document-level API,
//!   and [`eval`] scores linking runs against gold annotations.
//!
//! Everything is deterministic: identical inputs produce byte-identical
//! outputs regardless of thread count. The `parallel` feature (default on)
//! enables rayon-backed data parallelism for index builds and batch
//! linking; the sequential fallback produces the same bytes.

pub mod api;
pub mod candidate;
pub mod config;
pub mod disambiguation;
pub mod error;
pub mod eval;
pub(crate) mod exec;
pub mod index;
pub mod ingest;
pub mod pipeline;
pub mod text;

pub use api::{Document, LinkRequest, LinkResponse, Mention};
pub use config::LinkerConfig;
pub use error::Error;
pub use index::IndexBundle;
pub use ingest::Resource;
pub use pipeline::Linker;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

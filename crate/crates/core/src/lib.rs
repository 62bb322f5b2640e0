//! Walk-based knowledge graph embeddings.
//!
//! The crate is organized as a pipeline:
//!
//! - [`graph`] — N-Triples parsing into an indexed, immutable knowledge graph.
//! - [`walk`] — centered random walk generation, entity/predicate projections,
//!   and parallel corpus extraction.
//! - [`embed`] — word2vec-style training (skip-gram, CBOW, and their
//!   order-aware variants) with negative sampling.
//! - [`store`] — embedding persistence and queries (cosine, kNN, analogies).
//! - [`eval`] — task battery (classification, clustering, regression,
//!   analogies, relatedness, document similarity), a synthetic graph
//!   generator, and the multi-variant benchmark runner.

pub mod embed;
pub mod eval;
pub mod graph;
pub mod store;
pub mod util;
pub mod walk;

pub use embed::{ModelKind, TrainConfig};
pub use graph::{EntityId, KnowledgeGraph, ParseOptions, PredicateId, Triple};
pub use store::EmbeddingStore;
pub use walk::{Walk, WalkConfig, WalkKind};

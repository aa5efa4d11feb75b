//! Exhaustive searches: independence numbers, sub-tensor embeddings and
//! tri-colored sum-free sets.

mod bits;
pub mod embedding;
pub mod independence;
pub mod sumfree;

pub use embedding::{
    monomial_embedding_search, subtensor_embedding_search, EmbeddingOutcome, EmbeddingResult,
    EmbeddingWitness, MonomialOutcome, MonomialResult,
};
pub use independence::{
    exact_independence, independence_of_power, IndependenceResult, IndependenceWitness,
    PowerIndependence, SearchOptions, DEFAULT_NODE_BUDGET,
};
pub use sumfree::{extract_sumfree, sumfree_search, verify_sumfree, SumFreeSet};

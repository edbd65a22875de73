//! Embeddings for out-of-vocabulary words, composed from the two key words
//! of their dictionary definitions.

pub mod baselines;
pub mod datasets;
pub mod defparse;
pub mod denn;
pub mod embed_store;
pub mod eval;
pub mod wordnet;

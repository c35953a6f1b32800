//! Sentence-level emotion annotation toolkit.
//!
//! The crate covers the whole pipeline around a 19-label sentence annotation
//! scheme (presence, mode of expression, type and category of emotion):
//!
//! - [`labels`]: taxonomy and derivation rules.
//! - [`corpus`]: JSONL ingestion, segment merging, grouped splits, statistics.
//! - [`features`]: bag-of-tokens vectors and precomputed embeddings.
//! - [`classifiers`]: one-vs-rest linear SVM and gradient-boosted trees.
//! - [`lexicons`]: lexicon-driven annotation and polarity scoring.
//! - [`llm`]: conversational yes/no prompting of a chat-completion backend.
//! - [`eval`]: metrics, confusion matrices, agreement and cross tables.

pub mod classifiers;
pub mod corpus;
pub mod eval;
pub mod features;
pub mod labels;
pub mod lexicons;
pub mod llm;

pub use labels::{compose_vector, validate_vector, Category, EmotionType, Label, LabelVector, Mode, Task, NUM_LABELS};

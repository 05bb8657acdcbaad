//! Revision detection for document collections.
//!
//! Documents are parsed into a title / section / paragraph tree, compared with
//! word-vector distances (DTW over paragraphs, tree edit distance) or tf-idf
//! cosine, filtered, and linked into a revision network whose minimum
//! branching gives the detected `(original, revision)` pairs.

pub mod corpus;
pub mod distances;
pub mod embeddings;
pub mod evaluation;
pub mod pipeline;
pub mod simulator;

pub use corpus::{parse_document, Corpus, Document};
pub use distances::Measure;
pub use embeddings::EmbeddingTable;
pub use pipeline::{detect, PipelineConfig, Threshold};

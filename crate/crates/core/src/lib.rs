//! Noun-phrase chunking toolkit.
//!
//! The crate converts base-NP chunk structure to and from seven tag
//! representations ([`representation`]), reads and writes column corpora
//! ([`corpus`]), trains an IB1-IG memory-based classifier ([`mbl`]), runs
//! cascaded chunking experiments ([`cascade`]) and scores the results
//! ([`eval`]).
//!
//! Classification of test items and cross-validation folds run on rayon when
//! the `parallel` feature is enabled (the default). Without it every loop
//! runs sequentially and produces identical output.

pub mod cascade;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod mbl;
pub mod par;
pub mod representation;
pub mod synthetic;

pub use cascade::{
    chunk_sentences, cross_validate, run_experiment, ClassifierConfig, CombinationRun, CvSummary,
    ExperimentResult, Pairing, Prediction, StageConfig, StageInput, Target, WindowSpec,
};
pub use corpus::{parse_corpus, split_folds, write_corpus, ChunkSpan, Corpus, Sentence, Token};
pub use error::{Error, Result};
pub use eval::{score_chunks, score_tags, ChunkScore};
pub use mbl::{Classification, FeatureWeights, Instance, InstanceBase, Model, Weighting};
pub use representation::{Tag, TagScheme, TagSequence};

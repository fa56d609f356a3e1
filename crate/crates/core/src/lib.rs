//! Homonym sense disambiguation toolkit.
//!
//! The pipeline runs in four stages:
//!
//! 1. [`corpus`]: filter raw web text down to Mkhedruli-only lines, split it into
//!    sentences and cut homonym-centred windows of at most 13 tokens.
//! 2. [`embeddings`]: skip-gram word vectors trained with negative sampling.
//! 3. [`lstm`]: a two-layer LSTM that reads an embedded window and predicts the sense.
//! 4. [`eval`]: accuracy/confusion metrics, repeated seeded trainings and the
//!    training-size ablation, all emitted as one JSON document schema.
//!
//! The numeric code is generic over [`Scalar`] so the same forward and backward
//! passes run in `f32` for training and in `f64` for gradient checking. The aliases
//! below fix the precision used by the file formats.

pub mod corpus;
pub mod embeddings;
pub mod error;
pub mod eval;
pub mod lstm;
pub mod scalar;
pub mod synthetic;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Word vectors as stored on disk.
pub type EmbeddingMatrix = embeddings::Embeddings<f32>;
/// Double-precision embeddings, used by gradient checks.
pub type EmbeddingMatrix64 = embeddings::Embeddings<f64>;
/// The sense classifier as trained and serialized.
pub type LstmModel = lstm::LstmModel<f32>;
/// Double-precision classifier, used by gradient checks and oracles.
pub type LstmModel64 = lstm::LstmModel<f64>;

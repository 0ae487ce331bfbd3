//! Skip-gram-with-negative-sampling embeddings and word vector variance.
//!
//! [`train`] fits embeddings on a source corpus; [`continue_training`] keeps
//! the vocabulary frozen and trains further on a target corpus;
//! [`word_vector_variance`] measures how far the vectors moved. Smaller
//! variance means the two corpora surround the same words with more similar
//! contexts.

mod matrix;
mod train;

pub use matrix::EmbeddingMatrix;
pub use train::{continue_training, pair_update, train};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SgnsError {
    #[error("no token reaches the minimum count; vocabulary is empty")]
    EmptyVocabulary,
    #[error("target corpus shares no tokens with the frozen vocabulary")]
    NoSharedVocabulary,
    #[error("table length mismatch: expected {expected}, input {input}, context {context}")]
    ShapeMismatch {
        expected: usize,
        input: usize,
        context: usize,
    },
    #[error("embedding tables contain a non-finite entry")]
    NonFiniteEntry,
    #[error("matrices are bound to different vocabularies or dimensions")]
    VocabMismatch,
    #[error("token {0:?} is not in the vocabulary")]
    UnknownToken(String),
    #[error("token {0:?} has a zero-norm vector")]
    ZeroNormVector(String),
    #[error("vector file parse error at line {line}: {message}")]
    VectorParse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Skip-gram hyperparameters. Defaults follow the conventional word2vec
/// setting; `epochs = 5` is an explicit assumption recorded in reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SgnsHyperParams {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    /// Frequent-word subsampling threshold; 0 disables subsampling.
    pub subsample_threshold: f64,
    pub min_count: u64,
    /// Starting learning rate; decays linearly to `initial_lr * 1e-4`.
    pub initial_lr: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for SgnsHyperParams {
    fn default() -> Self {
        SgnsHyperParams {
            dim: 100,
            window: 5,
            negatives: 5,
            subsample_threshold: 1e-3,
            min_count: 5,
            initial_lr: 0.025,
            epochs: 5,
            seed: 0,
        }
    }
}

/// Word vector variance between a source-trained matrix and its
/// continuation-trained counterpart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WvvResult {
    pub value: f64,
    pub vocab_size: usize,
    pub dim: usize,
}

/// Mean squared per-entry difference of the input vectors.
///
/// Zero exactly when the matrices agree on every entry. The function itself
/// is symmetric; the measure's direction comes from the training protocol.
pub fn word_vector_variance(
    ws: &EmbeddingMatrix,
    wt: &EmbeddingMatrix,
) -> Result<WvvResult, SgnsError> {
    if ws.dim() != wt.dim() || ws.vocab().tokens() != wt.vocab().tokens() {
        return Err(SgnsError::VocabMismatch);
    }
    let mut sum = 0.0;
    for id in 0..ws.len() as u32 {
        for (a, b) in ws.input_row(id).iter().zip(wt.input_row(id)) {
            let diff = a - b;
            sum += diff * diff;
        }
    }
    Ok(WvvResult {
        value: sum / (ws.len() as f64 * ws.dim() as f64),
        vocab_size: ws.len(),
        dim: ws.dim(),
    })
}

/// Cosine similarity of two tokens' input vectors.
pub fn cosine_similarity(
    emb: &EmbeddingMatrix,
    token_a: &str,
    token_b: &str,
) -> Result<f64, SgnsError> {
    let a = emb
        .vector(token_a)
        .ok_or_else(|| SgnsError::UnknownToken(token_a.to_string()))?;
    let b = emb
        .vector(token_b)
        .ok_or_else(|| SgnsError::UnknownToken(token_b.to_string()))?;
    let norm_a: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let norm_b: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm_a == 0.0 {
        return Err(SgnsError::ZeroNormVector(token_a.to_string()));
    }
    if norm_b == 0.0 {
        return Err(SgnsError::ZeroNormVector(token_b.to_string()));
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    Ok(dot / (norm_a * norm_b))
}

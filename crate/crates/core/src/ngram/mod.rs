//! Interpolated modified Kneser-Ney n-gram language modeling.
//!
//! The pipeline is [`count_ngrams`] -> [`estimate_discounts`] ->
//! [`estimate_model`] -> [`perplexity`], with ARPA import/export in
//! [`arpa`] for persistence.

pub mod arpa;
mod counts;
mod discounts;
mod model;

pub use counts::{count_ngrams, count_ngrams_pruned, NGramCountTable};
pub use discounts::{estimate_discounts, DiscountSet, FALLBACK_DISCOUNTS};
pub use model::{
    estimate_model, perplexity, score_sentence, KNModel, PerplexityResult, SentencePerplexity,
    SentenceScore,
};

use std::collections::HashMap;

use thiserror::Error;

/// Begin-of-sentence marker. Context only; never a predicted event.
pub const BOS: &str = "<s>";
/// End-of-sentence marker; scored once per sentence.
pub const EOS: &str = "</s>";
/// Stand-in for out-of-vocabulary tokens.
pub const UNK: &str = "<unk>";

pub(crate) const BOS_ID: u32 = 0;
pub(crate) const EOS_ID: u32 = 1;
pub(crate) const UNK_ID: u32 = 2;

#[derive(Debug, Error)]
pub enum LmError {
    #[error("model order must be at least 1")]
    InvalidOrder,
    #[error("cannot build counts from an empty corpus")]
    EmptyCorpus,
    #[error("cannot score an empty sentence")]
    EmptySentence,
    #[error("cannot evaluate perplexity on an empty corpus")]
    EmptyTarget,
    #[error("corpus contains reserved marker token {0:?}")]
    ReservedToken(String),
    #[error("token {0:?} is out of vocabulary and the model has no <unk> entry")]
    NoUnkEntry(String),
    #[error(
        "conditional distribution for context {context:?} sums to {sum} (off by more than {tolerance})"
    )]
    Normalization {
        context: String,
        sum: f64,
        tolerance: f64,
    },
    #[error("ARPA parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Token <-> id mapping with the reserved markers pre-assigned.
#[derive(Debug, Clone)]
pub(crate) struct Interner {
    tokens: Vec<String>,
    index: HashMap<String, u32>,
}

impl Interner {
    pub(crate) fn new() -> Interner {
        let mut interner = Interner {
            tokens: Vec::new(),
            index: HashMap::new(),
        };
        for marker in [BOS, EOS, UNK] {
            let id = interner.tokens.len() as u32;
            interner.tokens.push(marker.to_string());
            interner.index.insert(marker.to_string(), id);
        }
        interner
    }

    /// Intern a corpus token, rejecting the reserved markers.
    pub(crate) fn intern(&mut self, token: &str) -> Result<u32, LmError> {
        if matches!(token, BOS | EOS | UNK) {
            return Err(LmError::ReservedToken(token.to_string()));
        }
        Ok(self.intern_unchecked(token))
    }

    /// Intern any token, including markers. Used by the ARPA importer where
    /// markers legitimately appear in entry lines.
    pub(crate) fn intern_unchecked(&mut self, token: &str) -> u32 {
        if let Some(&id) = self.index.get(token) {
            return id;
        }
        let id = self.tokens.len() as u32;
        self.tokens.push(token.to_string());
        self.index.insert(token.to_string(), id);
        id
    }

    pub(crate) fn id_of(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }

    pub(crate) fn token_of(&self, id: u32) -> &str {
        &self.tokens[id as usize]
    }
}

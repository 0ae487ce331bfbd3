//! Corpus ingestion, vocabularies, token capping and content-word filtering.

mod filter;
mod function_words;
mod tokenize;

pub use filter::{ContentWordFilter, PosTag};
pub use function_words::FUNCTION_WORDS;
pub use tokenize::{segment_sentences, tokenize, TokenizerConfig};

use std::collections::HashMap;
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hash::sha256_hex;
use crate::rng;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("token cap {max_tokens} is smaller than the longest sentence ({longest} tokens)")]
    CapBelowLongestSentence { max_tokens: u64, longest: usize },
    #[error("external POS mode requires an annotation stream")]
    MissingAnnotations,
    #[error("annotation stream has {annotations} tags for {tokens} tokens")]
    AnnotationLengthMismatch { tokens: usize, annotations: usize },
    #[error("corpus id {0:?} may only contain [A-Za-z0-9._-]")]
    InvalidId(String),
    #[error("empty sentence at index {0}")]
    EmptySentence(usize),
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// How raw text maps to sentences at ingestion time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IngestMode {
    /// One sentence per line; segmentation skipped.
    LinePerSentence,
    /// Raw text; sentence segmentation applied.
    Raw,
}

/// A tokenized, sentence-segmented corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    id: String,
    sentences: Vec<Vec<String>>,
    token_count: u64,
    source_descriptor: String,
}

/// Manifest emitted for an ingested corpus.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub id: String,
    pub token_count: u64,
    pub sentence_count: usize,
    pub sha256: String,
}

impl Corpus {
    /// Ingest raw text. Empty sentences are dropped.
    pub fn from_text(
        id: &str,
        text: &str,
        config: &TokenizerConfig,
        mode: IngestMode,
        source_descriptor: &str,
    ) -> Result<Corpus, CorpusError> {
        validate_id(id)?;
        let raw_sentences: Vec<String> = match mode {
            IngestMode::LinePerSentence => text.lines().map(|l| l.to_string()).collect(),
            IngestMode::Raw => segment_sentences(text),
        };
        let sentences: Vec<Vec<String>> = raw_sentences
            .iter()
            .map(|s| tokenize(s, config))
            .filter(|tokens| !tokens.is_empty())
            .collect();
        let token_count = sentences.iter().map(|s| s.len() as u64).sum();
        Ok(Corpus {
            id: id.to_string(),
            sentences,
            token_count,
            source_descriptor: source_descriptor.to_string(),
        })
    }

    /// Ingest a UTF-8 text file.
    pub fn from_file(
        id: &str,
        path: &Path,
        config: &TokenizerConfig,
        mode: IngestMode,
    ) -> Result<Corpus, CorpusError> {
        let text = std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Corpus::from_text(id, &text, config, mode, &path.display().to_string())
    }

    /// Build a corpus from already tokenized sentences.
    pub fn from_sentences(
        id: &str,
        sentences: Vec<Vec<String>>,
        source_descriptor: &str,
    ) -> Result<Corpus, CorpusError> {
        validate_id(id)?;
        if let Some(idx) = sentences.iter().position(|s| s.is_empty()) {
            return Err(CorpusError::EmptySentence(idx));
        }
        let token_count = sentences.iter().map(|s| s.len() as u64).sum();
        Ok(Corpus {
            id: id.to_string(),
            sentences,
            token_count,
            source_descriptor: source_descriptor.to_string(),
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn sentences(&self) -> &[Vec<String>] {
        &self.sentences
    }

    pub fn token_count(&self) -> u64 {
        self.token_count
    }

    pub fn sentence_count(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn source_descriptor(&self) -> &str {
        &self.source_descriptor
    }

    /// Canonical text form: tokens joined by single spaces, one sentence per
    /// line. The corpus digest is the SHA-256 of this form.
    pub fn normalized_text(&self) -> String {
        let mut out = String::new();
        for sentence in &self.sentences {
            out.push_str(&sentence.join(" "));
            out.push('\n');
        }
        out
    }

    /// Hex SHA-256 of the normalized text.
    pub fn digest(&self) -> String {
        sha256_hex(self.normalized_text().as_bytes())
    }

    pub fn manifest(&self) -> CorpusManifest {
        CorpusManifest {
            id: self.id.clone(),
            token_count: self.token_count,
            sentence_count: self.sentences.len(),
            sha256: self.digest(),
        }
    }
}

fn validate_id(id: &str) -> Result<(), CorpusError> {
    let ok = !id.is_empty()
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-'));
    if ok {
        Ok(())
    } else {
        Err(CorpusError::InvalidId(id.to_string()))
    }
}

/// One vocabulary entry: dense id plus corpus frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VocabEntry {
    pub id: u32,
    pub count: u64,
}

/// Token vocabulary with dense ids assigned by descending frequency, ties
/// broken lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    entries: HashMap<String, VocabEntry>,
    tokens: Vec<String>,
    total_tokens: u64,
}

impl Vocabulary {
    /// Collect the tokens of `corpus` with frequency >= `min_count`.
    ///
    /// `total_tokens` records all corpus tokens, including ones pruned by
    /// `min_count`.
    pub fn build(corpus: &Corpus, min_count: u64) -> Vocabulary {
        let mut counts: HashMap<&str, u64> = HashMap::new();
        for sentence in corpus.sentences() {
            for token in sentence {
                *counts.entry(token.as_str()).or_insert(0) += 1;
            }
        }
        let mut kept: Vec<(&str, u64)> = counts
            .into_iter()
            .filter(|(_, count)| *count >= min_count.max(1))
            .collect();
        kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        let mut entries = HashMap::with_capacity(kept.len());
        let mut tokens = Vec::with_capacity(kept.len());
        for (id, (token, count)) in kept.into_iter().enumerate() {
            entries.insert(token.to_string(), VocabEntry { id: id as u32, count });
            tokens.push(token.to_string());
        }
        Vocabulary {
            entries,
            tokens,
            total_tokens: corpus.token_count(),
        }
    }

    /// Build from parallel token/count lists, e.g. when loading persisted
    /// embeddings. Ids follow the given order.
    pub fn from_tokens_counts(pairs: Vec<(String, u64)>) -> Vocabulary {
        let total = pairs.iter().map(|(_, c)| *c).sum();
        let mut entries = HashMap::with_capacity(pairs.len());
        let mut tokens = Vec::with_capacity(pairs.len());
        for (id, (token, count)) in pairs.into_iter().enumerate() {
            entries.insert(token.clone(), VocabEntry { id: id as u32, count });
            tokens.push(token);
        }
        Vocabulary {
            entries,
            tokens,
            total_tokens: total,
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    pub fn get(&self, token: &str) -> Option<VocabEntry> {
        self.entries.get(token).copied()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.entries.contains_key(token)
    }

    pub fn id_of(&self, token: &str) -> Option<u32> {
        self.entries.get(token).map(|e| e.id)
    }

    pub fn token_of(&self, id: u32) -> &str {
        &self.tokens[id as usize]
    }

    /// Tokens in id order.
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    /// Frequencies indexed by id.
    pub fn counts_by_id(&self) -> Vec<u64> {
        let mut counts = vec![0; self.tokens.len()];
        for entry in self.entries.values() {
            counts[entry.id as usize] = entry.count;
        }
        counts
    }

    /// Number of this vocabulary's tokens that also occur in `other`.
    pub fn intersection_size(&self, other: &Vocabulary) -> usize {
        if self.len() <= other.len() {
            self.tokens.iter().filter(|t| other.contains(t)).count()
        } else {
            other.tokens.iter().filter(|t| self.contains(t)).count()
        }
    }
}

/// Downsample `corpus` to at most `max_tokens` tokens by seeded uniform
/// sampling of whole sentences.
///
/// A corpus already within budget is returned unchanged (which also makes the
/// operation idempotent). Otherwise the result keeps the original sentence
/// order, is deterministic for a fixed seed, and its token count lands in
/// `(max_tokens - longest_sentence, max_tokens]`.
pub fn cap_tokens(corpus: &Corpus, max_tokens: u64, seed: u64) -> Result<Corpus, CorpusError> {
    let longest = corpus.sentences().iter().map(Vec::len).max().unwrap_or(0);
    if (longest as u64) > max_tokens {
        return Err(CorpusError::CapBelowLongestSentence { max_tokens, longest });
    }
    if corpus.token_count() <= max_tokens {
        return Ok(corpus.clone());
    }
    let mut order: Vec<usize> = (0..corpus.sentence_count()).collect();
    order.shuffle(&mut rng::stream(seed, "sampling"));
    let mut selected = Vec::new();
    let mut budget = max_tokens;
    for idx in order {
        let len = corpus.sentences()[idx].len() as u64;
        if len <= budget {
            selected.push(idx);
            budget -= len;
        }
    }
    selected.sort_unstable();
    let sentences: Vec<Vec<String>> = selected
        .into_iter()
        .map(|idx| corpus.sentences()[idx].clone())
        .collect();
    Corpus::from_sentences(corpus.id(), sentences, corpus.source_descriptor())
}

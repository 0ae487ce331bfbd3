//! Content-word filtering for the TVcC measure.

use std::collections::HashSet;

use super::function_words::FUNCTION_WORDS;
use super::CorpusError;

/// Part-of-speech tag for externally annotated tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PosTag {
    Noun,
    Verb,
    Adjective,
    Other,
}

impl PosTag {
    fn is_content(self) -> bool {
        !matches!(self, PosTag::Other)
    }
}

#[derive(Debug, Clone)]
enum FilterMode {
    /// Drop tokens on the exclusion lexicon, plus purely non-alphabetic
    /// tokens (punctuation, numbers).
    Lexicon(HashSet<String>),
    /// Keep tokens tagged noun, verb or adjective in a caller-supplied
    /// annotation stream.
    ExternalPos,
}

/// Identifies content words, either by a function-word exclusion lexicon or
/// by externally supplied part-of-speech tags.
#[derive(Debug, Clone)]
pub struct ContentWordFilter {
    mode: FilterMode,
}

impl Default for ContentWordFilter {
    /// The bundled function-word lexicon.
    fn default() -> Self {
        ContentWordFilter::lexicon(FUNCTION_WORDS.iter().map(|w| w.to_string()))
    }
}

impl ContentWordFilter {
    /// A lexicon-mode filter with a custom exclusion list. Lexicon entries
    /// must be in the tokenizer's case convention.
    pub fn lexicon<I: IntoIterator<Item = String>>(words: I) -> Self {
        ContentWordFilter {
            mode: FilterMode::Lexicon(words.into_iter().collect()),
        }
    }

    /// A filter that trusts external part-of-speech annotations.
    pub fn external_pos() -> Self {
        ContentWordFilter {
            mode: FilterMode::ExternalPos,
        }
    }

    pub fn requires_annotations(&self) -> bool {
        matches!(self.mode, FilterMode::ExternalPos)
    }

    /// Keep the content words of `sentence`, preserving order.
    ///
    /// In external mode `annotations` must be present and aligned with the
    /// sentence; in lexicon mode it is ignored.
    pub fn filter(
        &self,
        sentence: &[String],
        annotations: Option<&[PosTag]>,
    ) -> Result<Vec<String>, CorpusError> {
        match &self.mode {
            FilterMode::Lexicon(lexicon) => Ok(sentence
                .iter()
                .filter(|token| !lexicon.contains(*token) && token.chars().any(char::is_alphabetic))
                .cloned()
                .collect()),
            FilterMode::ExternalPos => {
                let tags = annotations.ok_or(CorpusError::MissingAnnotations)?;
                if tags.len() != sentence.len() {
                    return Err(CorpusError::AnnotationLengthMismatch {
                        tokens: sentence.len(),
                        annotations: tags.len(),
                    });
                }
                Ok(sentence
                    .iter()
                    .zip(tags)
                    .filter(|(_, tag)| tag.is_content())
                    .map(|(token, _)| token.clone())
                    .collect())
            }
        }
    }
}

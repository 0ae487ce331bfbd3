//! Tokenization and sentence segmentation.

use serde::{Deserialize, Serialize};

/// Tokenizer settings.
///
/// Defaults match word2vec-style preprocessing: lowercased tokens with
/// punctuation split into standalone tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizerConfig {
    /// Case-fold the output.
    pub lowercase: bool,
    /// Emit punctuation characters as standalone tokens instead of leaving
    /// them attached to words.
    pub split_punctuation: bool,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        TokenizerConfig {
            lowercase: true,
            split_punctuation: true,
        }
    }
}

/// Split text into tokens.
///
/// Splits on Unicode whitespace. With `split_punctuation` on, every
/// non-alphanumeric character becomes its own token, so joining the output
/// preserves all non-whitespace characters. Empty input yields an empty
/// sequence.
pub fn tokenize(text: &str, config: &TokenizerConfig) -> Vec<String> {
    let mut tokens = Vec::new();
    for chunk in text.split_whitespace() {
        if config.split_punctuation {
            let mut run = String::new();
            for ch in chunk.chars() {
                if ch.is_alphanumeric() {
                    run.push(ch);
                } else {
                    if !run.is_empty() {
                        tokens.push(std::mem::take(&mut run));
                    }
                    tokens.push(ch.to_string());
                }
            }
            if !run.is_empty() {
                tokens.push(run);
            }
        } else {
            tokens.push(chunk.to_string());
        }
    }
    if config.lowercase {
        for token in &mut tokens {
            *token = token.to_lowercase();
        }
    }
    tokens
}

/// Split raw text into sentence strings.
///
/// A sentence ends at a newline or at terminal punctuation (`.`, `!`, `?`)
/// followed by whitespace. The terminator stays with its sentence. Empty
/// segments are dropped.
pub fn segment_sentences(text: &str) -> Vec<String> {
    let mut sentences = Vec::new();
    let mut current = String::new();
    let mut chars = text.chars().peekable();
    while let Some(ch) = chars.next() {
        if ch == '\n' {
            flush(&mut current, &mut sentences);
            continue;
        }
        current.push(ch);
        if matches!(ch, '.' | '!' | '?') && chars.peek().is_some_and(|next| next.is_whitespace()) {
            flush(&mut current, &mut sentences);
        }
    }
    flush(&mut current, &mut sentences);
    sentences
}

fn flush(current: &mut String, sentences: &mut Vec<String>) {
    let trimmed = current.trim();
    if !trimmed.is_empty() {
        sentences.push(trimmed.to_string());
    }
    current.clear();
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(lowercase: bool, split_punctuation: bool) -> TokenizerConfig {
        TokenizerConfig {
            lowercase,
            split_punctuation,
        }
    }

    #[test]
    fn empty_input_yields_empty_sequence() {
        assert!(tokenize("", &TokenizerConfig::default()).is_empty());
    }

    #[test]
    fn lowercases_tokens() {
        assert_eq!(tokenize("A b A", &cfg(true, false)), ["a", "b", "a"]);
    }

    #[test]
    fn splits_punctuation_into_standalone_tokens() {
        assert_eq!(
            tokenize("Aspirin, 100mg.", &cfg(true, true)),
            ["aspirin", ",", "100mg", "."]
        );
    }

    #[test]
    fn keeps_punctuation_attached_when_splitting_off() {
        assert_eq!(tokenize("Aspirin, 100mg.", &cfg(true, false)), ["aspirin,", "100mg."]);
    }

    #[test]
    fn segments_on_terminal_punctuation() {
        assert_eq!(segment_sentences("a. b!"), ["a.", "b!"]);
    }

    #[test]
    fn single_segment_without_terminator() {
        assert_eq!(
            segment_sentences("one line no terminator"),
            ["one line no terminator"]
        );
    }

    #[test]
    fn empty_text_has_no_sentences() {
        assert!(segment_sentences("").is_empty());
        assert!(segment_sentences("\n\n").is_empty());
    }

    #[test]
    fn newline_always_ends_a_sentence() {
        assert_eq!(segment_sentences("a b\nc d"), ["a b", "c d"]);
    }

    #[test]
    fn terminator_mid_token_does_not_split() {
        assert_eq!(segment_sentences("pH 7.4 is neutral"), ["pH 7.4 is neutral"]);
    }
}

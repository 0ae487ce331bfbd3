//! Embedding matrices and their text persistence.

use std::io::{BufRead, Write};

use rand::Rng;

use crate::corpus::Vocabulary;
use crate::rng;

use super::SgnsError;

/// Vocabulary-bound input and context vector tables.
///
/// Rows follow vocabulary ids. "Word vectors" in the conventional sense are
/// the input vectors; the context table exists for the training objective
/// and travels with the matrix so continued training resumes faithfully.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    vocab: Vocabulary,
    dim: usize,
    input: Vec<f64>,
    context: Vec<f64>,
}

impl EmbeddingMatrix {
    /// Seeded initialization: input vectors uniform in `[-0.5/dim, 0.5/dim)`,
    /// context vectors zero.
    pub fn init(vocab: Vocabulary, dim: usize, seed: u64) -> EmbeddingMatrix {
        let mut stream = rng::stream(seed, "init");
        let len = vocab.len() * dim;
        let mut input = Vec::with_capacity(len);
        for _ in 0..len {
            input.push((stream.random::<f64>() - 0.5) / dim as f64);
        }
        EmbeddingMatrix {
            vocab,
            dim,
            input,
            context: vec![0.0; len],
        }
    }

    /// Assemble a matrix from explicit tables. Lengths must match
    /// `vocab.len() * dim`; all entries must be finite.
    pub fn from_parts(
        vocab: Vocabulary,
        dim: usize,
        input: Vec<f64>,
        context: Vec<f64>,
    ) -> Result<EmbeddingMatrix, SgnsError> {
        let expected = vocab.len() * dim;
        if input.len() != expected || context.len() != expected {
            return Err(SgnsError::ShapeMismatch {
                expected,
                input: input.len(),
                context: context.len(),
            });
        }
        if input.iter().chain(&context).any(|v| !v.is_finite()) {
            return Err(SgnsError::NonFiniteEntry);
        }
        Ok(EmbeddingMatrix {
            vocab,
            dim,
            input,
            context,
        })
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vocab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocab.is_empty()
    }

    pub fn input_row(&self, id: u32) -> &[f64] {
        let start = id as usize * self.dim;
        &self.input[start..start + self.dim]
    }

    pub fn context_row(&self, id: u32) -> &[f64] {
        let start = id as usize * self.dim;
        &self.context[start..start + self.dim]
    }

    pub(super) fn tables_mut(&mut self) -> (&mut [f64], &mut [f64]) {
        (&mut self.input, &mut self.context)
    }

    /// Input vector of a token.
    pub fn vector(&self, token: &str) -> Option<&[f64]> {
        self.vocab.id_of(token).map(|id| self.input_row(id))
    }

    /// Write the standard text format: a `|V| dim` header line, then one
    /// `token v1 .. vd` line per word with 6-decimal values. Only input
    /// vectors are persisted.
    pub fn write_text<W: Write>(&self, writer: &mut W) -> std::io::Result<()> {
        writeln!(writer, "{} {}", self.vocab.len(), self.dim)?;
        for id in 0..self.vocab.len() as u32 {
            write!(writer, "{}", self.vocab.token_of(id))?;
            for value in self.input_row(id) {
                write!(writer, " {value:.6}")?;
            }
            writeln!(writer)?;
        }
        Ok(())
    }

    /// Read the text format written by [`EmbeddingMatrix::write_text`].
    ///
    /// The format carries no frequencies or context table, so the loaded
    /// vocabulary reports count 1 per token and the context table is zero.
    pub fn read_text<R: BufRead>(reader: R) -> Result<EmbeddingMatrix, SgnsError> {
        let mut lines = reader.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| SgnsError::VectorParse {
            line: 1,
            message: "empty input".to_string(),
        })?;
        let header = header?;
        let mut parts = header.split_whitespace();
        let parse_head = |field: Option<&str>, line: usize| {
            field
                .and_then(|f| f.parse::<usize>().ok())
                .ok_or_else(|| SgnsError::VectorParse {
                    line,
                    message: "header must be `<vocab> <dim>`".to_string(),
                })
        };
        let vocab_len = parse_head(parts.next(), 1)?;
        let dim = parse_head(parts.next(), 1)?;

        let mut tokens: Vec<(String, u64)> = Vec::with_capacity(vocab_len);
        let mut input = Vec::with_capacity(vocab_len * dim);
        for (idx, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let token = fields.next().expect("non-empty line has a first field");
            let mut row = 0;
            for field in fields {
                let value: f64 = field.parse().map_err(|_| SgnsError::VectorParse {
                    line: idx + 1,
                    message: format!("invalid component {field:?}"),
                })?;
                input.push(value);
                row += 1;
            }
            if row != dim {
                return Err(SgnsError::VectorParse {
                    line: idx + 1,
                    message: format!("expected {dim} components, found {row}"),
                });
            }
            tokens.push((token.to_string(), 1));
        }
        if tokens.len() != vocab_len {
            return Err(SgnsError::VectorParse {
                line: 1,
                message: format!("header declares {vocab_len} rows, found {}", tokens.len()),
            });
        }
        let context = vec![0.0; input.len()];
        EmbeddingMatrix::from_parts(Vocabulary::from_tokens_counts(tokens), dim, input, context)
    }
}

//! Content-addressed artifact cache.
//!
//! Language models and embeddings dominate runtime, so computed artifacts
//! are stored under keys derived from the input corpus digests and the
//! relevant configuration digest. Cached files are written atomically
//! (temp file plus rename) and at full float precision, so serving an
//! artifact from cache never changes downstream scores.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::Vocabulary;
use crate::ngram::{arpa, KNModel};
use crate::sgns::EmbeddingMatrix;

use super::{MeasureError, SimilarityScores};

const EMBEDDING_FORMAT: &str = "corsim-emb-v1";

#[derive(Debug, Clone)]
pub struct ArtifactCache {
    root: PathBuf,
}

#[derive(Serialize, Deserialize)]
struct EmbeddingFile {
    format: String,
    dim: usize,
    tokens: Vec<String>,
    counts: Vec<u64>,
    input: Vec<f64>,
    context: Vec<f64>,
}

impl ArtifactCache {
    pub fn open(root: impl Into<PathBuf>) -> Result<ArtifactCache, MeasureError> {
        let root = root.into();
        for sub in ["scores", "lm", "emb"] {
            fs::create_dir_all(root.join(sub)).map_err(|source| MeasureError::CacheIo {
                path: root.join(sub).display().to_string(),
                source,
            })?;
        }
        Ok(ArtifactCache { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn path(&self, kind: &str, key: &str, extension: &str) -> PathBuf {
        self.root.join(kind).join(format!("{key}.{extension}"))
    }

    fn write_atomic(&self, path: &Path, bytes: &[u8]) -> Result<(), MeasureError> {
        let io_err = |source| MeasureError::CacheIo {
            path: path.display().to_string(),
            source,
        };
        let tmp = path.with_extension("tmp");
        {
            let mut file = fs::File::create(&tmp).map_err(io_err)?;
            file.write_all(bytes).map_err(io_err)?;
        }
        fs::rename(&tmp, path).map_err(io_err)
    }

    pub fn load_scores(&self, key: &str) -> Option<SimilarityScores> {
        let text = fs::read_to_string(self.path("scores", key, "json")).ok()?;
        serde_json::from_str(&text).ok()
    }

    pub fn store_scores(&self, key: &str, scores: &SimilarityScores) -> Result<(), MeasureError> {
        let json = serde_json::to_string_pretty(scores).expect("scores serialize");
        self.write_atomic(&self.path("scores", key, "json"), json.as_bytes())
    }

    pub fn load_model(&self, key: &str) -> Option<KNModel> {
        let text = fs::read_to_string(self.path("lm", key, "arpa")).ok()?;
        arpa::import_arpa(&text).ok()
    }

    pub fn store_model(&self, key: &str, model: &KNModel) -> Result<(), MeasureError> {
        let text = arpa::export_arpa_string(model);
        self.write_atomic(&self.path("lm", key, "arpa"), text.as_bytes())
    }

    pub fn load_embedding(&self, key: &str) -> Option<EmbeddingMatrix> {
        let text = fs::read_to_string(self.path("emb", key, "json")).ok()?;
        let file: EmbeddingFile = serde_json::from_str(&text).ok()?;
        if file.format != EMBEDDING_FORMAT || file.tokens.len() != file.counts.len() {
            return None;
        }
        let vocab = Vocabulary::from_tokens_counts(
            file.tokens.into_iter().zip(file.counts).collect(),
        );
        EmbeddingMatrix::from_parts(vocab, file.dim, file.input, file.context).ok()
    }

    pub fn store_embedding(
        &self,
        key: &str,
        matrix: &EmbeddingMatrix,
    ) -> Result<(), MeasureError> {
        let vocab = matrix.vocab();
        let mut input = Vec::with_capacity(vocab.len() * matrix.dim());
        let mut context = Vec::with_capacity(vocab.len() * matrix.dim());
        for id in 0..vocab.len() as u32 {
            input.extend_from_slice(matrix.input_row(id));
            context.extend_from_slice(matrix.context_row(id));
        }
        let file = EmbeddingFile {
            format: EMBEDDING_FORMAT.to_string(),
            dim: matrix.dim(),
            tokens: vocab.tokens().to_vec(),
            counts: vocab.counts_by_id(),
            input,
            context,
        };
        let json = serde_json::to_string(&file).expect("embedding serialize");
        self.write_atomic(&self.path("emb", key, "json"), json.as_bytes())
    }
}

//! The four similarity measures for a source-target pair, plus per-target
//! source ranking.

mod cache;

pub use cache::ArtifactCache;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{cap_tokens, ContentWordFilter, Corpus, CorpusError, Vocabulary};
use crate::hash::sha256_hex;
use crate::ngram::{count_ngrams_pruned, estimate_discounts, estimate_model, perplexity};
use crate::rng::derive_seed;
use crate::sgns::{continue_training, train, word_vector_variance, SgnsHyperParams};

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("target vocabulary is empty")]
    EmptyTargetVocabulary,
    #[error("content-filtered target vocabulary is empty")]
    EmptyFilteredTargetVocabulary,
    #[error("{measure} failed: {source}")]
    Component {
        measure: &'static str,
        #[source]
        source: Box<dyn std::error::Error + Send + Sync>,
    },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("cannot rank an empty score list")]
    EmptyScores,
    #[error("scores mix targets {0:?} and {1:?}")]
    MixedTargets(String, String),
    #[error("source {source_id:?} has no {measure} value to rank by")]
    MissingMeasure { measure: Measure, source_id: String },
    #[error("cache i/o at {path}: {source}")]
    CacheIo {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn component(measure: &'static str, error: impl std::error::Error + Send + Sync + 'static) -> MeasureError {
    MeasureError::Component {
        measure,
        source: Box::new(error),
    }
}

/// The similarity measure families. PPL and WVV rank ascending (lower is
/// more similar); TVC and TVcC rank descending.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Ppl,
    Wvv,
    Tvc,
    Tvcc,
}

impl Measure {
    pub const ALL: [Measure; 4] = [Measure::Ppl, Measure::Wvv, Measure::Tvc, Measure::Tvcc];

    /// True when larger values mean more similar.
    pub fn ascending_means_similar(self) -> bool {
        matches!(self, Measure::Tvc | Measure::Tvcc)
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Measure::Ppl => "ppl",
            Measure::Wvv => "wvv",
            Measure::Tvc => "tvc",
            Measure::Tvcc => "tvcc",
        };
        f.write_str(name)
    }
}

impl FromStr for Measure {
    type Err = String;

    fn from_str(s: &str) -> Result<Measure, String> {
        match s.to_ascii_lowercase().as_str() {
            "ppl" => Ok(Measure::Ppl),
            "wvv" => Ok(Measure::Wvv),
            "tvc" => Ok(Measure::Tvc),
            "tvcc" => Ok(Measure::Tvcc),
            other => Err(format!("unknown measure {other:?}")),
        }
    }
}

/// Which measures a run computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureSelection {
    pub ppl: bool,
    pub wvv: bool,
    pub tvc: bool,
    pub tvcc: bool,
}

impl Default for MeasureSelection {
    fn default() -> Self {
        MeasureSelection {
            ppl: true,
            wvv: true,
            tvc: true,
            tvcc: true,
        }
    }
}

impl MeasureSelection {
    pub fn contains(&self, measure: Measure) -> bool {
        match measure {
            Measure::Ppl => self.ppl,
            Measure::Wvv => self.wvv,
            Measure::Tvc => self.tvc,
            Measure::Tvcc => self.tvcc,
        }
    }

    pub fn selected(&self) -> Vec<Measure> {
        Measure::ALL.into_iter().filter(|m| self.contains(*m)).collect()
    }
}

/// Everything that parameterizes a similarity computation. The JSON digest
/// of this struct keys the artifact cache and is embedded in every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureConfig {
    pub lm_order: usize,
    pub prune_min_count: Option<u64>,
    pub sgns: SgnsHyperParams,
    /// Epochs for the continuation pass; defaults to `sgns.epochs`.
    pub continue_epochs: Option<usize>,
    /// Cap applied to the source corpus before any training.
    pub token_cap: Option<u64>,
    pub measures: MeasureSelection,
    /// Custom content-word exclusion lexicon; the bundled list when absent.
    pub content_lexicon: Option<Vec<String>>,
    pub seed: u64,
}

impl Default for MeasureConfig {
    fn default() -> Self {
        MeasureConfig {
            lm_order: 5,
            prune_min_count: None,
            sgns: SgnsHyperParams::default(),
            continue_epochs: None,
            token_cap: None,
            measures: MeasureSelection::default(),
            content_lexicon: None,
            seed: 0,
        }
    }
}

impl MeasureConfig {
    pub fn digest(&self) -> String {
        sha256_hex(serde_json::to_string(self).expect("config serialize").as_bytes())
    }

    fn content_filter(&self) -> ContentWordFilter {
        match &self.content_lexicon {
            Some(words) => ContentWordFilter::lexicon(words.iter().cloned()),
            None => ContentWordFilter::default(),
        }
    }
}

/// The measure tuple for one source-target pair. Fields are `None` when the
/// run's measure selection skipped them; `skipped` names those measures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityScores {
    pub source_id: String,
    pub target_id: String,
    pub ppl_mean: Option<f64>,
    pub ppl_sum: Option<f64>,
    pub oov_rate: Option<f64>,
    pub wvv: Option<f64>,
    pub tvc: Option<f64>,
    pub tvcc: Option<f64>,
    pub skipped: Vec<Measure>,
    pub config_digest: String,
    /// Whether this result was served from the artifact cache.
    #[serde(skip)]
    pub from_cache: bool,
}

impl SimilarityScores {
    /// The value used for ranking under `measure` (mean PPL for PPL).
    pub fn value(&self, measure: Measure) -> Option<f64> {
        match measure {
            Measure::Ppl => self.ppl_mean,
            Measure::Wvv => self.wvv,
            Measure::Tvc => self.tvc,
            Measure::Tvcc => self.tvcc,
        }
    }
}

/// Fraction of the target's unique tokens present in the source vocabulary.
pub fn target_vocab_covered(
    v_source: &Vocabulary,
    v_target: &Vocabulary,
) -> Result<f64, MeasureError> {
    if v_target.is_empty() {
        return Err(MeasureError::EmptyTargetVocabulary);
    }
    Ok(v_target.intersection_size(v_source) as f64 / v_target.len() as f64)
}

/// Target vocabulary coverage restricted to content words.
pub fn tvcc(
    source: &Corpus,
    target: &Corpus,
    filter: &ContentWordFilter,
) -> Result<f64, MeasureError> {
    let source_vocab = filtered_token_set(source, filter)?;
    let target_vocab = filtered_token_set(target, filter)?;
    if target_vocab.is_empty() {
        return Err(MeasureError::EmptyFilteredTargetVocabulary);
    }
    let covered = target_vocab.iter().filter(|t| source_vocab.contains(*t)).count();
    Ok(covered as f64 / target_vocab.len() as f64)
}

fn filtered_token_set(
    corpus: &Corpus,
    filter: &ContentWordFilter,
) -> Result<HashSet<String>, MeasureError> {
    let mut set = HashSet::new();
    for sentence in corpus.sentences() {
        set.extend(filter.filter(sentence, None)?);
    }
    Ok(set)
}

/// Compute the selected measures for one source-target pair.
///
/// Trains the language model and embeddings on the source (capped first when
/// `token_cap` is set), evaluates on the target, and serves or fills the
/// artifact cache when one is provided. Intermediate artifacts and final
/// scores are keyed by content digests, not paths.
pub fn compute_similarity(
    source: &Corpus,
    target: &Corpus,
    config: &MeasureConfig,
    cache: Option<&ArtifactCache>,
) -> Result<SimilarityScores, MeasureError> {
    let capped;
    let source = match config.token_cap {
        Some(cap) => {
            capped = cap_tokens(source, cap, derive_seed(config.seed, "sampling"))?;
            &capped
        }
        None => source,
    };

    let config_digest = config.digest();
    let source_digest = source.digest();
    let target_digest = target.digest();
    let scores_key = sha256_hex(
        format!("scores\n{source_digest}\n{target_digest}\n{config_digest}").as_bytes(),
    );
    if let Some(cache) = cache {
        if let Some(mut scores) = cache.load_scores(&scores_key) {
            scores.from_cache = true;
            return Ok(scores);
        }
    }

    let mut scores = SimilarityScores {
        source_id: source.id().to_string(),
        target_id: target.id().to_string(),
        ppl_mean: None,
        ppl_sum: None,
        oov_rate: None,
        wvv: None,
        tvc: None,
        tvcc: None,
        skipped: Measure::ALL
            .into_iter()
            .filter(|m| !config.measures.contains(*m))
            .collect(),
        config_digest: config_digest.clone(),
        from_cache: false,
    };

    if config.measures.tvc {
        let v_source = Vocabulary::build(source, 1);
        let v_target = Vocabulary::build(target, 1);
        scores.tvc = Some(target_vocab_covered(&v_source, &v_target)?);
    }
    if config.measures.tvcc {
        scores.tvcc = Some(tvcc(source, target, &config.content_filter())?);
    }
    if config.measures.ppl {
        let model_key = sha256_hex(
            format!(
                "lm\n{source_digest}\norder={}\nprune={:?}",
                config.lm_order, config.prune_min_count
            )
            .as_bytes(),
        );
        let cached = cache.and_then(|c| c.load_model(&model_key));
        let model = match cached {
            Some(model) => model,
            None => {
                let counts = count_ngrams_pruned(source, config.lm_order, config.prune_min_count)
                    .map_err(|e| component("ppl", e))?;
                let model = estimate_model(&counts, &estimate_discounts(&counts))
                    .map_err(|e| component("ppl", e))?;
                if let Some(cache) = cache {
                    cache.store_model(&model_key, &model)?;
                }
                model
            }
        };
        let result = perplexity(&model, target).map_err(|e| component("ppl", e))?;
        scores.ppl_mean = Some(result.mean_ppl);
        scores.ppl_sum = Some(result.summed_ppl);
        scores.oov_rate = Some(result.oov_rate);
    }
    if config.measures.wvv {
        let mut train_hp = config.sgns.clone();
        train_hp.seed = derive_seed(config.seed, "wv-train");
        let hp_digest = sha256_hex(
            serde_json::to_string(&train_hp).expect("hp serialize").as_bytes(),
        );
        let emb_key = sha256_hex(format!("emb\n{source_digest}\n{hp_digest}").as_bytes());
        let cached = cache.and_then(|c| c.load_embedding(&emb_key));
        let ws = match cached {
            Some(matrix) => matrix,
            None => {
                let matrix = train(source, &train_hp).map_err(|e| component("wvv", e))?;
                if let Some(cache) = cache {
                    cache.store_embedding(&emb_key, &matrix)?;
                }
                matrix
            }
        };
        let mut continue_hp = train_hp.clone();
        continue_hp.epochs = config.continue_epochs.unwrap_or(config.sgns.epochs);
        continue_hp.seed = derive_seed(config.seed, "wv-continue");
        let cont_digest = sha256_hex(
            serde_json::to_string(&continue_hp).expect("hp serialize").as_bytes(),
        );
        let cont_key = sha256_hex(
            format!("emb-cont\n{source_digest}\n{target_digest}\n{cont_digest}").as_bytes(),
        );
        let cached = cache.and_then(|c| c.load_embedding(&cont_key));
        let wt = match cached {
            Some(matrix) => matrix,
            None => {
                let matrix =
                    continue_training(&ws, target, &continue_hp).map_err(|e| component("wvv", e))?;
                if let Some(cache) = cache {
                    cache.store_embedding(&cont_key, &matrix)?;
                }
                matrix
            }
        };
        let result = word_vector_variance(&ws, &wt).map_err(|e| component("wvv", e))?;
        scores.wvv = Some(result.value);
    }

    if let Some(cache) = cache {
        cache.store_scores(&scores_key, &scores)?;
    }
    Ok(scores)
}

/// One source in a ranking, with the value it was ranked by.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedSource {
    pub source_id: String,
    pub value: f64,
}

/// Sources ordered most-similar first under one measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ranking {
    pub measure: Measure,
    pub entries: Vec<RankedSource>,
    /// Groups of sources whose values tied exactly; ties are broken by
    /// source id but flagged here.
    pub tie_groups: Vec<Vec<String>>,
}

impl Ranking {
    pub fn most_similar(&self) -> Option<&str> {
        self.entries.first().map(|e| e.source_id.as_str())
    }
}

/// Rank sources for one target under a measure, most similar first.
pub fn rank_sources(
    scores: &[SimilarityScores],
    measure: Measure,
) -> Result<Ranking, MeasureError> {
    if scores.is_empty() {
        return Err(MeasureError::EmptyScores);
    }
    let target = &scores[0].target_id;
    if let Some(other) = scores.iter().find(|s| &s.target_id != target) {
        return Err(MeasureError::MixedTargets(
            target.clone(),
            other.target_id.clone(),
        ));
    }
    let mut entries = Vec::with_capacity(scores.len());
    for score in scores {
        let value = score.value(measure).ok_or_else(|| MeasureError::MissingMeasure {
            measure,
            source_id: score.source_id.clone(),
        })?;
        entries.push(RankedSource {
            source_id: score.source_id.clone(),
            value,
        });
    }
    entries.sort_by(|a, b| {
        let ordering = a.value.partial_cmp(&b.value).expect("finite measure values");
        let ordering = if measure.ascending_means_similar() {
            ordering.reverse()
        } else {
            ordering
        };
        ordering.then_with(|| a.source_id.cmp(&b.source_id))
    });
    let mut tie_groups: Vec<Vec<String>> = Vec::new();
    let mut i = 0;
    while i < entries.len() {
        let mut j = i + 1;
        while j < entries.len() && entries[j].value == entries[i].value {
            j += 1;
        }
        if j - i > 1 {
            tie_groups.push(entries[i..j].iter().map(|e| e.source_id.clone()).collect());
        }
        i = j;
    }
    Ok(Ranking {
        measure,
        entries,
        tie_groups,
    })
}

/// Scores for every source against one target, with per-measure rankings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityReport {
    pub target_id: String,
    pub config_digest: String,
    pub scores: Vec<SimilarityScores>,
    pub rankings: Vec<Ranking>,
}

impl SimilarityReport {
    /// CSV form: `target,source,ppl_mean,ppl_sum,wvv,tvc,tvcc,config_digest`.
    /// Skipped measures leave their field empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("target,source,ppl_mean,ppl_sum,wvv,tvc,tvcc,config_digest\n");
        for s in &self.scores {
            let field = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                s.target_id,
                s.source_id,
                field(s.ppl_mean),
                field(s.ppl_sum),
                field(s.wvv),
                field(s.tvc),
                field(s.tvcc),
                s.config_digest,
            ));
        }
        out
    }
}

/// Compute scores for every source against `target` and rank them under
/// each selected measure.
pub fn generate_report(
    target: &Corpus,
    sources: &[Corpus],
    config: &MeasureConfig,
    cache: Option<&ArtifactCache>,
) -> Result<SimilarityReport, MeasureError> {
    let mut scores = Vec::with_capacity(sources.len());
    for source in sources {
        scores.push(compute_similarity(source, target, config, cache)?);
    }
    let mut rankings = Vec::new();
    for measure in config.measures.selected() {
        rankings.push(rank_sources(&scores, measure)?);
    }
    Ok(SimilarityReport {
        target_id: target.id().to_string(),
        config_digest: config.digest(),
        scores,
        rankings,
    })
}

//! Run configuration: one serializable struct that captures every knob, so
//! a digest of it identifies a run and lands in every emitted report.

use std::path::Path;

use anyhow::Context;
use serde::{Deserialize, Serialize};

use corsim_core::corpus::TokenizerConfig;
use corsim_core::hash::sha256_hex;
use corsim_core::measures::{MeasureConfig, MeasureSelection};
use corsim_core::sgns::SgnsHyperParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub tokenizer: TokenizerConfig,
    /// Apply sentence segmentation to raw text instead of treating each
    /// input line as a sentence.
    pub segment_raw: bool,
    pub lm_order: usize,
    pub prune_min_count: Option<u64>,
    pub sgns: SgnsHyperParams,
    pub continue_epochs: Option<usize>,
    pub token_cap: Option<u64>,
    pub measures: MeasureSelection,
    pub seed: u64,
    pub output_format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            tokenizer: TokenizerConfig::default(),
            segment_raw: false,
            lm_order: 5,
            prune_min_count: None,
            sgns: SgnsHyperParams::default(),
            continue_epochs: None,
            token_cap: None,
            measures: MeasureSelection::default(),
            seed: 0,
            output_format: OutputFormat::Json,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn digest(&self) -> String {
        sha256_hex(serde_json::to_string(self).expect("config serialize").as_bytes())
    }

    pub fn measure_config(&self) -> MeasureConfig {
        MeasureConfig {
            lm_order: self.lm_order,
            prune_min_count: self.prune_min_count,
            sgns: self.sgns.clone(),
            continue_epochs: self.continue_epochs,
            token_cap: self.token_cap,
            measures: self.measures,
            content_lexicon: None,
            seed: self.seed,
        }
    }
}

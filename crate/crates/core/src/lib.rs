//! Corpus similarity measures for selecting pretraining data.
//!
//! Given a target task corpus and candidate source corpora, this crate
//! computes three families of similarity measures:
//!
//! * **TVC / TVcC** — the fraction of the target's unique tokens also present
//!   in the source, optionally restricted to content words;
//! * **PPL** — perplexity of an interpolated modified Kneser-Ney 5-gram model
//!   trained on the source and evaluated per sentence on the target;
//! * **WVV** — word vector variance: the mean squared change of skip-gram
//!   vectors trained on the source after continued training on the target.
//!
//! On top of the raw measures it ranks candidate sources per target
//! ([`measures::rank_sources`]), quantifies inter-measure agreement with
//! Fleiss's kappa over binary source comparisons ([`analysis::fleiss_kappa`]),
//! and correlates measures against downstream improvements with Pearson's r
//! ([`analysis::predictiveness_table`]).
//!
//! All stochastic steps (corpus capping, embedding initialization, negative
//! sampling) draw from named ChaCha streams derived from a single seed, so a
//! full run is reproducible from one number.

pub mod analysis;
pub mod corpus;
pub mod hash;
pub mod measures;
pub mod ngram;
pub mod rng;
pub mod sgns;
pub mod synth;

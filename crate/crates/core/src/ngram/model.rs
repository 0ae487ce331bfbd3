//! Model estimation, sentence scoring and perplexity evaluation.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;

use super::counts::NGramCountTable;
use super::discounts::DiscountSet;
use super::{Interner, LmError, BOS, BOS_ID, UNK_ID};

const NORMALIZATION_TOLERANCE: f64 = 1e-6;
/// Contexts sampled per order for the post-estimation normalization check.
const NORMALIZATION_SAMPLE_PER_ORDER: usize = 12;

/// A backoff n-gram model with fully interpolated modified Kneser-Ney
/// probabilities.
///
/// Stored probabilities are log10 of the interpolated conditional
/// probability; stored backoff weights are log10 of the interpolation mass
/// reserved by each observed context. Lookup follows the usual ARPA walk:
/// the longest stored n-gram wins, otherwise the context's backoff weight
/// multiplies the probability from the shortened context.
///
/// The model is immutable after estimation and safe to share across threads
/// for concurrent scoring.
#[derive(Debug, Clone)]
pub struct KNModel {
    pub(super) order: usize,
    pub(super) interner: Interner,
    /// `probs[k-1]`: log10 probability per stored k-gram.
    pub(super) probs: Vec<HashMap<Box<[u32]>, f64>>,
    /// `backoffs[len-1]`: log10 backoff weight per observed context.
    pub(super) backoffs: Vec<HashMap<Box<[u32]>, f64>>,
    /// Unigram event types (tokens plus the end marker; excludes the begin
    /// marker and the unknown stand-in).
    pub(super) event_count: usize,
}

/// Log-probability of one sentence, with its event count and the number of
/// tokens that had to be mapped to `<unk>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SentenceScore {
    pub log10_prob: f64,
    /// Scored events: tokens plus the end-of-sentence marker.
    pub length: usize,
    pub oov_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SentencePerplexity {
    pub index: usize,
    pub perplexity: f64,
    pub length: usize,
    pub oov_count: usize,
}

/// Perplexity of a target corpus under a source-trained model. Lower values
/// signal higher similarity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerplexityResult {
    pub per_sentence: Vec<SentencePerplexity>,
    /// Sum over sentences of the per-sentence perplexities.
    pub summed_ppl: f64,
    /// `summed_ppl` divided by the number of sentences.
    pub mean_ppl: f64,
    /// Fraction of target tokens that were out of vocabulary.
    pub oov_rate: f64,
}

/// Estimate an interpolated modified Kneser-Ney model from counts.
///
/// The top order uses raw counts; lower orders use continuation counts
/// (raw for begin-marker-initial grams). Interpolation bottoms out at a
/// uniform distribution over the unigram event types plus `<unk>`, so every
/// token keeps nonzero probability in every context. Estimation verifies
/// conditional normalization on a deterministic sample of contexts and fails
/// if any distribution is off by more than 1e-6.
pub fn estimate_model(
    counts: &NGramCountTable,
    discounts: &DiscountSet,
) -> Result<KNModel, LmError> {
    let order = counts.order();
    let mut model = KNModel {
        order,
        interner: counts.interner.clone(),
        probs: vec![HashMap::new(); order],
        backoffs: vec![HashMap::new(); order.saturating_sub(1)],
        event_count: counts.raw[0].len(),
    };
    let uniform = 1.0 / (model.event_count as f64 + 1.0);

    // Unigram level.
    {
        let d = discounts.for_order(1);
        let mut total: u64 = 0;
        let mut class_counts = [0u64; 3];
        for gram in counts.raw[0].keys() {
            let a = counts.adjusted_count_ids(1, gram);
            total += a;
            bump_class(&mut class_counts, a);
        }
        let gamma = gamma_mass(d, class_counts) / total as f64;
        for gram in counts.raw[0].keys() {
            let a = counts.adjusted_count_ids(1, gram);
            let p = (a as f64 - discounts.applied(1, a)) / total as f64 + gamma * uniform;
            model.probs[0].insert(gram.clone(), p.log10());
        }
        model.probs[0].insert(Box::from([UNK_ID]), (gamma * uniform).log10());
    }

    // Higher orders, bottom up so that each level can look up the fully
    // interpolated probabilities of the level below.
    for k in 2..=order {
        let d = discounts.for_order(k);
        let mut grouped: HashMap<&[u32], Vec<(u32, u64)>> = HashMap::new();
        for gram in counts.raw[k - 1].keys() {
            let a = counts.adjusted_count_ids(k, gram);
            grouped
                .entry(&gram[..k - 1])
                .or_default()
                .push((gram[k - 1], a));
        }
        let mut level: Vec<(Box<[u32]>, f64)> = Vec::with_capacity(counts.raw[k - 1].len());
        for (context, events) in &grouped {
            let total: u64 = events.iter().map(|(_, a)| a).sum();
            let mut class_counts = [0u64; 3];
            for (_, a) in events {
                bump_class(&mut class_counts, *a);
            }
            let gamma = gamma_mass(d, class_counts) / total as f64;
            model.backoffs[k - 2].insert(Box::from(*context), gamma.log10());
            for (word, a) in events {
                let lower = model.log10_prob_ids(&context[1..], *word);
                let p = (*a as f64 - discounts.applied(k, *a)) / total as f64
                    + gamma * 10f64.powf(lower);
                let mut gram = Vec::with_capacity(k);
                gram.extend_from_slice(context);
                gram.push(*word);
                level.push((gram.into_boxed_slice(), p.log10()));
            }
        }
        model.probs[k - 1].extend(level);
    }

    verify_normalization(&model)?;
    Ok(model)
}

fn bump_class(classes: &mut [u64; 3], count: u64) {
    match count {
        0 => {}
        1 => classes[0] += 1,
        2 => classes[1] += 1,
        _ => classes[2] += 1,
    }
}

fn gamma_mass(d: [f64; 3], classes: [u64; 3]) -> f64 {
    d[0] * classes[0] as f64 + d[1] * classes[1] as f64 + d[2] * classes[2] as f64
}

/// Check that sampled conditional distributions sum to one. The sample takes
/// the unigram distribution, every all-begin-marker context, and the
/// lexicographically first contexts at every order.
fn verify_normalization(model: &KNModel) -> Result<(), LmError> {
    let mut contexts: Vec<Vec<u32>> = vec![Vec::new()];
    for len in 1..model.order {
        contexts.push(vec![BOS_ID; len]);
        let mut keys: Vec<&Box<[u32]>> = model.backoffs[len - 1].keys().collect();
        keys.sort();
        for key in keys.into_iter().take(NORMALIZATION_SAMPLE_PER_ORDER) {
            contexts.push(key.to_vec());
        }
    }
    for context in contexts {
        let sum = model.conditional_sum_ids(&context);
        if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(LmError::Normalization {
                context: context
                    .iter()
                    .map(|&id| model.interner.token_of(id))
                    .collect::<Vec<_>>()
                    .join(" "),
                sum,
                tolerance: NORMALIZATION_TOLERANCE,
            });
        }
    }
    Ok(())
}

impl KNModel {
    pub fn order(&self) -> usize {
        self.order
    }

    /// Unigram event types: tokens plus the end marker.
    pub fn vocab_size(&self) -> usize {
        self.event_count
    }

    /// Number of stored entries at order `k`, as written to ARPA output.
    pub fn entry_count(&self, k: usize) -> usize {
        if k == self.order {
            self.probs[k - 1].len()
        } else {
            let extra = self.backoffs[k - 1]
                .keys()
                .filter(|ctx| !self.probs[k - 1].contains_key(*ctx))
                .count();
            self.probs[k - 1].len() + extra
        }
    }

    /// Whether the model can absorb out-of-vocabulary tokens.
    pub fn has_unk(&self) -> bool {
        self.probs[0].contains_key([UNK_ID].as_slice())
    }

    /// The event space: every token the model can predict, including the
    /// end marker and `<unk>`.
    pub fn event_tokens(&self) -> Vec<&str> {
        let mut events: Vec<&str> = self.probs[0]
            .keys()
            .map(|gram| self.interner.token_of(gram[0]))
            .filter(|token| *token != BOS)
            .collect();
        events.sort_unstable();
        events
    }

    /// Conditional probability in linear space. Context tokens may include
    /// `<s>`; unknown tokens fall back to `<unk>`.
    pub fn conditional_prob(&self, context: &[&str], word: &str) -> f64 {
        let ctx: Vec<u32> = context.iter().map(|t| self.id_or_unk(t)).collect();
        let id = self.id_or_unk(word);
        10f64.powf(self.log10_prob_ids(&ctx, id))
    }

    fn id_or_unk(&self, token: &str) -> u32 {
        self.interner.id_of(token).unwrap_or(UNK_ID)
    }

    fn conditional_sum_ids(&self, context: &[u32]) -> f64 {
        let mut ids: Vec<u32> = self.probs[0]
            .keys()
            .map(|gram| gram[0])
            .filter(|&id| id != BOS_ID && id != UNK_ID)
            .collect();
        ids.sort_unstable();
        ids.push(UNK_ID);
        ids.iter()
            .map(|&id| 10f64.powf(self.log10_prob_ids(context, id)))
            .sum()
    }

    /// ARPA-style backoff lookup over interned ids.
    pub(super) fn log10_prob_ids(&self, context: &[u32], word: u32) -> f64 {
        let start = context.len().saturating_sub(self.order - 1);
        let mut ctx = &context[start..];
        let mut acc = 0.0;
        let mut key: Vec<u32> = Vec::with_capacity(ctx.len() + 1);
        loop {
            key.clear();
            key.extend_from_slice(ctx);
            key.push(word);
            if let Some(&lp) = self.probs[ctx.len()].get(key.as_slice()) {
                return acc + lp;
            }
            if ctx.is_empty() {
                // No unigram entry: the word is outside the model and there
                // is no <unk> entry either. Treated as impossible.
                return f64::NEG_INFINITY;
            }
            acc += self.backoffs[ctx.len() - 1].get(ctx).copied().unwrap_or(0.0);
            ctx = &ctx[1..];
        }
    }
}

/// Score one sentence under the model.
///
/// Out-of-vocabulary tokens are mapped to `<unk>` and counted; the end
/// marker is scored as the final event, so `length` is `tokens + 1`.
pub fn score_sentence(model: &KNModel, sentence: &[String]) -> Result<SentenceScore, LmError> {
    if sentence.is_empty() {
        return Err(LmError::EmptySentence);
    }
    let has_unk = model.has_unk();
    let mut oov_count = 0;
    let mut events: Vec<u32> = Vec::with_capacity(sentence.len() + 1);
    for token in sentence {
        match model.interner.id_of(token) {
            // Literal marker strings in the input are data, not structure.
            Some(id) if id != BOS_ID && id != super::EOS_ID && id != UNK_ID => events.push(id),
            _ => {
                if !has_unk {
                    return Err(LmError::NoUnkEntry(token.clone()));
                }
                oov_count += 1;
                events.push(UNK_ID);
            }
        }
    }
    events.push(super::EOS_ID);

    let mut history: Vec<u32> = vec![BOS_ID; model.order - 1];
    let mut log10_prob = 0.0;
    for &event in &events {
        log10_prob += model.log10_prob_ids(&history, event);
        if model.order > 1 {
            history.push(event);
            history.remove(0);
        }
    }
    Ok(SentenceScore {
        log10_prob,
        length: events.len(),
        oov_count,
    })
}

/// Evaluate the model on every sentence of `target`.
///
/// Per-sentence perplexity is `10^(-log10 P / N)`. Both the summed and the
/// mean aggregate are reported; the mean is the default ranking statistic.
pub fn perplexity(model: &KNModel, target: &Corpus) -> Result<PerplexityResult, LmError> {
    if target.is_empty() {
        return Err(LmError::EmptyTarget);
    }
    let mut per_sentence = Vec::with_capacity(target.sentence_count());
    let mut summed = 0.0;
    let mut oov_total: u64 = 0;
    for (index, sentence) in target.sentences().iter().enumerate() {
        let score = score_sentence(model, sentence)?;
        let ppl = 10f64.powf(-score.log10_prob / score.length as f64);
        summed += ppl;
        oov_total += score.oov_count as u64;
        per_sentence.push(SentencePerplexity {
            index,
            perplexity: ppl,
            length: score.length,
            oov_count: score.oov_count,
        });
    }
    let mean = summed / per_sentence.len() as f64;
    Ok(PerplexityResult {
        per_sentence,
        summed_ppl: summed,
        mean_ppl: mean,
        oov_rate: oov_total as f64 / target.token_count() as f64,
    })
}

//! N-gram counting with sentence padding, continuation counts and
//! count-of-count statistics.

use std::collections::HashMap;

use crate::corpus::Corpus;

use super::{Interner, LmError, BOS_ID};

/// Raw and continuation counts for all orders `1..=order`.
///
/// Each sentence is padded with `order - 1` begin markers and one end marker.
/// A window is counted only when it ends at a predicted event (a real token
/// or the end marker), so begin markers never appear as unigram events and
/// the unigram counts sum to `token_count + sentence_count`.
///
/// Continuation counts hold, for each n-gram below the top order, the number
/// of distinct single-token left extensions observed in the next order up.
/// `count_of_counts` tabulates how many n-grams at each order carry an
/// adjusted count of exactly 1, 2, 3 or 4, where "adjusted" means the count
/// the estimator will use at that order: raw at the top order and for grams
/// starting with the begin marker, continuation otherwise.
#[derive(Debug)]
pub struct NGramCountTable {
    order: usize,
    pub(super) interner: Interner,
    /// `raw[k-1]`: counts of k-grams, keyed by interned ids.
    pub(super) raw: Vec<HashMap<Box<[u32]>, u64>>,
    /// `continuation[k-1]`: distinct left extensions of k-grams; the top
    /// order entry stays empty.
    pub(super) continuation: Vec<HashMap<Box<[u32]>, u64>>,
    count_of_counts: Vec<[u64; 4]>,
    sentence_count: u64,
    token_count: u64,
}

/// Count all n-grams of lengths `1..=order` in `corpus`.
pub fn count_ngrams(corpus: &Corpus, order: usize) -> Result<NGramCountTable, LmError> {
    count_ngrams_pruned(corpus, order, None)
}

/// Like [`count_ngrams`], but drops n-grams of order >= 2 whose raw count is
/// below `prune_min_count` before deriving continuation counts. Intended for
/// memory control on very large corpora; off by default.
pub fn count_ngrams_pruned(
    corpus: &Corpus,
    order: usize,
    prune_min_count: Option<u64>,
) -> Result<NGramCountTable, LmError> {
    if order == 0 {
        return Err(LmError::InvalidOrder);
    }
    if corpus.is_empty() {
        return Err(LmError::EmptyCorpus);
    }
    let mut interner = Interner::new();
    let mut raw: Vec<HashMap<Box<[u32]>, u64>> = vec![HashMap::new(); order];

    let mut padded: Vec<u32> = Vec::new();
    for sentence in corpus.sentences() {
        padded.clear();
        padded.resize(order - 1, BOS_ID);
        for token in sentence {
            padded.push(interner.intern(token)?);
        }
        padded.push(super::EOS_ID);
        // Only windows ending at a real token or the end marker count.
        for end in (order - 1)..padded.len() {
            for k in 1..=order.min(end + 1) {
                let gram = &padded[end + 1 - k..=end];
                *raw[k - 1].entry(gram.into()).or_insert(0) += 1;
            }
        }
    }

    if let Some(threshold) = prune_min_count {
        for table in raw.iter_mut().skip(1) {
            table.retain(|_, count| *count >= threshold);
        }
    }

    let mut continuation: Vec<HashMap<Box<[u32]>, u64>> = vec![HashMap::new(); order];
    for k in 1..order {
        let mut table = HashMap::new();
        for gram in raw[k].keys() {
            *table.entry(gram[1..].into()).or_insert(0) += 1;
        }
        continuation[k - 1] = table;
    }

    let mut table = NGramCountTable {
        order,
        interner,
        raw,
        continuation,
        count_of_counts: vec![[0; 4]; order],
        sentence_count: corpus.sentence_count() as u64,
        token_count: corpus.token_count(),
    };
    for k in 1..=order {
        let mut histogram = [0u64; 4];
        for gram in table.raw[k - 1].keys() {
            let adjusted = table.adjusted_count_ids(k, gram);
            if (1..=4).contains(&adjusted) {
                histogram[(adjusted - 1) as usize] += 1;
            }
        }
        table.count_of_counts[k - 1] = histogram;
    }
    Ok(table)
}

impl NGramCountTable {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn sentence_count(&self) -> u64 {
        self.sentence_count
    }

    pub fn token_count(&self) -> u64 {
        self.token_count
    }

    /// Count-of-count statistics `n1..n4` for order `k`, over the counts
    /// used for discount estimation at that order.
    pub fn count_of_counts(&self, k: usize) -> [u64; 4] {
        self.count_of_counts[k - 1]
    }

    /// Number of distinct n-grams stored at order `k`.
    pub fn distinct(&self, k: usize) -> usize {
        self.raw[k - 1].len()
    }

    /// Raw count of a k-gram given as tokens; begin/end markers spell as
    /// `<s>` and `</s>`. Unknown tokens yield 0.
    pub fn raw_count(&self, gram: &[&str]) -> u64 {
        match self.ids_of(gram) {
            Some(ids) => self.raw[gram.len() - 1].get(ids.as_slice()).copied().unwrap_or(0),
            None => 0,
        }
    }

    /// Continuation count (distinct left extensions) of a k-gram.
    pub fn continuation_count(&self, gram: &[&str]) -> u64 {
        match self.ids_of(gram) {
            Some(ids) => self.continuation[gram.len() - 1]
                .get(ids.as_slice())
                .copied()
                .unwrap_or(0),
            None => 0,
        }
    }

    fn ids_of(&self, gram: &[&str]) -> Option<Vec<u32>> {
        gram.iter().map(|t| self.interner.id_of(t)).collect()
    }

    /// The count the estimator uses at order `k`: raw at the top order and
    /// for begin-marker-initial grams, continuation otherwise.
    pub(super) fn adjusted_count_ids(&self, k: usize, gram: &[u32]) -> u64 {
        if k == self.order || gram[0] == BOS_ID {
            self.raw[k - 1].get(gram).copied().unwrap_or(0)
        } else {
            self.continuation[k - 1].get(gram).copied().unwrap_or(0)
        }
    }
}

//! Deterministic synthetic corpora for tests and benchmarks.
//!
//! Generated corpora have planted topical structure: the vocabulary splits
//! into topic blocks, each sentence draws most of its tokens from one block
//! with a Zipf-like within-block distribution, and a small fraction leaks
//! from the full vocabulary. That gives n-gram models and embeddings real
//! co-occurrence signal while staying fully reproducible.

use rand::Rng;

use crate::corpus::Corpus;
use crate::rng;

const TOPICS: usize = 4;
/// Probability that a token is drawn from the full vocabulary instead of the
/// sentence's topic block.
const LEAK: f64 = 0.1;

/// Generate a corpus with roughly `target_tokens` tokens over a vocabulary
/// of `vocab_size` types. Deterministic for a fixed seed.
pub fn synthetic_corpus(id: &str, target_tokens: usize, vocab_size: usize, seed: u64) -> Corpus {
    synthetic_corpus_with_layout(id, target_tokens, vocab_size, seed, 0)
}

/// Like [`synthetic_corpus`], but `layout_seed` shuffles which words belong
/// to which topic block. Corpora with different layouts share a vocabulary
/// yet associate different words, giving a structured-but-mismatched pair.
pub fn synthetic_corpus_with_layout(
    id: &str,
    target_tokens: usize,
    vocab_size: usize,
    seed: u64,
    layout_seed: u64,
) -> Corpus {
    use rand::seq::SliceRandom;
    assert!(vocab_size >= TOPICS, "vocabulary too small for topic blocks");
    let mut stream = rng::stream(seed, "synth");
    let mut words: Vec<String> = (0..vocab_size).map(|i| format!("w{i}")).collect();
    if layout_seed != 0 {
        words.shuffle(&mut rng::stream(layout_seed, "synth-layout"));
    }
    let block = vocab_size.div_ceil(TOPICS);

    let mut sentences: Vec<Vec<String>> = Vec::new();
    let mut tokens = 0usize;
    while tokens < target_tokens {
        let topic = stream.random_range(0..TOPICS);
        let lo = topic * block;
        let hi = ((topic + 1) * block).min(vocab_size);
        let length = stream.random_range(5..=15).min(target_tokens - tokens).max(1);
        let mut sentence = Vec::with_capacity(length);
        for _ in 0..length {
            let (lo, hi) = if stream.random::<f64>() < LEAK {
                (0, vocab_size)
            } else {
                (lo, hi)
            };
            sentence.push(words[lo + zipf(hi - lo, &mut stream)].clone());
        }
        tokens += sentence.len();
        sentences.push(sentence);
    }
    Corpus::from_sentences(id, sentences, "synthetic").expect("generated sentences are non-empty")
}

/// Zipf-like draw of a rank in `0..n`: rank r has weight `1/(r+1)`.
fn zipf<R: Rng>(n: usize, stream: &mut R) -> usize {
    debug_assert!(n > 0);
    let total: f64 = (1..=n).map(|r| 1.0 / r as f64).sum();
    let mut u = stream.random::<f64>() * total;
    for r in 0..n {
        u -= 1.0 / (r + 1) as f64;
        if u <= 0.0 {
            return r;
        }
    }
    n - 1
}

/// Rename every token so the vocabulary is disjoint from the original while
/// sentence shapes and frequencies stay identical.
pub fn disjoint_variant(corpus: &Corpus, id: &str) -> Corpus {
    let sentences = corpus
        .sentences()
        .iter()
        .map(|s| s.iter().map(|t| format!("{t}x")).collect())
        .collect();
    Corpus::from_sentences(id, sentences, "synthetic-disjoint").expect("shapes preserved")
}

/// Shuffle all tokens across the corpus while preserving sentence lengths.
/// Unigram frequencies survive; co-occurrence structure does not.
pub fn scrambled_variant(corpus: &Corpus, seed: u64) -> Corpus {
    use rand::seq::SliceRandom;
    let mut pool: Vec<String> = corpus
        .sentences()
        .iter()
        .flat_map(|s| s.iter().cloned())
        .collect();
    pool.shuffle(&mut rng::stream(seed, "scramble"));
    let mut iter = pool.into_iter();
    let sentences = corpus
        .sentences()
        .iter()
        .map(|s| iter.by_ref().take(s.len()).collect())
        .collect();
    Corpus::from_sentences(corpus.id(), sentences, "synthetic-scrambled")
        .expect("shapes preserved")
}

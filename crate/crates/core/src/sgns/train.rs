//! Skip-gram negative-sampling training.

use rand::Rng;

use crate::corpus::{Corpus, Vocabulary};
use crate::rng;

use super::matrix::EmbeddingMatrix;
use super::{SgnsError, SgnsHyperParams};

/// Train skip-gram embeddings on a corpus.
///
/// For every (center, context) pair inside a per-position uniformly shrunk
/// window, the objective `log s(u_c . v_w) + sum_k log s(-u_nk . v_w)` is
/// ascended by SGD, with negatives drawn from the unigram distribution
/// raised to 0.75. Single-worker and a pure function of
/// `(corpus, hyperparameters)`: a fixed seed reproduces the matrices bit for
/// bit. With `epochs = 0` the result is exactly the seeded initialization.
pub fn train(corpus: &Corpus, hp: &SgnsHyperParams) -> Result<EmbeddingMatrix, SgnsError> {
    let vocab = Vocabulary::build(corpus, hp.min_count.max(1));
    if vocab.is_empty() {
        return Err(SgnsError::EmptyVocabulary);
    }
    let frequencies = vocab.counts_by_id();
    let mut matrix = EmbeddingMatrix::init(vocab, hp.dim, hp.seed);
    run_training(&mut matrix, corpus, hp, &frequencies);
    Ok(matrix)
}

/// Continue training source-trained embeddings on a target corpus.
///
/// The vocabulary stays frozen: target tokens outside it are dropped before
/// windowing and form no training pairs, and no minimum count applies. The
/// subsampling and negative-sampling distributions are recomputed from the
/// target frequencies restricted to the frozen vocabulary, so a word absent
/// from the target is never drawn as a negative and its vectors survive
/// unchanged. The learning rate restarts at `initial_lr` with a fresh linear
/// decay over the target pass.
pub fn continue_training(
    source: &EmbeddingMatrix,
    target: &Corpus,
    hp: &SgnsHyperParams,
) -> Result<EmbeddingMatrix, SgnsError> {
    let mut frequencies = vec![0u64; source.len()];
    for sentence in target.sentences() {
        for token in sentence {
            if let Some(id) = source.vocab().id_of(token) {
                frequencies[id as usize] += 1;
            }
        }
    }
    if frequencies.iter().all(|&f| f == 0) {
        return Err(SgnsError::NoSharedVocabulary);
    }
    let mut matrix = source.clone();
    run_training(&mut matrix, target, hp, &frequencies);
    Ok(matrix)
}

fn run_training(
    matrix: &mut EmbeddingMatrix,
    corpus: &Corpus,
    hp: &SgnsHyperParams,
    frequencies: &[u64],
) {
    let total: u64 = frequencies.iter().sum();
    if hp.epochs == 0 || total == 0 {
        return;
    }
    let dim = matrix.dim();
    let keep_prob = subsample_keep_probs(frequencies, total, hp.subsample_threshold);
    let negative_table = cumulative_powered(frequencies);
    let vocab = matrix.vocab().clone();
    let (input, context) = matrix.tables_mut();

    let mut stream = rng::stream(hp.seed, "train");
    let planned = (hp.epochs as u64 * total) as f64;
    let lr_floor = hp.initial_lr * 1e-4;
    let mut processed: u64 = 0;

    let mut encoded: Vec<u32> = Vec::new();
    let mut kept: Vec<u32> = Vec::new();
    let mut accum = vec![0.0; dim];

    for _ in 0..hp.epochs {
        for sentence in corpus.sentences() {
            let lr = (hp.initial_lr * (1.0 - processed as f64 / planned)).max(lr_floor);
            encoded.clear();
            encoded.extend(sentence.iter().filter_map(|token| vocab.id_of(token)));
            processed += encoded.len() as u64;

            kept.clear();
            for &id in &encoded {
                let keep = keep_prob[id as usize];
                if keep >= 1.0 || stream.random::<f64>() < keep {
                    kept.push(id);
                }
            }

            for center_pos in 0..kept.len() {
                let half_window = stream.random_range(1..=hp.window);
                let lo = center_pos.saturating_sub(half_window);
                let hi = (center_pos + half_window).min(kept.len().saturating_sub(1));
                for context_pos in lo..=hi {
                    if context_pos == center_pos {
                        continue;
                    }
                    let center = kept[center_pos] as usize;
                    let positive = kept[context_pos] as usize;
                    accum.fill(0.0);
                    {
                        let center_row = &input[center * dim..(center + 1) * dim];
                        binary_step(
                            center_row,
                            &mut context[positive * dim..(positive + 1) * dim],
                            1.0,
                            lr,
                            &mut accum,
                        );
                        for _ in 0..hp.negatives {
                            let negative = sample(&negative_table, &mut stream);
                            if negative == positive {
                                continue;
                            }
                            binary_step(
                                center_row,
                                &mut context[negative * dim..(negative + 1) * dim],
                                0.0,
                                lr,
                                &mut accum,
                            );
                        }
                    }
                    let center_row = &mut input[center * dim..(center + 1) * dim];
                    for (value, delta) in center_row.iter_mut().zip(&accum) {
                        *value += delta;
                    }
                }
            }
        }
    }
}

/// One SGD step against a single output row. `label` is 1 for the observed
/// context and 0 for negatives. The center row's gradient accumulates into
/// `accum`; the output row updates in place.
fn binary_step(center: &[f64], output: &mut [f64], label: f64, lr: f64, accum: &mut [f64]) {
    let dot: f64 = center.iter().zip(output.iter()).map(|(a, b)| a * b).sum();
    let gradient = lr * (label - sigmoid(dot));
    for ((acc, out), ctr) in accum.iter_mut().zip(output.iter_mut()).zip(center) {
        *acc += gradient * *out;
        *out += gradient * *ctr;
    }
}

/// Apply one (center, context, negatives) update outside a training loop,
/// using the exact step the trainer performs. Exposed so the update can be
/// checked against finite differences of the objective.
pub fn pair_update(center: &mut [f64], positive: &mut [f64], negatives: &mut [Vec<f64>], lr: f64) {
    let mut accum = vec![0.0; center.len()];
    binary_step(center, positive, 1.0, lr, &mut accum);
    for negative in negatives {
        binary_step(center, negative, 0.0, lr, &mut accum);
    }
    for (value, delta) in center.iter_mut().zip(&accum) {
        *value += delta;
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// word2vec-style keep probabilities: frequent words are kept with
/// probability `(sqrt(z/t) + 1) * t/z` for frequency fraction `z`.
fn subsample_keep_probs(frequencies: &[u64], total: u64, threshold: f64) -> Vec<f64> {
    frequencies
        .iter()
        .map(|&f| {
            if threshold <= 0.0 || f == 0 {
                return 1.0;
            }
            let z = f as f64 / total as f64;
            (((z / threshold).sqrt() + 1.0) * threshold / z).min(1.0)
        })
        .collect()
}

fn cumulative_powered(frequencies: &[u64]) -> Vec<f64> {
    let mut cumulative = Vec::with_capacity(frequencies.len());
    let mut running = 0.0;
    for &f in frequencies {
        running += (f as f64).powf(0.75);
        cumulative.push(running);
    }
    cumulative
}

fn sample<R: Rng>(cumulative: &[f64], rng: &mut R) -> usize {
    let u = rng.random::<f64>() * cumulative.last().copied().unwrap_or(0.0);
    cumulative.partition_point(|&c| c <= u)
}

//! Equivalence of the production Kneser-Ney model against the independent
//! brute-force recursion, over tiny corpora where exhaustive context
//! enumeration is feasible.

mod common;

use common::{enumerate_contexts, KnOracle};
use corsim_core::corpus::Corpus;
use corsim_core::ngram::{count_ngrams, estimate_discounts, estimate_model, KNModel};
use proptest::prelude::*;

const TOLERANCE: f64 = 1e-9;

fn corpus_of(sentences: &[&[&str]]) -> Corpus {
    let sentences: Vec<Vec<String>> = sentences
        .iter()
        .map(|s| s.iter().map(|t| t.to_string()).collect())
        .collect();
    Corpus::from_sentences("oracle", sentences, "inline").unwrap()
}

fn production_model(corpus: &Corpus, order: usize) -> KNModel {
    let counts = count_ngrams(corpus, order).unwrap();
    estimate_model(&counts, &estimate_discounts(&counts)).unwrap()
}

/// Compare every conditional probability over every context built from the
/// corpus alphabet (plus markers and an unseen symbol) against the oracle.
fn assert_equivalent(corpus: &Corpus, order: usize) {
    let model = production_model(corpus, order);
    let oracle = KnOracle::build(corpus.sentences(), order);

    let mut symbols = oracle.events();
    symbols.push(common::BOS.to_string());
    symbols.push("unseen-symbol".to_string());
    let mut words = oracle.events();
    words.push("unseen-symbol".to_string());

    let max_len = (order - 1).min(3);
    for context in enumerate_contexts(&symbols, max_len) {
        let context_refs: Vec<&str> = context.iter().map(String::as_str).collect();
        for word in &words {
            let expected = oracle.prob(&context, word);
            let actual = model.conditional_prob(&context_refs, word);
            assert!(
                (expected - actual).abs() <= TOLERANCE,
                "order {order} p({word} | {context:?}): oracle {expected}, model {actual}"
            );
        }
    }
}

#[test]
fn fixed_family_matches_the_oracle() {
    let corpora: Vec<Corpus> = vec![
        corpus_of(&[&["a"]]),
        corpus_of(&[&["a", "b"]]),
        corpus_of(&[&["a", "a", "a", "a"]]),
        corpus_of(&[&["a", "b", "a"], &["b", "c"]]),
        corpus_of(&[&["a", "b", "c", "d", "e"], &["e", "d", "c", "b", "a"], &["a", "c", "e", "b", "d"]]),
        corpus_of(&[&["a", "b", "a", "b", "a", "b"], &["b", "a", "b", "a"]]),
        corpus_of(&[&["a", "b", "c"], &["a", "b", "c"], &["a", "b", "c"]]),
        corpus_of(&[&["a", "b", "b", "a"], &["c", "c"], &["a", "c"]]),
        corpus_of(&[&["a"], &["a", "b"], &["a", "b", "c"], &["a", "b", "c", "d"]]),
        corpus_of(&[&["e", "e", "d", "e"], &["d", "d", "e"]]),
    ];
    for corpus in &corpora {
        assert!(corpus.token_count() <= 20);
        for order in [1, 2, 3, 5] {
            assert_equivalent(corpus, order);
        }
    }
}

#[test]
fn summed_perplexity_matches_oracle_sentence_probabilities() {
    let train = corpus_of(&[&["a", "b", "a"], &["b", "c"], &["c", "a", "b"]]);
    let order = 3;
    let model = production_model(&train, order);
    let oracle = KnOracle::build(train.sentences(), order);

    let target = corpus_of(&[&["a", "b", "c"], &["c", "c"]]);
    let eos = common::EOS.to_string();
    let mut expected_summed = 0.0;
    for sentence in target.sentences() {
        let mut history: Vec<String> = vec![common::BOS.to_string(); order - 1];
        let mut probability = 1.0;
        for token in sentence.iter().chain(std::iter::once(&eos)) {
            probability *= oracle.prob(&history, token);
            history.push(token.clone());
            history.remove(0);
        }
        let length = (sentence.len() + 1) as f64;
        expected_summed += probability.powf(-1.0 / length);
    }

    let result = corsim_core::ngram::perplexity(&model, &target).unwrap();
    assert!(
        (result.summed_ppl - expected_summed).abs() < 1e-9,
        "summed {} vs oracle {}",
        result.summed_ppl,
        expected_summed
    );
    assert!((result.mean_ppl - expected_summed / 2.0).abs() < 1e-9);
}

fn tiny_corpus_strategy() -> impl Strategy<Value = Vec<Vec<String>>> {
    let token = prop::sample::select(vec!["a", "b", "c", "d", "e"]);
    let sentence = prop::collection::vec(token, 1..=6);
    prop::collection::vec(sentence, 1..=4).prop_map(|sentences| {
        let mut total = 0;
        let mut out: Vec<Vec<String>> = Vec::new();
        for sentence in sentences {
            if total + sentence.len() > 20 {
                break;
            }
            total += sentence.len();
            out.push(sentence.into_iter().map(|t| t.to_string()).collect());
        }
        if out.is_empty() {
            out.push(vec!["a".to_string()]);
        }
        out
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_tiny_corpora_match_the_oracle(
        sentences in tiny_corpus_strategy(),
        order in prop::sample::select(vec![1usize, 2, 3, 5]),
    ) {
        let corpus = Corpus::from_sentences("prop", sentences, "inline").unwrap();
        assert_equivalent(&corpus, order);
    }
}

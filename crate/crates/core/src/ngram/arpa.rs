//! ARPA backoff model serialization.
//!
//! The textual format: a `\data\` header with per-order entry counts,
//! per-order sections of `log10_prob<TAB>tokens[<TAB>log10_backoff]` lines,
//! and a closing `\end\`. Probabilities and backoff weights are written with
//! shortest round-trip precision, so export followed by import reproduces
//! every score exactly.
//!
//! Context-only entries (the begin marker and its repetitions) carry no
//! probability mass; their probability field is written as -99 by
//! convention.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use super::model::KNModel;
use super::{Interner, LmError, BOS_ID, UNK_ID};

/// Probability column for entries that only exist to carry a backoff weight.
const UNUSED_PROB: f64 = -99.0;

/// Serialize the model in ARPA form.
pub fn export_arpa<W: Write>(model: &KNModel, writer: &mut W) -> Result<(), LmError> {
    writeln!(writer, "\\data\\")?;
    for k in 1..=model.order {
        writeln!(writer, "ngram {k}={}", model.entry_count(k))?;
    }
    for k in 1..=model.order {
        writeln!(writer)?;
        writeln!(writer, "\\{k}-grams:")?;
        for (gram, prob, backoff) in collect_entries(model, k) {
            let tokens: Vec<&str> = gram.iter().map(|&id| model.interner.token_of(id)).collect();
            match backoff {
                Some(bow) => writeln!(writer, "{prob}\t{}\t{bow}", tokens.join(" "))?,
                None => writeln!(writer, "{prob}\t{}", tokens.join(" "))?,
            }
        }
    }
    writeln!(writer)?;
    writeln!(writer, "\\end\\")?;
    Ok(())
}

/// Serialize to a string.
pub fn export_arpa_string(model: &KNModel) -> String {
    let mut out = Vec::new();
    export_arpa(model, &mut out).expect("writing to a Vec cannot fail");
    String::from_utf8(out).expect("ARPA output is UTF-8")
}

/// Entries at order `k` in deterministic id order: every stored n-gram plus
/// context-only grams that carry a backoff weight.
fn collect_entries(model: &KNModel, k: usize) -> Vec<(Box<[u32]>, f64, Option<f64>)> {
    let is_top = k == model.order;
    let mut keys: Vec<Box<[u32]>> = model.probs[k - 1].keys().cloned().collect();
    if !is_top {
        keys.extend(
            model.backoffs[k - 1]
                .keys()
                .filter(|ctx| !model.probs[k - 1].contains_key(*ctx))
                .cloned(),
        );
    }
    keys.sort();
    keys.into_iter()
        .map(|gram| {
            let prob = model.probs[k - 1].get(&gram).copied().unwrap_or(UNUSED_PROB);
            let backoff = if is_top {
                None
            } else {
                model.backoffs[k - 1].get(&gram).copied()
            };
            (gram, prob, backoff)
        })
        .collect()
}

/// Parse an ARPA model from a string.
pub fn import_arpa(text: &str) -> Result<KNModel, LmError> {
    import_arpa_reader(text.as_bytes())
}

/// Parse an ARPA model from a buffered reader.
pub fn import_arpa_reader<R: BufRead>(reader: R) -> Result<KNModel, LmError> {
    let mut lines = reader.lines().enumerate();

    let err = |line: usize, message: &str| LmError::Parse {
        line: line + 1,
        message: message.to_string(),
    };

    // Header.
    let mut declared: Vec<usize> = Vec::new();
    let mut seen_data = false;
    let mut section_line = 0;
    for (idx, line) in &mut lines {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if !seen_data {
            if trimmed == "\\data\\" {
                seen_data = true;
                continue;
            }
            return Err(err(idx, "expected \\data\\ header"));
        }
        if let Some(rest) = trimmed.strip_prefix("ngram ") {
            let (order_str, count_str) = rest
                .split_once('=')
                .ok_or_else(|| err(idx, "expected ngram <order>=<count>"))?;
            let order: usize = order_str
                .trim()
                .parse()
                .map_err(|_| err(idx, "invalid ngram order"))?;
            let count: usize = count_str
                .trim()
                .parse()
                .map_err(|_| err(idx, "invalid ngram count"))?;
            if order != declared.len() + 1 {
                return Err(err(idx, "ngram orders must be consecutive from 1"));
            }
            declared.push(count);
            continue;
        }
        if trimmed == "\\1-grams:" {
            section_line = idx;
            break;
        }
        return Err(err(idx, "unexpected line in \\data\\ section"));
    }
    if declared.is_empty() {
        return Err(err(section_line, "missing \\data\\ declarations"));
    }
    let order = declared.len();

    let mut interner = Interner::new();
    let mut probs: Vec<HashMap<Box<[u32]>, f64>> = vec![HashMap::new(); order];
    let mut backoffs: Vec<HashMap<Box<[u32]>, f64>> = vec![HashMap::new(); order.saturating_sub(1)];

    let mut current = 1usize;
    let mut parsed_in_section = 0usize;
    let mut closed = false;
    for (idx, line) in &mut lines {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed == "\\end\\" {
            if parsed_in_section != declared[current - 1] {
                return Err(err(
                    idx,
                    &format!(
                        "section {current} declares {} entries but has {parsed_in_section}",
                        declared[current - 1]
                    ),
                ));
            }
            closed = true;
            break;
        }
        if let Some(rest) = trimmed.strip_prefix('\\') {
            if let Some(k) = rest
                .strip_suffix("-grams:")
                .and_then(|n| n.parse::<usize>().ok())
            {
                if parsed_in_section != declared[current - 1] {
                    return Err(err(
                        idx,
                        &format!(
                            "section {current} declares {} entries but has {parsed_in_section}",
                            declared[current - 1]
                        ),
                    ));
                }
                if k != current + 1 || k > order {
                    return Err(err(idx, "sections must appear in declared order"));
                }
                current = k;
                parsed_in_section = 0;
                continue;
            }
            return Err(err(idx, "unrecognized section marker"));
        }

        // Entry line: prob, k tokens, optional backoff.
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != current + 1 && fields.len() != current + 2 {
            return Err(err(
                idx,
                &format!(
                    "expected {} or {} fields for a {current}-gram entry, found {}",
                    current + 1,
                    current + 2,
                    fields.len()
                ),
            ));
        }
        let prob: f64 = fields[0]
            .parse()
            .map_err(|_| err(idx, "invalid probability"))?;
        let mut ids: Vec<u32> = Vec::with_capacity(current);
        for token in &fields[1..=current] {
            let id = if current == 1 {
                interner.intern_unchecked(token)
            } else {
                interner
                    .id_of(token)
                    .ok_or_else(|| err(idx, &format!("token {token:?} has no unigram entry")))?
            };
            ids.push(id);
        }
        let gram: Box<[u32]> = ids.into();
        if fields.len() == current + 2 {
            if current == order {
                return Err(err(idx, "top-order entries cannot carry a backoff weight"));
            }
            let bow: f64 = fields[current + 1]
                .parse()
                .map_err(|_| err(idx, "invalid backoff weight"))?;
            backoffs[current - 1].insert(gram.clone(), bow);
        }
        probs[current - 1].insert(gram, prob);
        parsed_in_section += 1;
    }
    if !closed {
        return Err(LmError::Parse {
            line: 0,
            message: "missing \\end\\ marker".to_string(),
        });
    }

    let event_count = probs[0]
        .keys()
        .filter(|gram| gram[0] != BOS_ID && gram[0] != UNK_ID)
        .count();
    Ok(KNModel {
        order,
        interner,
        probs,
        backoffs,
        event_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Corpus;
    use crate::ngram::{count_ngrams, estimate_discounts, estimate_model, score_sentence};

    fn corpus_of(sentences: &[&[&str]]) -> Corpus {
        let sentences = sentences
            .iter()
            .map(|s| s.iter().map(|t| t.to_string()).collect())
            .collect();
        Corpus::from_sentences("test", sentences, "inline").unwrap()
    }

    fn toks(words: &[&str]) -> Vec<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    fn small_model(order: usize) -> KNModel {
        let corpus = corpus_of(&[
            &["a", "b", "a", "c"],
            &["c", "b"],
            &["a", "a", "c", "b", "b"],
        ]);
        let counts = count_ngrams(&corpus, order).unwrap();
        estimate_model(&counts, &estimate_discounts(&counts)).unwrap()
    }

    #[test]
    fn round_trip_preserves_scores_exactly() {
        for order in [1, 2, 3, 5] {
            let model = small_model(order);
            let text = export_arpa_string(&model);
            let imported = import_arpa(&text).unwrap();
            for sentence in [&["a", "b", "c"][..], &["c", "c", "c"], &["a", "zzz"]] {
                let before = score_sentence(&model, &toks(sentence)).unwrap();
                let after = score_sentence(&imported, &toks(sentence)).unwrap();
                assert!(
                    (before.log10_prob - after.log10_prob).abs() <= 1e-4,
                    "order {order} sentence {sentence:?}: {} vs {}",
                    before.log10_prob,
                    after.log10_prob
                );
            }
        }
    }

    #[test]
    fn header_counts_match_section_sizes() {
        let model = small_model(3);
        let text = export_arpa_string(&model);
        let reimported = import_arpa(&text).unwrap();
        for k in 1..=3 {
            assert_eq!(model.entry_count(k), reimported.entry_count(k), "order {k}");
        }
        // and the header agrees with what the model reports
        for line in text.lines() {
            if let Some(rest) = line.strip_prefix("ngram ") {
                let (k, count) = rest.split_once('=').unwrap();
                let k: usize = k.parse().unwrap();
                let count: usize = count.parse().unwrap();
                assert_eq!(count, model.entry_count(k));
            }
        }
    }

    #[test]
    fn hand_written_unigram_model_scores_by_hand_arithmetic() {
        let text = "\\data\\\n\
                    ngram 1=2\n\
                    \n\
                    \\1-grams:\n\
                    -0.3010299956639812\ta\n\
                    -0.6989700043360187\t</s>\n\
                    \n\
                    \\end\\\n";
        let model = import_arpa(text).unwrap();
        // log10 P("a") = log10 p(a) + log10 p(</s>) = -0.30103 - 0.69897 = -1
        let score = score_sentence(&model, &toks(&["a"])).unwrap();
        assert!((score.log10_prob - (-1.0)).abs() < 1e-12);
        assert_eq!(score.length, 2);
    }

    #[test]
    fn exported_probabilities_are_finite_and_nonpositive() {
        let model = small_model(3);
        let text = export_arpa_string(&model);
        for line in text.lines() {
            let Some((first, rest)) = line.split_once('\t') else {
                continue;
            };
            let prob: f64 = first.parse().unwrap();
            assert!(prob <= 0.0, "positive log prob in {line:?}");
            if prob == UNUSED_PROB {
                // only the begin-marker context rows carry the placeholder
                assert!(rest.starts_with("<s>"));
            } else {
                assert!(prob.is_finite() && prob > UNUSED_PROB);
            }
        }
    }

    #[test]
    fn malformed_input_reports_line_numbers() {
        let text = "\\data\\\nngram 1=1\n\n\\1-grams:\nnot-a-number a\n\n\\end\\\n";
        match import_arpa(text) {
            Err(LmError::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn count_mismatch_is_rejected() {
        let text = "\\data\\\nngram 1=2\n\n\\1-grams:\n-0.5\ta\n\n\\end\\\n";
        assert!(matches!(import_arpa(text), Err(LmError::Parse { .. })));
    }

    #[test]
    fn unknown_token_in_higher_order_is_rejected() {
        let text = "\\data\\\nngram 1=1\nngram 2=1\n\n\\1-grams:\n-0.5\ta\t-0.3\n\n\\2-grams:\n-0.2\ta b\n\n\\end\\\n";
        assert!(matches!(import_arpa(text), Err(LmError::Parse { line: 9, .. })));
    }
}

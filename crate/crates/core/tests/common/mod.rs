//! Shared test support: an independent brute-force implementation of the
//! interpolated modified Kneser-Ney recursion.
//!
//! The oracle recounts n-grams with its own string-keyed maps and evaluates
//! conditional probabilities by direct top-down recursion, with no shared
//! code or precomputed tables, so agreement with the production model checks
//! the whole estimation and backoff machinery.

use std::collections::BTreeMap;

pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";

pub struct KnOracle {
    order: usize,
    raw: Vec<BTreeMap<Vec<String>, u64>>,
    continuation: Vec<BTreeMap<Vec<String>, u64>>,
    discounts: Vec<[f64; 3]>,
    event_count: usize,
}

impl KnOracle {
    pub fn build(sentences: &[Vec<String>], order: usize) -> KnOracle {
        let mut raw: Vec<BTreeMap<Vec<String>, u64>> = vec![BTreeMap::new(); order];
        for sentence in sentences {
            let mut padded: Vec<String> = vec![BOS.to_string(); order - 1];
            padded.extend(sentence.iter().cloned());
            padded.push(EOS.to_string());
            for end in (order - 1)..padded.len() {
                for k in 1..=order.min(end + 1) {
                    let gram = padded[end + 1 - k..=end].to_vec();
                    *raw[k - 1].entry(gram).or_insert(0) += 1;
                }
            }
        }
        let mut continuation: Vec<BTreeMap<Vec<String>, u64>> = vec![BTreeMap::new(); order];
        for k in 1..order {
            for gram in raw[k].keys() {
                *continuation[k - 1].entry(gram[1..].to_vec()).or_insert(0) += 1;
            }
        }
        let mut oracle = KnOracle {
            order,
            event_count: raw[0].len(),
            raw,
            continuation,
            discounts: Vec::new(),
        };
        for k in 1..=order {
            let mut histogram = [0u64; 4];
            for gram in oracle.raw[k - 1].keys() {
                let adjusted = oracle.adjusted(k, gram);
                if (1..=4).contains(&adjusted) {
                    histogram[(adjusted - 1) as usize] += 1;
                }
            }
            oracle.discounts.push(derive_discounts(histogram));
        }
        oracle
    }

    fn adjusted(&self, k: usize, gram: &[String]) -> u64 {
        if k == self.order || gram[0] == BOS {
            self.raw[k - 1].get(gram).copied().unwrap_or(0)
        } else {
            self.continuation[k - 1].get(gram).copied().unwrap_or(0)
        }
    }

    fn discount(&self, k: usize, count: u64) -> f64 {
        let [d1, d2, d3] = self.discounts[k - 1];
        match count {
            0 => 0.0,
            1 => d1,
            2 => d2,
            _ => d3,
        }
    }

    /// p(word | context) by direct recursion over shrinking contexts.
    pub fn prob(&self, context: &[String], word: &str) -> f64 {
        let start = context.len().saturating_sub(self.order - 1);
        self.prob_at(&context[start..], word)
    }

    fn prob_at(&self, context: &[String], word: &str) -> f64 {
        let k = context.len() + 1;
        if k == 1 {
            let mut total = 0u64;
            let mut discount_mass = 0.0;
            for gram in self.raw[0].keys() {
                let a = self.adjusted(1, gram);
                total += a;
                discount_mass += self.discount(1, a);
            }
            let gamma = discount_mass / total as f64;
            let uniform = 1.0 / (self.event_count as f64 + 1.0);
            let a = self.adjusted(1, &[word.to_string()]);
            return (a as f64 - self.discount(1, a)).max(0.0) / total as f64 + gamma * uniform;
        }
        let mut total = 0u64;
        let mut discount_mass = 0.0;
        for gram in self.raw[k - 1].keys() {
            if &gram[..k - 1] == context {
                let a = self.adjusted(k, gram);
                total += a;
                discount_mass += self.discount(k, a);
            }
        }
        if total == 0 {
            return self.prob_at(&context[1..], word);
        }
        let gamma = discount_mass / total as f64;
        let mut gram: Vec<String> = context.to_vec();
        gram.push(word.to_string());
        let a = self.adjusted(k, &gram);
        (a as f64 - self.discount(k, a)).max(0.0) / total as f64
            + gamma * self.prob_at(&context[1..], word)
    }

    /// Unigram event types, sorted.
    pub fn events(&self) -> Vec<String> {
        self.raw[0].keys().map(|gram| gram[0].clone()).collect()
    }
}

fn derive_discounts([n1, n2, n3, n4]: [u64; 4]) -> [f64; 3] {
    const FALLBACK: [f64; 3] = [0.5, 1.0, 1.5];
    if n1 == 0 {
        return FALLBACK;
    }
    let (n1, n2, n3, n4) = (n1 as f64, n2 as f64, n3 as f64, n4 as f64);
    let y = n1 / (n1 + 2.0 * n2);
    let candidates = [
        1.0 - 2.0 * y * n2 / n1,
        if n2 > 0.0 { 2.0 - 3.0 * y * n3 / n2 } else { f64::NAN },
        if n3 > 0.0 { 3.0 - 4.0 * y * n4 / n3 } else { f64::NAN },
    ];
    let mut out = [0.0; 3];
    for (class, candidate) in candidates.into_iter().enumerate() {
        let limit = (class + 1) as f64;
        out[class] = if candidate.is_finite() && candidate > 0.0 && candidate < limit {
            candidate
        } else {
            FALLBACK[class]
        };
    }
    out
}

/// Every context of length `0..=max_len` over the given symbols.
pub fn enumerate_contexts(symbols: &[String], max_len: usize) -> Vec<Vec<String>> {
    let mut contexts: Vec<Vec<String>> = vec![Vec::new()];
    let mut frontier: Vec<Vec<String>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for context in &frontier {
            for symbol in symbols {
                let mut extended = context.clone();
                extended.push(symbol.clone());
                next.push(extended);
            }
        }
        contexts.extend(next.iter().cloned());
        frontier = next;
    }
    contexts
}

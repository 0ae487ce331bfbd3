//! Count-class discounts for modified Kneser-Ney smoothing.

use super::counts::NGramCountTable;

/// Discounts applied to count classes 1, 2 and 3+ when a degenerate
/// count-of-count histogram makes the closed-form estimates unusable.
pub const FALLBACK_DISCOUNTS: [f64; 3] = [0.5, 1.0, 1.5];

/// Per-order absolute discounts for count classes 1, 2 and 3+.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscountSet {
    per_order: Vec<[f64; 3]>,
}

impl DiscountSet {
    /// `[D1, D2, D3+]` for order `k`.
    pub fn for_order(&self, k: usize) -> [f64; 3] {
        self.per_order[k - 1]
    }

    /// Discount applied to an event with adjusted count `count` at order `k`.
    pub fn applied(&self, k: usize, count: u64) -> f64 {
        let [d1, d2, d3] = self.for_order(k);
        match count {
            0 => 0.0,
            1 => d1,
            2 => d2,
            _ => d3,
        }
    }

    pub fn order(&self) -> usize {
        self.per_order.len()
    }
}

/// Estimate per-order discounts from count-of-count statistics.
///
/// Uses the closed-form estimates `Y = n1/(n1 + 2 n2)`,
/// `D1 = 1 - 2 Y n2/n1`, `D2 = 2 - 3 Y n3/n2`, `D3+ = 3 - 4 Y n4/n3`.
/// A discount falling outside `(0, k)` for count class `k`, or one whose
/// formula divides by zero, falls back to [`FALLBACK_DISCOUNTS`]. Keeping
/// every discount strictly positive guarantees that observed contexts always
/// reserve backoff mass, so unseen events keep nonzero probability.
pub fn estimate_discounts(counts: &NGramCountTable) -> DiscountSet {
    let per_order = (1..=counts.order())
        .map(|k| derive(counts.count_of_counts(k)))
        .collect();
    DiscountSet { per_order }
}

fn derive([n1, n2, n3, n4]: [u64; 4]) -> [f64; 3] {
    if n1 == 0 {
        return FALLBACK_DISCOUNTS;
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
            FALLBACK_DISCOUNTS[class]
        };
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Corpus;
    use crate::ngram::count_ngrams;

    #[test]
    fn closed_form_when_histogram_supports_it() {
        // n1=2, n2=1, n3=n4=0: Y = 2/4, D1 = 1 - 2*0.5*(1/2) = 0.5,
        // D2 and D3+ degenerate and fall back.
        let d = derive([2, 1, 0, 0]);
        assert!((d[0] - 0.5).abs() < 1e-12);
        assert_eq!(d[1], FALLBACK_DISCOUNTS[1]);
        assert_eq!(d[2], FALLBACK_DISCOUNTS[2]);
    }

    #[test]
    fn zero_singleton_count_falls_back_entirely() {
        assert_eq!(derive([0, 5, 3, 1]), FALLBACK_DISCOUNTS);
    }

    #[test]
    fn out_of_range_discounts_fall_back() {
        // n2 = 0 gives Y = 1 and D1 = 1.0, outside [0, 1).
        let d = derive([4, 0, 0, 0]);
        assert_eq!(d, FALLBACK_DISCOUNTS);
    }

    #[test]
    fn rich_histogram_stays_in_range() {
        let d = derive([100, 40, 20, 10]);
        for (class, value) in d.iter().enumerate() {
            assert!(*value > 0.0 && *value < (class + 1) as f64, "{d:?}");
        }
    }

    #[test]
    fn estimation_is_deterministic() {
        let corpus = Corpus::from_sentences(
            "d",
            vec![
                vec!["a".into(), "b".into(), "a".into()],
                vec!["b".into(), "c".into()],
            ],
            "inline",
        )
        .unwrap();
        let counts = count_ngrams(&corpus, 3).unwrap();
        assert_eq!(estimate_discounts(&counts), estimate_discounts(&counts));
    }
}

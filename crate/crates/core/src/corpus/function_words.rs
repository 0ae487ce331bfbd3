//! Bundled closed-class English function words.
//!
//! Used by the default content-word filter: tokens on this list (plus purely
//! non-alphabetic tokens) are treated as non-content words. The list covers
//! determiners, pronouns, prepositions, conjunctions, auxiliaries and a few
//! closed-class adverbs; it is intentionally conservative so that open-class
//! nouns, verbs and adjectives always survive filtering.

pub const FUNCTION_WORDS: &[&str] = &[
    // determiners and quantifiers
    "the", "a", "an", "this", "that", "these", "those", "each", "every", "either", "neither",
    "some", "any", "no", "all", "both", "few", "fewer", "many", "much", "more", "most", "several",
    "such", "own", "other", "another", "same", "certain", "enough",
    // pronouns
    "i", "you", "he", "she", "it", "we", "they", "me", "him", "her", "us", "them", "my", "your",
    "his", "its", "our", "their", "mine", "yours", "hers", "ours", "theirs", "myself", "yourself",
    "himself", "herself", "itself", "ourselves", "yourselves", "themselves", "who", "whom",
    "whose", "which", "what", "whatever", "whichever", "whoever", "whomever", "something",
    "anything", "nothing", "everything", "someone", "anyone", "everyone", "nobody", "somebody",
    "anybody", "everybody", "none", "one", "ones",
    // prepositions
    "of", "in", "on", "at", "by", "for", "with", "about", "against", "between", "among", "amid",
    "into", "through", "throughout", "during", "before", "after", "above", "below", "to", "from",
    "up", "down", "out", "off", "over", "under", "across", "behind", "beyond", "near", "onto",
    "upon", "within", "without", "along", "around", "despite", "except", "inside", "outside",
    "per", "since", "toward", "towards", "underneath", "until", "till", "unto", "via", "versus",
    // conjunctions and complementizers
    "and", "but", "or", "nor", "so", "yet", "because", "although", "though", "while", "if",
    "unless", "whereas", "whether", "once", "when", "whenever", "where", "wherever", "why", "how",
    "as", "than", "that's", "lest",
    // auxiliaries and copulas
    "am", "is", "are", "was", "were", "be", "been", "being", "have", "has", "had", "having", "do",
    "does", "did", "doing", "will", "would", "shall", "should", "may", "might", "must", "can",
    "could", "ought", "need", "dare",
    // contracted clitics produced by punctuation splitting
    "s", "re", "ve", "ll", "d", "m", "t", "nt",
    // negation and closed-class adverbs
    "not", "n't", "only", "just", "also", "too", "very", "then", "there", "here", "now", "ever",
    "never", "always", "often", "sometimes", "soon", "already", "still", "even", "quite",
    "rather", "almost", "else", "perhaps", "maybe", "again", "further", "thus", "hence",
    "however", "therefore", "moreover", "meanwhile", "instead", "otherwise", "anyway",
    // politeness and discourse markers
    "yes", "please", "well", "oh", "ok", "okay",
];

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn list_is_nonempty_and_deduplicated() {
        let set: HashSet<&str> = FUNCTION_WORDS.iter().copied().collect();
        assert!(!FUNCTION_WORDS.is_empty());
        assert_eq!(set.len(), FUNCTION_WORDS.len());
    }

    #[test]
    fn entries_are_lowercase() {
        for word in FUNCTION_WORDS {
            assert_eq!(**word, word.to_lowercase(), "{word} is not lowercase");
        }
    }
}

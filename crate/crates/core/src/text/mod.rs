//! Deterministic text utilities shared by ingestion and linking:
//! tokenization, mention normalization, suffix stemming, the rule-based
//! tagger behind rare-reference extraction, and stopword lists.

mod normalize;
mod stem;
mod stopwords;
mod tagger;

pub use normalize::{is_acronym, normalize};
pub use stem::{stem_mention, Stemmed, SuffixStemmer};
pub use stopwords::StopwordList;
pub use tagger::{rare_reference_spans, Tag, Tagger};

/// Lowercased tokens over Unicode word boundaries (alphanumeric runs).
pub fn tokens(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in text.chars() {
        if ch.is_alphanumeric() {
            for lc in ch.to_lowercase() {
                cur.push(lc);
            }
        } else if !cur.is_empty() {
            out.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

/// Byte spans `(start, end)` of the alphanumeric token runs in `text`.
pub fn token_spans(text: &str) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, ch) in text.char_indices() {
        if ch.is_alphanumeric() {
            if start.is_none() {
                start = Some(i);
            }
        } else if let Some(s) = start.take() {
            out.push((s, i));
        }
    }
    if let Some(s) = start {
        out.push((s, text.len()));
    }
    out
}

/// First sentence of a description: the text up to the earlier of a line
/// break or a `". "` sentence boundary.
pub fn first_sentence(text: &str) -> &str {
    let line_end = text.find(['\n', '\r']);
    let period = text.find(". ").map(|i| i + 1);
    match (line_end, period) {
        (Some(l), Some(p)) => &text[..l.min(p)],
        (Some(l), None) => &text[..l],
        (None, Some(p)) => &text[..p],
        (None, None) => text,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_lowercase_and_split_on_punctuation() {
        assert_eq!(tokens("the Big Apple"), vec!["the", "big", "apple"]);
        assert_eq!(tokens("Mr. & Mrs. Smith"), vec!["mr", "mrs", "smith"]);
        assert_eq!(tokens(""), Vec::<String>::new());
    }

    #[test]
    fn token_spans_cover_exact_substrings() {
        let s = "Jon Voight, actor.";
        let spans = token_spans(s);
        let words: Vec<&str> = spans.iter().map(|&(a, b)| &s[a..b]).collect();
        assert_eq!(words, vec!["Jon", "Voight", "actor"]);
    }

    #[test]
    fn first_sentence_stops_at_period_or_newline() {
        assert_eq!(
            first_sentence("Jon Voight is an actor. He was born in 1938."),
            "Jon Voight is an actor."
        );
        assert_eq!(first_sentence("line one\nline two"), "line one");
        assert_eq!(first_sentence("no boundary"), "no boundary");
        assert_eq!(first_sentence("ends with period."), "ends with period.");
    }
}

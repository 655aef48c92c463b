//! Per-token suffix stemming driven by a per-language suffix table.
//!
//! The table is data, not an algorithm: each line maps a suffix to a
//! replacement, the longest matching suffix wins, and a rule only fires if
//! the stemmed token keeps at least [`MIN_STEM_CHARS`] characters. Tokens
//! no rule fires on are passed through byte-identical.

use std::sync::OnceLock;

use crate::error::Error;

const EN_TABLE: &str = include_str!("../data/stem_en.tsv");

/// Minimum character count a stemmed token must keep for a rule to fire.
pub const MIN_STEM_CHARS: usize = 3;

/// Suffix-stripping stemmer backed by a rule table.
#[derive(Debug, Clone)]
pub struct SuffixStemmer {
    /// (suffix, replacement), sorted by descending suffix length.
    rules: Vec<(String, String)>,
}

impl SuffixStemmer {
    /// Parses a `suffix<TAB>replacement` table; `-` denotes the empty
    /// replacement.
    pub fn from_tsv(text: &str) -> Result<Self, Error> {
        let mut rules = Vec::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (suffix, repl) = line.split_once('\t').ok_or_else(|| {
                Error::InvalidConfig(format!("stem table line {}: expected TAB", no + 1))
            })?;
            let repl = if repl == "-" { "" } else { repl };
            rules.push((suffix.to_string(), repl.to_string()));
        }
        rules.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.0.cmp(&b.0)));
        Ok(Self { rules })
    }

    /// The shipped English table.
    pub fn english() -> &'static SuffixStemmer {
        static EN: OnceLock<SuffixStemmer> = OnceLock::new();
        EN.get_or_init(|| SuffixStemmer::from_tsv(EN_TABLE).expect("shipped table is valid"))
    }

    /// Stemmer for a language tag, if a table is shipped for it.
    pub fn for_language(language: &str) -> Option<&'static SuffixStemmer> {
        match language {
            "en" => Some(Self::english()),
            _ => None,
        }
    }

    /// Applies the longest matching rule to a lowercase token. Returns
    /// `None` when no rule fires.
    pub fn stem_token(&self, lower: &str) -> Option<String> {
        for (suffix, repl) in &self.rules {
            if let Some(stem) = lower.strip_suffix(suffix.as_str()) {
                let mut out = String::with_capacity(stem.len() + repl.len());
                out.push_str(stem);
                out.push_str(repl);
                if out.chars().count() >= MIN_STEM_CHARS {
                    return Some(out);
                }
            }
        }
        None
    }
}

/// Result of [`stem_mention`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stemmed {
    pub text: String,
    /// False when no table is shipped for the requested language; the text
    /// is then the identity transform.
    pub language_supported: bool,
}

/// Stems each whitespace token of `text` with the language's suffix table.
/// Tokens a rule fired on are re-cased (first letter upper, rest lower);
/// untouched tokens stay byte-identical, so `"Paris"` stays `"Paris"` and
/// `"Northern India"` becomes `"North India"`.
pub fn stem_mention(text: &str, language: &str) -> Stemmed {
    let Some(stemmer) = SuffixStemmer::for_language(language) else {
        return Stemmed {
            text: text.to_string(),
            language_supported: false,
        };
    };
    let mut out = String::with_capacity(text.len());
    for token in text.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        match stemmer.stem_token(&token.to_lowercase()) {
            Some(stem) => {
                let mut chars = stem.chars();
                if let Some(first) = chars.next() {
                    out.extend(first.to_uppercase());
                    out.push_str(chars.as_str());
                }
            }
            None => out.push_str(token),
        }
    }
    Stemmed {
        text: out,
        language_supported: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn northern_india_becomes_north_india() {
        let s = stem_mention("Northern India", "en");
        assert_eq!(s.text, "North India");
        assert!(s.language_supported);
    }

    #[test]
    fn paris_is_untouched() {
        assert_eq!(stem_mention("Paris", "en").text, "Paris");
    }

    #[test]
    fn houses_prices_follow_the_shipped_table() {
        // Hand application of the shipped rules: "houses" and "prices" both
        // end in "-es" -> "e"; no longer suffix matches.
        assert_eq!(stem_mention("Houses Prices", "en").text, "House Price");
    }

    #[test]
    fn min_stem_length_blocks_short_results() {
        // "yes" - "es" + "e" = "ye" (2 chars) stays untouched.
        assert_eq!(stem_mention("Yes", "en").text, "Yes");
    }

    #[test]
    fn unsupported_language_is_identity_with_flag() {
        let s = stem_mention("Nördliches Indien", "xx");
        assert_eq!(s.text, "Nördliches Indien");
        assert!(!s.language_supported);
    }

    #[test]
    fn acronyms_pass_through_untouched() {
        assert_eq!(stem_mention("PSG", "en").text, "PSG");
    }
}

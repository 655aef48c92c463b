//! Deterministic rule-based tagger and the rare-reference span extractor.
//!
//! The tagger replaces a statistical POS tagger with three layered rules:
//! a shipped lexicon, suffix heuristics ("-an", "-ish", "-ous" and friends
//! for adjectives, "-er", "-ion" and friends for nouns), and a
//! capitalized-inside-sentence fallback to noun. Rare references are the
//! maximal token spans matching `ADJ (ADJ|NOUN)* NOUN` in the first
//! sentence of a resource description.

use std::collections::{BTreeSet, HashMap};
use std::sync::OnceLock;

use crate::error::Error;
use crate::text::{first_sentence, token_spans};

const EN_LEXICON: &str = include_str!("../data/lexicon_en.tsv");

/// Suffixes tagged adjective, with the minimum word length (in chars) the
/// rule applies to.
const ADJ_SUFFIXES: &[(&str, usize)] = &[
    ("ous", 5),
    ("ish", 5),
    ("ese", 5),
    ("ian", 5),
    ("ful", 5),
    ("less", 6),
    ("ive", 5),
    ("an", 5),
];

/// Suffixes tagged noun, with minimum word length.
const NOUN_SUFFIXES: &[(&str, usize)] = &[
    ("ness", 6),
    ("ment", 6),
    ("ship", 6),
    ("ist", 5),
    ("ion", 5),
    ("ism", 5),
    ("ity", 5),
    ("ess", 5),
    ("er", 4),
    ("or", 4),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tag {
    Adjective,
    Noun,
    Other,
}

#[derive(Debug, Clone)]
pub struct Tagger {
    lexicon: HashMap<String, Tag>,
}

impl Tagger {
    /// Parses a `word<TAB>TAG` lexicon with tags `ADJ`, `NOUN`, `OTHER`.
    pub fn from_tsv(text: &str) -> Result<Self, Error> {
        let mut lexicon = HashMap::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (word, tag) = line.split_once('\t').ok_or_else(|| {
                Error::InvalidConfig(format!("lexicon line {}: expected TAB", no + 1))
            })?;
            let tag = match tag.trim() {
                "ADJ" => Tag::Adjective,
                "NOUN" => Tag::Noun,
                "OTHER" => Tag::Other,
                other => {
                    return Err(Error::InvalidConfig(format!(
                        "lexicon line {}: unknown tag {other:?}",
                        no + 1
                    )))
                }
            };
            lexicon.insert(word.to_lowercase(), tag);
        }
        Ok(Self { lexicon })
    }

    /// The shipped English lexicon.
    pub fn english() -> &'static Tagger {
        static EN: OnceLock<Tagger> = OnceLock::new();
        EN.get_or_init(|| Tagger::from_tsv(EN_LEXICON).expect("shipped lexicon is valid"))
    }

    /// Tags one word. `sentence_initial` suppresses the capitalization rule
    /// for the first token of a sentence.
    pub fn tag(&self, word: &str, sentence_initial: bool) -> Tag {
        let lower = word.to_lowercase();
        if let Some(&tag) = self.lexicon.get(&lower) {
            return tag;
        }
        let len = lower.chars().count();
        for &(suffix, min_len) in ADJ_SUFFIXES {
            if len >= min_len && lower.ends_with(suffix) {
                return Tag::Adjective;
            }
        }
        for &(suffix, min_len) in NOUN_SUFFIXES {
            if len >= min_len && lower.ends_with(suffix) {
                return Tag::Noun;
            }
        }
        if !sentence_initial && word.chars().next().is_some_and(char::is_uppercase) {
            return Tag::Noun;
        }
        Tag::Other
    }
}

/// Extracts rare-reference surface forms from a resource description: every
/// maximal span matching `ADJ (ADJ|NOUN)* NOUN` in the first sentence,
/// returned verbatim as substrings of that sentence.
pub fn rare_reference_spans(description: &str, tagger: &Tagger) -> BTreeSet<String> {
    let sentence = first_sentence(description);
    let spans = token_spans(sentence);
    let tags: Vec<Tag> = spans
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| tagger.tag(&sentence[a..b], i == 0))
        .collect();

    let mut out = BTreeSet::new();
    let mut i = 0;
    while i < tags.len() {
        if tags[i] != Tag::Adjective {
            i += 1;
            continue;
        }
        let mut j = i + 1;
        while j < tags.len() && matches!(tags[j], Tag::Adjective | Tag::Noun) {
            j += 1;
        }
        // Trim the run back to its last noun; a span must end on one.
        let last_noun = (i + 1..j).rev().find(|&k| tags[k] == Tag::Noun);
        if let Some(k) = last_noun {
            out.insert(sentence[spans[i].0..spans[k].1].to_string());
        }
        i = j;
    }
    out
}

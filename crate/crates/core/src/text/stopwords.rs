//! Stopword lists: one plain-text word-per-line file per language.

use std::collections::HashSet;
use std::path::Path;
use std::sync::OnceLock;

use crate::error::Error;

const EN_WORDS: &str = include_str!("../data/stopwords_en.txt");

#[derive(Debug, Clone, Default)]
pub struct StopwordList {
    words: HashSet<String>,
}

impl StopwordList {
    /// Empty list: nothing is filtered.
    pub fn empty() -> Self {
        Self::default()
    }

    /// One word per line; blank lines and `#` comments are skipped. Words
    /// are matched lowercase.
    pub fn from_text(text: &str) -> Self {
        let words = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.to_lowercase())
            .collect();
        Self { words }
    }

    pub fn from_file(path: &Path) -> Result<Self, Error> {
        Ok(Self::from_text(&std::fs::read_to_string(path)?))
    }

    /// The shipped English list.
    pub fn english() -> &'static StopwordList {
        static EN: OnceLock<StopwordList> = OnceLock::new();
        EN.get_or_init(|| StopwordList::from_text(EN_WORDS))
    }

    /// Shipped list for a language tag; unknown languages get an empty list.
    pub fn for_language(language: &str) -> StopwordList {
        match language {
            "en" => Self::english().clone(),
            _ => Self::empty(),
        }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

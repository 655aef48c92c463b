//! Acronym index: a user-supplied `ACRONYM<TAB>expansion` TSV mapping
//! uppercase acronyms to their expansions, file order preserved.

use std::collections::HashMap;
use std::path::Path;

use crate::error::Error;
use crate::Result;

#[derive(Debug, Clone, Default)]
pub struct AcronymIndex {
    /// (acronym, expansion) in file order.
    entries: Vec<(String, String)>,
    by_key: HashMap<String, Vec<u32>>,
}

impl AcronymIndex {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_tsv(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim_end_matches(['\r']);
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, expansion) = line.split_once('\t').ok_or_else(|| Error::InvalidFormat {
                file: "acronyms".into(),
                reason: format!("line {}: expected ACRONYM<TAB>expansion", no + 1),
            })?;
            let key = key.trim();
            let expansion = expansion.trim();
            if key.is_empty() || expansion.is_empty() {
                return Err(Error::InvalidFormat {
                    file: "acronyms".into(),
                    reason: format!("line {}: empty field", no + 1),
                });
            }
            entries.push((key.to_string(), expansion.to_string()));
        }
        Ok(Self::from_entries(entries))
    }

    pub fn from_entries(entries: Vec<(String, String)>) -> Self {
        let mut by_key: HashMap<String, Vec<u32>> = HashMap::new();
        for (i, (key, _)) in entries.iter().enumerate() {
            by_key.entry(key.clone()).or_default().push(i as u32);
        }
        Self { entries, by_key }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_tsv(&std::fs::read_to_string(path)?)
    }

    /// All expansions recorded for the exact key, in file order.
    pub fn lookup(&self, acronym: &str) -> Vec<&str> {
        self.by_key
            .get(acronym)
            .map(|ids| {
                ids.iter()
                    .map(|&i| self.entries[i as usize].1.as_str())
                    .collect()
            })
            .unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_returns_expansions_in_file_order() {
        let idx = AcronymIndex::from_tsv("UN\tUnited Nations\nPSG\tParis Saint-Germain\nUN\tUnión Nacional\n").unwrap();
        assert_eq!(idx.lookup("PSG"), vec!["Paris Saint-Germain"]);
        assert_eq!(idx.lookup("UN"), vec!["United Nations", "Unión Nacional"]);
    }

    #[test]
    fn unknown_acronym_is_empty() {
        let idx = AcronymIndex::from_tsv("LA\tLos Angeles\n").unwrap();
        assert!(idx.lookup("ZZZZZ").is_empty());
    }

    #[test]
    fn malformed_line_is_rejected() {
        assert!(AcronymIndex::from_tsv("NO_TAB_HERE\n").is_err());
    }
}

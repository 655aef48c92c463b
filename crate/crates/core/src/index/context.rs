//! TF-IDF context index over per-resource token multisets.
//!
//! Scheme: raw term frequency, idf = ln(N / df), no length normalization.
//! The query is the bag of co-mention tokens plus the target mention's
//! tokens counted twice.

use std::collections::{BTreeMap, HashMap};

use crate::text;

/// Query shape for the context search.
#[derive(Debug, Clone)]
pub struct ContextQuery {
    pub mention_text: String,
    /// All other entity mentions in the document.
    pub co_mention_texts: Vec<String>,
}

#[derive(Debug, Clone, Default)]
pub struct ContextIndex {
    /// Sorted by node id.
    docs: Vec<(u32, BTreeMap<String, u32>)>,
    doc_of_node: HashMap<u32, u32>,
    /// term -> (doc index, tf), doc indexes ascending.
    postings: HashMap<String, Vec<(u32, u32)>>,
}

impl ContextIndex {
    pub fn build(mut docs: Vec<(u32, BTreeMap<String, u32>)>) -> ContextIndex {
        docs.sort_by_key(|(node, _)| *node);
        let doc_of_node = docs
            .iter()
            .enumerate()
            .map(|(i, (node, _))| (*node, i as u32))
            .collect();
        let mut postings: HashMap<String, Vec<(u32, u32)>> = HashMap::new();
        for (i, (_, counts)) in docs.iter().enumerate() {
            for (term, &tf) in counts {
                postings.entry(term.clone()).or_default().push((i as u32, tf));
            }
        }
        ContextIndex {
            docs,
            doc_of_node,
            postings,
        }
    }

    pub fn doc_count(&self) -> usize {
        self.docs.len()
    }

    pub fn docs(&self) -> &[(u32, BTreeMap<String, u32>)] {
        &self.docs
    }

    pub fn document_for(&self, node: u32) -> Option<&BTreeMap<String, u32>> {
        self.doc_of_node
            .get(&node)
            .map(|&i| &self.docs[i as usize].1)
    }

    /// TF-IDF search: every document sharing at least one query term is a
    /// hit (a term occurring in every document has idf 0 but still
    /// matches), returned up to `top_k`, ordered (score desc, node asc).
    pub fn search(&self, query: &ContextQuery, top_k: usize) -> Vec<(u32, f64)> {
        if self.docs.is_empty() || top_k == 0 {
            return Vec::new();
        }
        // Query bag: co-mentions once, the mention itself twice.
        let mut bag: BTreeMap<String, u32> = BTreeMap::new();
        for co in &query.co_mention_texts {
            for token in text::tokens(co) {
                *bag.entry(token).or_insert(0) += 1;
            }
        }
        for token in text::tokens(&query.mention_text) {
            *bag.entry(token).or_insert(0) += 2;
        }

        let n = self.docs.len() as f64;
        let mut scores: Vec<f64> = vec![0.0; self.docs.len()];
        let mut matched: Vec<bool> = vec![false; self.docs.len()];
        for (term, &qtf) in &bag {
            let Some(postings) = self.postings.get(term) else {
                continue;
            };
            let idf = (n / postings.len() as f64).ln();
            for &(doc, tf) in postings {
                matched[doc as usize] = true;
                scores[doc as usize] += qtf as f64 * tf as f64 * idf;
            }
        }

        let mut hits: Vec<(u32, f64)> = scores
            .into_iter()
            .enumerate()
            .filter(|&(i, _)| matched[i])
            .map(|(i, s)| (self.docs[i].0, s))
            .collect();
        hits.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        hits.truncate(top_k);
        hits
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(node: u32, tokens: &[(&str, u32)]) -> (u32, BTreeMap<String, u32>) {
        (
            node,
            tokens.iter().map(|&(t, c)| (t.to_string(), c)).collect(),
        )
    }

    fn query(mention: &str, co: &[&str]) -> ContextQuery {
        ContextQuery {
            mention_text: mention.to_string(),
            co_mention_texts: co.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn unmatched_query_returns_nothing() {
        let idx = ContextIndex::build(vec![doc(0, &[("jolie", 1)])]);
        assert!(idx.search(&query("zzz", &[]), 10).is_empty());
    }

    #[test]
    fn single_document_match_ranks_first() {
        // One document: idf = ln(1/1) = 0, but the only candidate still
        // comes back ranked first.
        let idx = ContextIndex::build(vec![doc(7, &[("jolie", 1), ("actress", 1)])]);
        let hits = idx.search(&query("Jolie", &[]), 10);
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].0, 7);
    }

    #[test]
    fn three_document_ranking_matches_hand_computed_table() {
        // Documents:               df   idf = ln(3/df)
        //   d0: jon 2, voight 1    jon: 2 -> ln(1.5)
        //   d1: jon 1, lovitz 3    voight: 1 -> ln(3)
        //   d2: angelina 2         angelina: 1 -> ln(3)
        // Query "jon" (x2 as mention) + co-mention "angelina" (x1):
        //   score(d0) = 2*2*ln(1.5)            = 4 ln 1.5
        //   score(d1) = 2*1*ln(1.5)            = 2 ln 1.5
        //   score(d2) = 1*2*ln(3)              = 2 ln 3
        // ln3 ~= 1.0986 so 2 ln 3 ~= 2.197 > 4 ln 1.5 ~= 1.622 > 2 ln 1.5.
        let idx = ContextIndex::build(vec![
            doc(0, &[("jon", 2), ("voight", 1)]),
            doc(1, &[("jon", 1), ("lovitz", 3)]),
            doc(2, &[("angelina", 2)]),
        ]);
        let hits = idx.search(&query("jon", &["angelina"]), 10);
        let order: Vec<u32> = hits.iter().map(|h| h.0).collect();
        assert_eq!(order, vec![2, 0, 1]);
        let score_of = |node: u32| hits.iter().find(|h| h.0 == node).unwrap().1;
        assert!((score_of(0) - 4.0 * 1.5f64.ln()).abs() < 1e-12);
        assert!((score_of(1) - 2.0 * 1.5f64.ln()).abs() < 1e-12);
        assert!((score_of(2) - 2.0 * 3.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn top_k_truncates_after_ordering() {
        let idx = ContextIndex::build(vec![
            doc(0, &[("x", 1)]),
            doc(1, &[("x", 2)]),
            doc(2, &[("x", 3)]),
            doc(3, &[("other", 1)]),
        ]);
        let hits = idx.search(&query("x", &[]), 2);
        assert_eq!(hits.len(), 2);
        assert_eq!(hits[0].0, 2);
        assert_eq!(hits[1].0, 1);
    }

    #[test]
    fn universal_term_matches_with_zero_score() {
        let idx = ContextIndex::build(vec![doc(0, &[("the", 5)]), doc(1, &[("the", 1)])]);
        // idf = ln(2/2) = 0: both documents still match, tied at zero,
        // ordered by node id.
        let hits = idx.search(&query("the", &[]), 10);
        assert_eq!(hits, vec![(0, 0.0), (1, 0.0)]);
    }
}

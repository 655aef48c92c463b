//! Candidate generation: mention preprocessing, in-document co-reference,
//! the three-tier search (acronym, label with exact-principal shortcut and
//! stemmed retry, context), the trigram and direct-link filters, and the
//! popularity-based top-k truncation.

use std::collections::BTreeMap;

use crate::api::{Document, Mention};
use crate::config::LinkerConfig;
use crate::index::trigram::{jaccard, trigram_list};
use crate::index::{ContextQuery, IndexBundle, SurfaceHit};
use crate::text::stem_mention;

pub use crate::text::{is_acronym, normalize};

/// How many raw hits to fetch per candidate-cap slot before the popularity
/// sort ("the number of candidates retrieved from the index is increased").
pub const RETRIEVAL_WIDEN_FACTOR: usize = 5;

/// Which tier produced a candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CandidateOrigin {
    Acronym,
    Label,
    StemmedLabel,
    Context,
}

/// A scored KB resource hypothesis for one mention.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub(crate) node: u32,
    pub iri: String,
    pub matched_surface: String,
    pub trigram_score: f64,
    pub popularity: f64,
    pub origin: CandidateOrigin,
}

/// A co-reference group: `members` (ascending mention indices) share the
/// head's candidates and final assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MentionGroup {
    pub head: usize,
    pub members: Vec<usize>,
}

/// Groups mentions whose normalized text is a strict token-subsequence of a
/// longer mention's normalized text; the longest such mention (earliest on
/// ties) becomes the group head. "Obama" attaches to "Barack Obama".
pub fn resolve_coreferences(mentions: &[Mention]) -> Vec<MentionGroup> {
    let token_lists: Vec<Vec<String>> = mentions
        .iter()
        .map(|m| {
            normalize(&m.text)
                .split_whitespace()
                .map(str::to_string)
                .collect()
        })
        .collect();

    let head_of: Vec<usize> = (0..mentions.len())
        .map(|i| {
            let mut best = i;
            let mut best_len = token_lists[i].len();
            let mut best_start = mentions[i].start;
            for j in 0..mentions.len() {
                if j == i || token_lists[j].len() <= token_lists[i].len() {
                    continue;
                }
                if !is_token_subsequence(&token_lists[i], &token_lists[j]) {
                    continue;
                }
                let better = token_lists[j].len() > best_len
                    || (token_lists[j].len() == best_len && mentions[j].start < best_start);
                if better || best == i {
                    best = j;
                    best_len = token_lists[j].len();
                    best_start = mentions[j].start;
                }
            }
            best
        })
        .collect();

    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &head) in head_of.iter().enumerate() {
        groups.entry(head).or_default().push(i);
    }
    groups
        .into_iter()
        .map(|(head, members)| MentionGroup { head, members })
        .collect()
}

fn is_token_subsequence(needle: &[String], haystack: &[String]) -> bool {
    let mut it = haystack.iter();
    needle.iter().all(|t| it.any(|h| h == t))
}

/// A mention after preprocessing: the (possibly co-reference-substituted)
/// query string and the acronym flag. Acronyms bypass normalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MentionQuery {
    pub query: String,
    pub acronym: bool,
}

/// Preprocesses a single mention text: acronyms pass through verbatim,
/// everything else is normalized.
pub fn preprocess_mention(text: &str) -> MentionQuery {
    if is_acronym(text) {
        MentionQuery {
            query: text.to_string(),
            acronym: true,
        }
    } else {
        MentionQuery {
            query: normalize(text),
            acronym: false,
        }
    }
}

/// Per-mention queries for a whole document, with co-reference head
/// substitution when enabled.
pub(crate) fn mention_queries(document: &Document, config: &LinkerConfig) -> Vec<MentionQuery> {
    if !config.use_coreference {
        return document
            .mentions
            .iter()
            .map(|m| preprocess_mention(&m.text))
            .collect();
    }
    let groups = resolve_coreferences(&document.mentions);
    let mut head_of = vec![0usize; document.mentions.len()];
    for g in &groups {
        for &m in &g.members {
            head_of[m] = g.head;
        }
    }
    (0..document.mentions.len())
        .map(|i| preprocess_mention(&document.mentions[head_of[i]].text))
        .collect()
}

/// Acronym, label and stemmed-label tiers for one query; candidates are
/// deduplicated per resource (best trigram score wins) but not yet capped.
pub(crate) fn tier_search(
    bundle: &IndexBundle,
    query: &MentionQuery,
    config: &LinkerConfig,
) -> Vec<Candidate> {
    let mut hits: Vec<(SurfaceHit, CandidateOrigin)> = Vec::new();

    if query.acronym && config.use_acronyms {
        // Hits of every expansion merge into one pool. The expansion
        // replaces the mention, so it is normalized like any label query
        // (only the acronym itself bypasses preprocessing).
        for expansion in bundle.search_acronym(&query.query) {
            for h in bundle.search_surface(&normalize(expansion), config.sigma, false) {
                hits.push((h, CandidateOrigin::Acronym));
            }
        }
    } else {
        for h in bundle.search_surface(&query.query, config.sigma, true) {
            hits.push((h, CandidateOrigin::Label));
        }
    }

    if hits.is_empty() {
        let stemmed = stem_mention(&query.query, &config.language);
        if stemmed.text != query.query {
            for h in bundle.search_surface(&stemmed.text, config.sigma, true) {
                hits.push((h, CandidateOrigin::StemmedLabel));
            }
        }
    }

    dedup_by_node(bundle, hits)
}

fn dedup_by_node(
    bundle: &IndexBundle,
    hits: Vec<(SurfaceHit, CandidateOrigin)>,
) -> Vec<Candidate> {
    let mut best: BTreeMap<u32, Candidate> = BTreeMap::new();
    for (h, origin) in hits {
        let surface = bundle.surface_str(h.surface_id);
        let replace = match best.get(&h.node) {
            None => true,
            Some(cur) => {
                h.trigram_score > cur.trigram_score
                    || (h.trigram_score == cur.trigram_score
                        && surface < cur.matched_surface.as_str())
            }
        };
        if replace {
            best.insert(
                h.node,
                Candidate {
                    node: h.node,
                    iri: bundle.iri(h.node).to_string(),
                    matched_surface: surface.to_string(),
                    trigram_score: h.trigram_score,
                    popularity: h.popularity,
                    origin,
                },
            );
        }
    }
    best.into_values().collect()
}

/// Sorts by (popularity desc, trigram score desc, IRI asc) and truncates.
pub fn popularity_rerank(mut candidates: Vec<Candidate>, cap: usize) -> Vec<Candidate> {
    candidates.sort_by(|a, b| {
        b.popularity
            .total_cmp(&a.popularity)
            .then_with(|| b.trigram_score.total_cmp(&a.trigram_score))
            .then_with(|| a.iri.cmp(&b.iri))
    });
    candidates.truncate(cap);
    candidates
}

/// Widens, popularity-sorts and caps a tier's raw candidates.
pub(crate) fn finalize_candidates(
    mut candidates: Vec<Candidate>,
    config: &LinkerConfig,
) -> Vec<Candidate> {
    candidates.sort_by(|a, b| {
        b.trigram_score
            .total_cmp(&a.trigram_score)
            .then_with(|| a.iri.cmp(&b.iri))
    });
    if config.use_popularity {
        candidates.truncate(config.candidate_cap * RETRIEVAL_WIDEN_FACTOR);
        popularity_rerank(candidates, config.candidate_cap)
    } else {
        candidates.truncate(config.candidate_cap);
        candidates
    }
}

/// Context tier for one unresolved mention. `anchors` are the resources the
/// other mentions already retrieved through their non-context tiers; the
/// direct-link filter keeps context hits connected to them (or to fellow
/// survivors). When no survivor has any link, all survivors are kept so
/// the disambiguation graph still receives input.
pub(crate) fn context_tier(
    bundle: &IndexBundle,
    document: &Document,
    queries: &[MentionQuery],
    mention_index: usize,
    anchors: &[u32],
    config: &LinkerConfig,
) -> Vec<Candidate> {
    let query = ContextQuery {
        mention_text: queries[mention_index].query.clone(),
        co_mention_texts: document
            .mentions
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != mention_index)
            .map(|(_, m)| m.text.clone())
            .collect(),
    };
    let widen = if config.use_popularity {
        RETRIEVAL_WIDEN_FACTOR
    } else {
        1
    };
    let hits = bundle.search_context(&query, config.candidate_cap * widen);

    let mention_query = &queries[mention_index].query;
    let mut survivors: Vec<(u32, String, f64)> = Vec::new();
    for (node, _) in hits {
        let (surface, sim) = best_similarity(bundle, node, mention_query);
        if sim >= config.sigma {
            survivors.push((node, surface, sim));
        }
    }

    let survivor_nodes: Vec<u32> = survivors.iter().map(|s| s.0).collect();
    let mut kept: Vec<(u32, String, f64)> = survivors
        .iter()
        .filter(|(node, _, _)| {
            let mut others: Vec<u32> = survivor_nodes
                .iter()
                .copied()
                .filter(|n| n != node)
                .collect();
            others.extend(anchors.iter().copied().filter(|n| n != node));
            bundle.direct_link_count(*node, &others) > 0
        })
        .cloned()
        .collect();
    if kept.is_empty() {
        kept = survivors;
    }

    kept.into_iter()
        .map(|(node, matched_surface, trigram_score)| Candidate {
            node,
            iri: bundle.iri(node).to_string(),
            matched_surface,
            trigram_score,
            popularity: bundle.popularity().score(node),
            origin: CandidateOrigin::Context,
        })
        .collect()
}

/// Best trigram similarity between the mention query and any surface or
/// context token of the resource; ties pick the lexicographically smallest
/// string. Person permutations make single tokens like "Jon" reachable for
/// resources labeled "Jon Voight"; context tokens cover KBs without them.
/// Digit-only strings are screened here like everywhere else.
fn best_similarity(bundle: &IndexBundle, node: u32, query: &str) -> (String, f64) {
    let qt = trigram_list(query);
    let mut best_sim = 0.0f64;
    let mut best_str = String::new();
    let mut found = false;

    let mut consider = |s: &str, sim: f64| {
        if !found || sim > best_sim || (sim == best_sim && s < best_str.as_str()) {
            best_sim = sim;
            best_str = s.to_string();
            found = true;
        }
    };

    for &sid in bundle.surfaces_of(node) {
        let entry = bundle.surfaces().entry(sid);
        if entry.digits_only {
            continue;
        }
        consider(&entry.surface, jaccard(&qt, &entry.trigrams));
    }
    if let Some(doc) = bundle.contexts().document_for(node) {
        for term in doc.keys() {
            if term.chars().all(|c| c.is_ascii_digit()) {
                continue;
            }
            consider(term, jaccard(&qt, &trigram_list(term)));
        }
    }

    (best_str, best_sim)
}

/// Runs the full candidate generation for one mention of a document:
/// preprocessing and co-reference substitution, the acronym or label tier
/// (with stemmed retry), then the context tier with trigram and
/// direct-link filters, and finally the popularity cap. An empty result
/// marks the mention as emergent.
pub fn generate_candidates(
    document: &Document,
    mention_index: usize,
    bundle: &IndexBundle,
    config: &LinkerConfig,
) -> Vec<Candidate> {
    let queries = mention_queries(document, config);
    let phase1: Vec<Vec<Candidate>> = queries
        .iter()
        .map(|q| finalize_candidates(tier_search(bundle, q, config), config))
        .collect();
    candidates_with_phase1(bundle, document, &queries, &phase1, mention_index, config)
}

/// Completes one mention's candidates given precomputed phase-1 results for
/// the whole document (the pipeline computes those once per document).
pub(crate) fn candidates_with_phase1(
    bundle: &IndexBundle,
    document: &Document,
    queries: &[MentionQuery],
    phase1: &[Vec<Candidate>],
    mention_index: usize,
    config: &LinkerConfig,
) -> Vec<Candidate> {
    if !phase1[mention_index].is_empty() {
        return phase1[mention_index].clone();
    }
    if !config.use_context_search {
        return Vec::new();
    }
    let mut anchors: Vec<u32> = phase1
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != mention_index)
        .flat_map(|(_, cands)| cands.iter().map(|c| c.node))
        .collect();
    anchors.sort_unstable();
    anchors.dedup();

    let raw = context_tier(bundle, document, queries, mention_index, &anchors, config);
    finalize_candidates(raw, config)
}

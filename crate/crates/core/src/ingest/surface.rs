//! Raw material for the text indexes: label surface forms with principal
//! marking, person-name permutations, rare references from descriptions,
//! and per-resource context documents built from CBD literals.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use crate::ingest::graph::KbGraph;
use crate::ingest::ntriples::{Resource, Triple};
use crate::ingest::IngestConfig;
use crate::text::{rare_reference_spans, StopwordList, Tagger};
use crate::{exec, text};

/// Where a surface form came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceSource {
    Label,
    PersonPermutation,
    RareReference,
}

impl SurfaceSource {
    pub fn code(&self) -> char {
        match self {
            SurfaceSource::Label => 'L',
            SurfaceSource::PersonPermutation => 'P',
            SurfaceSource::RareReference => 'R',
        }
    }
}

/// One (resource, surface) pair harvested during ingestion. Surfaces are
/// raw at this stage; index-side normalization happens when the bundle is
/// assembled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceRecord {
    pub node: u32,
    pub surface: String,
    /// True for the first label under the first-listed label predicate
    /// (preferring the configured primary language).
    pub principal: bool,
    pub source: SurfaceSource,
}

/// Surface records plus the entity-type assertions seen along the way.
#[derive(Debug, Default)]
pub struct SurfaceHarvest {
    pub records: Vec<SurfaceRecord>,
    /// (resource node, type node), deduplicated and sorted.
    pub types: Vec<(u32, u32)>,
}

/// Harvests label surface forms, person-name permutations and rare
/// references from the triple stream.
pub fn extract_surface_forms(
    triples: &[Triple],
    graph: &KbGraph,
    config: &IngestConfig,
    tagger: &Tagger,
) -> SurfaceHarvest {
    let label_rank: HashMap<&str, usize> = config
        .label_predicates
        .iter()
        .enumerate()
        .map(|(i, p)| (p.as_str(), i))
        .collect();
    let type_preds: HashSet<&str> = config.type_predicates.iter().map(|p| p.as_str()).collect();
    let desc_preds: HashSet<&str> = config
        .description_predicates
        .iter()
        .map(|p| p.as_str())
        .collect();

    // Stream order matters for principal marking; gather labels per
    // resource with their (predicate rank, stream position).
    let mut labels: Vec<(u32, usize, usize, Option<String>, String)> = Vec::new();
    let mut types: BTreeSet<(u32, u32)> = BTreeSet::new();
    let mut descriptions: Vec<(u32, String)> = Vec::new();

    for (pos, t) in triples.iter().enumerate() {
        let Some(subj) = graph.node_id(t.subject.iri()) else {
            continue;
        };
        let pred = t.predicate.iri();
        if let Some(&rank) = label_rank.get(pred) {
            if let Some((text, lang)) = t.object.as_literal() {
                let surface = text.trim();
                if !surface.is_empty() {
                    labels.push((
                        subj,
                        rank,
                        pos,
                        lang.map(str::to_string),
                        surface.to_string(),
                    ));
                }
            }
        } else if type_preds.contains(pred) {
            if let Some(obj) = t.object.as_resource() {
                if let Some(ty) = graph.node_id(obj.iri()) {
                    types.insert((subj, ty));
                }
            }
        } else if desc_preds.contains(pred) {
            if let Some((text, _)) = t.object.as_literal() {
                descriptions.push((subj, text.to_string()));
            }
        }
    }

    // Principal selection per resource: labels under the first-listed
    // predicate, preferring the primary language, then stream order.
    let mut principal: HashMap<u32, (usize, bool)> = HashMap::new();
    for &(node, rank, pos, ref lang, _) in &labels {
        if rank != 0 {
            continue;
        }
        let preferred = config
            .primary_language
            .as_deref()
            .is_some_and(|p| lang.as_deref() == Some(p));
        match principal.get(&node) {
            None => {
                principal.insert(node, (pos, preferred));
            }
            Some(&(_, cur_preferred)) if preferred && !cur_preferred => {
                principal.insert(node, (pos, preferred));
            }
            Some(_) => {}
        }
    }
    let principal_pos: HashMap<u32, usize> =
        principal.into_iter().map(|(n, (pos, _))| (n, pos)).collect();

    let mut records: Vec<SurfaceRecord> = labels
        .iter()
        .map(|&(node, _, pos, _, ref surface)| SurfaceRecord {
            node,
            surface: surface.clone(),
            principal: principal_pos.get(&node) == Some(&pos),
            source: SurfaceSource::Label,
        })
        .collect();

    // Person-name permutations for every label of person-typed resources.
    let person_types: HashSet<u32> = config
        .person_type_iris
        .iter()
        .filter_map(|iri| graph.node_id(iri))
        .collect();
    let persons: HashSet<u32> = types
        .iter()
        .filter(|(_, ty)| person_types.contains(ty))
        .map(|&(node, _)| node)
        .collect();
    for &(node, _, _, _, ref surface) in &labels {
        if !persons.contains(&node) {
            continue;
        }
        for perm in person_name_permutations(surface, config.max_name_tokens) {
            records.push(SurfaceRecord {
                node,
                surface: perm,
                principal: false,
                source: SurfaceSource::PersonPermutation,
            });
        }
    }

    // Rare references from description literals; tagging is per-resource
    // independent work, so it runs data-parallel.
    let rare: Vec<BTreeSet<String>> =
        exec::map_slice(&descriptions, |(_, text)| rare_reference_spans(text, tagger));
    for ((node, _), spans) in descriptions.iter().zip(rare) {
        for span in spans {
            records.push(SurfaceRecord {
                node: *node,
                surface: span,
                principal: false,
                source: SurfaceSource::RareReference,
            });
        }
    }

    SurfaceHarvest {
        records,
        types: types.into_iter().collect(),
    }
}

/// All orderings of all non-empty subsets of the name's token multiset.
/// Hyphenated tokens contribute their parts as extra tokens. Names with
/// more than `max_tokens` tokens degrade to the full label plus each
/// single token.
pub fn person_name_permutations(name: &str, max_tokens: usize) -> BTreeSet<String> {
    let mut tokens: Vec<String> = Vec::new();
    for t in name.split_whitespace() {
        tokens.push(t.to_string());
        if t.contains('-') {
            for part in t.split('-').filter(|p| !p.is_empty()) {
                tokens.push(part.to_string());
            }
        }
    }

    let mut out = BTreeSet::new();
    if tokens.is_empty() {
        return out;
    }
    if tokens.len() > max_tokens {
        out.insert(name.trim().to_string());
        out.extend(tokens);
        return out;
    }

    fn extend(
        tokens: &[String],
        used: &mut Vec<bool>,
        current: &mut Vec<usize>,
        out: &mut BTreeSet<String>,
    ) {
        for i in 0..tokens.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            current.push(i);
            let joined = current
                .iter()
                .map(|&j| tokens[j].as_str())
                .collect::<Vec<_>>()
                .join(" ");
            out.insert(joined);
            extend(tokens, used, current, out);
            current.pop();
            used[i] = false;
        }
    }

    let mut used = vec![false; tokens.len()];
    extend(&tokens, &mut used, &mut Vec::new(), &mut out);
    out
}

/// Rare references for one description text; see
/// [`crate::text::rare_reference_spans`].
pub fn extract_rare_references(description: &str, tagger: &Tagger) -> BTreeSet<String> {
    rare_reference_spans(description, tagger)
}

/// Context document for one resource: every literal in its CBD (all
/// literals of triples with the resource as subject), tokenized,
/// lowercased, stopword-filtered, kept as a token multiset.
pub fn build_context_document(
    triples: &[Triple],
    resource: &Resource,
    stopwords: &StopwordList,
) -> BTreeMap<String, u32> {
    let mut counts = BTreeMap::new();
    for t in triples {
        if t.subject != *resource {
            continue;
        }
        if let Some((text, _)) = t.object.as_literal() {
            add_tokens(&mut counts, text, stopwords);
        }
    }
    counts
}

/// Bulk variant: context documents for every resource with at least one
/// literal, in node-id order.
pub fn build_all_context_documents(
    triples: &[Triple],
    graph: &KbGraph,
    stopwords: &StopwordList,
) -> Vec<(u32, BTreeMap<String, u32>)> {
    let mut literals_by_node: BTreeMap<u32, Vec<&str>> = BTreeMap::new();
    for t in triples {
        if let Some((text, _)) = t.object.as_literal() {
            if let Some(node) = graph.node_id(t.subject.iri()) {
                literals_by_node.entry(node).or_default().push(text);
            }
        }
    }
    let entries: Vec<(u32, Vec<&str>)> = literals_by_node.into_iter().collect();
    let docs: Vec<BTreeMap<String, u32>> = exec::map_slice(&entries, |(_, literals)| {
        let mut counts = BTreeMap::new();
        for text in literals {
            add_tokens(&mut counts, text, stopwords);
        }
        counts
    });
    entries
        .into_iter()
        .map(|(node, _)| node)
        .zip(docs)
        .filter(|(_, doc)| !doc.is_empty())
        .collect()
}

fn add_tokens(counts: &mut BTreeMap<String, u32>, text: &str, stopwords: &StopwordList) {
    for token in text::tokens(text) {
        if !stopwords.contains(&token) {
            *counts.entry(token).or_insert(0) += 1;
        }
    }
}

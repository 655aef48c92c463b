//! The unified surface-form store: every surface string (labels, person
//! permutations, rare references) with its resource postings, plus the
//! trigram inverted index over surfaces that powers fuzzy search.

use std::collections::{BTreeMap, HashMap};

use crate::index::trigram::{jaccard, trigram_list, Trigram};

/// Posting: a resource this surface refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Posting {
    pub node: u32,
    /// True iff this surface is the resource's principal reference.
    pub principal: bool,
    /// Bitmask of [`SOURCE_LABEL`] | [`SOURCE_PERSON`] | [`SOURCE_RARE`].
    pub sources: u8,
}

pub const SOURCE_LABEL: u8 = 1;
pub const SOURCE_PERSON: u8 = 2;
pub const SOURCE_RARE: u8 = 4;

#[derive(Debug, Clone)]
pub struct SurfaceEntry {
    pub surface: String,
    pub trigrams: Vec<Trigram>,
    /// Sorted by node id.
    pub postings: Vec<Posting>,
    /// Digit-only surfaces are stored but never returned (Algorithm-1
    /// guard).
    pub digits_only: bool,
}

#[derive(Debug, Clone, Default)]
pub struct SurfaceStore {
    /// Sorted by surface string; the index is the surface id.
    entries: Vec<SurfaceEntry>,
    trigram_postings: HashMap<Trigram, Vec<u32>>,
}

/// A fuzzy-search hit before popularity is joined in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StoreHit {
    pub surface_id: u32,
    pub node: u32,
    pub score: f64,
    pub principal: bool,
}

impl SurfaceStore {
    /// Builds the store from (surface, node, principal, source-mask) rows.
    /// Rows for the same (surface, node) pair merge: principal flags OR,
    /// source masks OR.
    pub fn build(rows: Vec<(String, u32, bool, u8)>) -> SurfaceStore {
        let mut merged: BTreeMap<String, BTreeMap<u32, (bool, u8)>> = BTreeMap::new();
        for (surface, node, principal, sources) in rows {
            let per_node = merged.entry(surface).or_default();
            let entry = per_node.entry(node).or_insert((false, 0));
            entry.0 |= principal;
            entry.1 |= sources;
        }
        let entries: Vec<SurfaceEntry> = merged
            .into_iter()
            .map(|(surface, per_node)| {
                let digits_only =
                    !surface.is_empty() && surface.chars().all(|c| c.is_ascii_digit());
                SurfaceEntry {
                    trigrams: trigram_list(&surface),
                    postings: per_node
                        .into_iter()
                        .map(|(node, (principal, sources))| Posting {
                            node,
                            principal,
                            sources,
                        })
                        .collect(),
                    surface,
                    digits_only,
                }
            })
            .collect();

        let mut trigram_postings: HashMap<Trigram, Vec<u32>> = HashMap::new();
        for (id, entry) in entries.iter().enumerate() {
            for &t in &entry.trigrams {
                trigram_postings.entry(t).or_default().push(id as u32);
            }
        }
        SurfaceStore {
            entries,
            trigram_postings,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn posting_count(&self) -> u64 {
        self.entries.iter().map(|e| e.postings.len() as u64).sum()
    }

    pub fn entry(&self, id: u32) -> &SurfaceEntry {
        &self.entries[id as usize]
    }

    pub fn entries(&self) -> &[SurfaceEntry] {
        &self.entries
    }

    /// Fuzzy search by trigram Jaccard similarity.
    ///
    /// With `require_principal_exact`, principal postings of surfaces whose
    /// trigram set equals the query's (similarity exactly 1.0) short-circuit
    /// the fuzzy search: only those are returned. Otherwise every posting
    /// of a surface scoring at least `sigma` is returned. Digit-only
    /// surfaces never match. Hits are ordered (score desc, node asc,
    /// surface asc).
    pub fn search(&self, text: &str, sigma: f64, require_principal_exact: bool) -> Vec<StoreHit> {
        let query = trigram_list(text);
        let candidate_ids: Vec<u32> = if sigma > 0.0 && !query.is_empty() {
            let mut ids: Vec<u32> = query
                .iter()
                .filter_map(|t| self.trigram_postings.get(t))
                .flatten()
                .copied()
                .collect();
            ids.sort_unstable();
            ids.dedup();
            ids
        } else {
            // sigma == 0 admits score-0 surfaces, which share no trigram.
            (0..self.entries.len() as u32).collect()
        };

        let mut scored: Vec<(u32, f64)> = Vec::new();
        for id in candidate_ids {
            let entry = &self.entries[id as usize];
            if entry.digits_only {
                continue;
            }
            let score = jaccard(&query, &entry.trigrams);
            scored.push((id, score));
        }

        if require_principal_exact {
            let mut exact: Vec<StoreHit> = Vec::new();
            for &(id, score) in &scored {
                if score == 1.0 {
                    for p in &self.entries[id as usize].postings {
                        if p.principal {
                            exact.push(StoreHit {
                                surface_id: id,
                                node: p.node,
                                score,
                                principal: true,
                            });
                        }
                    }
                }
            }
            if !exact.is_empty() {
                sort_hits(&mut exact);
                return exact;
            }
        }

        let mut hits: Vec<StoreHit> = Vec::new();
        for (id, score) in scored {
            if score >= sigma {
                for p in &self.entries[id as usize].postings {
                    hits.push(StoreHit {
                        surface_id: id,
                        node: p.node,
                        score,
                        principal: p.principal,
                    });
                }
            }
        }
        sort_hits(&mut hits);
        hits
    }
}

fn sort_hits(hits: &mut [StoreHit]) {
    hits.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then(a.node.cmp(&b.node))
            .then(a.surface_id.cmp(&b.surface_id))
    });
}

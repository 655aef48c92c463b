//! The five persisted indexes behind one queryable bundle: surface forms
//! (with trigram fuzzy search), person names and rare references (folded
//! into the surface store), acronyms, the TF-IDF context index, plus the
//! KB graph and popularity table they join against.

pub mod acronym;
pub mod context;
pub mod store;
pub mod surface_store;
pub mod trigram;

use crate::ingest::{IngestOutput, KbGraph, PopularityTable};
use crate::text::{is_acronym, normalize};

pub use acronym::AcronymIndex;
pub use context::{ContextIndex, ContextQuery};
pub use store::{load_bundle, save_bundle, Manifest, ManifestCounts};
pub use surface_store::{Posting, StoreHit, SurfaceEntry, SurfaceStore};
pub use trigram::{trigram_list, trigram_set, trigram_similarity, Trigram};

use surface_store::{SOURCE_LABEL, SOURCE_PERSON, SOURCE_RARE};

/// A surface-store hit joined with resource identity and popularity.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceHit {
    pub node: u32,
    pub surface_id: u32,
    pub trigram_score: f64,
    pub principal: bool,
    pub popularity: f64,
}

#[derive(Debug, Clone)]
pub struct IndexBundle {
    graph: KbGraph,
    surfaces: SurfaceStore,
    contexts: ContextIndex,
    acronyms: AcronymIndex,
    popularity: PopularityTable,
    /// (resource node, type node), sorted.
    types: Vec<(u32, u32)>,
    /// node -> surface ids referring to it, ascending.
    surfaces_of: Vec<Vec<u32>>,
    manifest: Manifest,
}

impl IndexBundle {
    /// Assembles the bundle from ingest output. Index-side surfaces are
    /// normalized like mentions, except acronym-shaped surfaces which stay
    /// verbatim (they would otherwise lose their casing); empty-normalizing
    /// surfaces are dropped.
    pub fn build(ingest: IngestOutput, acronyms: AcronymIndex) -> IndexBundle {
        let mut rows: Vec<(String, u32, bool, u8)> = Vec::with_capacity(ingest.records.len());
        for r in &ingest.records {
            let raw = r.surface.trim();
            let stored = if is_acronym(raw) {
                raw.to_string()
            } else {
                normalize(raw)
            };
            if stored.is_empty() {
                continue;
            }
            let source = match r.source {
                crate::ingest::SurfaceSource::Label => SOURCE_LABEL,
                crate::ingest::SurfaceSource::PersonPermutation => SOURCE_PERSON,
                crate::ingest::SurfaceSource::RareReference => SOURCE_RARE,
            };
            rows.push((stored, r.node, r.principal, source));
        }
        let surfaces = SurfaceStore::build(rows);
        let contexts = ContextIndex::build(ingest.contexts);

        let manifest = Manifest::describe(
            &ingest.config,
            &ingest.graph,
            &surfaces,
            &contexts,
            &acronyms,
            &ingest.popularity,
            ingest.types.len() as u64,
            ingest.triple_count,
            ingest.skipped_lines,
        );

        Self::assemble(
            ingest.graph,
            surfaces,
            contexts,
            acronyms,
            ingest.popularity,
            ingest.types,
            manifest,
        )
    }

    pub(crate) fn assemble(
        graph: KbGraph,
        surfaces: SurfaceStore,
        contexts: ContextIndex,
        acronyms: AcronymIndex,
        popularity: PopularityTable,
        types: Vec<(u32, u32)>,
        mut manifest: Manifest,
    ) -> IndexBundle {
        let mut surfaces_of = vec![Vec::new(); graph.node_count()];
        for (id, entry) in surfaces.entries().iter().enumerate() {
            for p in &entry.postings {
                surfaces_of[p.node as usize].push(id as u32);
            }
        }
        if manifest.index_version.is_empty() {
            manifest.index_version = store::content_version(
                &graph,
                &surfaces,
                &contexts,
                &acronyms,
                &popularity,
                &types,
            );
        }
        IndexBundle {
            graph,
            surfaces,
            contexts,
            acronyms,
            popularity,
            types,
            surfaces_of,
            manifest,
        }
    }

    pub fn graph(&self) -> &KbGraph {
        &self.graph
    }

    pub fn surfaces(&self) -> &SurfaceStore {
        &self.surfaces
    }

    pub fn contexts(&self) -> &ContextIndex {
        &self.contexts
    }

    pub fn acronyms(&self) -> &AcronymIndex {
        &self.acronyms
    }

    pub fn popularity(&self) -> &PopularityTable {
        &self.popularity
    }

    pub fn types(&self) -> &[(u32, u32)] {
        &self.types
    }

    pub fn manifest(&self) -> &Manifest {
        &self.manifest
    }

    pub fn iri(&self, node: u32) -> &str {
        self.graph.iri(node)
    }

    pub fn node_id(&self, iri: &str) -> Option<u32> {
        self.graph.node_id(iri)
    }

    pub fn surface_str(&self, surface_id: u32) -> &str {
        &self.surfaces.entry(surface_id).surface
    }

    /// Surface ids referring to a node, ascending.
    pub fn surfaces_of(&self, node: u32) -> &[u32] {
        &self.surfaces_of[node as usize]
    }

    /// Type nodes asserted for a resource.
    pub fn types_of(&self, node: u32) -> Vec<u32> {
        let start = self.types.partition_point(|&(n, _)| n < node);
        self.types[start..]
            .iter()
            .take_while(|&&(n, _)| n == node)
            .map(|&(_, t)| t)
            .collect()
    }

    /// Fuzzy surface search with popularity joined in; see
    /// [`SurfaceStore::search`] for the matching rules.
    pub fn search_surface(
        &self,
        text: &str,
        sigma: f64,
        require_principal_exact: bool,
    ) -> Vec<SurfaceHit> {
        self.surfaces
            .search(text, sigma, require_principal_exact)
            .into_iter()
            .map(|h| SurfaceHit {
                node: h.node,
                surface_id: h.surface_id,
                trigram_score: h.score,
                principal: h.principal,
                popularity: self.popularity.score(h.node),
            })
            .collect()
    }

    /// Expansions recorded for an acronym, file order preserved.
    pub fn search_acronym(&self, acronym: &str) -> Vec<&str> {
        self.acronyms.lookup(acronym)
    }

    /// TF-IDF context search; see [`ContextIndex::search`].
    pub fn search_context(&self, query: &ContextQuery, top_k: usize) -> Vec<(u32, f64)> {
        self.contexts.search(query, top_k)
    }

    /// Direct KB links (either direction) between `node` and `others`.
    pub fn direct_link_count(&self, node: u32, others: &[u32]) -> usize {
        self.graph.direct_link_count(node, others)
    }
}

//! End-to-end linking: candidate generation feeding graph disambiguation,
//! per document and in deterministic parallel batches.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::api::{Document, LinkResponse, WireAssignment};
use crate::candidate::{self, Candidate};
use crate::config::LinkerConfig;
use crate::disambiguation::{
    score_graph, select_assignments, Assignment, AssignmentTarget, DisambiguationGraph, NodeScore,
};
use crate::exec;
use crate::index::IndexBundle;
use crate::Result;

/// One linked mention, document order.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkedMention {
    pub start: usize,
    pub end: usize,
    pub iri: String,
    pub emergent: bool,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkedDocument {
    pub mentions: Vec<LinkedMention>,
}

/// The online engine: an immutable index bundle plus a configuration.
/// Cloning is cheap (the bundle is shared), so per-request configuration
/// overrides just derive a new `Linker`.
#[derive(Debug, Clone)]
pub struct Linker {
    bundle: Arc<IndexBundle>,
    config: LinkerConfig,
}

impl Linker {
    pub fn new(bundle: IndexBundle, config: LinkerConfig) -> Result<Linker> {
        config.validate()?;
        Ok(Linker {
            bundle: Arc::new(bundle),
            config,
        })
    }

    pub fn from_shared(bundle: Arc<IndexBundle>, config: LinkerConfig) -> Result<Linker> {
        config.validate()?;
        Ok(Linker { bundle, config })
    }

    /// Same bundle, different configuration.
    pub fn with_config(&self, config: LinkerConfig) -> Result<Linker> {
        config.validate()?;
        Ok(Linker {
            bundle: Arc::clone(&self.bundle),
            config,
        })
    }

    pub fn bundle(&self) -> &IndexBundle {
        &self.bundle
    }

    pub fn config(&self) -> &LinkerConfig {
        &self.config
    }

    pub fn index_version(&self) -> &str {
        &self.bundle.manifest().index_version
    }

    /// Links one document.
    pub fn link_document(&self, document: &Document) -> LinkedDocument {
        self.run_full(document).0
    }

    /// Links one document and renders the disambiguation-graph debug dump.
    pub fn link_document_with_dump(&self, document: &Document) -> (LinkedDocument, String) {
        let (linked, graph, scores) = self.run_full(document);
        let dump = render_graph_dump(&self.bundle, document, &graph, &scores, &linked);
        (linked, dump)
    }

    /// Links a batch of documents, in parallel when the `parallel` feature
    /// is enabled. Output order matches input order and every document is
    /// processed independently, so the result is identical to
    /// [`Linker::link_batch_seq`].
    pub fn link_batch(&self, documents: &[Document]) -> Vec<LinkedDocument> {
        exec::map_slice(documents, |doc| self.link_document(doc))
    }

    /// Always-sequential batch linking; reference path for the benches.
    pub fn link_batch_seq(&self, documents: &[Document]) -> Vec<LinkedDocument> {
        exec::map_slice_seq(documents, |doc| self.link_document(doc))
    }

    /// Wire-format response for one document; `timing_ms` is left empty
    /// for the caller to fill.
    pub fn respond(&self, document: &Document) -> LinkResponse {
        let linked = self.link_document(document);
        LinkResponse {
            assignments: linked
                .mentions
                .into_iter()
                .map(|m| WireAssignment {
                    start: m.start,
                    end: m.end,
                    iri: m.iri,
                    emergent: m.emergent,
                    score: m.score,
                })
                .collect(),
            timing_ms: None,
            index_version: self.index_version().to_string(),
        }
    }

    fn run_full(
        &self,
        document: &Document,
    ) -> (LinkedDocument, DisambiguationGraph, Vec<NodeScore>) {
        let config = &self.config;
        let queries = candidate::mention_queries(document, config);
        let phase1: Vec<Vec<Candidate>> = queries
            .iter()
            .map(|q| {
                candidate::finalize_candidates(
                    candidate::tier_search(&self.bundle, q, config),
                    config,
                )
            })
            .collect();
        let candidates: Vec<Vec<Candidate>> = (0..document.mentions.len())
            .map(|i| {
                candidate::candidates_with_phase1(
                    &self.bundle,
                    document,
                    &queries,
                    &phase1,
                    i,
                    config,
                )
            })
            .collect();

        let candidate_nodes: Vec<Vec<u32>> = candidates
            .iter()
            .map(|cands| cands.iter().map(|c| c.node).collect())
            .collect();
        let mut graph = DisambiguationGraph::build_initial(&candidate_nodes);
        graph.bfs_expand(self.bundle.graph(), config.depth);

        let scores = score_graph(
            &graph,
            config.algorithm,
            config.hits_iterations,
            config.pagerank_iterations,
            config.pagerank_alpha,
        );

        let assignments = select_assignments(
            &graph,
            &scores,
            &document.mentions,
            config.algorithm,
            self.bundle.graph(),
            &config.emergent_namespace,
        );

        let linked = LinkedDocument {
            mentions: assignments
                .iter()
                .map(|a| to_linked(document, a))
                .collect(),
        };
        (linked, graph, scores)
    }
}

fn to_linked(document: &Document, assignment: &Assignment) -> LinkedMention {
    let mention = &document.mentions[assignment.mention_index];
    let (iri, emergent) = match &assignment.target {
        AssignmentTarget::Resource(iri) => (iri.clone(), false),
        AssignmentTarget::Emergent(iri) => (iri.clone(), true),
    };
    LinkedMention {
        start: mention.start,
        end: mention.end,
        iri,
        emergent,
        score: assignment.score,
    }
}

/// Plain-text export of the disambiguation graph: nodes with scores, edges,
/// and per-mention candidate rankings. Used by golden tests and the
/// `--dump-graph` CLI flag.
fn render_graph_dump(
    bundle: &IndexBundle,
    document: &Document,
    graph: &DisambiguationGraph,
    scores: &[NodeScore],
    linked: &LinkedDocument,
) -> String {
    let mut out = String::new();
    let mut order: Vec<usize> = (0..graph.node_count()).collect();
    order.sort_by_key(|&i| bundle.iri(graph.nodes()[i]));

    for &i in &order {
        let s = scores[i];
        writeln!(
            out,
            "node {} auth={} hub={} pr={}",
            bundle.iri(graph.nodes()[i]),
            s.authority,
            s.hub,
            s.pagerank
        )
        .unwrap();
    }
    let mut edges: Vec<(u32, u32)> = graph.edges().collect();
    edges.sort_by(|a, b| {
        (bundle.iri(a.0), bundle.iri(a.1)).cmp(&(bundle.iri(b.0), bundle.iri(b.1)))
    });
    for (s, d) in edges {
        writeln!(out, "edge {} -> {}", bundle.iri(s), bundle.iri(d)).unwrap();
    }
    for (i, mention) in document.mentions.iter().enumerate() {
        let mut cands: Vec<u32> = graph.candidate_of()[i].clone();
        cands.sort_unstable();
        let list = cands
            .iter()
            .map(|&n| bundle.iri(n).to_string())
            .collect::<Vec<_>>()
            .join(" ");
        writeln!(
            out,
            "mention {i} {:?} candidates [{list}] -> {}",
            mention.text, linked.mentions[i].iri
        )
        .unwrap();
    }
    out
}

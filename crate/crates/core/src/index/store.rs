//! On-disk index bundle: a directory of plain-text TSV files plus a JSON
//! manifest. All files are rendered canonically (sorted, shortest
//! round-trip float formatting), so rebuilding from identical inputs is
//! byte-identical; the trigram postings and TF-IDF statistics are derived
//! data and rebuilt at load time.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Error;
use crate::index::acronym::AcronymIndex;
use crate::index::context::ContextIndex;
use crate::index::surface_store::{
    SurfaceStore, SOURCE_LABEL, SOURCE_PERSON, SOURCE_RARE,
};
use crate::index::IndexBundle;
use crate::ingest::{IngestConfig, KbGraph, PopularityMode, PopularityTable};
use crate::Result;

pub const FORMAT_VERSION: u32 = 1;
pub const TFIDF_SCHEME: &str = "tf-raw.idf-ln.v1";

const MANIFEST_FILE: &str = "manifest.json";
const NODES_FILE: &str = "nodes.tsv";
const EDGES_FILE: &str = "edges.tsv";
const SURFACES_FILE: &str = "surfaces.tsv";
const CONTEXTS_FILE: &str = "contexts.tsv";
const TYPES_FILE: &str = "types.tsv";
const POPULARITY_FILE: &str = "popularity.tsv";
const ACRONYMS_FILE: &str = "acronyms.tsv";

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ManifestCounts {
    pub triples: u64,
    pub skipped_lines: u64,
    pub resources: u64,
    pub edges: u64,
    pub surfaces: u64,
    pub surface_postings: u64,
    pub context_documents: u64,
    pub acronyms: u64,
    pub type_assertions: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct Manifest {
    pub format_version: u32,
    pub kb_name: String,
    /// Content digest over the data files; doubles as the version string
    /// reported by the linking service.
    pub index_version: String,
    pub language: String,
    pub primary_language: Option<String>,
    pub label_predicates: Vec<String>,
    pub type_predicates: Vec<String>,
    pub description_predicates: Vec<String>,
    pub person_type_iris: Vec<String>,
    pub popularity_method: String,
    pub tfidf_scheme: String,
    pub counts: ManifestCounts,
}

impl Manifest {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn describe(
        config: &IngestConfig,
        graph: &KbGraph,
        surfaces: &SurfaceStore,
        contexts: &ContextIndex,
        acronyms: &AcronymIndex,
        popularity: &PopularityTable,
        type_assertions: u64,
        triples: u64,
        skipped_lines: u64,
    ) -> Manifest {
        Manifest {
            format_version: FORMAT_VERSION,
            kb_name: config.kb_name.clone(),
            index_version: String::new(), // filled in by assemble()
            language: config.language.clone(),
            primary_language: config.primary_language.clone(),
            label_predicates: config.label_predicates.clone(),
            type_predicates: config.type_predicates.clone(),
            description_predicates: config.description_predicates.clone(),
            person_type_iris: config.person_type_iris.clone(),
            popularity_method: popularity.method().as_str().to_string(),
            tfidf_scheme: TFIDF_SCHEME.to_string(),
            counts: ManifestCounts {
                triples,
                skipped_lines,
                resources: graph.node_count() as u64,
                edges: graph.edge_count(),
                surfaces: surfaces.len() as u64,
                surface_postings: surfaces.posting_count(),
                context_documents: contexts.doc_count() as u64,
                acronyms: acronyms.len() as u64,
                type_assertions,
            },
        }
    }
}

fn render_nodes(graph: &KbGraph) -> String {
    let mut out = String::new();
    for iri in graph.iris() {
        out.push_str(iri);
        out.push('\n');
    }
    out
}

fn render_edges(graph: &KbGraph) -> String {
    let mut out = String::new();
    for (s, d) in graph.edges() {
        out.push_str(&format!("{s}\t{d}\n"));
    }
    out
}

fn render_surfaces(surfaces: &SurfaceStore) -> String {
    let mut out = String::new();
    for entry in surfaces.entries() {
        for p in &entry.postings {
            let mut sources = String::new();
            if p.sources & SOURCE_LABEL != 0 {
                sources.push('L');
            }
            if p.sources & SOURCE_PERSON != 0 {
                sources.push('P');
            }
            if p.sources & SOURCE_RARE != 0 {
                sources.push('R');
            }
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\n",
                entry.surface,
                p.node,
                u8::from(p.principal),
                sources
            ));
        }
    }
    out
}

fn render_contexts(contexts: &ContextIndex) -> String {
    let mut out = String::new();
    for (node, counts) in contexts.docs() {
        for (term, count) in counts {
            out.push_str(&format!("{node}\t{term}\t{count}\n"));
        }
    }
    out
}

fn render_types(types: &[(u32, u32)]) -> String {
    let mut out = String::new();
    for (node, ty) in types {
        out.push_str(&format!("{node}\t{ty}\n"));
    }
    out
}

fn render_popularity(popularity: &PopularityTable) -> String {
    let mut out = format!("#method={}\n", popularity.method().as_str());
    for (node, score) in popularity.scores().iter().enumerate() {
        // Shortest round-trip float formatting: parses back bit-exact.
        out.push_str(&format!("{node}\t{score}\n"));
    }
    out
}

fn render_acronyms(acronyms: &AcronymIndex) -> String {
    let mut out = String::new();
    for (key, expansion) in acronyms.entries() {
        out.push_str(&format!("{key}\t{expansion}\n"));
    }
    out
}

fn rendered_data_files(
    graph: &KbGraph,
    surfaces: &SurfaceStore,
    contexts: &ContextIndex,
    acronyms: &AcronymIndex,
    popularity: &PopularityTable,
    types: &[(u32, u32)],
) -> Vec<(&'static str, String)> {
    vec![
        (NODES_FILE, render_nodes(graph)),
        (EDGES_FILE, render_edges(graph)),
        (SURFACES_FILE, render_surfaces(surfaces)),
        (CONTEXTS_FILE, render_contexts(contexts)),
        (TYPES_FILE, render_types(types)),
        (POPULARITY_FILE, render_popularity(popularity)),
        (ACRONYMS_FILE, render_acronyms(acronyms)),
    ]
}

/// Hex digest over the canonical data files; the bundle's version string.
pub(crate) fn content_version(
    graph: &KbGraph,
    surfaces: &SurfaceStore,
    contexts: &ContextIndex,
    acronyms: &AcronymIndex,
    popularity: &PopularityTable,
    types: &[(u32, u32)],
) -> String {
    let mut hasher = Sha256::new();
    for (name, content) in
        rendered_data_files(graph, surfaces, contexts, acronyms, popularity, types)
    {
        hasher.update(name.as_bytes());
        hasher.update([0]);
        hasher.update(content.as_bytes());
    }
    let digest = hasher.finalize();
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes the bundle directory (created if missing).
pub fn save_bundle(bundle: &IndexBundle, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for (name, content) in rendered_data_files(
        bundle.graph(),
        bundle.surfaces(),
        bundle.contexts(),
        bundle.acronyms(),
        bundle.popularity(),
        bundle.types(),
    ) {
        std::fs::write(dir.join(name), content)?;
    }
    let manifest = serde_json::to_string_pretty(bundle.manifest())
        .map_err(|e| Error::Other(format!("manifest serialization: {e}")))?;
    std::fs::write(dir.join(MANIFEST_FILE), manifest + "\n")?;
    Ok(())
}

/// One canonical plain-text dump of the whole bundle, for debugging and
/// byte-identity tests.
pub fn debug_dump(bundle: &IndexBundle) -> String {
    let mut out = String::new();
    for (name, content) in rendered_data_files(
        bundle.graph(),
        bundle.surfaces(),
        bundle.contexts(),
        bundle.acronyms(),
        bundle.popularity(),
        bundle.types(),
    ) {
        out.push_str(&format!("== {name}\n"));
        out.push_str(&content);
    }
    out
}

fn invalid(file: &str, reason: impl Into<String>) -> Error {
    Error::InvalidFormat {
        file: file.to_string(),
        reason: reason.into(),
    }
}

fn read(dir: &Path, name: &str) -> Result<String> {
    std::fs::read_to_string(dir.join(name))
        .map_err(|e| invalid(name, format!("unreadable: {e}")))
}

/// Loads a bundle directory written by [`save_bundle`].
pub fn load_bundle(dir: &Path) -> Result<IndexBundle> {
    let manifest: Manifest = serde_json::from_str(&read(dir, MANIFEST_FILE)?)
        .map_err(|e| invalid(MANIFEST_FILE, e.to_string()))?;
    if manifest.format_version != FORMAT_VERSION {
        return Err(invalid(
            MANIFEST_FILE,
            format!(
                "format version {} unsupported (expected {FORMAT_VERSION})",
                manifest.format_version
            ),
        ));
    }

    let iris: Vec<String> = read(dir, NODES_FILE)?
        .lines()
        .map(str::to_string)
        .collect();
    let node_limit = iris.len() as u32;
    let parse_node = |field: &str, file: &str| -> Result<u32> {
        let id: u32 = field
            .parse()
            .map_err(|_| invalid(file, format!("bad node id {field:?}")))?;
        if id >= node_limit {
            return Err(invalid(file, format!("node id {id} out of range")));
        }
        Ok(id)
    };

    let mut edges = Vec::new();
    for line in read(dir, EDGES_FILE)?.lines() {
        let (s, d) = line
            .split_once('\t')
            .ok_or_else(|| invalid(EDGES_FILE, "expected src<TAB>dst"))?;
        edges.push((parse_node(s, EDGES_FILE)?, parse_node(d, EDGES_FILE)?));
    }
    let graph = KbGraph::from_parts(iris, edges);

    let mut rows = Vec::new();
    for line in read(dir, SURFACES_FILE)?.lines() {
        let mut fields = line.split('\t');
        let (Some(surface), Some(node), Some(principal), Some(sources)) = (
            fields.next(),
            fields.next(),
            fields.next(),
            fields.next(),
        ) else {
            return Err(invalid(SURFACES_FILE, "expected 4 fields"));
        };
        let mut mask = 0u8;
        for c in sources.chars() {
            mask |= match c {
                'L' => SOURCE_LABEL,
                'P' => SOURCE_PERSON,
                'R' => SOURCE_RARE,
                other => return Err(invalid(SURFACES_FILE, format!("bad source {other:?}"))),
            };
        }
        rows.push((
            surface.to_string(),
            parse_node(node, SURFACES_FILE)?,
            principal == "1",
            mask,
        ));
    }
    let surfaces = SurfaceStore::build(rows);

    let mut docs: BTreeMap<u32, BTreeMap<String, u32>> = BTreeMap::new();
    for line in read(dir, CONTEXTS_FILE)?.lines() {
        let mut fields = line.split('\t');
        let (Some(node), Some(term), Some(count)) =
            (fields.next(), fields.next(), fields.next())
        else {
            return Err(invalid(CONTEXTS_FILE, "expected 3 fields"));
        };
        let count: u32 = count
            .parse()
            .map_err(|_| invalid(CONTEXTS_FILE, "bad count"))?;
        docs.entry(parse_node(node, CONTEXTS_FILE)?)
            .or_default()
            .insert(term.to_string(), count);
    }
    let contexts = ContextIndex::build(docs.into_iter().collect());

    let mut types = Vec::new();
    for line in read(dir, TYPES_FILE)?.lines() {
        let (node, ty) = line
            .split_once('\t')
            .ok_or_else(|| invalid(TYPES_FILE, "expected node<TAB>type"))?;
        types.push((parse_node(node, TYPES_FILE)?, parse_node(ty, TYPES_FILE)?));
    }

    let pop_text = read(dir, POPULARITY_FILE)?;
    let mut pop_lines = pop_text.lines();
    let method = pop_lines
        .next()
        .and_then(|l| l.strip_prefix("#method="))
        .ok_or_else(|| invalid(POPULARITY_FILE, "missing #method header"))?;
    let method = PopularityMode::parse(method)?;
    let mut scores = vec![0.0f64; graph.node_count()];
    for line in pop_lines {
        let (node, score) = line
            .split_once('\t')
            .ok_or_else(|| invalid(POPULARITY_FILE, "expected node<TAB>score"))?;
        let node = parse_node(node, POPULARITY_FILE)?;
        scores[node as usize] = score
            .parse()
            .map_err(|_| invalid(POPULARITY_FILE, "bad score"))?;
    }
    let popularity = PopularityTable::from_parts(scores, method);

    let acronyms = AcronymIndex::from_tsv(&read(dir, ACRONYMS_FILE)?)?;

    Ok(IndexBundle::assemble(
        graph, surfaces, contexts, acronyms, popularity, types, manifest,
    ))
}

//! Offline phase: parse an N-Triples knowledge base, build the KB graph,
//! and harvest the raw material for the five indexes plus popularity.

pub mod graph;
pub mod ntriples;
pub mod popularity;
pub mod surface;

use std::collections::BTreeMap;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use crate::error::Error;
use crate::text::{StopwordList, Tagger};
use crate::Result;

pub use graph::KbGraph;
pub use ntriples::{parse_ntriples, parse_ntriples_str, Object, ParseMode, Resource, Triple};
pub use popularity::{compute_popularity, compute_popularity_seq, PopularityMode, PopularityTable};
pub use surface::{
    build_all_context_documents, build_context_document, extract_rare_references,
    extract_surface_forms, person_name_permutations, SurfaceRecord, SurfaceSource,
};

pub const RDFS_LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";
pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const RDFS_COMMENT: &str = "http://www.w3.org/2000/01/rdf-schema#comment";

/// Knobs for the offline phase. Predicate lists are ordered: the first
/// label predicate defines principal references.
#[derive(Debug, Clone)]
pub struct IngestConfig {
    pub label_predicates: Vec<String>,
    pub type_predicates: Vec<String>,
    pub description_predicates: Vec<String>,
    pub person_type_iris: Vec<String>,
    /// Names with more tokens than this skip full permutation generation.
    pub max_name_tokens: usize,
    /// Language tag preferred when choosing the principal label.
    pub primary_language: Option<String>,
    /// Language for stopwords and the rare-reference tagger.
    pub language: String,
    /// Optional stopword file overriding the shipped list.
    pub stopword_file: Option<PathBuf>,
    pub popularity_mode: PopularityMode,
    pub parse_mode: ParseMode,
    pub kb_name: String,
}

impl Default for IngestConfig {
    fn default() -> Self {
        Self {
            label_predicates: vec![
                RDFS_LABEL.to_string(),
                "http://xmlns.com/foaf/0.1/name".to_string(),
                "http://www.w3.org/2004/02/skos/core#prefLabel".to_string(),
                "http://www.w3.org/2004/02/skos/core#altLabel".to_string(),
            ],
            type_predicates: vec![RDF_TYPE.to_string()],
            description_predicates: vec![
                RDFS_COMMENT.to_string(),
                "http://dbpedia.org/ontology/abstract".to_string(),
                "http://schema.org/description".to_string(),
            ],
            person_type_iris: vec![
                "http://xmlns.com/foaf/0.1/Person".to_string(),
                "http://dbpedia.org/ontology/Person".to_string(),
                "http://schema.org/Person".to_string(),
            ],
            max_name_tokens: 5,
            primary_language: Some("en".to_string()),
            language: "en".to_string(),
            stopword_file: None,
            popularity_mode: PopularityMode::PageRank,
            parse_mode: ParseMode::Lenient,
            kb_name: "kb".to_string(),
        }
    }
}

impl IngestConfig {
    pub fn validate(&self) -> Result<()> {
        if self.label_predicates.is_empty() {
            return Err(Error::InvalidConfig("label_predicates is empty".into()));
        }
        if self.type_predicates.is_empty() {
            return Err(Error::InvalidConfig("type_predicates is empty".into()));
        }
        if self.description_predicates.is_empty() {
            return Err(Error::InvalidConfig(
                "description_predicates is empty".into(),
            ));
        }
        Ok(())
    }

    pub fn stopwords(&self) -> Result<StopwordList> {
        match &self.stopword_file {
            Some(path) => StopwordList::from_file(path),
            None => Ok(StopwordList::for_language(&self.language)),
        }
    }

    /// Applies a plain-text `key=value` config file on top of this config.
    /// List-valued keys take comma-separated IRIs. Comment lines start
    /// with `#`; no inline comments, since IRIs contain `#` themselves.
    pub fn apply_key_values(&mut self, text: &str) -> Result<()> {
        for (no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("ingest config line {}: expected key=value", no + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            let list = || -> Vec<String> {
                value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(str::to_string)
                    .collect()
            };
            let bad = |what: &str| {
                Error::InvalidConfig(format!(
                    "ingest config line {}: bad {what} {value:?}",
                    no + 1
                ))
            };
            match key {
                "label_predicates" => self.label_predicates = list(),
                "type_predicates" => self.type_predicates = list(),
                "description_predicates" => self.description_predicates = list(),
                "person_types" => self.person_type_iris = list(),
                "max_name_tokens" => {
                    self.max_name_tokens = value.parse().map_err(|_| bad("integer"))?
                }
                "primary_language" => {
                    self.primary_language = if value.is_empty() {
                        None
                    } else {
                        Some(value.to_string())
                    }
                }
                "language" => self.language = value.to_string(),
                "kb_name" => self.kb_name = value.to_string(),
                "stopwords" => self.stopword_file = Some(PathBuf::from(value)),
                "popularity" => {
                    self.popularity_mode = match value.to_ascii_lowercase().as_str() {
                        "pagerank" => PopularityMode::PageRank,
                        "degree" => PopularityMode::DegreeHeuristic,
                        _ => return Err(bad("popularity mode")),
                    }
                }
                "strict" => {
                    self.parse_mode = match value.to_ascii_lowercase().as_str() {
                        "true" | "1" | "yes" | "on" => ParseMode::Strict,
                        "false" | "0" | "no" | "off" => ParseMode::Lenient,
                        _ => return Err(bad("bool")),
                    }
                }
                other => {
                    return Err(Error::InvalidConfig(format!(
                        "ingest config line {}: unknown key {other:?}",
                        no + 1
                    )))
                }
            }
        }
        Ok(())
    }
}

/// Everything the index build needs, straight out of the triple stream.
#[derive(Debug)]
pub struct IngestOutput {
    pub graph: KbGraph,
    pub records: Vec<SurfaceRecord>,
    pub contexts: Vec<(u32, BTreeMap<String, u32>)>,
    /// (resource node, type node), sorted.
    pub types: Vec<(u32, u32)>,
    pub popularity: PopularityTable,
    pub triple_count: u64,
    pub skipped_lines: u64,
    pub config: IngestConfig,
}

/// Parses one or more N-Triples files (gzip-compressed when the name ends
/// in `.gz`) and runs the full harvest. Fails on empty input.
pub fn ingest_files(paths: &[PathBuf], config: &IngestConfig) -> Result<IngestOutput> {
    config.validate()?;
    let mut triples = Vec::new();
    let mut skipped = 0u64;
    for path in paths {
        let outcome = parse_file(path, config.parse_mode)?;
        triples.extend(outcome.triples);
        skipped += outcome.skipped;
    }
    ingest_triples(triples, skipped, config)
}

/// In-memory variant of [`ingest_files`], used by tests and fixtures.
pub fn ingest_str(text: &str, config: &IngestConfig) -> Result<IngestOutput> {
    config.validate()?;
    let outcome = parse_ntriples_str(text, config.parse_mode)?;
    ingest_triples(outcome.triples, outcome.skipped, config)
}

fn parse_file(path: &Path, mode: ParseMode) -> Result<ntriples::ParseOutcome> {
    let file = std::fs::File::open(path)?;
    if path.extension().is_some_and(|e| e == "gz") {
        let reader = BufReader::new(flate2::read::GzDecoder::new(file));
        parse_ntriples(reader, mode)
    } else {
        parse_ntriples(BufReader::new(file), mode)
    }
}

fn ingest_triples(
    triples: Vec<Triple>,
    skipped_lines: u64,
    config: &IngestConfig,
) -> Result<IngestOutput> {
    if triples.is_empty() {
        return Err(Error::Other("no triples ingested".into()));
    }
    let graph = KbGraph::from_triples(&triples);
    let tagger = Tagger::english();
    let stopwords = config.stopwords()?;

    let harvest = extract_surface_forms(&triples, &graph, config, tagger);
    let contexts = build_all_context_documents(&triples, &graph, &stopwords);
    let popularity = compute_popularity(&graph, config.popularity_mode)?;

    Ok(IngestOutput {
        graph,
        records: harvest.records,
        contexts,
        types: harvest.types,
        popularity,
        triple_count: triples.len() as u64,
        skipped_lines,
        config: config.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn parse_serialize_parse_is_identity() {
        let text = "\
<http://ex.org/a> <http://ex.org/p> <http://ex.org/b> .
<http://ex.org/a> <http://www.w3.org/2000/01/rdf-schema#label> \"Berlin\"@de .
<http://ex.org/a> <http://ex.org/q> \"multi\\nline \\\"x\\\"\" .
<http://ex.org/café> <http://ex.org/p> <http://ex.org/ü> .
";
        let first = parse_ntriples_str(text, ParseMode::Strict).unwrap().triples;
        let serialized: String = first.iter().map(|t| format!("{t}\n")).collect();
        let second = parse_ntriples_str(&serialized, ParseMode::Strict)
            .unwrap()
            .triples;
        assert_eq!(first, second);
    }

    #[test]
    fn ingest_rejects_empty_input() {
        let err = ingest_str("# nothing here\n", &IngestConfig::default()).unwrap_err();
        assert!(err.to_string().contains("no triples"));
    }

    #[test]
    fn ingest_config_file_overrides_defaults() {
        let mut config = IngestConfig::default();
        config
            .apply_key_values(
                "# custom deployment\n\
                 label_predicates = http://my/label, http://my/alias\n\
                 person_types = http://my/Human\n\
                 max_name_tokens = 4\n\
                 primary_language = de\n\
                 popularity = degree\n\
                 strict = true\n",
            )
            .unwrap();
        assert_eq!(config.label_predicates, vec!["http://my/label", "http://my/alias"]);
        assert_eq!(config.person_type_iris, vec!["http://my/Human"]);
        assert_eq!(config.max_name_tokens, 4);
        assert_eq!(config.primary_language.as_deref(), Some("de"));
        assert_eq!(config.popularity_mode, PopularityMode::DegreeHeuristic);
        assert_eq!(config.parse_mode, ParseMode::Strict);
        // Untouched keys keep their defaults.
        assert_eq!(config.type_predicates, vec![RDF_TYPE.to_string()]);

        assert!(IngestConfig::default()
            .apply_key_values("unknown_key = 1\n")
            .is_err());
    }

    #[test]
    fn ingest_collects_all_parts() {
        let nt = format!(
            "<http://ex/aj> <{label}> \"Angelina Jolie\"@en .\n\
             <http://ex/aj> <{ty}> <http://xmlns.com/foaf/0.1/Person> .\n\
             <http://ex/aj> <{comment}> \"Angelina Jolie is an American actress.\"@en .\n\
             <http://ex/aj> <http://ex/partner> <http://ex/bp> .\n\
             <http://ex/bp> <{label}> \"Brad Pitt\"@en .\n",
            label = RDFS_LABEL,
            ty = RDF_TYPE,
            comment = RDFS_COMMENT,
        );
        let out = ingest_str(&nt, &IngestConfig::default()).unwrap();
        assert_eq!(out.triple_count, 5);
        assert_eq!(out.skipped_lines, 0);
        // foaf:Person becomes a node, so the graph holds aj, bp and the type.
        assert_eq!(out.graph.node_count(), 3);

        let surfaces: HashSet<(&str, &str)> = out
            .records
            .iter()
            .map(|r| (out.graph.iri(r.node), r.surface.as_str()))
            .collect();
        assert!(surfaces.contains(&("http://ex/aj", "Angelina Jolie")));
        // Person permutation of the label.
        assert!(surfaces.contains(&("http://ex/aj", "Angelina")));
        // Rare reference from the comment.
        assert!(surfaces.contains(&("http://ex/aj", "American actress")));
        assert!(surfaces.contains(&("http://ex/bp", "Brad Pitt")));

        assert_eq!(out.types.len(), 1);
        assert_eq!(out.contexts.len(), 2);
        let sum: f64 = out.popularity.scores().iter().sum();
        assert!((sum - 1.0).abs() < 1e-6);
    }
}

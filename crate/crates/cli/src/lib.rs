//! Command implementations and the HTTP service behind the `kblink`
//! binary; exposed as a library so integration tests can drive the router
//! in-process.

pub mod commands;
pub mod server;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use kblink::config::{Algorithm, PartialLinkerConfig};
use kblink::ingest::PopularityMode;

#[derive(Debug, Parser)]
#[command(name = "kblink", version, about = "Knowledge-base agnostic entity linking")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build an index bundle directory from N-Triples files.
    BuildIndex(BuildIndexArgs),
    /// Link documents from a JSON-lines file against an index.
    Link(LinkArgs),
    /// Serve the linking engine over HTTP.
    Serve(ServeArgs),
    /// Score a gold dataset (D2KB micro precision/recall/F1).
    Eval(EvalArgs),
    /// Print the canonical plain-text dump of an index directory.
    DumpIndex(DumpIndexArgs),
}

#[derive(Debug, Args)]
pub struct BuildIndexArgs {
    /// Input N-Triples files (`.gz` accepted), one or more.
    #[arg(long = "kb", required = true, num_args = 1..)]
    pub kb_files: Vec<PathBuf>,
    /// Output index directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Acronym TSV (`ACRONYM<TAB>expansion` per line).
    #[arg(long)]
    pub acronyms: Option<PathBuf>,
    /// key=value ingest config file; explicit flags override it.
    #[arg(long)]
    pub ingest_config: Option<PathBuf>,
    /// Knowledge-base name recorded in the manifest (default "kb").
    #[arg(long)]
    pub kb_name: Option<String>,
    /// Abort on the first malformed line instead of skipping it.
    #[arg(long)]
    pub strict: bool,
    /// Popularity scoring over the KB graph: pagerank (default) or degree.
    #[arg(long, value_parser = parse_popularity)]
    pub popularity_mode: Option<PopularityMode>,
    /// Language driving stopwords and the rare-reference tagger.
    #[arg(long)]
    pub language: Option<String>,
    /// Label language preferred when picking principal references.
    #[arg(long)]
    pub primary_language: Option<String>,
    /// Stopword file overriding the shipped list (one word per line).
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    /// Label predicates in principal-preference order.
    #[arg(long = "label-predicate")]
    pub label_predicates: Vec<String>,
    /// Type predicates.
    #[arg(long = "type-predicate")]
    pub type_predicates: Vec<String>,
    /// Description predicates feeding rare references.
    #[arg(long = "description-predicate")]
    pub description_predicates: Vec<String>,
    /// Type IRIs marking person resources.
    #[arg(long = "person-type")]
    pub person_types: Vec<String>,
}

fn parse_popularity(s: &str) -> Result<PopularityMode, String> {
    match s.to_ascii_lowercase().as_str() {
        "pagerank" => Ok(PopularityMode::PageRank),
        "degree" => Ok(PopularityMode::DegreeHeuristic),
        other => Err(format!("unknown popularity mode {other:?} (pagerank|degree)")),
    }
}

/// Linker configuration flags shared by `link`, `serve` and `eval`.
/// Precedence: flag > request override (HTTP only) > config file > default.
#[derive(Debug, Args, Default, Clone)]
pub struct ConfigFlags {
    /// Plain-text key=value config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Trigram similarity threshold.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// BFS expansion depth.
    #[arg(long)]
    pub depth: Option<usize>,
    /// Disambiguation algorithm: hits or pagerank.
    #[arg(long, value_parser = parse_algorithm)]
    pub algorithm: Option<Algorithm>,
    /// Disable popularity-based candidate ranking.
    #[arg(long)]
    pub no_popularity: bool,
    /// Disable the acronym tier.
    #[arg(long)]
    pub no_acronyms: bool,
    /// Disable the context-search tier.
    #[arg(long)]
    pub no_context: bool,
    /// Disable in-document co-reference grouping.
    #[arg(long)]
    pub no_coref: bool,
    /// Candidates kept per mention.
    #[arg(long)]
    pub candidate_cap: Option<usize>,
    #[arg(long)]
    pub hits_iterations: Option<usize>,
    #[arg(long)]
    pub pagerank_iterations: Option<usize>,
    #[arg(long)]
    pub pagerank_alpha: Option<f64>,
    /// Language driving the stemmer.
    #[arg(long)]
    pub language: Option<String>,
    /// Namespace for emergent-entity IRIs.
    #[arg(long)]
    pub emergent_namespace: Option<String>,
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    Algorithm::parse(s).map_err(|e| e.to_string())
}

impl ConfigFlags {
    /// The layer contributed by explicit flags.
    pub fn cli_layer(&self) -> PartialLinkerConfig {
        PartialLinkerConfig {
            sigma: self.sigma,
            depth: self.depth,
            algorithm: self.algorithm,
            use_popularity: self.no_popularity.then_some(false),
            use_acronyms: self.no_acronyms.then_some(false),
            use_context_search: self.no_context.then_some(false),
            use_coreference: self.no_coref.then_some(false),
            candidate_cap: self.candidate_cap,
            hits_iterations: self.hits_iterations,
            pagerank_iterations: self.pagerank_iterations,
            pagerank_alpha: self.pagerank_alpha,
            language: self.language.clone(),
            emergent_namespace: self.emergent_namespace.clone(),
        }
    }

    /// The layer read from `--config`, empty without one.
    pub fn file_layer(&self) -> anyhow::Result<PartialLinkerConfig> {
        Ok(match &self.config {
            Some(path) => PartialLinkerConfig::from_file(path)?,
            None => PartialLinkerConfig::default(),
        })
    }
}

#[derive(Debug, Args)]
pub struct LinkArgs {
    /// Index directory (or KBLINK_INDEX_DIR).
    #[arg(long, env = "KBLINK_INDEX_DIR")]
    pub index: PathBuf,
    /// Input JSON lines: {"text": ..., "mentions": [{"start", "end"}]}.
    #[arg(long)]
    pub input: PathBuf,
    /// Output JSON lines, one response per input line.
    #[arg(long)]
    pub output: PathBuf,
    /// Write the per-document disambiguation-graph dump here.
    #[arg(long)]
    pub dump_graph: Option<PathBuf>,
    #[command(flatten)]
    pub config: ConfigFlags,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// Index directory (or KBLINK_INDEX_DIR).
    #[arg(long, env = "KBLINK_INDEX_DIR")]
    pub index: PathBuf,
    /// Listen address.
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub addr: String,
    #[command(flatten)]
    pub config: ConfigFlags,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Gold dataset JSON lines.
    #[arg(long)]
    pub dataset: PathBuf,
    /// Index directory (or KBLINK_INDEX_DIR).
    #[arg(long, env = "KBLINK_INDEX_DIR")]
    pub index: PathBuf,
    /// Restrict scoring to one mention filter.
    #[arg(long)]
    pub filter: Option<String>,
    /// Ablation grid: JSON lines of {"name", <config overrides>}.
    #[arg(long)]
    pub grid: Option<PathBuf>,
    /// Also write results as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Dataset language tag.
    #[arg(long, default_value = "en")]
    pub dataset_language: String,
    #[command(flatten)]
    pub config: ConfigFlags,
}

#[derive(Debug, Args)]
pub struct DumpIndexArgs {
    /// Index directory (or KBLINK_INDEX_DIR).
    #[arg(long, env = "KBLINK_INDEX_DIR")]
    pub index: PathBuf,
}

//! Implementations of the CLI subcommands.

use std::fmt::Write as _;
use std::io::Write as _;

use anyhow::Context;

use kblink::api::{Document, LinkRequest};
use kblink::config::{resolve, LinkerConfig, PartialLinkerConfig};
use kblink::error::Error;
use kblink::eval::{
    ablation_csv, ablation_table, parse_grid, per_filter_reports, person_filter_mask,
    popularity_bin_mask, run_ablation, score_d2kb, score_d2kb_masked, EvalReport, GoldDataset,
    GridEntry, PopularityBin,
};
use kblink::index::{load_bundle, save_bundle, AcronymIndex, IndexBundle};
use kblink::ingest::{ingest_files, IngestConfig, ParseMode};
use kblink::pipeline::Linker;

use crate::{BuildIndexArgs, ConfigFlags, DumpIndexArgs, EvalArgs, LinkArgs};

pub fn build_index(args: &BuildIndexArgs) -> anyhow::Result<()> {
    // Built-in defaults, then the config file, then explicit flags.
    let mut config = IngestConfig::default();
    if let Some(path) = &args.ingest_config {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        config.apply_key_values(&text)?;
    }
    if !args.label_predicates.is_empty() {
        config.label_predicates = args.label_predicates.clone();
    }
    if !args.type_predicates.is_empty() {
        config.type_predicates = args.type_predicates.clone();
    }
    if !args.description_predicates.is_empty() {
        config.description_predicates = args.description_predicates.clone();
    }
    if !args.person_types.is_empty() {
        config.person_type_iris = args.person_types.clone();
    }
    if let Some(lang) = &args.primary_language {
        config.primary_language = Some(lang.clone());
    }
    if let Some(lang) = &args.language {
        config.language = lang.clone();
    }
    if let Some(path) = &args.stopwords {
        config.stopword_file = Some(path.clone());
    }
    if let Some(mode) = args.popularity_mode {
        config.popularity_mode = mode;
    }
    if args.strict {
        config.parse_mode = ParseMode::Strict;
    }
    if let Some(name) = &args.kb_name {
        config.kb_name = name.clone();
    }

    let ingest = ingest_files(&args.kb_files, &config).context("ingest failed")?;
    let acronyms = match &args.acronyms {
        Some(path) => AcronymIndex::from_file(path).context("acronym file")?,
        None => AcronymIndex::empty(),
    };
    let bundle = IndexBundle::build(ingest, acronyms);
    save_bundle(&bundle, &args.out).context("writing index")?;

    let c = &bundle.manifest().counts;
    println!("index written to {}", args.out.display());
    println!("  index version:     {}", bundle.manifest().index_version);
    println!("  triples:           {}", c.triples);
    println!("  skipped lines:     {}", c.skipped_lines);
    println!("  resources:         {}", c.resources);
    println!("  edges:             {}", c.edges);
    println!("  surfaces:          {}", c.surfaces);
    println!("  surface postings:  {}", c.surface_postings);
    println!("  context documents: {}", c.context_documents);
    println!("  acronyms:          {}", c.acronyms);
    println!("  type assertions:   {}", c.type_assertions);
    Ok(())
}

/// Resolves the effective config for offline commands: flag > file > default.
pub fn resolve_config(flags: &ConfigFlags) -> anyhow::Result<LinkerConfig> {
    let file = flags.file_layer()?;
    let config = resolve(&[&file, &flags.cli_layer()]);
    config.validate()?;
    Ok(config)
}

pub fn link(args: &LinkArgs) -> anyhow::Result<()> {
    let bundle = load_bundle(&args.index).context("loading index")?;
    let config = resolve_config(&args.config)?;
    let linker = Linker::new(bundle, config)?;

    let input = std::fs::read_to_string(&args.input).context("reading input")?;
    let mut output = String::new();
    let mut dump = String::new();
    for (no, line) in input.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match link_line(&linker, &args.config, line, no, args.dump_graph.is_some()) {
            Ok((response, graph_dump)) => {
                output.push_str(&response);
                output.push('\n');
                if let Some(graph_dump) = graph_dump {
                    writeln!(dump, "# document {no}").unwrap();
                    dump.push_str(&graph_dump);
                }
            }
            Err(err) => {
                // Per-document error record; the run continues.
                let record = serde_json::json!({
                    "error": {"code": error_code(&err), "message": err.to_string()}
                });
                output.push_str(&record.to_string());
                output.push('\n');
            }
        }
    }
    std::fs::write(&args.output, output).context("writing output")?;
    if let Some(path) = &args.dump_graph {
        std::fs::write(path, dump).context("writing graph dump")?;
    }
    Ok(())
}

fn link_line(
    linker: &Linker,
    flags: &ConfigFlags,
    line: &str,
    no: usize,
    want_dump: bool,
) -> Result<(String, Option<String>), Error> {
    let request: LinkRequest = serde_json::from_str(line)
        .map_err(|e| Error::Other(format!("line {}: invalid request: {e}", no + 1)))?;
    let document = Document::from_request(&request)?;

    // Per-line overrides (and the language tag) sit below the CLI flags,
    // like HTTP requests do.
    let mut overrides = request.config_overrides.clone().unwrap_or_default();
    if overrides.language.is_none() {
        overrides.language = request.language.clone();
    }
    let effective = if overrides.is_empty() {
        linker.clone()
    } else {
        let file = flags
            .file_layer()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?;
        let config = resolve(&[&file, &overrides, &flags.cli_layer()]);
        config.validate()?;
        linker.with_config(config)?
    };

    if want_dump {
        let (_, graph_dump) = effective.link_document_with_dump(&document);
        let response = serde_json::to_string(&effective.respond(&document))
            .map_err(|e| Error::Other(e.to_string()))?;
        Ok((response, Some(graph_dump)))
    } else {
        let response = serde_json::to_string(&effective.respond(&document))
            .map_err(|e| Error::Other(e.to_string()))?;
        Ok((response, None))
    }
}

pub fn error_code(err: &Error) -> &'static str {
    match err {
        Error::InvalidSpan { .. } => "SPAN_INVALID",
        Error::InvalidConfig(_) => "CONFIG_INVALID",
        Error::MentionMismatch(_) => "MENTION_MISMATCH",
        Error::TypesUnavailable => "TYPES_UNAVAILABLE",
        Error::Parse { .. } => "PARSE_ERROR",
        Error::EmptyGraph => "EMPTY_GRAPH",
        Error::InvalidFormat { .. } => "FORMAT_INVALID",
        Error::Io(_) => "IO_ERROR",
        Error::Other(_) => "BAD_REQUEST",
    }
}

pub fn eval(args: &EvalArgs) -> anyhow::Result<()> {
    let bundle = load_bundle(&args.index).context("loading index")?;
    let config = resolve_config(&args.config)?;
    let linker = Linker::new(bundle, config)?;
    let dataset = GoldDataset::from_file(&args.dataset, &args.dataset_language)?;

    if let Some(grid_path) = &args.grid {
        let grid = parse_grid(&std::fs::read_to_string(grid_path)?)?;
        let rows = run_ablation(&linker, &dataset, &grid)?;
        print!("{}", ablation_table(&rows));
        if let Some(csv_path) = &args.csv {
            std::fs::write(csv_path, ablation_csv(&rows))?;
            println!("csv written to {}", csv_path.display());
        }
        return Ok(());
    }

    let documents = dataset.to_documents()?;
    let predicted = linker.link_batch(&documents);

    let report = match args.filter.as_deref() {
        None => score_d2kb(&dataset.documents, &predicted)?,
        Some("persons") => {
            let mask = person_filter_mask(&dataset.documents, linker.bundle())?;
            score_d2kb_masked(&dataset.documents, &predicted, &mask)?
        }
        Some(bin) => {
            let bin = PopularityBin::parse(bin)?;
            let mask = popularity_bin_mask(&dataset.documents, linker.bundle(), bin);
            score_d2kb_masked(&dataset.documents, &predicted, &mask)?
        }
    };

    println!(
        "dataset: {}  documents: {}  mentions: {}",
        dataset.name,
        dataset.documents.len(),
        dataset.mention_count()
    );
    if let Some(filter) = &args.filter {
        println!("filter: {filter}");
    }
    print_report(&report);

    if args.filter.is_none() {
        match per_filter_reports(&dataset.documents, &predicted, linker.bundle()) {
            Ok(per_filter) => {
                println!("fine-grained:");
                for (name, r) in &per_filter {
                    println!(
                        "  {:<10} tp={:<4} fp={:<4} fn={:<4} micro-F1={:.4}",
                        name, r.tp, r.fp, r.fn_, r.micro_f1
                    );
                }
            }
            Err(Error::TypesUnavailable) => {}
            Err(e) => return Err(e.into()),
        }
    }

    if let Some(csv_path) = &args.csv {
        let rows = run_ablation(
            &linker,
            &dataset,
            &[GridEntry {
                name: "run".to_string(),
                overrides: PartialLinkerConfig::default(),
            }],
        )?;
        std::fs::write(csv_path, ablation_csv(&rows))?;
        println!("csv written to {}", csv_path.display());
    }
    Ok(())
}

fn print_report(report: &EvalReport) {
    println!(
        "tp={} fp={} fn={}",
        report.tp, report.fp, report.fn_
    );
    println!(
        "micro-P={:.4} micro-R={:.4} micro-F1={:.4}",
        report.micro_precision, report.micro_recall, report.micro_f1
    );
}

pub fn dump_index(args: &DumpIndexArgs) -> anyhow::Result<()> {
    let bundle = load_bundle(&args.index).context("loading index")?;
    let dump = kblink::index::store::debug_dump(&bundle);
    std::io::stdout().write_all(dump.as_bytes())?;
    Ok(())
}

/// Shared by `serve` and the HTTP tests: load a bundle for serving.
pub fn load_service_bundle(path: &std::path::Path) -> anyhow::Result<IndexBundle> {
    load_bundle(path).with_context(|| format!("loading index from {}", path.display()))
}

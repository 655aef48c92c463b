//! D2KB scoring: micro precision/recall/F1 over gold datasets, the persons
//! and popularity-percentile filters, and the ablation grid runner.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::api::{Document, Span};
use crate::config::{LinkerConfig, PartialLinkerConfig};
use crate::error::Error;
use crate::index::IndexBundle;
use crate::pipeline::{LinkedDocument, Linker};
use crate::Result;

/// Marker for out-of-KB gold annotations in dataset files.
pub const EMERGENT_MARKER: &str = "EMERGENT";

/// Gold target: a KB IRI or the out-of-KB marker.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GoldTarget {
    Iri(String),
    Emergent,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldMention {
    pub start: usize,
    pub end: usize,
    pub target: GoldTarget,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldDocument {
    pub text: String,
    pub mentions: Vec<GoldMention>,
}

#[derive(Debug, Clone, Default)]
pub struct GoldDataset {
    pub name: String,
    pub language: String,
    pub documents: Vec<GoldDocument>,
}

#[derive(Debug, Deserialize)]
struct GoldMentionWire {
    start: usize,
    end: usize,
    iri: String,
}

#[derive(Debug, Deserialize)]
struct GoldDocumentWire {
    text: String,
    mentions: Vec<GoldMentionWire>,
}

impl GoldDataset {
    /// Parses JSON lines of `{"text": ..., "mentions": [{"start", "end",
    /// "iri"}]}` where the IRI `"EMERGENT"` marks out-of-KB gold.
    pub fn from_jsonl(name: &str, language: &str, text: &str) -> Result<GoldDataset> {
        let mut documents = Vec::new();
        for (no, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let wire: GoldDocumentWire = serde_json::from_str(line).map_err(|e| {
                Error::InvalidFormat {
                    file: name.to_string(),
                    reason: format!("line {}: {e}", no + 1),
                }
            })?;
            // Span validation reuses the document model.
            let spans: Vec<Span> = wire
                .mentions
                .iter()
                .map(|m| Span {
                    start: m.start,
                    end: m.end,
                })
                .collect();
            Document::new(wire.text.clone(), &spans)?;
            documents.push(GoldDocument {
                text: wire.text,
                mentions: wire
                    .mentions
                    .into_iter()
                    .map(|m| GoldMention {
                        start: m.start,
                        end: m.end,
                        target: if m.iri == EMERGENT_MARKER {
                            GoldTarget::Emergent
                        } else {
                            GoldTarget::Iri(m.iri)
                        },
                    })
                    .collect(),
            });
        }
        Ok(GoldDataset {
            name: name.to_string(),
            language: language.to_string(),
            documents,
        })
    }

    pub fn from_file(path: &Path, language: &str) -> Result<GoldDataset> {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".to_string());
        Self::from_jsonl(&name, language, &std::fs::read_to_string(path)?)
    }

    pub fn mention_count(&self) -> usize {
        self.documents.iter().map(|d| d.mentions.len()).sum()
    }

    /// The gold documents as linkable [`Document`]s.
    pub fn to_documents(&self) -> Result<Vec<Document>> {
        self.documents
            .iter()
            .map(|d| {
                let spans: Vec<Span> = d
                    .mentions
                    .iter()
                    .map(|m| Span {
                        start: m.start,
                        end: m.end,
                    })
                    .collect();
                Document::new(d.text.clone(), &spans)
            })
            .collect()
    }
}

/// Micro-averaged D2KB scores.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub micro_precision: f64,
    pub micro_recall: f64,
    pub micro_f1: f64,
}

impl EvalReport {
    pub fn from_counts(tp: u64, fp: u64, fn_: u64) -> EvalReport {
        let p = if tp + fp > 0 {
            tp as f64 / (tp + fp) as f64
        } else {
            0.0
        };
        let r = if tp + fn_ > 0 {
            tp as f64 / (tp + fn_) as f64
        } else {
            0.0
        };
        let f1 = if p + r > 0.0 { 2.0 * p * r / (p + r) } else { 0.0 };
        EvalReport {
            tp,
            fp,
            fn_,
            micro_precision: p,
            micro_recall: r,
            micro_f1: f1,
        }
    }
}

/// IRI normalization before comparison: percent-escapes that decode to
/// valid UTF-8 are folded, the comparison itself stays case-sensitive.
pub fn normalize_iri(iri: &str) -> String {
    let bytes = iri.as_bytes();
    let mut out: Vec<u8> = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' && i + 2 < bytes.len() {
            let hex = &iri[i + 1..i + 3];
            if let Ok(v) = u8::from_str_radix(hex, 16) {
                out.push(v);
                i += 3;
                continue;
            }
        }
        out.push(bytes[i]);
        i += 1;
    }
    match String::from_utf8(out) {
        Ok(s) => s,
        Err(_) => iri.to_string(),
    }
}

/// Scores predictions against gold, mention by mention: equal IRIs (after
/// normalization) are true positives; a wrong IRI counts both fp and fn; a
/// non-emergent answer to emergent gold is fp; an emergent answer to
/// non-emergent gold is fn; emergent-emergent pairs count nothing.
pub fn score_d2kb(gold: &[GoldDocument], predicted: &[LinkedDocument]) -> Result<EvalReport> {
    if gold.len() != predicted.len() {
        return Err(Error::MentionMismatch(format!(
            "{} gold documents vs {} predicted",
            gold.len(),
            predicted.len()
        )));
    }
    let (mut tp, mut fp, mut fn_) = (0u64, 0u64, 0u64);
    for (doc_no, (g, p)) in gold.iter().zip(predicted).enumerate() {
        if g.mentions.len() != p.mentions.len() {
            return Err(Error::MentionMismatch(format!(
                "document {doc_no}: {} gold mentions vs {} predicted",
                g.mentions.len(),
                p.mentions.len()
            )));
        }
        for (gm, pm) in g.mentions.iter().zip(&p.mentions) {
            if gm.start != pm.start || gm.end != pm.end {
                return Err(Error::MentionMismatch(format!(
                    "document {doc_no}: span [{}, {}) vs gold [{}, {})",
                    pm.start, pm.end, gm.start, gm.end
                )));
            }
            match (&gm.target, pm.emergent) {
                (GoldTarget::Emergent, true) => {}
                (GoldTarget::Emergent, false) => fp += 1,
                (GoldTarget::Iri(_), true) => fn_ += 1,
                (GoldTarget::Iri(gold_iri), false) => {
                    if normalize_iri(gold_iri) == normalize_iri(&pm.iri) {
                        tp += 1;
                    } else {
                        fp += 1;
                        fn_ += 1;
                    }
                }
            }
        }
    }
    Ok(EvalReport::from_counts(tp, fp, fn_))
}

/// Per-mention keep masks aligned with the gold documents.
pub type MentionMask = Vec<Vec<bool>>;

/// Scores only the mentions the mask keeps.
pub fn score_d2kb_masked(
    gold: &[GoldDocument],
    predicted: &[LinkedDocument],
    mask: &MentionMask,
) -> Result<EvalReport> {
    let filtered_gold: Vec<GoldDocument> = gold
        .iter()
        .zip(mask)
        .map(|(d, keep)| GoldDocument {
            text: d.text.clone(),
            mentions: d
                .mentions
                .iter()
                .zip(keep)
                .filter(|&(_, &k)| k)
                .map(|(m, _)| m.clone())
                .collect(),
        })
        .collect();
    let filtered_pred: Vec<LinkedDocument> = predicted
        .iter()
        .zip(mask)
        .map(|(d, keep)| LinkedDocument {
            mentions: d
                .mentions
                .iter()
                .zip(keep)
                .filter(|&(_, &k)| k)
                .map(|(m, _)| m.clone())
                .collect(),
        })
        .collect();
    score_d2kb(&filtered_gold, &filtered_pred)
}

/// Keeps mentions whose gold resource carries one of the bundle's
/// configured person types. Errors with [`Error::TypesUnavailable`] when
/// the index has no type assertions at all.
pub fn person_filter_mask(gold: &[GoldDocument], bundle: &IndexBundle) -> Result<MentionMask> {
    if bundle.types().is_empty() {
        return Err(Error::TypesUnavailable);
    }
    let person_types: HashSet<u32> = bundle
        .manifest()
        .person_type_iris
        .iter()
        .filter_map(|iri| bundle.node_id(iri))
        .collect();
    Ok(gold
        .iter()
        .map(|d| {
            d.mentions
                .iter()
                .map(|m| match &m.target {
                    GoldTarget::Emergent => false,
                    GoldTarget::Iri(iri) => bundle
                        .node_id(iri)
                        .map(|node| {
                            bundle
                                .types_of(node)
                                .iter()
                                .any(|t| person_types.contains(t))
                        })
                        .unwrap_or(false),
                })
                .collect()
        })
        .collect())
}

/// Popularity percentile bins over the whole KB, boundaries closed on the
/// right: the top 10%, (10%, 55%], and (55%, 100%].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PopularityBin {
    Top10,
    Mid10To55,
    Bottom55To100,
}

impl PopularityBin {
    pub fn as_str(&self) -> &'static str {
        match self {
            PopularityBin::Top10 => "pr10",
            PopularityBin::Mid10To55 => "pr10-55",
            PopularityBin::Bottom55To100 => "pr55-100",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "pr10" => Ok(PopularityBin::Top10),
            "pr10-55" => Ok(PopularityBin::Mid10To55),
            "pr55-100" => Ok(PopularityBin::Bottom55To100),
            other => Err(Error::InvalidConfig(format!(
                "unknown popularity bin {other:?} (expected pr10|pr10-55|pr55-100)"
            ))),
        }
    }
}

/// Keeps mentions whose gold resource falls in the requested popularity
/// percentile bin. All KB resources are ranked by (popularity desc, IRI
/// asc); a resource at 1-based rank r of N sits at percentile 100*r/N.
/// Emergent gold is excluded from every bin; gold IRIs missing from the KB
/// rank beyond the least popular resource (bottom bin).
pub fn popularity_bin_mask(
    gold: &[GoldDocument],
    bundle: &IndexBundle,
    bin: PopularityBin,
) -> MentionMask {
    let n = bundle.graph().node_count();
    let mut order: Vec<u32> = (0..n as u32).collect();
    let pop = bundle.popularity();
    order.sort_by(|&a, &b| pop.score(b).total_cmp(&pop.score(a)).then(a.cmp(&b)));
    let mut rank_of = vec![0usize; n];
    for (rank, &node) in order.iter().enumerate() {
        rank_of[node as usize] = rank + 1;
    }

    let in_bin = |percentile: f64| match bin {
        PopularityBin::Top10 => percentile <= 10.0,
        PopularityBin::Mid10To55 => percentile > 10.0 && percentile <= 55.0,
        PopularityBin::Bottom55To100 => percentile > 55.0,
    };

    gold.iter()
        .map(|d| {
            d.mentions
                .iter()
                .map(|m| match &m.target {
                    GoldTarget::Emergent => false,
                    GoldTarget::Iri(iri) => {
                        let percentile = match bundle.node_id(iri) {
                            Some(node) => {
                                100.0 * rank_of[node as usize] as f64 / n as f64
                            }
                            None => 100.0,
                        };
                        in_bin(percentile)
                    }
                })
                .collect()
        })
        .collect()
}

/// One ablation grid entry: a name plus config overrides.
#[derive(Debug, Clone, Default, Deserialize)]
pub struct GridEntry {
    #[serde(default)]
    pub name: String,
    #[serde(flatten)]
    pub overrides: PartialLinkerConfig,
}

/// Parses a grid file: JSON lines of `{"name": ..., <override fields>}`.
pub fn parse_grid(text: &str) -> Result<Vec<GridEntry>> {
    let mut entries = Vec::new();
    for (no, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut entry: GridEntry =
            serde_json::from_str(line).map_err(|e| Error::InvalidFormat {
                file: "grid".to_string(),
                reason: format!("line {}: {e}", no + 1),
            })?;
        if entry.name.is_empty() {
            entry.name = format!("variant-{}", no + 1);
        }
        entries.push(entry);
    }
    Ok(entries)
}

/// A scored ablation row.
#[derive(Debug, Clone)]
pub struct AblationRow {
    pub name: String,
    pub config: LinkerConfig,
    pub report: EvalReport,
}

/// Runs the full pipeline once per grid entry and scores each run.
pub fn run_ablation(
    linker: &Linker,
    dataset: &GoldDataset,
    grid: &[GridEntry],
) -> Result<Vec<AblationRow>> {
    let documents = dataset.to_documents()?;
    let mut rows = Vec::with_capacity(grid.len());
    for entry in grid {
        let config = entry.overrides.apply_to(linker.config());
        let variant = linker.with_config(config.clone())?;
        let predicted = variant.link_batch(&documents);
        let report = score_d2kb(&dataset.documents, &predicted)?;
        rows.push(AblationRow {
            name: entry.name.clone(),
            config,
            report,
        });
    }
    Ok(rows)
}

/// Human-readable comparison table.
pub fn ablation_table(rows: &[AblationRow]) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{:<24} {:>6} {:>6} {:>6} {:>9} {:>9} {:>9}",
        "variant", "tp", "fp", "fn", "micro-P", "micro-R", "micro-F1"
    )
    .unwrap();
    for row in rows {
        writeln!(
            out,
            "{:<24} {:>6} {:>6} {:>6} {:>9.4} {:>9.4} {:>9.4}",
            row.name,
            row.report.tp,
            row.report.fp,
            row.report.fn_,
            row.report.micro_precision,
            row.report.micro_recall,
            row.report.micro_f1
        )
        .unwrap();
    }
    out
}

/// CSV rendering of the same rows.
pub fn ablation_csv(rows: &[AblationRow]) -> String {
    let mut out = String::from(
        "name,sigma,depth,algorithm,popularity,acronyms,context,coref,tp,fp,fn,micro_precision,micro_recall,micro_f1\n",
    );
    for row in rows {
        let c = &row.config;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            csv_field(&row.name),
            c.sigma,
            c.depth,
            c.algorithm.as_str(),
            c.use_popularity,
            c.use_acronyms,
            c.use_context_search,
            c.use_coreference,
            row.report.tp,
            row.report.fp,
            row.report.fn_,
            row.report.micro_precision,
            row.report.micro_recall,
            row.report.micro_f1
        )
        .unwrap();
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Filter reports keyed by filter name, for the fine-grained evaluation.
pub fn per_filter_reports(
    gold: &[GoldDocument],
    predicted: &[LinkedDocument],
    bundle: &IndexBundle,
) -> Result<BTreeMap<String, EvalReport>> {
    let mut out = BTreeMap::new();
    if !bundle.types().is_empty() {
        let mask = person_filter_mask(gold, bundle)?;
        out.insert(
            "persons".to_string(),
            score_d2kb_masked(gold, predicted, &mask)?,
        );
    }
    for bin in [
        PopularityBin::Top10,
        PopularityBin::Mid10To55,
        PopularityBin::Bottom55To100,
    ] {
        let mask = popularity_bin_mask(gold, bundle, bin);
        out.insert(
            bin.as_str().to_string(),
            score_d2kb_masked(gold, predicted, &mask)?,
        );
    }
    Ok(out)
}

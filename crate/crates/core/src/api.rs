//! Wire types shared by the CLI and the HTTP service, plus the validated
//! in-memory document model. All spans are character offsets.

use serde::{Deserialize, Serialize};

use crate::config::PartialLinkerConfig;
use crate::error::Error;
use crate::Result;

/// A mention span in a link request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

/// One document to link: text plus the given mention spans (the D2KB
/// setting; no mention spotting happens here).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LinkRequest {
    pub text: String,
    pub mentions: Vec<Span>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub language: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_overrides: Option<PartialLinkerConfig>,
}

/// Assignment for one request mention, same order as the request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireAssignment {
    pub start: usize,
    pub end: usize,
    pub iri: String,
    pub emergent: bool,
    pub score: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LinkResponse {
    pub assignments: Vec<WireAssignment>,
    /// Filled by the HTTP service; omitted from file output so that CLI
    /// runs stay byte-identical.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
    pub index_version: String,
}

/// A mention with its validated text slice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mention {
    pub text: String,
    /// Character offsets into the document text.
    pub start: usize,
    pub end: usize,
}

/// A validated document: every span in bounds, text extracted, spans
/// non-overlapping. Mentions keep request order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub text: String,
    pub mentions: Vec<Mention>,
}

impl Document {
    pub fn new(text: impl Into<String>, spans: &[Span]) -> Result<Document> {
        let text = text.into();
        // Char-offset to byte-offset table; index len is the end sentinel.
        let byte_of: Vec<usize> = text
            .char_indices()
            .map(|(b, _)| b)
            .chain(std::iter::once(text.len()))
            .collect();
        let char_len = byte_of.len() - 1;

        let mut mentions = Vec::with_capacity(spans.len());
        for span in spans {
            if span.start >= span.end {
                return Err(Error::InvalidSpan {
                    start: span.start,
                    end: span.end,
                    reason: "start must be less than end".into(),
                });
            }
            if span.end > char_len {
                return Err(Error::InvalidSpan {
                    start: span.start,
                    end: span.end,
                    reason: format!("end exceeds document length {char_len}"),
                });
            }
            mentions.push(Mention {
                text: text[byte_of[span.start]..byte_of[span.end]].to_string(),
                start: span.start,
                end: span.end,
            });
        }

        let mut sorted: Vec<&Mention> = mentions.iter().collect();
        sorted.sort_by_key(|m| (m.start, m.end));
        for pair in sorted.windows(2) {
            if pair[1].start < pair[0].end {
                return Err(Error::InvalidSpan {
                    start: pair[1].start,
                    end: pair[1].end,
                    reason: format!(
                        "overlaps span [{}, {})",
                        pair[0].start, pair[0].end
                    ),
                });
            }
        }

        Ok(Document { text, mentions })
    }

    pub fn from_request(request: &LinkRequest) -> Result<Document> {
        Self::new(request.text.clone(), &request.mentions)
    }
}

//! Online-phase configuration: defaults, key=value config files, wire
//! overrides, and the precedence merge (CLI flag > request override >
//! config file > built-in default).

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::Result;

/// Disambiguation graph algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Hits,
    Pagerank,
}

impl Algorithm {
    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::Hits => "hits",
            Algorithm::Pagerank => "pagerank",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hits" => Ok(Algorithm::Hits),
            "pagerank" => Ok(Algorithm::Pagerank),
            other => Err(Error::InvalidConfig(format!(
                "unknown algorithm {other:?} (expected hits|pagerank)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkerConfig {
    /// Trigram similarity acceptance threshold.
    pub sigma: f64,
    /// BFS expansion depth of the disambiguation graph.
    pub depth: usize,
    pub algorithm: Algorithm,
    pub use_popularity: bool,
    pub use_acronyms: bool,
    pub use_context_search: bool,
    pub use_coreference: bool,
    /// Candidates kept per mention after the popularity sort.
    pub candidate_cap: usize,
    pub hits_iterations: usize,
    pub pagerank_iterations: usize,
    /// Teleport probability of the disambiguation PageRank.
    pub pagerank_alpha: f64,
    /// Language driving the stemmer.
    pub language: String,
    /// Namespace minted for emergent-entity IRIs.
    pub emergent_namespace: String,
}

impl Default for LinkerConfig {
    fn default() -> Self {
        Self {
            sigma: 0.87,
            depth: 2,
            algorithm: Algorithm::Hits,
            use_popularity: true,
            use_acronyms: true,
            use_context_search: true,
            use_coreference: true,
            candidate_cap: 100,
            hits_iterations: 20,
            pagerank_iterations: 50,
            pagerank_alpha: 0.15,
            language: "en".to_string(),
            emergent_namespace: "http://kblink.invalid/emergent/".to_string(),
        }
    }
}

impl LinkerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.sigma) {
            return Err(Error::InvalidConfig(format!(
                "sigma must be in [0,1], got {}",
                self.sigma
            )));
        }
        if self.candidate_cap == 0 {
            return Err(Error::InvalidConfig("candidate_cap must be >= 1".into()));
        }
        if self.hits_iterations == 0 || self.pagerank_iterations == 0 {
            return Err(Error::InvalidConfig("iteration counts must be >= 1".into()));
        }
        if !(self.pagerank_alpha > 0.0 && self.pagerank_alpha < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "pagerank_alpha must be in (0,1), got {}",
                self.pagerank_alpha
            )));
        }
        if self.emergent_namespace.is_empty()
            || self.emergent_namespace.chars().any(char::is_whitespace)
        {
            return Err(Error::InvalidConfig(
                "emergent_namespace must be a non-empty IRI prefix".into(),
            ));
        }
        Ok(())
    }
}

/// A sparse config layer: only the set fields override the layer below.
/// Wire format uses camelCase keys; config files use the same snake_case
/// names as the CLI flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct PartialLinkerConfig {
    pub sigma: Option<f64>,
    pub depth: Option<usize>,
    pub algorithm: Option<Algorithm>,
    pub use_popularity: Option<bool>,
    pub use_acronyms: Option<bool>,
    pub use_context_search: Option<bool>,
    pub use_coreference: Option<bool>,
    pub candidate_cap: Option<usize>,
    pub hits_iterations: Option<usize>,
    pub pagerank_iterations: Option<usize>,
    pub pagerank_alpha: Option<f64>,
    pub language: Option<String>,
    pub emergent_namespace: Option<String>,
}

impl PartialLinkerConfig {
    pub fn is_empty(&self) -> bool {
        *self == Self::default()
    }

    /// Parses the plain-text `key=value` config file format. Keys use the
    /// CLI flag names. Comment lines start with `#`; no inline comments,
    /// since IRI values may contain `#`.
    pub fn from_key_values(text: &str) -> Result<Self> {
        let mut out = Self::default();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("config line {}: expected key=value", no + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            let bad = |what: &str| {
                Error::InvalidConfig(format!("config line {}: bad {what} {value:?}", no + 1))
            };
            match key {
                "sigma" => out.sigma = Some(value.parse().map_err(|_| bad("number"))?),
                "depth" => out.depth = Some(value.parse().map_err(|_| bad("integer"))?),
                "algorithm" => out.algorithm = Some(Algorithm::parse(value)?),
                "popularity" => out.use_popularity = Some(parse_bool(value).ok_or_else(|| bad("bool"))?),
                "acronyms" => out.use_acronyms = Some(parse_bool(value).ok_or_else(|| bad("bool"))?),
                "context" => out.use_context_search = Some(parse_bool(value).ok_or_else(|| bad("bool"))?),
                "coref" => out.use_coreference = Some(parse_bool(value).ok_or_else(|| bad("bool"))?),
                "candidate_cap" => out.candidate_cap = Some(value.parse().map_err(|_| bad("integer"))?),
                "hits_iterations" => out.hits_iterations = Some(value.parse().map_err(|_| bad("integer"))?),
                "pagerank_iterations" => out.pagerank_iterations = Some(value.parse().map_err(|_| bad("integer"))?),
                "pagerank_alpha" => out.pagerank_alpha = Some(value.parse().map_err(|_| bad("number"))?),
                "language" => out.language = Some(value.to_string()),
                "emergent_namespace" => out.emergent_namespace = Some(value.to_string()),
                other => {
                    return Err(Error::InvalidConfig(format!(
                        "config line {}: unknown key {other:?}",
                        no + 1
                    )))
                }
            }
        }
        Ok(out)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        Self::from_key_values(&std::fs::read_to_string(path)?)
    }

    /// Applies this layer on top of `base`.
    pub fn apply_to(&self, base: &LinkerConfig) -> LinkerConfig {
        LinkerConfig {
            sigma: self.sigma.unwrap_or(base.sigma),
            depth: self.depth.unwrap_or(base.depth),
            algorithm: self.algorithm.unwrap_or(base.algorithm),
            use_popularity: self.use_popularity.unwrap_or(base.use_popularity),
            use_acronyms: self.use_acronyms.unwrap_or(base.use_acronyms),
            use_context_search: self.use_context_search.unwrap_or(base.use_context_search),
            use_coreference: self.use_coreference.unwrap_or(base.use_coreference),
            candidate_cap: self.candidate_cap.unwrap_or(base.candidate_cap),
            hits_iterations: self.hits_iterations.unwrap_or(base.hits_iterations),
            pagerank_iterations: self
                .pagerank_iterations
                .unwrap_or(base.pagerank_iterations),
            pagerank_alpha: self.pagerank_alpha.unwrap_or(base.pagerank_alpha),
            language: self.language.clone().unwrap_or_else(|| base.language.clone()),
            emergent_namespace: self
                .emergent_namespace
                .clone()
                .unwrap_or_else(|| base.emergent_namespace.clone()),
        }
    }
}

/// Resolves layers lowest-precedence first over the built-in defaults:
/// `resolve(&[file, request, cli])` gives CLI flags the last word.
pub fn resolve(layers: &[&PartialLinkerConfig]) -> LinkerConfig {
    let mut config = LinkerConfig::default();
    for layer in layers {
        config = layer.apply_to(&config);
    }
    config
}

fn parse_bool(s: &str) -> Option<bool> {
    match s.to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" | "on" => Some(true),
        "false" | "0" | "no" | "off" => Some(false),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_the_shipped_configuration() {
        let c = LinkerConfig::default();
        assert_eq!(c.sigma, 0.87);
        assert_eq!(c.depth, 2);
        assert_eq!(c.algorithm, Algorithm::Hits);
        assert_eq!(c.candidate_cap, 100);
        assert_eq!(c.hits_iterations, 20);
        assert_eq!(c.pagerank_iterations, 50);
        assert_eq!(c.pagerank_alpha, 0.15);
        assert!(c.use_popularity && c.use_acronyms && c.use_context_search && c.use_coreference);
        c.validate().unwrap();
    }

    #[test]
    fn key_value_file_parses() {
        let p = PartialLinkerConfig::from_key_values(
            "# comment\nsigma = 0.8\nalgorithm=pagerank\ncontext=off\ndepth=3\n",
        )
        .unwrap();
        assert_eq!(p.sigma, Some(0.8));
        assert_eq!(p.algorithm, Some(Algorithm::Pagerank));
        assert_eq!(p.use_context_search, Some(false));
        assert_eq!(p.depth, Some(3));
        assert_eq!(p.use_popularity, None);
    }

    #[test]
    fn unknown_key_is_rejected() {
        assert!(PartialLinkerConfig::from_key_values("nope=1\n").is_err());
    }

    #[test]
    fn later_layers_win() {
        let file = PartialLinkerConfig {
            sigma: Some(0.5),
            depth: Some(1),
            ..Default::default()
        };
        let cli = PartialLinkerConfig {
            sigma: Some(0.9),
            ..Default::default()
        };
        let resolved = resolve(&[&file, &cli]);
        assert_eq!(resolved.sigma, 0.9); // cli beats file
        assert_eq!(resolved.depth, 1); // file beats default
        assert_eq!(resolved.candidate_cap, 100); // default
    }

    #[test]
    fn validation_catches_bad_values() {
        let mut c = LinkerConfig {
            sigma: 1.5,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        c.sigma = 0.5;
        c.pagerank_alpha = 0.0;
        assert!(c.validate().is_err());
        c.pagerank_alpha = 0.15;
        c.candidate_cap = 0;
        assert!(c.validate().is_err());
    }
}

//! Disambiguation: per-document candidate graph, breadth-first expansion
//! into the KB to find hidden paths, HITS or PageRank scoring, and the
//! final mention-to-resource assignment (with emergent entities for
//! mentions without candidates).

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::api::Mention;
use crate::config::Algorithm;
use crate::error::Error;
use crate::exec;
use crate::ingest::KbGraph;
use crate::text::normalize;
use crate::Result;

/// Per-node scores after disambiguation; only the configured algorithm's
/// fields are populated.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NodeScore {
    pub authority: f64,
    pub hub: f64,
    pub pagerank: f64,
}

/// The per-document disambiguation graph. Nodes are KB node ids; edges are
/// only ever copied from the KB graph.
#[derive(Debug, Clone, Default)]
pub struct DisambiguationGraph {
    /// Insertion order: candidates first, then BFS discoveries.
    nodes: Vec<u32>,
    index_of: HashMap<u32, u32>,
    edges: BTreeSet<(u32, u32)>,
    /// Candidate KB nodes per mention, in mention order.
    candidate_of: Vec<Vec<u32>>,
}

impl DisambiguationGraph {
    /// G_0: all candidates as nodes, no edges.
    pub fn build_initial(candidates_per_mention: &[Vec<u32>]) -> DisambiguationGraph {
        let mut g = DisambiguationGraph {
            candidate_of: candidates_per_mention.to_vec(),
            ..Default::default()
        };
        for cands in candidates_per_mention {
            for &node in cands {
                g.add_node(node);
            }
        }
        g
    }

    fn add_node(&mut self, kb_node: u32) {
        if !self.index_of.contains_key(&kb_node) {
            self.index_of.insert(kb_node, self.nodes.len() as u32);
            self.nodes.push(kb_node);
        }
    }

    pub fn contains(&self, kb_node: u32) -> bool {
        self.index_of.contains_key(&kb_node)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[u32] {
        &self.nodes
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as KB node pairs, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.edges.iter().copied()
    }

    pub fn candidate_of(&self) -> &[Vec<u32>] {
        &self.candidate_of
    }

    /// Expands the graph with the BFS operator: `depth` applications, each
    /// adding every KB out-neighbor of every current node (with its edge),
    /// then one closing pass copying every KB edge whose endpoints are both
    /// present. `depth` 0 leaves the graph untouched.
    pub fn bfs_expand(&mut self, kb: &KbGraph, depth: usize) {
        for _ in 0..depth {
            let snapshot = self.nodes.clone();
            for &v in &snapshot {
                for &w in kb.out_neighbors(v) {
                    self.add_node(w);
                    self.edges.insert((v, w));
                }
            }
        }
        if depth > 0 {
            let snapshot = self.nodes.clone();
            for &v in &snapshot {
                for &w in kb.out_neighbors(v) {
                    if self.contains(w) {
                        self.edges.insert((v, w));
                    }
                }
            }
        }
    }

    /// Local adjacency (out, in) over node indexes, neighbor lists
    /// ascending.
    fn local_adjacency(&self) -> (Vec<Vec<u32>>, Vec<Vec<u32>>) {
        let n = self.nodes.len();
        let mut out = vec![Vec::new(); n];
        let mut inn = vec![Vec::new(); n];
        for &(s, d) in &self.edges {
            let ls = self.index_of[&s];
            let ld = self.index_of[&d];
            out[ls as usize].push(ld);
            inn[ld as usize].push(ls);
        }
        for list in out.iter_mut().chain(inn.iter_mut()) {
            list.sort_unstable();
        }
        (out, inn)
    }
}

/// HITS over the disambiguation graph: authority and hub start at 1,
/// authorities collect hub mass over in-edges, hubs collect the fresh
/// authority mass over out-edges, and both vectors are L2-normalized after
/// every one of the exactly `k` iterations. An edgeless graph yields
/// all-zero vectors.
pub fn hits_score(graph: &DisambiguationGraph, k: usize) -> (Vec<f64>, Vec<f64>) {
    let n = graph.node_count();
    if n == 0 {
        return (Vec::new(), Vec::new());
    }
    let (out, inn) = graph.local_adjacency();
    let mut authority = vec![1.0f64; n];
    let mut hub = vec![1.0f64; n];

    for _ in 0..k {
        // `+ 0.0` turns the empty-sum identity -0.0 into plain zero so
        // scores never print with a negative sign.
        let new_authority: Vec<f64> = exec::map_range(n, |v| {
            inn[v].iter().map(|&u| hub[u as usize]).sum::<f64>() + 0.0
        });
        authority = new_authority;
        let new_hub: Vec<f64> = exec::map_range(n, |v| {
            out[v].iter().map(|&w| authority[w as usize]).sum::<f64>() + 0.0
        });
        hub = new_hub;
        l2_normalize(&mut authority);
        l2_normalize(&mut hub);
    }
    (authority, hub)
}

fn l2_normalize(v: &mut [f64]) {
    let mut sum = 0.0;
    for x in v.iter() {
        sum += x * x;
    }
    if sum > 0.0 {
        let norm = sum.sqrt();
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
}

/// PageRank over the disambiguation graph: uniform start, exactly `k`
/// iterations of `alpha/n + (1-alpha) * (in-mass + dangling/n)`, dangling
/// mass redistributed uniformly. Scores sum to 1 after every iteration.
pub fn pagerank_score(graph: &DisambiguationGraph, k: usize, alpha: f64) -> Result<Vec<f64>> {
    let n = graph.node_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let (out, inn) = graph.local_adjacency();
    let nf = n as f64;
    let mut scores = vec![1.0 / nf; n];

    for _ in 0..k {
        let mut dangling = 0.0;
        for v in 0..n {
            if out[v].is_empty() {
                dangling += scores[v];
            }
        }
        let next: Vec<f64> = exec::map_range(n, |v| {
            let mut incoming = 0.0;
            for &u in &inn[v] {
                incoming += scores[u as usize] / out[u as usize].len() as f64;
            }
            alpha / nf + (1.0 - alpha) * (incoming + dangling / nf)
        });
        scores = next;
    }
    Ok(scores)
}

/// Scores every graph node with the configured algorithm. An empty graph
/// (every mention emergent) yields an empty score vector.
pub fn score_graph(
    graph: &DisambiguationGraph,
    algorithm: Algorithm,
    hits_iterations: usize,
    pagerank_iterations: usize,
    pagerank_alpha: f64,
) -> Vec<NodeScore> {
    let n = graph.node_count();
    let mut scores = vec![NodeScore::default(); n];
    match algorithm {
        Algorithm::Hits => {
            let (authority, hub) = hits_score(graph, hits_iterations);
            for v in 0..n {
                scores[v].authority = authority[v];
                scores[v].hub = hub[v];
            }
        }
        Algorithm::Pagerank => {
            if n > 0 {
                let pr = pagerank_score(graph, pagerank_iterations, pagerank_alpha)
                    .expect("guarded non-empty");
                for v in 0..n {
                    scores[v].pagerank = pr[v];
                }
            }
        }
    }
    scores
}

/// Final target of one mention.
#[derive(Debug, Clone, PartialEq)]
pub enum AssignmentTarget {
    /// KB resource IRI.
    Resource(String),
    /// Freshly minted IRI for an out-of-KB entity.
    Emergent(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub mention_index: usize,
    pub target: AssignmentTarget,
    /// Ranking score of the chosen node (authority for HITS, PageRank
    /// otherwise); 0 for emergent entities.
    pub score: f64,
}

/// Picks, per mention, the candidate with the highest score (authority for
/// HITS, PageRank otherwise), ties broken by ascending IRI. Mentions
/// without candidates get a deterministic emergent IRI minted from the
/// namespace and the slug of their normalized text.
pub fn select_assignments(
    graph: &DisambiguationGraph,
    scores: &[NodeScore],
    mentions: &[Mention],
    algorithm: Algorithm,
    kb: &KbGraph,
    emergent_namespace: &str,
) -> Vec<Assignment> {
    let ranking: HashMap<u32, f64> = graph
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, &node)| {
            let s = match algorithm {
                Algorithm::Hits => scores[i].authority,
                Algorithm::Pagerank => scores[i].pagerank,
            };
            (node, s)
        })
        .collect();

    // slug -> distinct normalized texts seen, in mention order; repeat
    // texts share the minted IRI, distinct collisions get a counter.
    let mut slug_texts: BTreeMap<String, Vec<String>> = BTreeMap::new();

    mentions
        .iter()
        .enumerate()
        .map(|(i, mention)| {
            let candidates = graph
                .candidate_of()
                .get(i)
                .map(Vec::as_slice)
                .unwrap_or(&[]);
            if candidates.is_empty() {
                let iri = mint_emergent_iri(emergent_namespace, &mention.text, &mut slug_texts);
                return Assignment {
                    mention_index: i,
                    target: AssignmentTarget::Emergent(iri),
                    score: 0.0,
                };
            }
            // KB node ids ascend in IRI order, so (score desc, node asc)
            // is exactly the documented tie-break.
            let best = candidates
                .iter()
                .copied()
                .min_by(|a, b| {
                    ranking[b]
                        .total_cmp(&ranking[a])
                        .then_with(|| a.cmp(b))
                })
                .expect("non-empty candidates");
            Assignment {
                mention_index: i,
                target: AssignmentTarget::Resource(kb.iri(best).to_string()),
                score: ranking[&best],
            }
        })
        .collect()
}

fn mint_emergent_iri(
    namespace: &str,
    mention_text: &str,
    slug_texts: &mut BTreeMap<String, Vec<String>>,
) -> String {
    let normalized = normalize(mention_text);
    let slug = slugify(&normalized);
    let texts = slug_texts.entry(slug.clone()).or_default();
    let position = match texts.iter().position(|t| t == &normalized) {
        Some(p) => p,
        None => {
            texts.push(normalized);
            texts.len() - 1
        }
    };
    if position == 0 {
        format!("{namespace}{slug}")
    } else {
        format!("{namespace}{slug}-{}", position + 1)
    }
}

fn slugify(normalized: &str) -> String {
    let mut slug = String::with_capacity(normalized.len());
    let mut last_sep = true;
    for ch in normalized.chars() {
        if ch.is_alphanumeric() {
            for lc in ch.to_lowercase() {
                slug.push(lc);
            }
            last_sep = false;
        } else if !last_sep {
            slug.push('_');
            last_sep = true;
        }
    }
    while slug.ends_with('_') {
        slug.pop();
    }
    if slug.is_empty() {
        "entity".to_string()
    } else {
        slug
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::ntriples::{parse_ntriples_str, ParseMode};

    fn kb(nt: &str) -> KbGraph {
        KbGraph::from_triples(&parse_ntriples_str(nt, ParseMode::Strict).unwrap().triples)
    }

    #[test]
    fn initial_graph_unions_candidates_without_edges() {
        let g = DisambiguationGraph::build_initial(&[vec![0, 1], vec![1, 2]]);
        assert_eq!(g.nodes(), &[0, 1, 2]);
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.candidate_of(), &[vec![0, 1], vec![1, 2]]);
    }

    #[test]
    fn empty_candidates_give_empty_graph() {
        let g = DisambiguationGraph::build_initial(&[vec![], vec![]]);
        assert_eq!(g.node_count(), 0);
    }

    #[test]
    fn depth_zero_changes_nothing() {
        let graph = kb("<http://a> <http://p> <http://x> .\n");
        let a = graph.node_id("http://a").unwrap();
        let mut g = DisambiguationGraph::build_initial(&[vec![a]]);
        g.bfs_expand(&graph, 0);
        assert_eq!(g.node_count(), 1);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn bfs_finds_hidden_path_through_intermediate_node() {
        // Chain a -> x -> b with candidates {a, b}: one expansion step
        // discovers x with edge (a, x); the closing pass adds (x, b).
        let graph = kb("<http://a> <http://p> <http://x> .\n<http://x> <http://p> <http://b> .\n");
        let a = graph.node_id("http://a").unwrap();
        let b = graph.node_id("http://b").unwrap();
        let x = graph.node_id("http://x").unwrap();
        let mut g = DisambiguationGraph::build_initial(&[vec![a], vec![b]]);
        g.bfs_expand(&graph, 1);
        let mut nodes = g.nodes().to_vec();
        nodes.sort_unstable();
        assert_eq!(nodes, {
            let mut v = vec![a, b, x];
            v.sort_unstable();
            v
        });
        let edges: Vec<(u32, u32)> = g.edges().collect();
        assert_eq!(edges.len(), 2);
        assert!(edges.contains(&(a, x)));
        assert!(edges.contains(&(x, b)));
    }

    #[test]
    fn expansion_is_monotone_in_depth() {
        let graph = kb(
            "<http://a> <http://p> <http://b> .\n\
             <http://b> <http://p> <http://c> .\n\
             <http://c> <http://p> <http://d> .\n",
        );
        let a = graph.node_id("http://a").unwrap();
        let mut nodes_by_depth = Vec::new();
        for d in 0..4 {
            let mut g = DisambiguationGraph::build_initial(&[vec![a]]);
            g.bfs_expand(&graph, d);
            let mut nodes = g.nodes().to_vec();
            nodes.sort_unstable();
            nodes_by_depth.push(nodes);
        }
        for pair in nodes_by_depth.windows(2) {
            assert!(pair[1].len() >= pair[0].len());
            assert!(pair[0].iter().all(|n| pair[1].contains(n)));
        }
    }

    #[test]
    fn hits_single_edge_reaches_fixed_point() {
        let graph = kb("<http://a> <http://p> <http://b> .\n");
        let a = graph.node_id("http://a").unwrap();
        let b = graph.node_id("http://b").unwrap();
        let mut g = DisambiguationGraph::build_initial(&[vec![a, b]]);
        g.bfs_expand(&graph, 1);
        let (auth, hub) = hits_score(&g, 20);
        let la = g.nodes().iter().position(|&n| n == a).unwrap();
        let lb = g.nodes().iter().position(|&n| n == b).unwrap();
        assert_eq!(auth[lb], 1.0);
        assert_eq!(hub[la], 1.0);
        assert_eq!(auth[la], 0.0);
        assert_eq!(hub[lb], 0.0);
    }

    #[test]
    fn hits_symmetric_cycle_is_symmetric() {
        let graph = kb("<http://a> <http://p> <http://b> .\n<http://b> <http://p> <http://a> .\n");
        let a = graph.node_id("http://a").unwrap();
        let b = graph.node_id("http://b").unwrap();
        let mut g = DisambiguationGraph::build_initial(&[vec![a, b]]);
        g.bfs_expand(&graph, 1);
        let (auth, hub) = hits_score(&g, 20);
        assert!((auth[0] - auth[1]).abs() < 1e-15);
        assert!((hub[0] - hub[1]).abs() < 1e-15);
    }

    #[test]
    fn hits_edgeless_graph_is_all_zero() {
        let g = DisambiguationGraph::build_initial(&[vec![0, 1, 2]]);
        let (auth, hub) = hits_score(&g, 20);
        assert!(auth.iter().all(|&x| x == 0.0));
        assert!(hub.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn pagerank_single_node_keeps_all_mass() {
        let g = DisambiguationGraph::build_initial(&[vec![3]]);
        let pr = pagerank_score(&g, 50, 0.15).unwrap();
        assert!((pr[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pagerank_two_cycle_splits_evenly() {
        let graph = kb("<http://a> <http://p> <http://b> .\n<http://b> <http://p> <http://a> .\n");
        let a = graph.node_id("http://a").unwrap();
        let b = graph.node_id("http://b").unwrap();
        let mut g = DisambiguationGraph::build_initial(&[vec![a, b]]);
        g.bfs_expand(&graph, 1);
        let pr = pagerank_score(&g, 50, 0.15).unwrap();
        assert!((pr[0] - 0.5).abs() < 1e-12);
        assert!((pr[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn pagerank_empty_graph_errors() {
        let g = DisambiguationGraph::build_initial(&[]);
        assert!(matches!(
            pagerank_score(&g, 50, 0.15),
            Err(Error::EmptyGraph)
        ));
    }

    #[test]
    fn emergent_iris_are_deterministic() {
        let mut slugs = BTreeMap::new();
        let ns = "http://kblink.invalid/emergent/";
        let first = mint_emergent_iri(ns, "Zzyzx Qwer", &mut slugs);
        assert_eq!(first, "http://kblink.invalid/emergent/zzyzx_qwer");
        // Same text twice shares the IRI; punctuation variants normalize
        // to the same text and share it too.
        assert_eq!(mint_emergent_iri(ns, "Zzyzx Qwer", &mut slugs), first);
        assert_eq!(mint_emergent_iri(ns, "Zzyzx--Qwer!", &mut slugs), first);
    }

    #[test]
    fn selection_is_scale_invariant() {
        // Multiplying every score by a positive constant changes nothing:
        // assignment is an argmax.
        let graph = kb("<http://a> <http://p> <http://b> .\n<http://b> <http://p> <http://c> .\n");
        let a = graph.node_id("http://a").unwrap();
        let b = graph.node_id("http://b").unwrap();
        let c = graph.node_id("http://c").unwrap();
        let mut g = DisambiguationGraph::build_initial(&[vec![a, b, c], vec![b, c]]);
        g.bfs_expand(&graph, 1);
        let scores = score_graph(&g, Algorithm::Hits, 20, 50, 0.15);
        let scaled: Vec<NodeScore> = scores
            .iter()
            .map(|s| NodeScore {
                authority: s.authority * 37.5,
                hub: s.hub * 37.5,
                pagerank: s.pagerank * 37.5,
            })
            .collect();
        let mentions = vec![
            crate::api::Mention {
                text: "x".into(),
                start: 0,
                end: 1,
            },
            crate::api::Mention {
                text: "y".into(),
                start: 2,
                end: 3,
            },
        ];
        let ns = "http://kblink.invalid/emergent/";
        let base = select_assignments(&g, &scores, &mentions, Algorithm::Hits, &graph, ns);
        let scaled = select_assignments(&g, &scaled, &mentions, Algorithm::Hits, &graph, ns);
        assert_eq!(
            base.iter().map(|a| &a.target).collect::<Vec<_>>(),
            scaled.iter().map(|a| &a.target).collect::<Vec<_>>()
        );
    }

    #[test]
    fn emergent_slug_collisions_get_a_counter() {
        // "ßx" normalizes to "SSx" (uppercasing ß), "Ssx" stays "Ssx";
        // both slugify to "ssx" yet are distinct texts.
        let mut slugs = BTreeMap::new();
        let ns = "http://kblink.invalid/emergent/";
        assert_eq!(
            mint_emergent_iri(ns, "ßx", &mut slugs),
            "http://kblink.invalid/emergent/ssx"
        );
        assert_eq!(
            mint_emergent_iri(ns, "Ssx", &mut slugs),
            "http://kblink.invalid/emergent/ssx-2"
        );
    }
}

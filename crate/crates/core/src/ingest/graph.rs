//! The knowledge-base graph: nodes are the resources appearing as subject
//! or resource-object, and an edge (x, y) exists iff some triple (x, p, y)
//! with a resource object does. Parallel edges collapse to one and
//! self-loops are dropped.
//!
//! Nodes are interned as `u32` ids assigned in ascending IRI byte order, so
//! id order doubles as the deterministic IRI tie-break used throughout the
//! engine.

use std::collections::{BTreeSet, HashMap};

use crate::ingest::ntriples::Triple;

#[derive(Debug, Clone, Default)]
pub struct KbGraph {
    iris: Vec<String>,
    by_iri: HashMap<String, u32>,
    out: Vec<Vec<u32>>,
    inn: Vec<Vec<u32>>,
    edge_count: u64,
}

impl KbGraph {
    /// Builds the graph from a triple stream.
    pub fn from_triples(triples: &[Triple]) -> KbGraph {
        let mut iris = BTreeSet::new();
        for t in triples {
            iris.insert(t.subject.iri().to_string());
            if let Some(o) = t.object.as_resource() {
                iris.insert(o.iri().to_string());
            }
        }
        let iris: Vec<String> = iris.into_iter().collect();
        let by_iri: HashMap<String, u32> = iris
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i as u32))
            .collect();

        let mut edges = BTreeSet::new();
        for t in triples {
            if let Some(o) = t.object.as_resource() {
                let s = by_iri[t.subject.iri()];
                let d = by_iri[o.iri()];
                if s != d {
                    edges.insert((s, d));
                }
            }
        }
        Self::assemble(iris, by_iri, edges)
    }

    /// Rebuilds a graph from a sorted IRI table and an edge list, as read
    /// back from a persisted index.
    pub(crate) fn from_parts(iris: Vec<String>, edge_list: Vec<(u32, u32)>) -> KbGraph {
        let by_iri = iris
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i as u32))
            .collect();
        let edges: BTreeSet<(u32, u32)> = edge_list.into_iter().filter(|(a, b)| a != b).collect();
        Self::assemble(iris, by_iri, edges)
    }

    fn assemble(
        iris: Vec<String>,
        by_iri: HashMap<String, u32>,
        edges: BTreeSet<(u32, u32)>,
    ) -> KbGraph {
        let n = iris.len();
        let mut out = vec![Vec::new(); n];
        let mut inn = vec![Vec::new(); n];
        let edge_count = edges.len() as u64;
        for (s, d) in edges {
            out[s as usize].push(d);
            inn[d as usize].push(s);
        }
        // BTreeSet iteration leaves `out` sorted; `inn` needs its own sort.
        for list in &mut inn {
            list.sort_unstable();
        }
        KbGraph {
            iris,
            by_iri,
            out,
            inn,
            edge_count,
        }
    }

    pub fn node_count(&self) -> usize {
        self.iris.len()
    }

    pub fn edge_count(&self) -> u64 {
        self.edge_count
    }

    pub fn is_empty(&self) -> bool {
        self.iris.is_empty()
    }

    pub fn node_id(&self, iri: &str) -> Option<u32> {
        self.by_iri.get(iri).copied()
    }

    pub fn iri(&self, id: u32) -> &str {
        &self.iris[id as usize]
    }

    pub fn iris(&self) -> &[String] {
        &self.iris
    }

    pub fn out_neighbors(&self, id: u32) -> &[u32] {
        &self.out[id as usize]
    }

    pub fn in_neighbors(&self, id: u32) -> &[u32] {
        &self.inn[id as usize]
    }

    pub fn out_degree(&self, id: u32) -> usize {
        self.out[id as usize].len()
    }

    pub fn in_degree(&self, id: u32) -> usize {
        self.inn[id as usize].len()
    }

    pub fn has_edge(&self, from: u32, to: u32) -> bool {
        self.out[from as usize].binary_search(&to).is_ok()
    }

    /// Number of `others` directly connected to `node` in either direction.
    pub fn direct_link_count(&self, node: u32, others: &[u32]) -> usize {
        others
            .iter()
            .filter(|&&o| o != node && (self.has_edge(node, o) || self.has_edge(o, node)))
            .count()
    }

    /// All edges in ascending (source, target) order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(s, targets)| targets.iter().map(move |&d| (s as u32, d)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::ntriples::{parse_ntriples_str, ParseMode};

    fn graph(nt: &str) -> KbGraph {
        KbGraph::from_triples(&parse_ntriples_str(nt, ParseMode::Strict).unwrap().triples)
    }

    #[test]
    fn parallel_edges_collapse() {
        let g = graph("<http://a> <http://p> <http://b> .\n<http://a> <http://q> <http://b> .\n");
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn empty_input_gives_empty_graph() {
        let g = graph("");
        assert!(g.is_empty());
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn in_edges_transpose_out_edges() {
        let g = graph("<http://a> <http://p> <http://b> .\n<http://b> <http://p> <http://c> .\n");
        let a = g.node_id("http://a").unwrap();
        let b = g.node_id("http://b").unwrap();
        let c = g.node_id("http://c").unwrap();
        assert_eq!(g.out_neighbors(a), &[b]);
        assert_eq!(g.in_neighbors(c), &[b]);
        assert_eq!(g.in_neighbors(a), &[] as &[u32]);
    }

    #[test]
    fn self_loops_are_dropped() {
        let g = graph("<http://a> <http://p> <http://a> .\n");
        assert_eq!(g.node_count(), 1);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn predicates_are_not_nodes() {
        let g = graph("<http://a> <http://p> \"literal\" .\n");
        assert_eq!(g.node_count(), 1);
        assert!(g.node_id("http://p").is_none());
    }

    #[test]
    fn direct_link_count_is_undirected() {
        let g = graph("<http://b> <http://p> <http://a> .\n");
        let a = g.node_id("http://a").unwrap();
        let b = g.node_id("http://b").unwrap();
        assert_eq!(g.direct_link_count(a, &[b]), 1);
        assert_eq!(g.direct_link_count(b, &[a]), 1);
        assert_eq!(g.direct_link_count(a, &[]), 0);
    }

    #[test]
    fn node_ids_follow_iri_order() {
        let g = graph("<http://z> <http://p> <http://a> .\n<http://m> <http://p> <http://z> .\n");
        let ids: Vec<&str> = (0..g.node_count() as u32).map(|i| g.iri(i)).collect();
        assert_eq!(ids, vec!["http://a", "http://m", "http://z"]);
    }

    #[test]
    fn transpose_invariant_holds_under_full_scan() {
        // Pseudo-random multigraph with duplicates and self-loops thrown in.
        let mut nt = String::new();
        let mut state = 0x2545f49u64;
        for _ in 0..400 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let a = (state >> 33) % 40;
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let b = (state >> 33) % 40;
            nt.push_str(&format!("<http://n{a}> <http://p{}> <http://n{b}> .\n", a % 3));
        }
        let g = graph(&nt);
        let mut out_pairs = Vec::new();
        let mut in_pairs = Vec::new();
        for v in 0..g.node_count() as u32 {
            for &w in g.out_neighbors(v) {
                out_pairs.push((v, w));
            }
            for &u in g.in_neighbors(v) {
                in_pairs.push((u, v));
            }
        }
        out_pairs.sort_unstable();
        in_pairs.sort_unstable();
        assert_eq!(out_pairs, in_pairs);
        assert_eq!(out_pairs.len() as u64, g.edge_count());
        assert!(out_pairs.iter().all(|(a, b)| a != b), "self-loop survived");
        let dedup: std::collections::BTreeSet<_> = out_pairs.iter().collect();
        assert_eq!(dedup.len(), out_pairs.len(), "parallel edge survived");
    }
}

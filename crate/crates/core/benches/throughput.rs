//! Criterion benches comparing the rayon data-parallel paths against their
//! sequential fallbacks: KB-wide PageRank, batch linking, and the fuzzy
//! surface search they both lean on.
//!
//! With `--no-default-features` the "parallel" entry points run the
//! sequential code, so the pairs collapse; run with defaults to see the
//! spread.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use kblink::api::{Document, Span};
use kblink::config::LinkerConfig;
use kblink::index::{AcronymIndex, IndexBundle};
use kblink::ingest::{
    compute_popularity, compute_popularity_seq, ingest_str, IngestConfig, KbGraph,
    PopularityMode,
};
use kblink::pipeline::Linker;

const LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";
const COMMENT: &str = "http://www.w3.org/2000/01/rdf-schema#comment";

const GIVEN: &[&str] = &[
    "Alda", "Brin", "Ceto", "Dori", "Elan", "Fyra", "Gano", "Hilo", "Ivet", "Jura",
];
const FAMILY: &[&str] = &[
    "Abbor", "Beckel", "Cormat", "Dunlor", "Ettles", "Fannor", "Gorbel", "Hastin",
];

fn label(i: usize) -> String {
    format!(
        "{} {} {i}",
        GIVEN[i % GIVEN.len()],
        FAMILY[(i / GIVEN.len()) % FAMILY.len()]
    )
}

fn synthetic_kb(entities: usize) -> String {
    let mut nt = String::new();
    for i in 0..entities {
        let iri = format!("http://bench.example.org/e{i}");
        nt.push_str(&format!("<{iri}> <{LABEL}> \"{}\"@en .\n", label(i)));
        nt.push_str(&format!(
            "<{iri}> <{COMMENT}> \"{} is entry number {i} about topic {}.\"@en .\n",
            label(i),
            i % 53
        ));
        for k in 1..=3 {
            let target = (i * 7 + k * 11 + 1) % entities;
            if target != i {
                nt.push_str(&format!(
                    "<{iri}> <http://bench.example.org/rel> <http://bench.example.org/e{target}> .\n"
                ));
            }
        }
    }
    nt
}

fn bench_graph(entities: usize) -> KbGraph {
    let triples = kblink::ingest::parse_ntriples_str(
        &synthetic_kb(entities),
        kblink::ingest::ParseMode::Strict,
    )
    .unwrap()
    .triples;
    KbGraph::from_triples(&triples)
}

fn bench_linker(entities: usize) -> Linker {
    let ingest = ingest_str(&synthetic_kb(entities), &IngestConfig::default()).unwrap();
    let bundle = IndexBundle::build(ingest, AcronymIndex::empty());
    Linker::new(bundle, LinkerConfig::default()).unwrap()
}

fn bench_documents(entities: usize, count: usize) -> Vec<Document> {
    (0..count)
        .map(|i| {
            let mut mention = label((i * 37) % entities);
            if i % 3 == 0 {
                mention.pop();
            }
            let text = format!("{mention} went by.");
            let end = mention.chars().count();
            Document::new(text, &[Span { start: 0, end }]).unwrap()
        })
        .collect()
}

fn kb_pagerank(c: &mut Criterion) {
    let graph = bench_graph(5_000);
    let mut group = c.benchmark_group("kb_pagerank");
    group.bench_with_input(BenchmarkId::new("parallel", 5_000), &graph, |b, g| {
        b.iter(|| compute_popularity(black_box(g), PopularityMode::PageRank).unwrap())
    });
    group.bench_with_input(BenchmarkId::new("sequential", 5_000), &graph, |b, g| {
        b.iter(|| compute_popularity_seq(black_box(g), PopularityMode::PageRank).unwrap())
    });
    group.finish();
}

fn batch_linking(c: &mut Criterion) {
    let linker = bench_linker(2_000);
    let documents = bench_documents(2_000, 64);
    let mut group = c.benchmark_group("batch_link");
    group.sample_size(20);
    group.bench_function(BenchmarkId::new("parallel", 64), |b| {
        b.iter(|| black_box(linker.link_batch(black_box(&documents))))
    });
    group.bench_function(BenchmarkId::new("sequential", 64), |b| {
        b.iter(|| black_box(linker.link_batch_seq(black_box(&documents))))
    });
    group.finish();
}

fn surface_search(c: &mut Criterion) {
    let linker = bench_linker(2_000);
    let bundle = linker.bundle();
    c.bench_function("surface_search/fuzzy", |b| {
        b.iter(|| black_box(bundle.search_surface(black_box("Dori Cormat 51"), 0.7, true)))
    });
}

criterion_group!(benches, kb_pagerank, batch_linking, surface_search);
criterion_main!(benches);

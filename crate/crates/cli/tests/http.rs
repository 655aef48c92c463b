//! In-process tests of the HTTP service (no sockets; tower oneshot).

use std::path::{Path, PathBuf};

use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use sha2::{Digest, Sha256};
use tower::ServiceExt;

use kblink::config::PartialLinkerConfig;
use kblink::index::{load_bundle, save_bundle, AcronymIndex, IndexBundle};
use kblink::ingest::{ingest_str, IngestConfig};
use kblink_cli::server::{router, AppState, ConfigLayers};

fn fixture(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name);
    std::fs::read_to_string(path).unwrap()
}

fn mini_bundle() -> IndexBundle {
    let ingest = ingest_str(&fixture("mini_kb.nt"), &IngestConfig::default()).unwrap();
    IndexBundle::build(
        ingest,
        AcronymIndex::from_tsv(&fixture("mini_acronyms.tsv")).unwrap(),
    )
}

fn ready_state() -> AppState {
    AppState::with_bundle(mini_bundle(), ConfigLayers::default())
}

async fn post_link(state: AppState, body: &str) -> (StatusCode, serde_json::Value) {
    let response = router(state)
        .oneshot(
            Request::post("/link")
                .header("content-type", "application/json")
                .body(Body::from(body.to_string()))
                .unwrap(),
        )
        .await
        .unwrap();
    let status = response.status();
    let bytes = response.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap())
}

async fn get_health(state: AppState) -> (StatusCode, serde_json::Value) {
    let response = router(state)
        .oneshot(Request::get("/health").body(Body::empty()).unwrap())
        .await
        .unwrap();
    let status = response.status();
    let bytes = response.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap())
}

const FIG2_REQUEST: &str = r#"{"text":"Angelina and Brad met Jon.","mentions":[{"start":0,"end":8},{"start":13,"end":17},{"start":22,"end":25}]}"#;

#[tokio::test]
async fn health_is_503_before_load() {
    let state = AppState::loading(ConfigLayers::default());
    let (status, body) = get_health(state).await;
    assert_eq!(status, StatusCode::SERVICE_UNAVAILABLE);
    assert_eq!(body["code"], "INDEX_LOADING");
}

#[tokio::test]
async fn link_is_503_before_load() {
    let state = AppState::loading(ConfigLayers::default());
    let (status, _) = post_link(state, FIG2_REQUEST).await;
    assert_eq!(status, StatusCode::SERVICE_UNAVAILABLE);
}

#[tokio::test]
async fn health_reports_ready_index() {
    let (status, body) = get_health(ready_state()).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["status"], "ready");
    assert_eq!(body["resourceCount"], 13);
    assert!(body["indexVersion"].as_str().unwrap().len() >= 8);
}

#[tokio::test]
async fn link_returns_one_assignment_per_mention() {
    let (status, body) = post_link(ready_state(), FIG2_REQUEST).await;
    assert_eq!(status, StatusCode::OK);
    let assignments = body["assignments"].as_array().unwrap();
    assert_eq!(assignments.len(), 3);
    assert_eq!(assignments[0]["iri"], "http://example.org/Angelina_Jolie");
    assert_eq!(assignments[1]["iri"], "http://example.org/Brad_Pitt");
    assert_eq!(assignments[2]["iri"], "http://example.org/Jon_Voight");
    assert!(body["timingMs"].is_u64());
}

#[tokio::test]
async fn inverted_span_is_rejected_with_code() {
    let body = r#"{"text":"hello","mentions":[{"start":5,"end":3}]}"#;
    let (status, json) = post_link(ready_state(), body).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(json["code"], "SPAN_INVALID");
}

#[tokio::test]
async fn malformed_json_is_rejected() {
    let (status, json) = post_link(ready_state(), "this is not json").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(json["code"], "BAD_JSON");
}

#[tokio::test]
async fn invalid_override_is_rejected() {
    let body = r#"{"text":"Jon","mentions":[{"start":0,"end":3}],"configOverrides":{"sigma":2.5}}"#;
    let (status, json) = post_link(ready_state(), body).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(json["code"], "CONFIG_INVALID");
}

#[tokio::test]
async fn request_override_applies_to_that_request_only() {
    let state = ready_state();
    let with_override = r#"{"text":"Zzyzx Qwer","mentions":[{"start":0,"end":10}],"configOverrides":{"emergentNamespace":"http://req.example/"}}"#;
    let (status, body) = post_link(state.clone(), with_override).await;
    assert_eq!(status, StatusCode::OK);
    let iri = body["assignments"][0]["iri"].as_str().unwrap();
    assert!(iri.starts_with("http://req.example/"), "iri: {iri}");

    // The next request over the same state is back on defaults.
    let plain = r#"{"text":"Zzyzx Qwer","mentions":[{"start":0,"end":10}]}"#;
    let (_, body) = post_link(state, plain).await;
    let iri = body["assignments"][0]["iri"].as_str().unwrap();
    assert!(iri.starts_with("http://kblink.invalid/emergent/"), "iri: {iri}");
}

#[tokio::test]
async fn startup_flags_outrank_request_overrides() {
    let layers = ConfigLayers {
        file: PartialLinkerConfig::default(),
        cli: PartialLinkerConfig {
            emergent_namespace: Some("http://cli.example/".to_string()),
            ..Default::default()
        },
    };
    let state = AppState::with_bundle(mini_bundle(), layers);
    let body = r#"{"text":"Zzyzx Qwer","mentions":[{"start":0,"end":10}],"configOverrides":{"emergentNamespace":"http://req.example/"}}"#;
    let (status, json) = post_link(state, body).await;
    assert_eq!(status, StatusCode::OK);
    let iri = json["assignments"][0]["iri"].as_str().unwrap();
    assert!(iri.starts_with("http://cli.example/"), "iri: {iri}");
}

#[tokio::test]
async fn concurrent_identical_requests_agree_modulo_timing() {
    let state = ready_state();
    let mut tasks = Vec::new();
    for _ in 0..16 {
        let state = state.clone();
        tasks.push(tokio::spawn(async move {
            post_link(state, FIG2_REQUEST).await
        }));
    }
    let mut bodies = Vec::new();
    for task in tasks {
        let (status, mut body) = task.await.unwrap();
        assert_eq!(status, StatusCode::OK);
        body.as_object_mut().unwrap().remove("timingMs");
        bodies.push(body);
    }
    for body in &bodies[1..] {
        assert_eq!(body, &bodies[0]);
    }
}

fn dir_digest(dir: &Path) -> String {
    let mut names: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    names.sort();
    let mut hasher = Sha256::new();
    for path in names {
        hasher.update(path.file_name().unwrap().as_encoded_bytes());
        hasher.update(std::fs::read(&path).unwrap());
    }
    format!("{:x}", hasher.finalize())
}

#[tokio::test]
async fn service_never_mutates_the_index_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("idx");
    save_bundle(&mini_bundle(), &dir).unwrap();
    let before = dir_digest(&dir);

    let state = AppState::with_bundle(load_bundle(&dir).unwrap(), ConfigLayers::default());
    for _ in 0..8 {
        let (status, _) = post_link(state.clone(), FIG2_REQUEST).await;
        assert_eq!(status, StatusCode::OK);
        let (status, _) = get_health(state.clone()).await;
        assert_eq!(status, StatusCode::OK);
    }

    assert_eq!(before, dir_digest(&dir));
}

#[tokio::test]
async fn http_and_cli_paths_produce_identical_assignments() {
    // The same document through the router and through the library path
    // used by the CLI must agree exactly (timing aside).
    let (_, http_body) = post_link(ready_state(), FIG2_REQUEST).await;
    let linker =
        kblink::pipeline::Linker::new(mini_bundle(), kblink::config::LinkerConfig::default())
            .unwrap();
    let request: kblink::api::LinkRequest = serde_json::from_str(FIG2_REQUEST).unwrap();
    let document = kblink::api::Document::from_request(&request).unwrap();
    let direct = serde_json::to_value(linker.respond(&document)).unwrap();
    assert_eq!(http_body["assignments"], direct["assignments"]);
    assert_eq!(http_body["indexVersion"], direct["indexVersion"]);
}

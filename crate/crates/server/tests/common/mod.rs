#![allow(dead_code)]

use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;
use workbench_server::{router, AppState, Config};

pub fn app_with(config: Config) -> Router {
    router(Arc::new(AppState::new(&config)))
}

pub fn app() -> Router {
    app_with(Config {
        max_jobs: 2,
        ..Config::default()
    })
}

pub async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let (status, text) = call_raw(app, method, uri, body.map(|b| b.to_string())).await;
    let v = if text.is_empty() {
        Value::Null
    } else {
        serde_json::from_str(&text).unwrap_or(Value::String(text))
    };
    (status, v)
}

pub async fn call_raw(app: &Router, method: &str, uri: &str, body: Option<String>) -> (StatusCode, String) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json");
    let req = req.body(body.map_or_else(Body::empty, Body::from)).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

pub async fn upload(app: &Router, text: &str) -> String {
    let (status, v) = call(app, "POST", "/api/models", Some(json!({ "text": text }))).await;
    assert_eq!(status, StatusCode::OK, "{v}");
    v["modelId"].as_str().unwrap().to_string()
}

pub async fn wait_final(app: &Router, job: &str, limit: Duration) -> Value {
    let start = Instant::now();
    loop {
        let (status, v) = call(app, "GET", &format!("/api/jobs/{job}"), None).await;
        assert_eq!(status, StatusCode::OK);
        if ["DONE", "FAILED", "CANCELED"].contains(&v["status"].as_str().unwrap()) {
            return v;
        }
        assert!(start.elapsed() < limit, "job {job} still {} after {limit:?}", v["status"]);
        tokio::time::sleep(Duration::from_millis(20)).await;
    }
}

/// `n` independent two-place toggles; 2^n reachable markings.
pub fn toggles(n: usize) -> String {
    let mut s = String::from(".name toggles\n");
    for i in 0..n {
        s += &format!(".places a{i}[init=1] b{i}\n.transitions t{i} u{i}\n");
        s += &format!(".flows t{i}: {{a{i}}} -> {{b{i}}}\n.flows u{i}: {{b{i}}} -> {{a{i}}}\n");
        s += &format!(".transits t{i}: a{i} -> b{i}\n.transits u{i}: b{i} -> a{i}\n");
    }
    s
}

/// A check on `toggles(24)` that runs for many seconds.
pub const SLOW_FORMULA: &str = "A G F a0";

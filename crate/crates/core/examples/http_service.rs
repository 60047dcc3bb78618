//! Drive the HTTP API in-process: create a session from the bundled files,
//! run the night solve as a job, submit an edit, solve the day stage and
//! fetch the final report. `rostra serve` exposes the same router on a
//! socket.
//!
//! cargo run --release --example http_service

use std::path::Path;
use std::time::Duration;

use axum::body::Body;
use axum::http::Request;
use axum::Router;
use http_body_util::BodyExt;
use rostra::service::{router, AppState, ServiceConfig};
use serde_json::{json, Value};
use tower::ServiceExt;

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (u16, String) {
    let req = Request::builder().method(method).uri(uri).header("content-type", "application/json");
    let req = req.body(body.map(|b| Body::from(b.to_string())).unwrap_or_default()).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status().as_u16();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8_lossy(&bytes).into_owned())
}

async fn json_call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> Value {
    let (status, text) = call(app, method, uri, body).await;
    println!("{method} {uri} -> {status}");
    serde_json::from_str(&text).unwrap_or(Value::String(text))
}

async fn run_job(app: &Router, uri: &str, solver: &Value) -> Value {
    let job = json_call(app, "POST", uri, Some(solver.clone())).await;
    let id = job["id"].as_str().unwrap().to_string();
    loop {
        tokio::time::sleep(Duration::from_millis(500)).await;
        let (_, text) = call(app, "GET", &format!("/jobs/{id}"), None).await;
        let h: Value = serde_json::from_str(&text).unwrap();
        println!("  job {} incumbent {}", h["status"], h["incumbent"]);
        if h["status"] == "SUCCEEDED" || h["status"] == "FAILED" {
            return h;
        }
    }
}

#[tokio::main]
async fn main() {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data");
    let read = |f: &str| std::fs::read_to_string(data.join(f)).unwrap();
    let app = router(AppState::new(ServiceConfig { workers: 1, ..Default::default() }).unwrap());

    let symbol_map: Value = toml::from_str(&read("symbol_map.toml")).unwrap();
    let body = json!({ "id": "ward-a", "condition": read("ward_a.toml"), "wishes": read("wishes.csv"), "symbol_map": symbol_map });
    let s = json_call(&app, "POST", "/sessions", Some(body)).await;
    println!("  phase {}, {} intake warning(s)", s["phase"], s["intake_warnings"].as_array().map_or(0, Vec::len));

    let solver = json!({ "solver": { "engine": "heuristic", "iterations": 200000, "seed": 4 } });
    let night = run_job(&app, "/sessions/ward-a/night", &solver).await;
    println!("  night hard violations: {}", night["result"]["report"]["hard_violations"]);

    let s = json_call(&app, "GET", "/sessions/ward-a", None).await;
    let edit = json!({ "revision": s["revision"], "edits": [{ "nurse": "n05", "date": "2024-11-15", "symbol": "特休" }] });
    let r = json_call(&app, "POST", "/sessions/ward-a/edits", Some(edit.clone())).await;
    println!("  now at revision {}, {} warning(s)", r["revision"], r["warnings"].as_array().map_or(0, Vec::len));
    // replaying the same request is rejected: its revision is stale
    let stale = json_call(&app, "POST", "/sessions/ward-a/edits", Some(edit)).await;
    println!("  {}", stale["error"]);

    json_call(&app, "POST", "/sessions/ward-a/postprocess", None).await;
    let day = run_job(&app, "/sessions/ward-a/day", &solver).await;
    println!("  day hard violations: {}", day["result"]["report"]["hard_violations"]);
    json_call(&app, "POST", "/sessions/ward-a/finalize", None).await;
    let (_, report) = call(&app, "GET", "/sessions/ward-a/reports/final?format=text", None).await;
    println!("{}", report.lines().take(10).collect::<Vec<_>>().join("\n"));
}

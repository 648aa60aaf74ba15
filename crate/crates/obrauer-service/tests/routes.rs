use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use obrauer_core::api::Workspace;
use serde_json::{json, Value};
use tower::ServiceExt;

async fn call(method: &str, path: &str, body: Option<Value>) -> (StatusCode, Value) {
    let app = obrauer_service::router(Arc::new(Workspace::new()));
    let req = Request::builder()
        .method(method)
        .uri(path)
        .header("content-type", "application/json")
        .body(body.map_or_else(Body::empty, |b| Body::from(b.to_string())))
        .unwrap();
    let resp = app.oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

#[tokio::test]
async fn health() {
    let (s, v) = call("GET", "/v1/health", None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["status"], "ok");
}

#[tokio::test]
async fn normalize_affine_relation() {
    let (s, v) = call("POST", "/v1/normalize", Some(json!({"mode": "aob", "expr": "s . (x * 1[^]) - (1[^] * x) . s"}))).await;
    assert_eq!(s, StatusCode::OK);
    // the correction term is minus the identity
    assert_eq!(v, json!({"schema": 1, "src": "^^", "tgt": "^^", "terms": [
        {"match": [["b1", "t1"], ["b2", "t2"]], "dots": {}, "coeff": -1}
    ]}));
}

#[tokio::test]
async fn dims_and_structure_constants() {
    let (_, v) = call("POST", "/v1/dims", Some(json!({"mode": "obf", "f": "u^2-1", "src": "^v", "tgt": "^v"}))).await;
    assert_eq!(v["dim"], 8);
    let (_, v) = call("POST", "/v1/structconst", Some(json!({"mode": "ob", "delta": ["5"], "r": 1, "s": 1}))).await;
    assert_eq!(v["dim"], 2);
    // the cap-cup element squares to 5 times itself
    let cap_cup = v["basis"]
        .as_array()
        .unwrap()
        .iter()
        .position(|b| b["match"] == json!([["b1", "b2"], ["t2", "t1"]]))
        .unwrap();
    assert_eq!(v["products"][cap_cup][cap_cup], json!([[cap_cup, 5]]));
}

#[tokio::test]
async fn usage_errors_are_bad_requests() {
    let (s, v) = call("POST", "/v1/normalize", Some(json!({"mode": "ob", "f": "u-1", "expr": "s"}))).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert!(v["error"].as_str().unwrap().contains("--f"));
    let (s, v) = call("POST", "/v1/compose", Some(json!({"mode": "ob", "left": "s", "right": "c"}))).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert!(v["error"].as_str().unwrap().contains("cannot compose"));
    let (s, _) = call("POST", "/v1/normalize", Some(json!({"expr": 3}))).await;
    assert!(s.is_client_error());
}

#[tokio::test]
async fn verify_and_rank() {
    let (s, v) = call("POST", "/v1/verify", Some(json!({"suites": ["parameters"], "lambda": [2, 2], "seed": 0}))).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["passed"], true);
    let (_, v) = call("POST", "/v1/rank", Some(json!({"lambda": [2, 2], "src": "^v", "tgt": "^v"}))).await;
    assert_eq!((v["count"].clone(), v["rank"].clone()), (json!(8), json!(8)));
    let (s, _) = call("POST", "/v1/rank", Some(json!({"lambda": [1, 1], "src": "^^", "tgt": "^^"}))).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
}

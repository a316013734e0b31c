mod common;

use axum::http::StatusCode;
use common::*;
use serde_json::{json, Value};
use workbench_core::models::{ALARM_APN, SDN_APN};

async fn open(app: &axum::Router, model: &str, mode: &str) -> (String, String, Value) {
    let (status, v) = call(app, "POST", "/api/sessions", Some(json!({"modelId": model, "mode": mode}))).await;
    assert_eq!(status, StatusCode::CREATED, "{v}");
    (
        v["sessionId"].as_str().unwrap().to_string(),
        v["writer"].as_str().unwrap().to_string(),
        v["snapshot"].clone(),
    )
}

async fn step(app: &axum::Router, session: &str, writer: &str, action: Value) -> (StatusCode, Value) {
    call(
        app,
        "POST",
        &format!("/api/sessions/{session}/step"),
        Some(json!({"writer": writer, "action": action})),
    )
    .await
}

#[tokio::test]
async fn simulation_fires_and_undoes() {
    let app = app();
    let id = upload(&app, SDN_APN).await;
    let (s, w, initial) = open(&app, &id, "SIMULATE").await;
    assert_eq!(initial["mode"], "SIMULATE");
    let enabled = initial["view"]["enabled"].as_array().unwrap().clone();
    assert!(!enabled.is_empty());

    let (status, after) = step(&app, &s, &w, json!({"type": "fire", "transition": enabled[0]})).await;
    assert_eq!(status, StatusCode::OK, "{after}");
    assert_eq!(after["view"]["trace"], json!([enabled[0]]));
    assert_eq!(after["view"]["markings"].as_array().unwrap().len(), 2);
    assert_eq!(call(&app, "GET", &format!("/api/sessions/{s}"), None).await.1, after);

    let (status, back) = step(&app, &s, &w, json!({"type": "undo"})).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(back, initial);
    let (status, _) = step(&app, &s, &w, json!({"type": "undo"})).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn simulation_builds_the_forest() {
    let app = app();
    let id = upload(&app, SDN_APN).await;
    let (s, w, _) = open(&app, &id, "SIMULATE").await;
    let (status, v) = step(&app, &s, &w, json!({"type": "fire", "transition": "ingress"})).await;
    assert_eq!(status, StatusCode::OK, "{v}");
    let forest = &v["view"]["forest"];
    assert_eq!(forest["roots"].as_array().unwrap().len(), 1);
    assert_eq!(forest["roots"][0]["transition"], "ingress");
}

#[tokio::test]
async fn disabled_and_foreign_actions_are_rejected() {
    let app = app();
    let id = upload(&app, SDN_APN).await;
    let (s, w, initial) = open(&app, &id, "SIMULATE").await;
    let disabled = ["t6", "t7", "t8", "t9", "t10", "t11"]
        .into_iter()
        .find(|t| !initial["view"]["enabled"].as_array().unwrap().contains(&json!(t)))
        .unwrap();
    let (status, _) = step(&app, &s, &w, json!({"type": "fire", "transition": disabled})).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let (status, _) = step(&app, &s, &w, json!({"type": "fire", "transition": "nope"})).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let (status, _) = step(&app, &s, &w, json!({"type": "pick", "move": 0})).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let (status, _) = step(&app, &s, &w, json!({"type": "jump"})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = step(&app, &s, "not-the-writer", json!({"type": "undo"})).await;
    assert_eq!(status, StatusCode::CONFLICT);
    let (status, _) = step(&app, "nope", &w, json!({"type": "undo"})).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn state_exploration_expands_and_undoes() {
    let app = app();
    let id = upload(&app, SDN_APN).await;
    let (s, w, initial) = open(&app, &id, "EXPLORE_STATES").await;
    assert_eq!(initial["view"]["nodes"].as_array().unwrap().len(), 1);
    assert_eq!(initial["view"]["frontier"], json!([0]));
    let (status, v) = step(&app, &s, &w, json!({"type": "expand", "node": 0})).await;
    assert_eq!(status, StatusCode::OK);
    assert!(v["view"]["nodes"].as_array().unwrap().len() > 1);
    assert!(!v["view"]["frontier"].as_array().unwrap().contains(&json!(0)));
    let (status, _) = step(&app, &s, &w, json!({"type": "expand", "node": 999})).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let (_, back) = step(&app, &s, &w, json!({"type": "undo"})).await;
    assert_eq!(back, initial);
}

#[tokio::test]
async fn game_exploration_follows_moves() {
    let app = app();
    let sdn = upload(&app, SDN_APN).await;
    let (status, _) = call(&app, "POST", "/api/sessions", Some(json!({"modelId": sdn, "mode": "EXPLORE_GAME"}))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);

    let id = upload(&app, ALARM_APN).await;
    let (s, w, initial) = open(&app, &id, "EXPLORE_GAME").await;
    let view = &initial["view"];
    assert_eq!(view["flagged"], false);
    assert_eq!(view["depth"], 0);
    let safe = view["moves"]
        .as_array()
        .unwrap()
        .iter()
        .position(|m| m["losing"] == false)
        .unwrap();
    let (status, v) = step(&app, &s, &w, json!({"type": "pick", "move": safe})).await;
    assert_eq!(status, StatusCode::OK, "{v}");
    assert_eq!(v["view"]["depth"], 1);
    assert_eq!(v["view"]["flagged"], false);
    let (status, _) = step(&app, &s, &w, json!({"type": "pick", "move": 10_000})).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let (_, back) = step(&app, &s, &w, json!({"type": "undo"})).await;
    assert_eq!(back, initial);
}

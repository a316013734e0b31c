//! Content-addressed model store.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use workbench_core::game::PetriGame;
use workbench_core::net::{parse_document, render, Net, ParseError};
use workbench_core::transit::TransitNet;

use crate::error::ApiError;

/// A parsed model. `id` is the SHA-256 of the normalized `.apn` text.
#[derive(Debug)]
pub struct Model {
    pub id: String,
    pub text: String,
    pub transit_net: TransitNet,
    /// Present when the net has an environment place.
    pub game: Option<PetriGame>,
}

impl Model {
    pub fn net(&self) -> &Net {
        self.transit_net.net()
    }

    pub fn summary(&self) -> Value {
        let net = self.net();
        let transits: usize = self.transit_net.transit_table().iter().map(Vec::len).sum();
        json!({
            "modelId": self.id,
            "name": net.name(),
            "places": net.place_count(),
            "transitions": net.transition_count(),
            "transits": transits,
            "isGame": self.game.is_some(),
            "diagnostics": diagnostics(self),
        })
    }
}

fn diagnostics(m: &Model) -> Vec<Value> {
    let net = m.net();
    let mut out = Vec::new();
    for t in 0..net.transition_count() {
        if net.pre(t).is_empty() {
            out.push(json!({
                "severity": "warning",
                "message": format!("transition {} has an empty preset and is always enabled", net.transition(t).id),
            }));
        }
    }
    let bad = net.places().iter().any(|p| p.bad);
    if bad && m.game.is_none() {
        out.push(json!({
            "severity": "warning",
            "message": "bad places have no effect without an environment place",
        }));
    }
    out
}

pub fn digest(text: &str) -> String {
    Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn parse_diagnostic(e: &ParseError) -> Value {
    json!({"severity": "error", "line": e.line, "column": e.column, "message": e.message})
}

/// Parses and normalizes `.apn` text.
pub fn build_model(text: &str) -> Result<Model, ApiError> {
    let doc = parse_document(text).map_err(|e| ApiError::Unprocessable {
        message: e.to_string(),
        diagnostics: vec![parse_diagnostic(&e)],
    })?;
    let normalized = render(&doc.net, &doc.transits);
    let transit_net =
        TransitNet::new(doc.net.clone(), doc.transits).map_err(|e| ApiError::invalid(e.to_string()))?;
    let game = if doc.net.places().iter().any(|p| p.kind == workbench_core::net::PlaceKind::Environment) {
        Some(PetriGame::new(doc.net).map_err(|e| ApiError::invalid(e.to_string()))?)
    } else {
        None
    };
    Ok(Model {
        id: digest(&normalized),
        text: normalized,
        transit_net,
        game,
    })
}

#[derive(Debug, Default)]
pub struct ModelStore {
    models: RwLock<HashMap<String, Arc<Model>>>,
}

impl ModelStore {
    pub fn insert(&self, text: &str) -> Result<Arc<Model>, ApiError> {
        let model = build_model(text)?;
        let mut map = self.models.write().expect("model store lock");
        Ok(map
            .entry(model.id.clone())
            .or_insert_with(|| Arc::new(model))
            .clone())
    }

    pub fn get(&self, id: &str) -> Result<Arc<Model>, ApiError> {
        self.models
            .read()
            .expect("model store lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::NotFound(format!("model {id}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn content_addressed() {
        let a = build_model(".name n\n.places p[init=1]\n.transitions t\n.flows t: {p} -> {}").unwrap();
        let b = build_model("# comment\n.name n\n.places   p[init=1]\n.transitions t\n.flows t: {p}->{}\n").unwrap();
        assert_eq!(a.id, b.id);
        assert_eq!(a.id.len(), 64);
        assert!(a.game.is_none());
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = build_model(".name n\n.places p\n.transitions t\n.flows t: {x} -> {p}").unwrap_err();
        let body = err.body();
        assert_eq!(body["diagnostics"][0]["line"], 4);
        assert!(body["error"].as_str().unwrap().contains("unknown node x"));
    }

    #[test]
    fn games_detected() {
        let m = build_model(workbench_core::models::ALARM_APN).unwrap();
        assert!(m.game.is_some());
        assert_eq!(m.summary()["places"], 16);
    }
}

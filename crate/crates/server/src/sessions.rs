//! Interactive simulation and exploration sessions.
//!
//! A session has one writer, identified by the token handed out at
//! creation, and any number of readers subscribed to its snapshots.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tokio::sync::broadcast;
use workbench_core::game::{Explorer, GameOptions};
use workbench_core::net::{Marking, ReachGraph};
use workbench_core::transit::data_flow_forest;
use workbench_core::Control;

use crate::error::ApiError;
use crate::models::{digest, Model};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SessionMode {
    Simulate,
    ExploreStates,
    ExploreGame,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Action {
    Fire { transition: String },
    Expand { node: usize },
    Pick {
        #[serde(rename = "move")]
        index: usize,
    },
    Undo,
}

#[derive(Debug, Clone, Deserialize)]
pub struct StepRequest {
    pub writer: String,
    pub action: Action,
}

enum Cursor {
    /// The fired sequence; the marking is its replay.
    Simulate { trace: Vec<usize>, marking: Marking },
    States {
        graph: ReachGraph,
        history: Vec<ReachGraph>,
    },
    Game(Box<Explorer>),
}

pub struct Session {
    pub id: String,
    pub mode: SessionMode,
    pub model: Arc<Model>,
    writer: String,
    cursor: Mutex<Cursor>,
    updates: broadcast::Sender<Value>,
}

fn replay(model: &Model, trace: &[usize]) -> Marking {
    let net = model.net();
    trace.iter().fold(net.initial_marking(), |m, &t| {
        net.fire(&m, t).expect("session traces are fireable")
    })
}

impl Session {
    pub fn subscribe(&self) -> broadcast::Receiver<Value> {
        self.updates.subscribe()
    }

    pub fn is_writer(&self, token: &str) -> bool {
        self.writer == token
    }

    pub fn snapshot(&self) -> Value {
        let cursor = self.cursor.lock().expect("session lock");
        self.render(&cursor)
    }

    fn render(&self, cursor: &Cursor) -> Value {
        let tn = &self.model.transit_net;
        let net = tn.net();
        let view = match cursor {
            Cursor::Simulate { trace, marking } => {
                let markings: Vec<Vec<String>> = (0..=trace.len())
                    .map(|k| net.marking_names(&replay(&self.model, &trace[..k])))
                    .collect();
                let forest = data_flow_forest(tn, trace).expect("session traces are fireable");
                json!({
                    "marking": net.marking_names(marking),
                    "trace": trace.iter().map(|&t| &net.transition(t).id).collect::<Vec<_>>(),
                    "markings": markings,
                    "enabled": net.enabled(marking).iter().map(|&t| &net.transition(t).id).collect::<Vec<_>>(),
                    "forest": forest.to_json(tn),
                })
            }
            Cursor::States { graph, .. } => json!({
                "nodes": graph.nodes().iter().enumerate().map(|(i, m)| json!({
                    "id": i,
                    "marking": net.marking_names(m),
                })).collect::<Vec<_>>(),
                "edges": graph.edges().map(|(a, t, b)| json!({
                    "from": a,
                    "transition": net.transition(t).id,
                    "to": b,
                })).collect::<Vec<_>>(),
                "frontier": graph.frontier(),
                "complete": graph.is_complete(),
            }),
            Cursor::Game(explorer) => {
                let pg = self.model.game.as_ref().expect("game sessions have a game");
                serde_json::to_value(explorer.view(pg)).expect("views serialize")
            }
        };
        json!({"sessionId": self.id, "mode": self.mode, "view": view})
    }

    /// Applies an action from `writer` and returns the new snapshot, which
    /// is also pushed to subscribers.
    pub fn step(&self, writer: &str, action: &Action) -> Result<Value, ApiError> {
        if !self.is_writer(writer) {
            return Err(ApiError::Conflict(format!(
                "session {} has another writer",
                self.id
            )));
        }
        let mut cursor = self.cursor.lock().expect("session lock");
        let net = self.model.net();
        match (&mut *cursor, action) {
            (Cursor::Simulate { trace, marking }, Action::Fire { transition }) => {
                let t = net
                    .transition_index(transition)
                    .map_err(|e| ApiError::invalid(e.to_string()))?;
                *marking = net
                    .fire(marking, t)
                    .map_err(|e| ApiError::invalid(e.to_string()))?;
                trace.push(t);
            }
            (Cursor::Simulate { trace, marking }, Action::Undo) => {
                if trace.pop().is_none() {
                    return Err(ApiError::invalid("nothing to undo"));
                }
                *marking = replay(&self.model, trace);
            }
            (Cursor::States { graph, history }, Action::Expand { node }) => {
                if *node >= graph.nodes().len() {
                    return Err(ApiError::invalid(format!("no node {node}")));
                }
                let before = graph.clone();
                graph
                    .expand_id(net, *node)
                    .map_err(|e| ApiError::invalid(e.to_string()))?;
                history.push(before);
            }
            (Cursor::States { graph, history }, Action::Undo) => {
                *graph = history.pop().ok_or_else(|| ApiError::invalid("nothing to undo"))?;
            }
            (Cursor::Game(explorer), Action::Pick { index }) => {
                let pg = self.model.game.as_ref().expect("game sessions have a game");
                explorer
                    .pick(pg, *index)
                    .map_err(|e| ApiError::invalid(e.to_string()))?;
            }
            (Cursor::Game(explorer), Action::Undo) => {
                if !explorer.undo() {
                    return Err(ApiError::invalid("nothing to undo"));
                }
            }
            (_, action) => {
                return Err(ApiError::invalid(format!(
                    "action {} is not available in mode {}",
                    serde_json::to_value(action).expect("actions serialize")["type"],
                    serde_json::to_value(self.mode).expect("modes serialize"),
                )))
            }
        }
        let snapshot = self.render(&cursor);
        drop(cursor);
        let _ = self.updates.send(snapshot.clone());
        Ok(snapshot)
    }
}

pub struct SessionRegistry {
    sessions: RwLock<HashMap<String, Arc<Session>>>,
    next: AtomicU64,
    game_cap: usize,
}

impl SessionRegistry {
    pub fn new(game_cap: usize) -> Self {
        Self {
            sessions: RwLock::new(HashMap::new()),
            next: AtomicU64::new(1),
            game_cap,
        }
    }

    pub fn get(&self, id: &str) -> Result<Arc<Session>, ApiError> {
        self.sessions
            .read()
            .expect("session registry lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::NotFound(format!("session {id}")))
    }

    /// Creates a session and returns it with its writer token. Building the
    /// game arena for EXPLORE_GAME can take a while; call off the runtime.
    pub fn create(&self, model: Arc<Model>, mode: SessionMode) -> Result<(Arc<Session>, String), ApiError> {
        let net = model.net();
        let cursor = match mode {
            SessionMode::Simulate => Cursor::Simulate {
                trace: Vec::new(),
                marking: net.initial_marking(),
            },
            SessionMode::ExploreStates => Cursor::States {
                graph: ReachGraph::new(net),
                history: Vec::new(),
            },
            SessionMode::ExploreGame => {
                let pg = model
                    .game
                    .as_ref()
                    .ok_or_else(|| ApiError::invalid("model is not a Petri game"))?;
                let options = GameOptions {
                    state_cap: self.game_cap,
                    ..GameOptions::default()
                };
                let explorer = Explorer::new(pg, &options, &Control::new())
                    .map_err(|e| ApiError::invalid(e.to_string()))?;
                Cursor::Game(Box::new(explorer))
            }
        };
        let n = self.next.fetch_add(1, Ordering::Relaxed);
        let id = format!("session-{n}");
        let writer = digest(&format!("{id}/{}/{:?}", model.id, std::time::SystemTime::now()));
        let (updates, _) = broadcast::channel(64);
        let session = Arc::new(Session {
            id: id.clone(),
            mode,
            model,
            writer: writer.clone(),
            cursor: Mutex::new(cursor),
            updates,
        });
        self.sessions
            .write()
            .expect("session registry lock")
            .insert(id, session.clone());
        Ok((session, writer))
    }
}

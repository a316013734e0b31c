//! WebSocket streams for jobs and sessions.

use std::sync::Arc;
use std::time::Duration;

use axum::extract::ws::{Message, WebSocket};
use serde_json::{json, Value};
use tokio::sync::broadcast::error::RecvError;

use crate::error::ApiError;
use crate::jobs::Job;
use crate::sessions::{Session, StepRequest};

/// Interval between progress events of a running job.
pub const PROGRESS_INTERVAL: Duration = Duration::from_millis(250);

async fn send(socket: &mut WebSocket, v: &Value) -> bool {
    socket.send(Message::Text(v.to_string().into())).await.is_ok()
}

/// Sends an error frame and closes the stream.
pub async fn reject(mut socket: WebSocket, e: ApiError) {
    let mut frame = e.body();
    frame["type"] = json!("error");
    let _ = send(&mut socket, &frame).await;
    let _ = socket.send(Message::Close(None)).await;
}

fn final_event(job: &Job) -> Value {
    let view = job.view();
    json!({
        "type": "final",
        "jobId": job.id,
        "status": view["status"],
        "result": format!("/api/jobs/{}/result", job.id),
        "verdict": view["result"]["verdict"],
        "error": view["error"],
    })
}

pub async fn job_stream(mut socket: WebSocket, job: Arc<Job>) {
    let mut status = job.subscribe();
    loop {
        if job.status().is_final() {
            let _ = send(&mut socket, &final_event(&job)).await;
            let _ = socket.send(Message::Close(None)).await;
            return;
        }
        let event = json!({
            "type": "progress",
            "jobId": job.id,
            "status": job.status(),
            "progress": job.control.progress(),
        });
        if !send(&mut socket, &event).await {
            return;
        }
        tokio::select! {
            _ = status.changed() => {}
            _ = tokio::time::sleep(PROGRESS_INTERVAL) => {}
        }
    }
}

/// Pushes the current snapshot, then every later one. Incoming text frames
/// are step requests `{writer, action}`; a foreign writer gets a conflict
/// frame.
pub async fn session_stream(mut socket: WebSocket, session: Arc<Session>) {
    let mut updates = session.subscribe();
    let first = json!({"type": "snapshot", "snapshot": session.snapshot()});
    if !send(&mut socket, &first).await {
        return;
    }
    loop {
        tokio::select! {
            update = updates.recv() => match update {
                Ok(snapshot) => {
                    if !send(&mut socket, &json!({"type": "snapshot", "snapshot": snapshot})).await {
                        return;
                    }
                }
                Err(RecvError::Lagged(_)) => {
                    let snapshot = session.snapshot();
                    if !send(&mut socket, &json!({"type": "snapshot", "snapshot": snapshot})).await {
                        return;
                    }
                }
                Err(RecvError::Closed) => return,
            },
            incoming = socket.recv() => {
                let text = match incoming {
                    Some(Ok(Message::Text(t))) => t,
                    Some(Ok(Message::Close(_))) | None | Some(Err(_)) => return,
                    Some(Ok(_)) => continue,
                };
                let reply = match serde_json::from_str::<StepRequest>(&text) {
                    Err(e) => Some(json!({"type": "error", "error": e.to_string()})),
                    Ok(req) => {
                        let s = session.clone();
                        let result = tokio::task::spawn_blocking(move || s.step(&req.writer, &req.action)).await;
                        match result {
                            Ok(Ok(_)) => None,
                            Ok(Err(e @ ApiError::Conflict(_))) => Some(json!({"type": "conflict", "error": e.to_string()})),
                            Ok(Err(e)) => {
                                let mut frame = e.body();
                                frame["type"] = json!("error");
                                Some(frame)
                            }
                            Err(e) => Some(json!({"type": "error", "error": e.to_string()})),
                        }
                    }
                };
                if let Some(frame) = reply {
                    if !send(&mut socket, &frame).await {
                        return;
                    }
                }
            }
        }
    }
}

//! Asynchronous check and synthesis jobs.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};
use tokio::sync::{watch, Notify, Semaphore};
use workbench_core::flowltl::RunFormula;
use workbench_core::Control;

use crate::compute::{check_document, result_document, synthesis_document, ComputeError};
use crate::error::ApiError;
use crate::models::{digest, Model};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum JobKind {
    Check,
    Synthesize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum JobStatus {
    Queued,
    Running,
    Done,
    Failed,
    Canceled,
}

impl JobStatus {
    pub fn is_final(self) -> bool {
        matches!(self, JobStatus::Done | JobStatus::Failed | JobStatus::Canceled)
    }

    fn may_become(self, next: JobStatus) -> bool {
        matches!(
            (self, next),
            (JobStatus::Queued, JobStatus::Running)
                | (JobStatus::Running, JobStatus::Done | JobStatus::Failed | JobStatus::Canceled)
        )
    }
}

#[derive(Debug)]
struct JobState {
    status: JobStatus,
    result: Option<Arc<Value>>,
    error: Option<String>,
}

#[derive(Debug)]
pub struct Job {
    pub id: String,
    pub kind: JobKind,
    pub model_id: String,
    pub formula: Option<String>,
    pub control: Control,
    state: Mutex<JobState>,
    status_tx: watch::Sender<JobStatus>,
    cancel: Notify,
}

impl Job {
    pub fn status(&self) -> JobStatus {
        self.state.lock().expect("job lock").status
    }

    pub fn result(&self) -> Option<Arc<Value>> {
        self.state.lock().expect("job lock").result.clone()
    }

    pub fn subscribe(&self) -> watch::Receiver<JobStatus> {
        self.status_tx.subscribe()
    }

    fn advance(&self, next: JobStatus, result: Option<Arc<Value>>, error: Option<String>) {
        let mut st = self.state.lock().expect("job lock");
        assert!(st.status.may_become(next), "job {} cannot go from {:?} to {next:?}", self.id, st.status);
        st.status = next;
        st.result = result;
        st.error = error;
        drop(st);
        self.status_tx.send_replace(next);
    }

    pub fn view(&self) -> Value {
        let st = self.state.lock().expect("job lock");
        json!({
            "id": self.id,
            "kind": self.kind,
            "status": st.status,
            "modelId": self.model_id,
            "formula": self.formula,
            "progress": self.control.progress(),
            "result": st.result.as_deref(),
            "error": st.error,
        })
    }
}

/// Finished result documents keyed by a digest of the job input, in memory
/// and optionally on disk.
#[derive(Debug, Default)]
struct ResultCache {
    memory: RwLock<HashMap<String, Arc<Value>>>,
    dir: Option<PathBuf>,
}

impl ResultCache {
    fn get(&self, key: &str) -> Option<Arc<Value>> {
        if let Some(v) = self.memory.read().expect("cache lock").get(key) {
            return Some(v.clone());
        }
        let path = self.dir.as_ref()?.join(format!("{key}.json"));
        let text = std::fs::read_to_string(path).ok()?;
        let v: Arc<Value> = Arc::new(serde_json::from_str(&text).ok()?);
        self.memory.write().expect("cache lock").insert(key.to_string(), v.clone());
        Some(v)
    }

    fn put(&self, key: &str, v: Arc<Value>) {
        if let Some(dir) = &self.dir {
            let write = std::fs::create_dir_all(dir)
                .and_then(|_| std::fs::write(dir.join(format!("{key}.json")), result_document(&v)));
            if let Err(e) = write {
                tracing::warn!("cannot write result cache in {}: {e}", dir.display());
            }
        }
        self.memory.write().expect("cache lock").insert(key.to_string(), v);
    }
}

pub struct JobRegistry {
    jobs: RwLock<HashMap<String, Arc<Job>>>,
    slots: Arc<Semaphore>,
    cache: Arc<ResultCache>,
    next: AtomicU64,
    check_cap: usize,
    game_cap: usize,
}

/// What a job computes.
pub enum JobInput {
    Check { model: Arc<Model>, formula: RunFormula },
    Synthesize { model: Arc<Model> },
}

impl JobRegistry {
    pub fn new(max_jobs: usize, cache_dir: Option<PathBuf>, check_cap: usize, game_cap: usize) -> Self {
        Self {
            jobs: RwLock::new(HashMap::new()),
            slots: Arc::new(Semaphore::new(max_jobs)),
            cache: Arc::new(ResultCache {
                memory: RwLock::new(HashMap::new()),
                dir: cache_dir,
            }),
            next: AtomicU64::new(1),
            check_cap,
            game_cap,
        }
    }

    pub fn get(&self, id: &str) -> Result<Arc<Job>, ApiError> {
        self.jobs
            .read()
            .expect("job registry lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::NotFound(format!("job {id}")))
    }

    /// Registers a job and starts it in the background.
    pub fn submit(&self, input: JobInput) -> Arc<Job> {
        let (kind, model, formula, key) = match &input {
            JobInput::Check { model, formula } => {
                let f = formula.to_string();
                let key = digest(&format!("check\n{}\n{f}\n{}", model.id, self.check_cap));
                (JobKind::Check, model.clone(), Some(f), key)
            }
            JobInput::Synthesize { model } => {
                let key = digest(&format!("synthesize\n{}\n{}", model.id, self.game_cap));
                (JobKind::Synthesize, model.clone(), None, key)
            }
        };
        let n = self.next.fetch_add(1, Ordering::Relaxed);
        let id = format!("job-{n}-{}", &key[..8]);
        let (status_tx, _) = watch::channel(JobStatus::Queued);
        let job = Arc::new(Job {
            id: id.clone(),
            kind,
            model_id: model.id.clone(),
            formula,
            control: Control::new(),
            state: Mutex::new(JobState {
                status: JobStatus::Queued,
                result: None,
                error: None,
            }),
            status_tx,
            cancel: Notify::new(),
        });
        self.jobs
            .write()
            .expect("job registry lock")
            .insert(id, job.clone());

        if let Some(cached) = self.cache.get(&key) {
            job.advance(JobStatus::Running, None, None);
            job.advance(JobStatus::Done, Some(cached), None);
            return job;
        }

        let slots = self.slots.clone();
        let cache = self.cache.clone();
        let (check_cap, game_cap) = (self.check_cap, self.game_cap);
        let runner = job.clone();
        tokio::spawn(async move {
            let permit = tokio::select! {
                p = slots.acquire_owned() => p.ok(),
                _ = runner.cancel.notified() => None,
            };
            runner.advance(JobStatus::Running, None, None);
            if permit.is_none() || runner.control.is_canceled() {
                runner.advance(JobStatus::Canceled, None, None);
                return;
            }
            let control = runner.control.clone();
            let started = Instant::now();
            let outcome = tokio::task::spawn_blocking(move || match input {
                JobInput::Check { model, formula } => {
                    check_document(&model.transit_net, &formula, check_cap, &control).map(|(v, _)| v)
                }
                JobInput::Synthesize { model } => {
                    let pg = model.game.as_ref().expect("synthesis jobs need a game");
                    synthesis_document(pg, game_cap, &control).map(|(v, _)| v)
                }
            })
            .await;
            drop(permit);
            tracing::info!(job = %runner.id, elapsed = ?started.elapsed(), "job finished");
            match outcome {
                Ok(Ok(v)) => {
                    let v = Arc::new(v);
                    cache.put(&key, v.clone());
                    runner.advance(JobStatus::Done, Some(v), None);
                }
                Ok(Err(ComputeError::Canceled)) => runner.advance(JobStatus::Canceled, None, None),
                Ok(Err(ComputeError::Failed(e))) => runner.advance(JobStatus::Failed, None, Some(e)),
                Err(e) => runner.advance(JobStatus::Failed, None, Some(format!("job panicked: {e}"))),
            }
        });
        job
    }

    /// Requests cancellation. Finished jobs cannot be canceled.
    pub fn cancel(&self, id: &str) -> Result<Arc<Job>, ApiError> {
        let job = self.get(id)?;
        if job.status().is_final() {
            return Err(ApiError::Conflict(format!("job {id} already finished")));
        }
        job.control.cancel();
        job.cancel.notify_one();
        Ok(job)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_order() {
        use JobStatus::*;
        assert!(Queued.may_become(Running));
        assert!(Running.may_become(Canceled));
        assert!(!Queued.may_become(Done));
        assert!(!Done.may_become(Running));
        assert!(!Canceled.may_become(Done));
    }
}

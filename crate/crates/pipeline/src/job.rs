//! Generation job state machine and its observable history.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use shaderlens_core::Diagnostic;
use tokio::sync::watch;
use uuid::Uuid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JobStatus {
    Pending,
    Generating,
    Validating,
    Repairing,
    Done,
    Failed,
}

impl JobStatus {
    pub fn is_terminal(self) -> bool {
        matches!(self, JobStatus::Done | JobStatus::Failed)
    }

    /// pending → generating → validating → (repairing → generating → validating)* → done | failed.
    /// Any live state may fail.
    pub fn can_become(self, next: JobStatus) -> bool {
        use JobStatus::*;
        matches!(
            (self, next),
            (Pending, Generating) | (Generating, Validating) | (Validating, Repairing) | (Repairing, Generating)
                | (Validating, Done)
        ) || (!self.is_terminal() && next == Failed)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            JobStatus::Pending => "pending",
            JobStatus::Generating => "generating",
            JobStatus::Validating => "validating",
            JobStatus::Repairing => "repairing",
            JobStatus::Done => "done",
            JobStatus::Failed => "failed",
        }
    }
}

/// Snapshot of one job.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationJob {
    pub id: Uuid,
    pub intent: String,
    pub status: JobStatus,
    pub attempt: u32,
    pub max_attempts: u32,
    /// Diagnostics of the most recent validation.
    pub diagnostics: Vec<Diagnostic>,
    /// Accumulated wall time per stage, milliseconds.
    pub timings: BTreeMap<String, f64>,
    pub total_ms: f64,
    pub artifact_id: Option<Uuid>,
    pub error: Option<String>,
}

impl GenerationJob {
    pub fn new(intent: &str, max_attempts: u32) -> Self {
        GenerationJob {
            id: Uuid::new_v4(),
            intent: intent.to_owned(),
            status: JobStatus::Pending,
            attempt: 0,
            max_attempts,
            diagnostics: Vec::new(),
            timings: BTreeMap::new(),
            total_ms: 0.0,
            artifact_id: None,
            error: None,
        }
    }
}

#[derive(Debug)]
struct State {
    job: GenerationJob,
    history: Vec<GenerationJob>,
}

/// Shared handle to a running job. Every status change is appended to the
/// history, and subscribers are woken with the new history length, so a
/// slow reader never misses a transition.
#[derive(Debug)]
pub struct JobHandle {
    id: Uuid,
    state: Mutex<State>,
    changes: watch::Sender<usize>,
}

impl JobHandle {
    pub fn new(intent: &str, max_attempts: u32) -> Arc<Self> {
        let job = GenerationJob::new(intent, max_attempts);
        Arc::new(JobHandle {
            id: job.id,
            state: Mutex::new(State { job, history: Vec::new() }),
            changes: watch::channel(0).0,
        })
    }

    pub fn id(&self) -> Uuid {
        self.id
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, State> {
        self.state.lock().unwrap_or_else(|e| e.into_inner())
    }

    pub fn snapshot(&self) -> GenerationJob {
        self.lock().job.clone()
    }

    /// Snapshots taken at each transition, oldest first.
    pub fn history(&self) -> Vec<GenerationJob> {
        self.lock().history.clone()
    }

    pub fn history_since(&self, from: usize) -> Vec<GenerationJob> {
        let s = self.lock();
        s.history.get(from..).map(<[_]>::to_vec).unwrap_or_default()
    }

    /// Receiver whose value is the history length.
    pub fn subscribe(&self) -> watch::Receiver<usize> {
        self.changes.subscribe()
    }

    /// Resolves once the job is done or failed.
    pub async fn finished(&self) -> GenerationJob {
        let mut rx = self.subscribe();
        loop {
            let snap = self.snapshot();
            if snap.status.is_terminal() {
                return snap;
            }
            // The sender lives as long as `self`, so this cannot fail.
            let _ = rx.changed().await;
        }
    }

    pub(crate) fn update(&self, f: impl FnOnce(&mut GenerationJob)) {
        f(&mut self.lock().job);
    }

    /// Applies `f` and moves to `next`, recording the result.
    pub(crate) fn transition(&self, next: JobStatus, f: impl FnOnce(&mut GenerationJob)) {
        let len = {
            let mut s = self.lock();
            assert!(s.job.status.can_become(next), "illegal job transition {:?} -> {next:?}", s.job.status);
            f(&mut s.job);
            s.job.status = next;
            let snap = s.job.clone();
            s.history.push(snap);
            s.history.len()
        };
        self.changes.send_replace(len);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use JobStatus::*;

    #[test]
    fn transition_table() {
        let path = [Pending, Generating, Validating, Repairing, Generating, Validating, Done];
        for w in path.windows(2) {
            assert!(w[0].can_become(w[1]), "{:?} -> {:?}", w[0], w[1]);
        }
        assert!(!Pending.can_become(Validating));
        assert!(!Validating.can_become(Generating));
        assert!(!Done.can_become(Failed));
        assert!(!Failed.can_become(Generating));
        assert!(Repairing.can_become(Failed) && Pending.can_become(Failed));
    }

    #[test]
    fn history_records_each_transition() {
        let h = JobHandle::new("x", 3);
        let rx = h.subscribe();
        h.transition(Generating, |j| j.attempt = 1);
        h.transition(Validating, |_| {});
        assert_eq!(*rx.borrow(), 2);
        let statuses: Vec<_> = h.history().iter().map(|j| j.status).collect();
        assert_eq!(statuses, [Generating, Validating]);
        assert_eq!(h.history_since(1).len(), 1);
        assert!(h.history_since(9).is_empty());
    }

    #[test]
    #[should_panic(expected = "illegal job transition")]
    fn rejects_illegal_transition() {
        JobHandle::new("x", 3).transition(Done, |_| {});
    }

    #[test]
    fn snapshot_json_uses_lowercase_status() {
        let j = GenerationJob::new("x", 3);
        let v = serde_json::to_value(&j).unwrap();
        assert_eq!(v["status"], "pending");
        assert_eq!(v["max_attempts"], 3);
    }
}

//! Bounded job queue: a fixed number of workers and a cap on jobs waiting
//! for one.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use thiserror::Error;
use tokio::sync::Semaphore;
use uuid::Uuid;

use crate::generate::Generator;
use crate::job::JobHandle;
use crate::store::Store;

pub const DEFAULT_WORKERS: usize = 2;
pub const DEFAULT_QUEUE_LIMIT: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum SubmitError {
    #[error("intent is blank")]
    BlankIntent,
    #[error("too many pending jobs (limit {0})")]
    QueueFull(usize),
}

#[derive(Debug)]
struct Inner {
    generator: Arc<Generator>,
    store: Arc<Store>,
    workers: Arc<Semaphore>,
    pending: AtomicUsize,
    limit: usize,
    jobs: Mutex<HashMap<Uuid, Arc<JobHandle>>>,
}

#[derive(Debug, Clone)]
pub struct JobQueue {
    inner: Arc<Inner>,
}

impl JobQueue {
    pub fn new(generator: Arc<Generator>, store: Arc<Store>, workers: usize, limit: usize) -> Self {
        JobQueue {
            inner: Arc::new(Inner {
                generator,
                store,
                workers: Arc::new(Semaphore::new(workers.max(1))),
                pending: AtomicUsize::new(0),
                limit,
                jobs: Mutex::new(HashMap::new()),
            }),
        }
    }

    pub fn store(&self) -> &Arc<Store> {
        &self.inner.store
    }

    pub fn generator(&self) -> &Arc<Generator> {
        &self.inner.generator
    }

    /// Jobs accepted but not yet picked up by a worker.
    pub fn pending(&self) -> usize {
        self.inner.pending.load(Ordering::SeqCst)
    }

    /// Enqueues a job; must be called from within a Tokio runtime.
    pub fn submit(&self, intent: &str) -> Result<Arc<JobHandle>, SubmitError> {
        if intent.trim().is_empty() {
            return Err(SubmitError::BlankIntent);
        }
        let limit = self.inner.limit;
        self.inner
            .pending
            .fetch_update(Ordering::SeqCst, Ordering::SeqCst, |n| (n < limit).then_some(n + 1))
            .map_err(|_| SubmitError::QueueFull(limit))?;
        let job = JobHandle::new(intent, self.inner.generator.max_attempts());
        self.inner.jobs.lock().unwrap_or_else(|e| e.into_inner()).insert(job.id(), job.clone());

        let inner = self.inner.clone();
        let handle = job.clone();
        tokio::spawn(async move {
            let permit = inner.workers.clone().acquire_owned().await;
            inner.pending.fetch_sub(1, Ordering::SeqCst);
            let mut session = inner.generator.client().session();
            if let Err(e) = inner.generator.run(&handle, &mut session, &inner.store).await {
                log::info!("job {} failed: {e}", handle.id());
            }
            drop(permit);
        });
        Ok(job)
    }

    pub fn get(&self, id: Uuid) -> Option<Arc<JobHandle>> {
        self.inner.jobs.lock().unwrap_or_else(|e| e.into_inner()).get(&id).cloned()
    }
}

//! The generate → validate → repair loop.

use std::collections::BTreeMap;
use std::time::Instant;

use shaderlens_core::prompt::{default_fewshot, default_pitfalls, PromptBundle, PromptError, PromptTemplates};
use shaderlens_core::{validate, Diagnostic, DiagnosticCode, InterfaceContract, Pos};
use thiserror::Error;

use crate::job::{JobHandle, JobStatus};
use crate::llm::{extract_code, LlmClient, LlmError, Session};
use crate::store::{ShaderArtifact, Store, StoreError};

pub const DEFAULT_MAX_ATTEMPTS: u32 = 3;

#[derive(Debug, Error)]
pub enum GenerationError {
    #[error("intent is blank")]
    BlankIntent,
    #[error("generation failed after {attempts} attempts")]
    GenerationFailed { attempts: u32, diagnostics: Vec<Diagnostic> },
    #[error(transparent)]
    Provider(#[from] LlmError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Prompt(PromptError),
    #[error("max_attempts must be at least 1")]
    NoAttempts,
}

impl From<PromptError> for GenerationError {
    fn from(e: PromptError) -> Self {
        match e {
            PromptError::BlankIntent => GenerationError::BlankIntent,
            other => GenerationError::Prompt(other),
        }
    }
}

/// Accumulates per-stage wall time for one job.
struct Clock {
    start: Instant,
    stages: BTreeMap<String, f64>,
}

impl Clock {
    fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.add(stage, t);
        out
    }

    fn add(&mut self, stage: &str, since: Instant) {
        *self.stages.entry(stage.to_owned()).or_default() += since.elapsed().as_secs_f64() * 1e3;
    }

    fn total_ms(&self) -> f64 {
        self.start.elapsed().as_secs_f64() * 1e3
    }
}

#[derive(Debug, Clone)]
pub struct Generator {
    client: LlmClient,
    templates: PromptTemplates,
    contract: InterfaceContract,
    system: String,
    max_attempts: u32,
}

impl Generator {
    pub fn new(client: LlmClient, templates: PromptTemplates, max_attempts: u32) -> Result<Self, GenerationError> {
        if max_attempts == 0 {
            return Err(GenerationError::NoAttempts);
        }
        let contract = InterfaceContract::default();
        let system = templates.system_prompt(&contract, &default_fewshot(), &default_pitfalls())?;
        Ok(Generator { client, templates, contract, system, max_attempts })
    }

    pub fn client(&self) -> &LlmClient {
        &self.client
    }

    pub fn max_attempts(&self) -> u32 {
        self.max_attempts
    }

    pub fn system_prompt(&self) -> &str {
        &self.system
    }

    /// Runs a fresh job to completion with its own provider session.
    pub async fn generate(&self, intent: &str, store: &Store) -> (std::sync::Arc<JobHandle>, Result<ShaderArtifact, GenerationError>) {
        let job = JobHandle::new(intent, self.max_attempts);
        let mut session = self.client.session();
        let result = self.run(&job, &mut session, store).await;
        (job, result)
    }

    /// Drives `job` from pending to done or failed. On success the artifact
    /// is already in `store`.
    pub async fn run(&self, job: &JobHandle, session: &mut Session, store: &Store) -> Result<ShaderArtifact, GenerationError> {
        let mut clock = Clock { start: Instant::now(), stages: BTreeMap::new() };
        let intent = job.snapshot().intent;
        let user = match clock.time("prompt", || self.templates.user_prompt(&intent)) {
            Ok(u) => u,
            Err(e) => return Err(fail(job, &clock, e.into())),
        };
        let mut bundle = PromptBundle { system: self.system.clone(), user, attempt: 1 };

        for attempt in 1..=self.max_attempts {
            job.transition(JobStatus::Generating, |j| {
                j.attempt = attempt;
                stamp(j, &clock);
            });
            let llm_start = Instant::now();
            let completion = session.complete(&bundle).await;
            clock.add("llm", llm_start);
            let completion = match completion {
                Ok(c) => c,
                Err(e) => return Err(fail(job, &clock, e.into())),
            };
            job.transition(JobStatus::Validating, |j| stamp(j, &clock));

            let (source, checked) = match clock.time("extract", || extract_code(&completion.text)) {
                Ok(src) => {
                    let checked = clock.time("validate", || validate(&src, &self.contract).map(drop));
                    (src, checked)
                }
                Err(e) => {
                    let diag = Diagnostic::error(DiagnosticCode::E010, Pos::START, format!("no usable code block: {e}"));
                    (completion.text.clone(), Err(vec![diag]))
                }
            };

            let diagnostics = match checked {
                Ok(()) => {
                    let artifact = ShaderArtifact::new(&intent, source, attempt);
                    if let Err(e) = clock.time("store", || store.save(&artifact)) {
                        return Err(fail(job, &clock, e.into()));
                    }
                    job.transition(JobStatus::Done, |j| {
                        j.diagnostics.clear();
                        j.artifact_id = Some(artifact.id);
                        stamp(j, &clock);
                    });
                    return Ok(artifact);
                }
                Err(d) => d,
            };

            if attempt == self.max_attempts {
                let err = GenerationError::GenerationFailed { attempts: attempt, diagnostics: diagnostics.clone() };
                job.update(|j| j.diagnostics = diagnostics);
                return Err(fail(job, &clock, err));
            }
            job.transition(JobStatus::Repairing, |j| {
                j.diagnostics = diagnostics.clone();
                stamp(j, &clock);
            });
            let repair = clock.time("prompt", || self.templates.repair_prompt(&source, &diagnostics));
            match repair {
                Ok(user) => bundle = PromptBundle { system: self.system.clone(), user, attempt: attempt + 1 },
                Err(e) => return Err(fail(job, &clock, e.into())),
            }
        }
        unreachable!("the final attempt always returns")
    }
}

fn stamp(j: &mut crate::job::GenerationJob, clock: &Clock) {
    j.timings = clock.stages.clone();
    j.total_ms = clock.total_ms();
}

fn fail(job: &JobHandle, clock: &Clock, err: GenerationError) -> GenerationError {
    job.transition(JobStatus::Failed, |j| {
        j.error = Some(err.to_string());
        stamp(j, clock);
    });
    err
}

//! Intent-to-shader generation.
//!
//! A [`Generator`] turns an intent into a validated shader by prompting an
//! LLM through [`LlmClient`], extracting and checking the reply, and feeding
//! diagnostics back for a bounded number of repair rounds. Finished shaders
//! land in a directory-backed [`Store`]; [`JobQueue`] runs jobs on a small
//! worker pool and exposes their status history.

pub mod config;
pub mod generate;
pub mod job;
pub mod llm;
pub mod queue;
pub mod store;

pub use config::{Config, ConfigError};
pub use generate::{GenerationError, Generator, DEFAULT_MAX_ATTEMPTS};
pub use job::{GenerationJob, JobHandle, JobStatus};
pub use llm::{extract_code, write_fixture_script, Completion, ExtractError, LlmClient, LlmError, ProviderConfig, ProviderKind, Secret, Session};
pub use queue::{JobQueue, SubmitError};
pub use store::{derive_title, ArtifactSummary, ShaderArtifact, Store, StoreError};

/// Builds the generator described by `cfg`, honouring its template directory.
pub fn generator_from_config(cfg: &Config) -> Result<Generator, GenerationError> {
    let client = LlmClient::new(cfg.provider.clone())?;
    let templates = match &cfg.templates {
        Some(dir) => shaderlens_core::prompt::PromptTemplates::from_dir(dir)?,
        None => Default::default(),
    };
    Generator::new(client, templates, cfg.max_attempts)
}

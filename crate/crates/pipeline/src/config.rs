//! Shared configuration for the CLI and the server: a TOML file overlaid
//! with `SHADERLENS_*` environment variables.

use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generate::DEFAULT_MAX_ATTEMPTS;
use crate::llm::{ProviderConfig, ProviderKind, Secret};
use crate::queue::{DEFAULT_QUEUE_LIMIT, DEFAULT_WORKERS};

pub const DEFAULT_BIND: &str = "127.0.0.1:8787";
pub const DEFAULT_STORE: &str = "shaderlens-store";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub bind: SocketAddr,
    pub store: PathBuf,
    pub max_attempts: u32,
    pub workers: usize,
    pub queue_limit: usize,
    /// Directory with `system.txt` / `user.txt` / `repair.txt` overrides.
    pub templates: Option<PathBuf>,
    /// Directory served at `/`.
    pub static_dir: Option<PathBuf>,
    pub provider: ProviderConfig,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            bind: DEFAULT_BIND.parse().expect("valid default bind"),
            store: PathBuf::from(DEFAULT_STORE),
            max_attempts: DEFAULT_MAX_ATTEMPTS,
            workers: DEFAULT_WORKERS,
            queue_limit: DEFAULT_QUEUE_LIMIT,
            templates: None,
            static_dir: None,
            provider: ProviderConfig::default(),
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading config {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("parsing config {path}: {source}")]
    Parse { path: String, source: toml::de::Error },
    #[error("{var}: {message}")]
    Env { var: String, message: String },
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    /// Reads `path` if given (defaults otherwise) and applies the process
    /// environment on top.
    pub fn load(path: Option<&Path>) -> Result<Self, ConfigError> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|source| ConfigError::Read { path: p.display().to_string(), source })?;
                Config::from_toml(&text).map_err(|source| ConfigError::Parse { path: p.display().to_string(), source })?
            }
            None => Config::default(),
        };
        cfg.apply_env(|k| std::env::var(k).ok())?;
        Ok(cfg)
    }

    /// Overrides fields from `SHADERLENS_BIND`, `_STORE`, `_MAX_ATTEMPTS`,
    /// `_WORKERS`, `_QUEUE_LIMIT`, `_TEMPLATES`, `_STATIC_DIR`, `_PROVIDER`,
    /// `_ENDPOINT`, `_MODEL`, `_API_KEY`, `_TEMPERATURE`, `_TIMEOUT_SECS`,
    /// `_FIXTURES`, `_TRANSCRIBE_ENDPOINT` and `_TRANSCRIBE_MODEL`.
    pub fn apply_env(&mut self, get: impl Fn(&str) -> Option<String>) -> Result<(), ConfigError> {
        fn parsed<T: std::str::FromStr>(var: &str, v: String) -> Result<T, ConfigError>
        where
            T::Err: std::fmt::Display,
        {
            v.trim().parse().map_err(|e: T::Err| ConfigError::Env { var: var.to_owned(), message: e.to_string() })
        }
        let var = |name: &str| {
            let key = format!("SHADERLENS_{name}");
            get(&key).map(|v| (key, v))
        };
        if let Some((k, v)) = var("BIND") {
            self.bind = parsed(&k, v)?;
        }
        if let Some((_, v)) = var("STORE") {
            self.store = v.into();
        }
        if let Some((k, v)) = var("MAX_ATTEMPTS") {
            self.max_attempts = parsed(&k, v)?;
        }
        if let Some((k, v)) = var("WORKERS") {
            self.workers = parsed(&k, v)?;
        }
        if let Some((k, v)) = var("QUEUE_LIMIT") {
            self.queue_limit = parsed(&k, v)?;
        }
        if let Some((_, v)) = var("TEMPLATES") {
            self.templates = Some(v.into());
        }
        if let Some((_, v)) = var("STATIC_DIR") {
            self.static_dir = Some(v.into());
        }
        let p = &mut self.provider;
        if let Some((k, v)) = var("PROVIDER") {
            p.kind = match v.trim() {
                "mock" => ProviderKind::Mock,
                "openai-compatible" => ProviderKind::OpenaiCompatible,
                other => {
                    return Err(ConfigError::Env { var: k, message: format!("unknown provider kind {other:?}") })
                }
            };
        }
        if let Some((_, v)) = var("ENDPOINT") {
            p.endpoint = v;
        }
        if let Some((_, v)) = var("MODEL") {
            p.model = v;
        }
        if let Some((_, v)) = var("API_KEY") {
            p.api_key = Secret::new(v);
        }
        if let Some((k, v)) = var("TEMPERATURE") {
            p.temperature = parsed(&k, v)?;
        }
        if let Some((k, v)) = var("TIMEOUT_SECS") {
            p.timeout_secs = parsed(&k, v)?;
        }
        if let Some((_, v)) = var("FIXTURES") {
            p.fixtures = Some(v.into());
        }
        if let Some((_, v)) = var("TRANSCRIBE_ENDPOINT") {
            p.transcribe_endpoint = v;
        }
        if let Some((_, v)) = var("TRANSCRIBE_MODEL") {
            p.transcribe_model = v;
        }
        Ok(())
    }

    /// Switches to the mock provider reading `fixtures`.
    pub fn use_mock(&mut self, fixtures: impl Into<PathBuf>) {
        self.provider.kind = ProviderKind::Mock;
        self.provider.fixtures = Some(fixtures.into());
    }
}

#[cfg(test)]
mod tests {
    use std::collections::HashMap;

    use super::*;

    #[test]
    fn defaults() {
        let c = Config::default();
        assert_eq!(c.bind.to_string(), "127.0.0.1:8787");
        assert_eq!(c.max_attempts, 3);
        assert_eq!(c.workers, 2);
        assert_eq!(c.queue_limit, 32);
        assert_eq!(c.provider.temperature, 0.2);
    }

    #[test]
    fn parses_toml_with_partial_sections() {
        let c = Config::from_toml(
            "store = \"/tmp/s\"\nmax_attempts = 5\n[provider]\nkind = \"mock\"\nfixtures = \"fx\"\napi_key = \"k\"\n",
        )
        .unwrap();
        assert_eq!(c.store, PathBuf::from("/tmp/s"));
        assert_eq!(c.max_attempts, 5);
        assert_eq!(c.provider.kind, ProviderKind::Mock);
        assert_eq!(c.provider.api_key.expose(), "k");
        assert_eq!(c.provider.model, "o3-mini");
        assert!(Config::from_toml("bogus = 1").is_err());
    }

    #[test]
    fn env_overrides() {
        let env: HashMap<&str, &str> = [
            ("SHADERLENS_BIND", "0.0.0.0:9000"),
            ("SHADERLENS_PROVIDER", "mock"),
            ("SHADERLENS_FIXTURES", "/fx"),
            ("SHADERLENS_TEMPERATURE", "0.7"),
            ("SHADERLENS_API_KEY", "secret"),
        ]
        .into();
        let mut c = Config::default();
        c.apply_env(|k| env.get(k).map(|v| v.to_string())).unwrap();
        assert_eq!(c.bind.port(), 9000);
        assert_eq!(c.provider.kind, ProviderKind::Mock);
        assert_eq!(c.provider.fixtures.as_deref(), Some(Path::new("/fx")));
        assert_eq!(c.provider.temperature, 0.7);
        assert!(!toml::to_string(&c).unwrap().contains("secret"));

        let err = Config::default().apply_env(|k| (k == "SHADERLENS_MAX_ATTEMPTS").then(|| "lots".to_owned()));
        assert!(matches!(err, Err(ConfigError::Env { .. })));
    }
}

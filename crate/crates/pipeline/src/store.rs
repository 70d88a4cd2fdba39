//! Artifact store: one directory per shader holding `manifest.json` and the
//! bare `shader.frag`. Writes go through temp files and renames, serialized
//! by a store-wide lock.

use std::path::{Path, PathBuf};
use std::sync::Mutex;

use chrono::{DateTime, SubsecRound, Utc};
use serde::{Deserialize, Serialize};
use shaderlens_core::{validate, InterfaceContract};
use thiserror::Error;
use uuid::Uuid;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const SOURCE_FILE: &str = "shader.frag";
pub const TITLE_LIMIT: usize = 60;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShaderArtifact {
    pub id: Uuid,
    pub intent: String,
    pub source: String,
    pub created_at: DateTime<Utc>,
    pub attempts_used: u32,
    pub saved: bool,
    pub title: String,
}

impl ShaderArtifact {
    pub fn new(intent: &str, source: String, attempts_used: u32) -> Self {
        ShaderArtifact {
            id: Uuid::new_v4(),
            intent: intent.to_owned(),
            source,
            // Millisecond precision keeps the RFC 3339 text short and exact.
            created_at: Utc::now().trunc_subsecs(3),
            attempts_used,
            saved: false,
            title: derive_title(intent),
        }
    }

    pub fn summary(&self) -> ArtifactSummary {
        ArtifactSummary { id: self.id, title: self.title.clone(), created_at: self.created_at, saved: self.saved }
    }
}

/// First 60 characters of the intent with whitespace runs collapsed.
pub fn derive_title(intent: &str) -> String {
    intent.split_whitespace().collect::<Vec<_>>().join(" ").chars().take(TITLE_LIMIT).collect::<String>().trim_end().to_owned()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtifactSummary {
    pub id: Uuid,
    pub title: String,
    pub created_at: DateTime<Utc>,
    pub saved: bool,
}

/// On-disk manifest; the source lives next to it.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    id: Uuid,
    intent: String,
    title: String,
    created_at: DateTime<Utc>,
    attempts_used: u32,
    saved: bool,
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("artifact {0} not found")]
    NotFound(Uuid),
    #[error("artifact {id} is corrupt: {reason}")]
    StoreCorrupt { id: Uuid, reason: String },
    #[error("store I/O error at {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

#[derive(Debug)]
pub struct Store {
    root: PathBuf,
    lock: Mutex<()>,
}

impl Store {
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let root = root.into();
        std::fs::create_dir_all(&root).map_err(io(&root))?;
        Ok(Store { root, lock: Mutex::new(()) })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn dir(&self, id: Uuid) -> PathBuf {
        self.root.join(id.to_string())
    }

    fn guard(&self) -> std::sync::MutexGuard<'_, ()> {
        self.lock.lock().unwrap_or_else(|e| e.into_inner())
    }

    /// Writes (or overwrites) an artifact. The manifest is written last, so
    /// a directory without one is an interrupted save and is ignored.
    pub fn save(&self, artifact: &ShaderArtifact) -> Result<Uuid, StoreError> {
        let _g = self.guard();
        self.write(artifact)?;
        Ok(artifact.id)
    }

    fn write(&self, a: &ShaderArtifact) -> Result<(), StoreError> {
        let dir = self.dir(a.id);
        std::fs::create_dir_all(&dir).map_err(io(&dir))?;
        write_atomic(&dir.join(SOURCE_FILE), a.source.as_bytes())?;
        let manifest = Manifest {
            id: a.id,
            intent: a.intent.clone(),
            title: a.title.clone(),
            created_at: a.created_at,
            attempts_used: a.attempts_used,
            saved: a.saved,
        };
        let json = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
        write_atomic(&dir.join(MANIFEST_FILE), &json)
    }

    pub fn load(&self, id: Uuid) -> Result<ShaderArtifact, StoreError> {
        let _g = self.guard();
        self.read(id)
    }

    fn read(&self, id: Uuid) -> Result<ShaderArtifact, StoreError> {
        let dir = self.dir(id);
        let manifest_path = dir.join(MANIFEST_FILE);
        let text = match std::fs::read_to_string(&manifest_path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Err(StoreError::NotFound(id)),
            Err(e) => return Err(io(&manifest_path)(e)),
        };
        let corrupt = |reason: String| StoreError::StoreCorrupt { id, reason };
        let m: Manifest = serde_json::from_str(&text).map_err(|e| corrupt(format!("manifest: {e}")))?;
        if m.id != id {
            return Err(corrupt(format!("manifest id {} does not match directory", m.id)));
        }
        let source = std::fs::read_to_string(dir.join(SOURCE_FILE)).map_err(|e| corrupt(format!("source: {e}")))?;
        if let Err(diags) = validate(&source, &InterfaceContract::default()) {
            let first = diags.first().map(ToString::to_string).unwrap_or_default();
            return Err(corrupt(format!("source fails validation: {first}")));
        }
        Ok(ShaderArtifact {
            id,
            intent: m.intent,
            source,
            created_at: m.created_at,
            attempts_used: m.attempts_used,
            saved: m.saved,
            title: m.title,
        })
    }

    /// Summaries sorted newest first, ties broken by id. Corrupt entries are
    /// skipped with a warning so one bad directory cannot hide the rest.
    pub fn list(&self) -> Result<Vec<ArtifactSummary>, StoreError> {
        let _g = self.guard();
        let entries = std::fs::read_dir(&self.root).map_err(io(&self.root))?;
        let mut out = Vec::new();
        for entry in entries {
            let entry = entry.map_err(io(&self.root))?;
            let Some(id) = entry.file_name().to_str().and_then(|n| Uuid::parse_str(n).ok()) else {
                continue;
            };
            match self.read(id) {
                Ok(a) => out.push(a.summary()),
                Err(StoreError::NotFound(_)) => {}
                Err(e) => log::warn!("skipping artifact: {e}"),
            }
        }
        out.sort_by(|a, b| b.created_at.cmp(&a.created_at).then(a.id.cmp(&b.id)));
        Ok(out)
    }

    /// Marks an artifact as kept by the user.
    pub fn mark_saved(&self, id: Uuid) -> Result<ShaderArtifact, StoreError> {
        let _g = self.guard();
        let mut a = self.read(id)?;
        if !a.saved {
            a.saved = true;
            self.write(&a)?;
        }
        Ok(a)
    }

    pub fn delete(&self, id: Uuid) -> Result<(), StoreError> {
        let _g = self.guard();
        let dir = self.dir(id);
        if !dir.join(MANIFEST_FILE).exists() {
            return Err(StoreError::NotFound(id));
        }
        std::fs::remove_dir_all(&dir).map_err(io(&dir))
    }
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io { path: path.display().to_string(), source }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), StoreError> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes).map_err(io(&tmp))?;
    std::fs::rename(&tmp, path).map_err(io(path))
}

//! Chat-completion transport, code extraction and the transcription proxy.

use std::fmt;
use std::io::Cursor;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value as Json};
use shaderlens_core::prompt::PromptBundle;
use thiserror::Error;

pub const DEFAULT_MODEL: &str = "o3-mini";
pub const DEFAULT_TEMPERATURE: f64 = 0.2;
pub const DEFAULT_ENDPOINT: &str = "https://api.openai.com/v1/chat/completions";
pub const DEFAULT_TRANSCRIBE_ENDPOINT: &str = "https://api.openai.com/v1/audio/transcriptions";
pub const DEFAULT_TRANSCRIBE_MODEL: &str = "whisper-1";
/// Fixture read by the mock provider's `transcribe`.
pub const TRANSCRIPT_FIXTURE: &str = "transcript.txt";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProviderKind {
    #[default]
    OpenaiCompatible,
    Mock,
}

/// API key wrapper. Its `Debug` output is redacted and it is never
/// serialized, so configs and logs cannot leak it.
#[derive(Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(transparent)]
pub struct Secret(String);

impl Secret {
    pub fn new(value: impl Into<String>) -> Self {
        Secret(value.into())
    }

    pub fn expose(&self) -> &str {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Debug for Secret {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.0.is_empty() { "Secret(<empty>)" } else { "Secret(<redacted>)" })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProviderConfig {
    pub kind: ProviderKind,
    pub endpoint: String,
    pub model: String,
    #[serde(skip_serializing)]
    pub api_key: Secret,
    pub temperature: f64,
    pub timeout_secs: f64,
    /// Directory of numbered responses (`001.txt`, `002.txt`, ...); mock only.
    pub fixtures: Option<PathBuf>,
    pub transcribe_endpoint: String,
    pub transcribe_model: String,
}

impl Default for ProviderConfig {
    fn default() -> Self {
        ProviderConfig {
            kind: ProviderKind::OpenaiCompatible,
            endpoint: DEFAULT_ENDPOINT.to_owned(),
            model: DEFAULT_MODEL.to_owned(),
            api_key: Secret::default(),
            temperature: DEFAULT_TEMPERATURE,
            timeout_secs: 120.0,
            fixtures: None,
            transcribe_endpoint: DEFAULT_TRANSCRIBE_ENDPOINT.to_owned(),
            transcribe_model: DEFAULT_TRANSCRIBE_MODEL.to_owned(),
        }
    }
}

impl ProviderConfig {
    pub fn mock(fixtures: impl Into<PathBuf>) -> Self {
        ProviderConfig { kind: ProviderKind::Mock, fixtures: Some(fixtures.into()), ..Default::default() }
    }

    pub fn openai_compatible(endpoint: impl Into<String>, api_key: Secret) -> Self {
        ProviderConfig { endpoint: endpoint.into(), api_key, ..Default::default() }
    }

    pub fn check(&self) -> Result<(), LlmError> {
        if !(0.0..=2.0).contains(&self.temperature) {
            return Err(LlmError::Config(format!("temperature {} outside [0, 2]", self.temperature)));
        }
        if !(self.timeout_secs.is_finite() && self.timeout_secs > 0.0) {
            return Err(LlmError::Config(format!("timeout {} must be positive", self.timeout_secs)));
        }
        match self.kind {
            ProviderKind::Mock if self.fixtures.is_none() => {
                Err(LlmError::Config("mock provider requires a fixtures directory".into()))
            }
            ProviderKind::OpenaiCompatible if self.endpoint.trim().is_empty() => {
                Err(LlmError::Config("openai-compatible provider requires an endpoint".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn provider_id(&self) -> String {
        match self.kind {
            ProviderKind::Mock => "mock".to_owned(),
            ProviderKind::OpenaiCompatible => format!("openai-compatible:{}", self.model),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Completion {
    pub text: String,
    pub latency_ms: f64,
    pub provider_id: String,
}

#[derive(Debug, Error)]
pub enum LlmError {
    #[error("invalid provider config: {0}")]
    Config(String),
    #[error("network error{}: {message}", status.map(|s| format!(" (HTTP {s})")).unwrap_or_default())]
    Network { status: Option<u16>, message: String },
    #[error("authentication rejected (HTTP {status})")]
    Auth { status: u16 },
    #[error("rate limited{}", retry_after.map(|s| format!(", retry after {s} s")).unwrap_or_default())]
    RateLimited { retry_after: Option<u64> },
    #[error("malformed provider response: {0}")]
    MalformedResponse(String),
    #[error("unsupported audio: {0}")]
    UnsupportedAudio(String),
    #[error("mock fixtures exhausted after {used} responses in {dir}")]
    FixturesExhausted { dir: String, used: usize },
    #[error("reading mock fixture {path}: {source}")]
    Fixture { path: String, source: std::io::Error },
}

/// Shareable provider handle. Calls go through a per-job [`Session`].
#[derive(Debug, Clone)]
pub struct LlmClient {
    cfg: ProviderConfig,
    http: reqwest::Client,
}

impl LlmClient {
    pub fn new(cfg: ProviderConfig) -> Result<Self, LlmError> {
        cfg.check()?;
        let http = reqwest::Client::builder()
            .timeout(Duration::from_secs_f64(cfg.timeout_secs))
            .build()
            .map_err(|e| LlmError::Config(e.to_string()))?;
        Ok(LlmClient { cfg, http })
    }

    pub fn config(&self) -> &ProviderConfig {
        &self.cfg
    }

    /// Opens a session with its own mock cursor and request log.
    pub fn session(&self) -> Session {
        Session { client: self.clone(), cursor: 0, sent: Vec::new() }
    }

    pub async fn transcribe(&self, audio: &[u8]) -> Result<String, LlmError> {
        check_wav(audio)?;
        match self.cfg.kind {
            ProviderKind::Mock => {
                let path = self.fixtures_dir().join(TRANSCRIPT_FIXTURE);
                let text = read_fixture(&path)?;
                Ok(text.trim().to_owned())
            }
            ProviderKind::OpenaiCompatible => self.transcribe_http(audio).await,
        }
    }

    fn fixtures_dir(&self) -> &Path {
        self.cfg.fixtures.as_deref().unwrap_or(Path::new("."))
    }

    async fn complete_http(&self, bundle: &PromptBundle) -> Result<String, LlmError> {
        let body = json!({
            "model": self.cfg.model,
            "temperature": self.cfg.temperature,
            "messages": [
                {"role": "system", "content": bundle.system},
                {"role": "user", "content": bundle.user},
            ],
        });
        let mut req = self.http.post(&self.cfg.endpoint).json(&body);
        if !self.cfg.api_key.is_empty() {
            req = req.bearer_auth(self.cfg.api_key.expose());
        }
        let json = send(req).await?;
        json.pointer("/choices/0/message/content")
            .and_then(Json::as_str)
            .map(str::to_owned)
            .ok_or_else(|| LlmError::MalformedResponse("no choices[0].message.content".into()))
    }

    async fn transcribe_http(&self, audio: &[u8]) -> Result<String, LlmError> {
        let part = reqwest::multipart::Part::bytes(audio.to_vec())
            .file_name("audio.wav")
            .mime_str("audio/wav")
            .map_err(|e| LlmError::Config(e.to_string()))?;
        let form = reqwest::multipart::Form::new().text("model", self.cfg.transcribe_model.clone()).part("file", part);
        let mut req = self.http.post(&self.cfg.transcribe_endpoint).multipart(form);
        if !self.cfg.api_key.is_empty() {
            req = req.bearer_auth(self.cfg.api_key.expose());
        }
        let json = send(req).await?;
        json.get("text")
            .and_then(Json::as_str)
            .map(str::to_owned)
            .ok_or_else(|| LlmError::MalformedResponse("no text field".into()))
    }
}

/// One job's view of the provider. The mock cursor is session-local, so
/// concurrent jobs each replay their fixture script from the start.
#[derive(Debug)]
pub struct Session {
    client: LlmClient,
    cursor: usize,
    sent: Vec<PromptBundle>,
}

impl Session {
    pub async fn complete(&mut self, bundle: &PromptBundle) -> Result<Completion, LlmError> {
        let start = Instant::now();
        self.sent.push(bundle.clone());
        let text = match self.client.cfg.kind {
            ProviderKind::Mock => self.next_fixture()?,
            ProviderKind::OpenaiCompatible => self.client.complete_http(bundle).await?,
        };
        Ok(Completion {
            text,
            latency_ms: start.elapsed().as_secs_f64() * 1e3,
            provider_id: self.client.cfg.provider_id(),
        })
    }

    /// Every bundle passed to `complete`, in order.
    pub fn sent(&self) -> &[PromptBundle] {
        &self.sent
    }

    fn next_fixture(&mut self) -> Result<String, LlmError> {
        let dir = self.client.fixtures_dir();
        let files = numbered_fixtures(dir)?;
        let path = files.get(self.cursor).ok_or_else(|| LlmError::FixturesExhausted {
            dir: dir.display().to_string(),
            used: self.cursor,
        })?;
        let text = read_fixture(path)?;
        self.cursor += 1;
        Ok(text)
    }
}

/// Files named `<digits>.txt`, ordered by their number.
fn numbered_fixtures(dir: &Path) -> Result<Vec<PathBuf>, LlmError> {
    let entries = std::fs::read_dir(dir)
        .map_err(|source| LlmError::Fixture { path: dir.display().to_string(), source })?;
    let mut files: Vec<(u64, PathBuf)> = entries
        .filter_map(Result::ok)
        .filter_map(|e| {
            let path = e.path();
            let stem = path.file_stem()?.to_str()?;
            let n = (path.extension()? == "txt" && stem.bytes().all(|b| b.is_ascii_digit()))
                .then(|| stem.parse().ok())??;
            Some((n, path))
        })
        .collect();
    files.sort();
    Ok(files.into_iter().map(|(_, p)| p).collect())
}

/// Writes `responses` as `001.txt`, `002.txt`, ... into `dir`, the layout
/// the mock provider replays.
pub fn write_fixture_script<S: AsRef<str>>(dir: &Path, responses: &[S]) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for (i, r) in responses.iter().enumerate() {
        std::fs::write(dir.join(format!("{:03}.txt", i + 1)), r.as_ref())?;
    }
    Ok(())
}

fn read_fixture(path: &Path) -> Result<String, LlmError> {
    std::fs::read_to_string(path).map_err(|source| LlmError::Fixture { path: path.display().to_string(), source })
}

async fn send(req: reqwest::RequestBuilder) -> Result<Json, LlmError> {
    let resp = req.send().await.map_err(|e| LlmError::Network { status: None, message: e.to_string() })?;
    let status = resp.status().as_u16();
    match status {
        401 | 403 => return Err(LlmError::Auth { status }),
        429 => {
            let retry_after = resp
                .headers()
                .get(reqwest::header::RETRY_AFTER)
                .and_then(|v| v.to_str().ok())
                .and_then(|v| v.trim().parse().ok());
            return Err(LlmError::RateLimited { retry_after });
        }
        _ => {}
    }
    let body = resp.text().await.map_err(|e| LlmError::Network { status: Some(status), message: e.to_string() })?;
    if !(200..300).contains(&status) {
        let mut message = body;
        message.truncate(200);
        return Err(LlmError::Network { status: Some(status), message });
    }
    serde_json::from_str(&body).map_err(|e| LlmError::MalformedResponse(e.to_string()))
}

/// Accepts 16-bit PCM WAV with one or two channels.
pub fn check_wav(audio: &[u8]) -> Result<(), LlmError> {
    if audio.is_empty() {
        return Err(LlmError::UnsupportedAudio("empty payload".into()));
    }
    let reader = hound::WavReader::new(Cursor::new(audio)).map_err(|e| LlmError::UnsupportedAudio(e.to_string()))?;
    let spec = reader.spec();
    if spec.sample_format != hound::SampleFormat::Int || spec.bits_per_sample != 16 {
        return Err(LlmError::UnsupportedAudio(format!(
            "expected 16-bit PCM, got {} bits {:?}",
            spec.bits_per_sample, spec.sample_format
        )));
    }
    if !(1..=2).contains(&spec.channels) {
        return Err(LlmError::UnsupportedAudio(format!("{} channels", spec.channels)));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("response contains no code block")]
    NoCodeBlock,
    #[error("response contains {0} code blocks and none defines main")]
    AmbiguousBlocks(usize),
}

const SHADER_TAGS: [&str; 4] = ["glsl", "hlsl", "shader", "frag"];

/// Pulls the shader out of a model response: the first fenced block that
/// contains `void main`, or the only block if there is just one. Blocks
/// tagged with another language are ignored; an unterminated final fence
/// runs to the end of the text.
pub fn extract_code(response: &str) -> Result<String, ExtractError> {
    let mut blocks: Vec<String> = Vec::new();
    let mut open: Option<(bool, Vec<&str>)> = None;
    for line in response.lines() {
        let trimmed = line.trim_start();
        match open.take() {
            None => {
                if let Some(tag) = trimmed.strip_prefix("```") {
                    let tag = tag.trim().to_ascii_lowercase();
                    let wanted = tag.is_empty() || SHADER_TAGS.contains(&tag.as_str());
                    open = Some((wanted, Vec::new()));
                }
            }
            Some((wanted, mut body)) => {
                if trimmed.starts_with("```") && trimmed.trim_end() == "```" {
                    if wanted {
                        blocks.push(body.join("\n"));
                    }
                } else {
                    body.push(line);
                    open = Some((wanted, body));
                }
            }
        }
    }
    if let Some((true, body)) = open {
        blocks.push(body.join("\n"));
    }
    if let Some(b) = blocks.iter().find(|b| b.contains("void main")) {
        return Ok(b.clone());
    }
    match blocks.len() {
        0 => Err(ExtractError::NoCodeBlock),
        1 => Ok(blocks.pop().unwrap_or_default()),
        n => Err(ExtractError::AmbiguousBlocks(n)),
    }
}

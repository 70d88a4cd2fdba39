//! OpenAI-compatible transport against a loopback stub.

use std::io::Cursor;
use std::sync::{Arc, Mutex};

use axum::extract::{Multipart, State};
use axum::http::{HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::post;
use axum::{Json, Router};
use serde_json::{json, Value};
use shaderlens_core::prompt::PromptBundle;
use shaderlens_pipeline::{LlmClient, LlmError, ProviderConfig, Secret};

#[derive(Clone, Default)]
struct Seen {
    chat: Arc<Mutex<Vec<(Option<String>, Value)>>>,
    upload: Arc<Mutex<Vec<(String, usize)>>>,
}

async fn chat(State(seen): State<Seen>, headers: HeaderMap, Json(body): Json<Value>) -> Response {
    let auth = headers.get("authorization").map(|v| v.to_str().unwrap().to_owned());
    seen.chat.lock().unwrap().push((auth, body));
    Json(json!({"choices": [{"message": {"role": "assistant", "content": "```glsl\nvoid main(){}\n```"}}]}))
        .into_response()
}

async fn transcribe(State(seen): State<Seen>, mut form: Multipart) -> Response {
    while let Some(field) = form.next_field().await.unwrap() {
        let name = field.name().unwrap().to_owned();
        let len = field.bytes().await.unwrap().len();
        seen.upload.lock().unwrap().push((name, len));
    }
    Json(json!({"text": "grayscale except green"})).into_response()
}

async fn serve() -> (String, Seen) {
    let seen = Seen::default();
    let app = Router::new()
        .route("/ok", post(chat))
        .route("/audio", post(transcribe))
        .route("/unauthorized", post(|| async { StatusCode::UNAUTHORIZED }))
        .route("/forbidden", post(|| async { StatusCode::FORBIDDEN }))
        .route("/limited", post(|| async { (StatusCode::TOO_MANY_REQUESTS, [("retry-after", "7")], "slow down") }))
        .route("/limited-bare", post(|| async { StatusCode::TOO_MANY_REQUESTS }))
        .route("/no-choices", post(|| async { Json(json!({"id": "x", "object": "chat.completion"})) }))
        .route("/not-json", post(|| async { "<html>gateway</html>" }))
        .route("/boom", post(|| async { (StatusCode::INTERNAL_SERVER_ERROR, "internal") }))
        .route(
            "/slow",
            post(|| async {
                tokio::time::sleep(std::time::Duration::from_secs(5)).await;
                "late"
            }),
        )
        .with_state(seen.clone());
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let base = format!("http://{}", listener.local_addr().unwrap());
    tokio::spawn(async move { axum::serve(listener, app).await.unwrap() });
    (base, seen)
}

fn client(url: String) -> LlmClient {
    let mut cfg = ProviderConfig::openai_compatible(url.clone(), Secret::new("sk-test-key"));
    cfg.transcribe_endpoint = url;
    cfg.timeout_secs = 1.0;
    LlmClient::new(cfg).unwrap()
}

fn bundle() -> PromptBundle {
    PromptBundle { system: "SYS".into(), user: "USER".into(), attempt: 1 }
}

async fn complete(url: String) -> Result<String, LlmError> {
    client(url).session().complete(&bundle()).await.map(|c| c.text)
}

fn wav() -> Vec<u8> {
    let spec = hound::WavSpec { channels: 1, sample_rate: 16_000, bits_per_sample: 16, sample_format: hound::SampleFormat::Int };
    let mut out = Cursor::new(Vec::new());
    let mut w = hound::WavWriter::new(&mut out, spec).unwrap();
    for i in 0..160 {
        w.write_sample((i * 100) as i16).unwrap();
    }
    w.finalize().unwrap();
    out.into_inner()
}

#[tokio::test]
async fn successful_completion_sends_two_message_chat() {
    let (base, seen) = serve().await;
    let c = client(format!("{base}/ok")).session().complete(&bundle()).await.unwrap();
    assert_eq!(c.text, "```glsl\nvoid main(){}\n```");
    assert_eq!(c.provider_id, "openai-compatible:o3-mini");
    assert!(c.latency_ms >= 0.0);

    let (auth, body) = seen.chat.lock().unwrap()[0].clone();
    assert_eq!(auth.as_deref(), Some("Bearer sk-test-key"));
    assert_eq!(body["model"], "o3-mini");
    assert_eq!(body["temperature"], 0.2);
    assert_eq!(body["messages"], json!([{"role": "system", "content": "SYS"}, {"role": "user", "content": "USER"}]));
}

#[tokio::test]
async fn status_codes_map_to_errors() {
    let (base, _) = serve().await;
    assert!(matches!(complete(format!("{base}/unauthorized")).await, Err(LlmError::Auth { status: 401 })));
    assert!(matches!(complete(format!("{base}/forbidden")).await, Err(LlmError::Auth { status: 403 })));
    assert!(matches!(
        complete(format!("{base}/limited")).await,
        Err(LlmError::RateLimited { retry_after: Some(7) })
    ));
    assert!(matches!(
        complete(format!("{base}/limited-bare")).await,
        Err(LlmError::RateLimited { retry_after: None })
    ));
    assert!(matches!(complete(format!("{base}/no-choices")).await, Err(LlmError::MalformedResponse(_))));
    assert!(matches!(complete(format!("{base}/not-json")).await, Err(LlmError::MalformedResponse(_))));
    assert!(matches!(
        complete(format!("{base}/boom")).await,
        Err(LlmError::Network { status: Some(500), .. })
    ));
}

#[tokio::test]
async fn unreachable_and_timeout_are_network_errors() {
    let (base, _) = serve().await;
    let r = complete(format!("{base}/slow")).await;
    assert!(matches!(r, Err(LlmError::Network { status: None, .. })), "{r:?}");

    let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let dead = format!("http://{}/v1", listener.local_addr().unwrap());
    drop(listener);
    assert!(matches!(complete(dead).await, Err(LlmError::Network { status: None, .. })));
}

#[tokio::test]
async fn transcription_uploads_multipart() {
    let (base, seen) = serve().await;
    let audio = wav();
    let text = client(format!("{base}/audio")).transcribe(&audio).await.unwrap();
    assert_eq!(text, "grayscale except green");
    let upload = seen.upload.lock().unwrap().clone();
    assert!(upload.contains(&("model".to_owned(), "whisper-1".len())));
    assert!(upload.contains(&("file".to_owned(), audio.len())));

    let r = client(format!("{base}/boom")).transcribe(&audio).await;
    assert!(matches!(r, Err(LlmError::Network { status: Some(500), .. })));
    let r = client(format!("{base}/audio")).transcribe(&[]).await;
    assert!(matches!(r, Err(LlmError::UnsupportedAudio(_))));
}

#[tokio::test]
async fn mock_transcription_reads_fixture() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("transcript.txt"), "under the sea\n").unwrap();
    let c = LlmClient::new(ProviderConfig::mock(tmp.path())).unwrap();
    assert_eq!(c.transcribe(&wav()).await.unwrap(), "under the sea");
    assert!(matches!(c.transcribe(&[]).await, Err(LlmError::UnsupportedAudio(_))));
}

#[tokio::test]
async fn mock_replays_numbered_fixtures_in_order() {
    let tmp = tempfile::tempdir().unwrap();
    for (name, text) in [("002.txt", "B"), ("001.txt", "A"), ("010.txt", "C"), ("notes.md", "x"), ("transcript.txt", "t")] {
        std::fs::write(tmp.path().join(name), text).unwrap();
    }
    let c = LlmClient::new(ProviderConfig::mock(tmp.path())).unwrap();
    let mut s = c.session();
    let mut got = Vec::new();
    for _ in 0..3 {
        let comp = s.complete(&bundle()).await.unwrap();
        assert_eq!(comp.provider_id, "mock");
        got.push(comp.text);
    }
    assert_eq!(got, ["A", "B", "C"]);
    assert!(matches!(s.complete(&bundle()).await, Err(LlmError::FixturesExhausted { used: 3, .. })));
    assert_eq!(c.session().complete(&bundle()).await.unwrap().text, "A", "fresh session restarts");
}

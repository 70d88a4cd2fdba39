use std::collections::VecDeque;
use std::convert::Infallible;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{DefaultBodyLimit, Multipart, Path, State};
use axum::http::StatusCode;
use axum::response::sse::{Event, KeepAlive, Sse};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{middleware, Json, Router};
use serde::Deserialize;
use serde_json::json;
use shaderlens_core::{render_frame, validate, InterfaceContract, ValidatedShader};
use shaderlens_pipeline::{GenerationJob, JobHandle, LlmError, StoreError, SubmitError};
use tokio::sync::watch;
use tower_http::services::ServeDir;
use uuid::Uuid;

use crate::codec::{decode_png, encode_png, DecodeError};
use crate::error::{normalize_errors, png_response, ApiError};
use crate::{AppState, MULTIPART_LIMIT, SOURCE_LIMIT};

type ApiResult<T> = Result<T, ApiError>;

pub fn router(state: AppState) -> Router {
    let uploads = Router::new()
        .route("/api/render", post(render))
        .route("/api/transcribe", post(transcribe))
        .layer(DefaultBodyLimit::max(MULTIPART_LIMIT));
    let api = Router::new()
        .route("/api/generate", post(generate))
        .route("/api/jobs/{id}", get(job))
        .route("/api/jobs/{id}/events", get(job_events))
        .route("/api/shaders", get(list_shaders))
        .route("/api/shaders/{id}", get(get_shader).delete(delete_shader))
        .route("/api/shaders/{id}/save", post(save_shader))
        .route("/api/validate", post(validate_source))
        // Room for JSON framing and escapes around a maximal source.
        .layer(DefaultBodyLimit::max(2 * SOURCE_LIMIT));
    let mut app = api.merge(uploads);
    app = match &state.static_dir {
        Some(dir) => app.fallback_service(ServeDir::new(dir)),
        None => app.fallback(|| async { ApiError::not_found("route") }),
    };
    app.layer(middleware::from_fn(normalize_errors)).with_state(state)
}

fn json_body<T>(body: Result<Json<T>, JsonRejection>) -> ApiResult<T> {
    match body {
        Ok(Json(v)) => Ok(v),
        Err(e) if e.status() == StatusCode::PAYLOAD_TOO_LARGE => {
            Err(ApiError::new(StatusCode::PAYLOAD_TOO_LARGE, "payload_too_large", e.body_text()))
        }
        Err(e) => Err(ApiError::bad_request("invalid_json", e.body_text())),
    }
}

fn parse_id(raw: &str, what: &str) -> ApiResult<Uuid> {
    Uuid::parse_str(raw).map_err(|_| ApiError::not_found(format!("{what} {raw}")))
}

fn store_error(e: StoreError) -> ApiError {
    match e {
        StoreError::NotFound(id) => ApiError::not_found(format!("shader {id}")),
        StoreError::StoreCorrupt { .. } => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "store_corrupt", e.to_string()),
        StoreError::Io { .. } => ApiError::internal(e.to_string()),
    }
}

#[derive(Deserialize)]
struct GenerateRequest {
    intent: String,
}

async fn generate(State(s): State<AppState>, body: Result<Json<GenerateRequest>, JsonRejection>) -> ApiResult<Response> {
    let req = json_body(body)?;
    match s.queue.submit(&req.intent) {
        Ok(job) => Ok((StatusCode::ACCEPTED, Json(json!({ "job_id": job.id() }))).into_response()),
        Err(SubmitError::BlankIntent) => Err(ApiError::bad_request("blank_intent", "intent must not be blank")),
        Err(e @ SubmitError::QueueFull(_)) => Err(ApiError::new(StatusCode::TOO_MANY_REQUESTS, "backpressure", e.to_string())),
    }
}

fn find_job(s: &AppState, raw: &str) -> ApiResult<Arc<JobHandle>> {
    let id = parse_id(raw, "job")?;
    s.queue.get(id).ok_or_else(|| ApiError::not_found(format!("job {id}")))
}

async fn job(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<GenerationJob>> {
    Ok(Json(find_job(&s, &id)?.snapshot()))
}

struct EventCursor {
    job: Arc<JobHandle>,
    changes: watch::Receiver<usize>,
    next: usize,
    queued: VecDeque<GenerationJob>,
    finished: bool,
}

/// Replays the transitions recorded so far, then follows live ones; the
/// stream ends after the terminal status.
async fn job_events(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    let job = find_job(&s, &id)?;
    let changes = job.subscribe();
    let cursor = EventCursor { job, changes, next: 0, queued: VecDeque::new(), finished: false };
    let stream = futures::stream::unfold(cursor, |mut c| async move {
        loop {
            if let Some(snap) = c.queued.pop_front() {
                let event = Event::default().event("status").json_data(&snap).expect("snapshot serializes");
                return Some((Ok::<_, Infallible>(event), c));
            }
            if c.finished {
                return None;
            }
            let fresh = c.job.history_since(c.next);
            if fresh.is_empty() {
                c.changes.changed().await.ok()?;
                continue;
            }
            c.next += fresh.len();
            c.finished = fresh.last().is_some_and(|j| j.status.is_terminal());
            c.queued.extend(fresh);
        }
    });
    Ok(Sse::new(stream).keep_alive(KeepAlive::default()))
}

async fn list_shaders(State(s): State<AppState>) -> ApiResult<Response> {
    let list = s.store.list().map_err(store_error)?;
    Ok(Json(list).into_response())
}

async fn get_shader(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult<Response> {
    let id = parse_id(&id, "shader")?;
    Ok(Json(s.store.load(id).map_err(store_error)?).into_response())
}

async fn save_shader(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult<Response> {
    let id = parse_id(&id, "shader")?;
    Ok(Json(s.store.mark_saved(id).map_err(store_error)?).into_response())
}

async fn delete_shader(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult<Response> {
    let id = parse_id(&id, "shader")?;
    s.store.delete(id).map_err(store_error)?;
    Ok(Json(json!({ "deleted": id })).into_response())
}

#[derive(Deserialize)]
struct ValidateRequest {
    source: String,
}

fn check_source_size(source: &str) -> ApiResult<()> {
    if source.len() > SOURCE_LIMIT {
        return Err(ApiError::new(
            StatusCode::PAYLOAD_TOO_LARGE,
            "payload_too_large",
            format!("source is {} bytes; the limit is {SOURCE_LIMIT}", source.len()),
        ));
    }
    Ok(())
}

async fn validate_source(body: Result<Json<ValidateRequest>, JsonRejection>) -> ApiResult<Response> {
    let req = json_body(body)?;
    check_source_size(&req.source)?;
    let diagnostics = validate(&req.source, &InterfaceContract::default()).err().unwrap_or_default();
    Ok(Json(json!({ "diagnostics": diagnostics })).into_response())
}

fn multipart_error(e: axum::extract::multipart::MultipartError) -> ApiError {
    let status = e.status();
    if status == StatusCode::PAYLOAD_TOO_LARGE {
        ApiError::new(status, "payload_too_large", e.body_text())
    } else {
        ApiError::bad_request("invalid_multipart", e.body_text())
    }
}

async fn text_field(field: axum::extract::multipart::Field<'_>) -> ApiResult<String> {
    let name = field.name().unwrap_or_default().to_owned();
    field
        .text()
        .await
        .map_err(|e| ApiError::bad_request("invalid_multipart", format!("field {name}: {}", e.body_text())))
}

/// Renders a shader (stored by id, or raw source that is validated first)
/// over the uploaded PNG.
async fn render(State(s): State<AppState>, multipart: Result<Multipart, axum::extract::multipart::MultipartRejection>) -> ApiResult<Response> {
    let mut form = multipart.map_err(|e| ApiError::bad_request("invalid_multipart", e.body_text()))?;
    let (mut shader_id, mut source, mut image, mut time) = (None, None, None, None);
    while let Some(field) = form.next_field().await.map_err(multipart_error)? {
        match field.name().unwrap_or_default() {
            "shader_id" => shader_id = Some(text_field(field).await?),
            "source" => source = Some(text_field(field).await?),
            "time" => time = Some(text_field(field).await?),
            "image" => image = Some(field.bytes().await.map_err(multipart_error)?),
            _ => {}
        }
    }
    let time: f32 = match time.as_deref().map(str::trim) {
        None | Some("") => 0.0,
        Some(t) => t
            .parse()
            .ok()
            .filter(|t: &f32| t.is_finite())
            .ok_or_else(|| ApiError::bad_request("invalid_time", format!("time {t:?} is not a finite number")))?,
    };
    let source = match (shader_id, source) {
        (Some(id), None) => {
            let id = parse_id(id.trim(), "shader")?;
            s.store.load(id).map_err(store_error)?.source
        }
        (None, Some(src)) => src,
        _ => return Err(ApiError::bad_request("missing_shader", "send exactly one of shader_id or source")),
    };
    check_source_size(&source)?;
    let shader = validate(&source, &InterfaceContract::default()).map_err(|diags| {
        let listed = diags.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ");
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "shader_invalid", listed)
    })?;
    let image = image.ok_or_else(|| ApiError::bad_request("invalid_png", "missing image field"))?;
    let png = tokio::task::spawn_blocking(move || render_png(&shader, &image, time))
        .await
        .map_err(|e| ApiError::internal(e.to_string()))??;
    Ok(png_response(png))
}

fn render_png(shader: &ValidatedShader, png: &[u8], time: f32) -> ApiResult<Vec<u8>> {
    let input = decode_png(png).map_err(|e| match e {
        DecodeError::TooLarge { .. } => ApiError::new(StatusCode::PAYLOAD_TOO_LARGE, "image_too_large", e.to_string()),
        DecodeError::Invalid(_) => ApiError::bad_request("invalid_png", e.to_string()),
    })?;
    let out = render_frame(shader, &input, time)
        .map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "render_failed", e.to_string()))?;
    Ok(encode_png(&out))
}

async fn transcribe(State(s): State<AppState>, multipart: Result<Multipart, axum::extract::multipart::MultipartRejection>) -> ApiResult<Response> {
    let mut form = multipart.map_err(|e| ApiError::bad_request("invalid_multipart", e.body_text()))?;
    let mut audio = None;
    while let Some(field) = form.next_field().await.map_err(multipart_error)? {
        if audio.is_none() && (field.name() == Some("audio") || field.file_name().is_some()) {
            audio = Some(field.bytes().await.map_err(multipart_error)?);
        }
    }
    let audio = audio.ok_or_else(|| ApiError::bad_request("missing_audio", "no audio field"))?;
    match s.client.transcribe(&audio).await {
        Ok(text) => Ok(Json(json!({ "text": text })).into_response()),
        Err(e @ LlmError::UnsupportedAudio(_)) => Err(ApiError::bad_request("unsupported_audio", e.to_string())),
        Err(e @ (LlmError::Network { .. } | LlmError::Auth { .. } | LlmError::RateLimited { .. } | LlmError::MalformedResponse(_))) => {
            Err(ApiError::new(StatusCode::BAD_GATEWAY, "upstream_error", e.to_string()))
        }
        Err(e) => Err(ApiError::internal(e.to_string())),
    }
}

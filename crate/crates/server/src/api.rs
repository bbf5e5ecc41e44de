use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Path, Request, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use cgaedit_core::llm::{LlmTransport, StrategyKind};
use cgaedit_core::pipeline::{EditConfig, SceneStore, StoreEvent};
use cgaedit_core::scene::load_scene;
use serde::Deserialize;
use serde_json::{json, Value};
use tokio::sync::broadcast::error::RecvError;
use tower_http::services::ServeDir;

use crate::error::ApiError;
use crate::hub::{scene_json, Hub, StreamMessage};

pub const VERSION_HEADER: &str = "x-scene-version";

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub default_strategy: StrategyKind,
    pub edit: EditConfig,
    /// When set, every `/scenes` request needs `Authorization: Bearer <token>`
    /// (or `?token=` for browsers opening a WebSocket).
    pub token: Option<String>,
    /// Built web client, served at `/`.
    pub static_dir: Option<PathBuf>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            default_strategy: StrategyKind::Cga,
            edit: EditConfig::default(),
            token: None,
            static_dir: None,
        }
    }
}

struct Inner {
    store: SceneStore,
    transport: Arc<dyn LlmTransport>,
    config: ServiceConfig,
    hub: Hub,
}

#[derive(Clone)]
pub struct AppState {
    inner: Arc<Inner>,
}

impl AppState {
    pub fn new(store: SceneStore, transport: Arc<dyn LlmTransport>, config: ServiceConfig) -> Self {
        Self {
            inner: Arc::new(Inner {
                store,
                transport,
                config,
                hub: Hub::default(),
            }),
        }
    }

    pub fn store(&self) -> &SceneStore {
        &self.inner.store
    }
}

pub fn router(state: AppState) -> Router {
    let scenes = Router::new()
        .route("/scenes", post(create_scene).get(list_scenes))
        .route("/scenes/{id}", get(get_scene))
        .route("/scenes/{id}/history", get(history))
        .route("/scenes/{id}/edits", post(submit_edit))
        .route("/scenes/{id}/undo", post(undo))
        .route("/scenes/{id}/stream", get(stream))
        .route_layer(middleware::from_fn_with_state(state.clone(), require_token));
    let app = scenes.route("/healthz", get(|| async { "ok" }));
    let app = match &state.inner.config.static_dir {
        Some(dir) => app.fallback_service(ServeDir::new(dir)),
        None => app,
    };
    app.with_state(state)
}

async fn require_token(State(state): State<AppState>, req: Request, next: Next) -> Response {
    let Some(token) = state.inner.config.token.as_deref() else {
        return next.run(req).await;
    };
    let from_header = req
        .headers()
        .get(header::AUTHORIZATION)
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.strip_prefix("Bearer "));
    let from_query = req
        .uri()
        .query()
        .and_then(|q| q.split('&').find_map(|kv| kv.strip_prefix("token=")));
    if from_header.or(from_query) == Some(token) {
        next.run(req).await
    } else {
        ApiError::new(StatusCode::UNAUTHORIZED, "unauthorized", "missing or wrong bearer token").into_response()
    }
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, ApiError> + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?
}

async fn create_scene(State(state): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let scene = load_scene(&body).map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_scene", e.to_string()))?;
    let id = scene.id.clone();
    let version = blocking(move || Ok(state.inner.store.insert(scene)?)).await?;
    Ok((StatusCode::CREATED, Json(json!({"id": id, "version": version}))).into_response())
}

async fn list_scenes(State(state): State<AppState>) -> Json<Value> {
    let store = &state.inner.store;
    let scenes: Vec<Value> = store
        .ids()
        .into_iter()
        .filter_map(|id| store.get(&id).ok().map(|(_, v)| json!({"id": id, "version": v})))
        .collect();
    Json(json!({ "scenes": scenes }))
}

/// Body is the scene file itself; the version travels in a header.
async fn get_scene(State(state): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let (scene, version) = state.inner.store.get(&id)?;
    let mut response = Json(scene_json(&scene)).into_response();
    response
        .headers_mut()
        .insert(VERSION_HEADER, HeaderValue::from(version));
    Ok(response)
}

async fn history(State(state): State<AppState>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let entries = state.inner.store.history(&id)?;
    Ok(Json(json!({ "id": id, "history": entries })))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EditRequest {
    query: String,
    #[serde(default)]
    strategy: Option<StrategyKind>,
    #[serde(default)]
    expected_version: Option<u64>,
}

async fn submit_edit(State(state): State<AppState>, Path(id): Path<String>, body: Bytes) -> Result<Json<Value>, ApiError> {
    let request: EditRequest = serde_json::from_slice(&body).map_err(|e| ApiError::bad_body(e.to_string()))?;
    let strategy = request.strategy.unwrap_or(state.inner.config.default_strategy);
    blocking(move || {
        let inner = &state.inner;
        let mut changed = Vec::new();
        let (scene, version, plan) = inner.store.edit(
            &id,
            &request.query,
            strategy,
            inner.transport.as_ref(),
            &inner.config.edit,
            request.expected_version,
            &mut |event| {
                if let StoreEvent::Updated { changed: c, .. } = &event {
                    changed.clone_from(c);
                }
                inner.hub.publish(&id, StreamMessage::from_event(event));
            },
        )?;
        let mut summary = serde_json::to_value(&plan).expect("plans serialize");
        if let Some(map) = summary.as_object_mut() {
            map.remove("prompt");
        }
        Ok(Json(json!({
            "id": id,
            "version": version,
            "changed": changed,
            "plan": summary,
            "scene": scene_json(&scene),
        })))
    })
    .await
}

async fn undo(State(state): State<AppState>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    blocking(move || {
        let inner = &state.inner;
        let mut changed = Vec::new();
        let (scene, version) = inner.store.undo_with_events(&id, &mut |event| {
            if let StoreEvent::Updated { changed: c, .. } = &event {
                changed.clone_from(c);
            }
            inner.hub.publish(&id, StreamMessage::from_event(event));
        })?;
        Ok(Json(json!({
            "id": id,
            "version": version,
            "changed": changed,
            "scene": scene_json(&scene),
        })))
    })
    .await
}

async fn stream(State(state): State<AppState>, Path(id): Path<String>, ws: WebSocketUpgrade) -> Result<Response, ApiError> {
    state.inner.store.get(&id)?;
    Ok(ws.on_upgrade(move |socket| forward(state, id, socket)))
}

/// Sends the current version first, then every progress message and every
/// newer commit. A client that falls behind gets the latest scene again.
async fn forward(state: AppState, id: String, mut socket: WebSocket) {
    let mut rx = state.inner.hub.subscribe(&id);
    let current = || {
        let (scene, version) = state.inner.store.get(&id).ok()?;
        Some(StreamMessage::update(&scene, version, Vec::new()))
    };
    let Some(first) = current() else {
        return;
    };
    let mut sent = match &first {
        StreamMessage::SceneUpdate { version, .. } => *version,
        StreamMessage::EditProgress { .. } => 0,
    };
    if socket.send(Message::text(first.to_text())).await.is_err() {
        return;
    }
    loop {
        let message = tokio::select! {
            incoming = socket.recv() => match incoming {
                Some(Ok(Message::Close(_))) | Some(Err(_)) | None => return,
                Some(Ok(_)) => continue,
            },
            next = rx.recv() => match next {
                Ok(m) => m,
                Err(RecvError::Lagged(_)) => match current() {
                    Some(m) => Arc::new(m),
                    None => return,
                },
                Err(RecvError::Closed) => return,
            },
        };
        if let StreamMessage::SceneUpdate { version, .. } = message.as_ref() {
            if *version <= sent {
                continue;
            }
            sent = *version;
        }
        if socket.send(Message::text(message.to_text())).await.is_err() {
            return;
        }
    }
}

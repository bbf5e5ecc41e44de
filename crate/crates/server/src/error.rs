use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use cgaedit_core::pipeline::{EditError, StoreError};
use serde_json::json;

/// Error body sent to clients: `{"error": {"code", "message"}}`.
#[derive(Debug, thiserror::Error)]
#[error("{code}: {message}")]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            code,
            message: message.into(),
        }
    }

    pub fn bad_body(message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_body", message)
    }
}

fn edit_status(e: &EditError) -> StatusCode {
    match e.code() {
        "unknown_object" => StatusCode::NOT_FOUND,
        "unresolvable" => StatusCode::CONFLICT,
        "exhausted_retries" | "transport_error" | "missing_api_key" => StatusCode::BAD_GATEWAY,
        // invalid_query, not_a_versor, non_rigid_matrix, invalid_config, invalid_result
        _ => StatusCode::UNPROCESSABLE_ENTITY,
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        let message = e.to_string();
        match e {
            StoreError::NotFound(_) => Self::new(StatusCode::NOT_FOUND, "scene_not_found", message),
            StoreError::AlreadyExists(_) => Self::new(StatusCode::CONFLICT, "scene_exists", message),
            StoreError::VersionConflict { .. } => Self::new(StatusCode::CONFLICT, "version_conflict", message),
            StoreError::NothingToUndo => Self::new(StatusCode::CONFLICT, "nothing_to_undo", message),
            StoreError::Schema(_) => Self::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_scene", message),
            StoreError::Edit(e) => Self::new(edit_status(&e), e.code(), message),
            StoreError::Io(_) => Self::new(StatusCode::INTERNAL_SERVER_ERROR, "storage_error", message),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({"error": {"code": self.code, "message": self.message}});
        (self.status, Json(body)).into_response()
    }
}

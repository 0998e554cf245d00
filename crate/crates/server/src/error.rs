use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::Serialize;
use webcas_core::cas::CasError;
use webcas_core::exchange::ExchangeError;

/// An error response. The body is `{"error", "category", "detail"}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiError {
    pub status: StatusCode,
    pub category: String,
    pub detail: String,
}

#[derive(Serialize)]
struct Body<'a> {
    error: &'a str,
    category: &'a str,
    detail: &'a str,
}

impl ApiError {
    pub fn new(status: StatusCode, category: impl Into<String>, detail: impl Into<String>) -> Self {
        ApiError {
            status,
            category: category.into(),
            detail: detail.into(),
        }
    }

    pub fn unauthenticated(detail: impl Into<String>) -> Self {
        Self::new(StatusCode::UNAUTHORIZED, "not-authenticated", detail)
    }

    pub fn forbidden(detail: impl Into<String>) -> Self {
        Self::new(StatusCode::FORBIDDEN, "not-authorized", detail)
    }

    pub fn not_found(detail: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not-found", detail)
    }

    pub fn bad_request(category: &str, detail: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, category, detail)
    }

    pub fn internal(detail: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", detail)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = Body {
            error: self.status.canonical_reason().unwrap_or("error"),
            category: &self.category,
            detail: &self.detail,
        };
        (self.status, Json(body)).into_response()
    }
}

impl From<CasError> for ApiError {
    fn from(e: CasError) -> Self {
        let detail = e.to_string();
        match e {
            CasError::UnknownActor(_) | CasError::NotFound(_) => ApiError::not_found(detail),
            CasError::EmptyDocument => ApiError::bad_request("empty-document", detail),
            CasError::MissingExtension(_) => ApiError::bad_request("bad-file-name", detail),
            CasError::InvalidHandle(_) => ApiError::bad_request("invalid-handle", detail),
            CasError::Rdf(_) => ApiError::bad_request("malformed-rdf", detail),
            CasError::Integrity { .. } => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "integrity", detail),
            CasError::Io { .. } => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "storage", detail),
        }
    }
}

impl From<ExchangeError> for ApiError {
    fn from(e: ExchangeError) -> Self {
        let category = e.category();
        let detail = e.to_string();
        match e {
            ExchangeError::UnknownActor(_) | ExchangeError::UnknownSubject(_) => ApiError::not_found(detail),
            ExchangeError::Malformed(_)
            | ExchangeError::Integrity(_)
            | ExchangeError::UnsupportedVersion(_)
            | ExchangeError::Rdf(_) => ApiError::bad_request(category, detail),
            ExchangeError::Conflict { .. } => ApiError::new(StatusCode::CONFLICT, category, detail),
            ExchangeError::Cas(inner) => inner.into(),
            ExchangeError::DocumentMissing { .. } | ExchangeError::Io { .. } => {
                ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, category, detail)
            }
        }
    }
}

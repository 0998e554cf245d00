use std::sync::Arc;

use axum::extract::FromRequestParts;
use axum::http::request::Parts;
use webcas_core::cas::{AccessDecision, Actor, DenyReason};
use webcas_core::rdf::{Iri, QuadStore};
use webcas_core::webid::{extract_certificate_info, verify_webid, VerificationResult};

use crate::error::ApiError;
use crate::routes::AppState;

/// DER of the first certificate the TLS client presented, if any. Inserted
/// into every request of the connection by the accept loop.
#[derive(Debug, Clone, Default)]
pub struct PeerCertificate(pub Option<Arc<Vec<u8>>>);

/// Who is asking. `webid` is set only when WebID verification of the TLS
/// client certificate succeeded for this request.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Requester {
    pub webid: Option<Iri>,
    /// `no_certificate`, `bad_certificate` or a verification result kind.
    pub outcome: String,
    pub detail: String,
}

impl Requester {
    fn anonymous(outcome: &str, detail: impl Into<String>) -> Self {
        Requester {
            webid: None,
            outcome: outcome.to_owned(),
            detail: detail.into(),
        }
    }

    /// The verified WebID, or 401.
    pub fn require(&self) -> Result<&Iri, ApiError> {
        self.webid
            .as_ref()
            .ok_or_else(|| ApiError::unauthenticated(format!("{}: {}", self.outcome, self.detail)))
    }

    /// The configured actor behind the verified WebID: 401 without one, 403
    /// for a WebID that is not an actor of this server.
    pub fn own_actor(&self, state: &AppState) -> Result<Actor, ApiError> {
        let webid = self.require()?;
        state
            .service
            .actor_for_webid(webid)
            .cloned()
            .ok_or_else(|| ApiError::forbidden(format!("{webid} has no graph on this server")))
    }

    /// Read access to `owner`'s graph in `store`.
    pub fn authorize_read(&self, store: &QuadStore, owner: &Actor) -> Result<(), ApiError> {
        match webcas_core::cas::check_access(store, owner, self.webid.as_ref()) {
            AccessDecision::Allowed => Ok(()),
            AccessDecision::Denied(DenyReason::NotAuthenticated) => Err(self.require().unwrap_err()),
            AccessDecision::Denied(DenyReason::NotAuthorized) => Err(ApiError::forbidden(format!(
                "{} may not read {}",
                self.webid.as_ref().map(Iri::as_str).unwrap_or_default(),
                owner.name
            ))),
        }
    }
}

impl FromRequestParts<AppState> for Requester {
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, state: &AppState) -> Result<Self, Self::Rejection> {
        let Some(der) = parts.extensions.get::<PeerCertificate>().and_then(|p| p.0.clone()) else {
            return Ok(Requester::anonymous("no_certificate", "no client certificate presented"));
        };
        let fetcher = state.fetcher.clone();
        let verified = tokio::task::spawn_blocking(move || {
            extract_certificate_info(&der).map(|info| verify_webid(&info, fetcher.as_ref()))
        })
        .await
        .map_err(|e| ApiError::internal(e.to_string()))?;
        Ok(match verified {
            Err(e) => Requester::anonymous("bad_certificate", e.to_string()),
            Ok(VerificationResult::Verified(webid)) => Requester {
                detail: format!("verified {webid}"),
                webid: Some(webid),
                outcome: "verified".into(),
            },
            Ok(other) => Requester::anonymous(other.kind(), other.to_string()),
        })
    }
}

//! HTTPS front end for a [`ContentAccessService`].
//!
//! One TLS port serves everything. The server asks for a client
//! certificate but does not insist on one, so profiles and static files stay
//! public. Each request that carries a certificate is authenticated by
//! running WebID verification against the certificate's SAN URIs; the
//! result is never cached.
//!
//! Routes:
//!
//! | route                  | method | access                         |
//! |------------------------|--------|--------------------------------|
//! | `/static/...`          | GET    | public                         |
//! | `/webid/<actor>`       | GET    | public                         |
//! | `/store`               | GET    | graphs the requester may read  |
//! | `/store`               | POST   | requester's own graph          |
//! | `/upload`              | POST   | requester's own documents      |
//! | `/export/<owner>.zip`  | GET    | owner or granted WebIDs        |
//! | `/import`              | POST   | requester's own graph          |
//! | `/action/<name>`       | POST   | requester's own graph          |
//!
//! [`ContentAccessService`]: webcas_core::cas::ContentAccessService

mod api;
mod auth;
pub mod config;
mod error;
mod fetch;
mod routes;
mod server;
pub mod tls;

use std::path::{Path, PathBuf};

pub use auth::{PeerCertificate, Requester};
pub use config::{ActorConfig, ServerConfig};
pub use error::ApiError;
pub use fetch::ServerFetcher;
pub use routes::{router, AppState};
pub use server::WebCasServer;

#[derive(Debug, thiserror::Error)]
pub enum ServerError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("TLS setup: {0}")]
    Tls(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot bind {addr}: {source}")]
    Bind {
        addr: std::net::SocketAddr,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Cas(#[from] webcas_core::cas::CasError),
    #[error(transparent)]
    Rdf(#[from] webcas_core::rdf::RdfError),
}

impl ServerError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        ServerError::Io {
            path: path.to_owned(),
            source,
        }
    }
}

use std::collections::HashMap;
use std::convert::Infallible;
use std::future::Future;
use std::net::SocketAddr;
use std::sync::Arc;
use std::time::Duration;

use axum::extract::Request;
use axum::Router;
use hyper::body::Incoming;
use hyper_util::rt::{TokioExecutor, TokioIo};
use hyper_util::server::conn::auto;
use tokio::net::TcpListener;
use tokio_rustls::TlsAcceptor;
use tower::ServiceExt;
use webcas_core::cas::ContentAccessService;
use webcas_core::rdf::Dataset;

use crate::auth::PeerCertificate;
use crate::config::ServerConfig;
use crate::fetch::ServerFetcher;
use crate::routes::{router, AppState};
use crate::{tls, ServerError};

const HANDSHAKE_TIMEOUT: Duration = Duration::from_secs(10);

/// A bound, not yet running server.
pub struct WebCasServer {
    listener: TcpListener,
    acceptor: TlsAcceptor,
    app: Router,
    state: AppState,
}

impl WebCasServer {
    /// Opens the dataset, loads the actors and binds the port.
    pub async fn bind(config: &ServerConfig) -> Result<Self, ServerError> {
        let actors = config.actors()?;
        let tls = tls::server_config(&config.tls_cert, &config.tls_key)?;
        let mut fetcher = ServerFetcher::new(config.remote_profiles, Duration::from_secs(config.fetch_timeout_secs));
        let mut profiles = HashMap::new();
        for (a, actor) in config.actors.iter().zip(&actors) {
            let turtle = a.load_profile()?;
            fetcher.add_local(&actor.webid, turtle.clone());
            profiles.insert(a.name.clone(), turtle);
        }
        let dataset_path = config.dataset.clone();
        let storage_root = config.storage_root.clone();
        let service = tokio::task::spawn_blocking(move || -> Result<_, ServerError> {
            std::fs::create_dir_all(&storage_root).map_err(|e| ServerError::io(&storage_root, e))?;
            let dataset = Dataset::open(dataset_path)?;
            Ok(ContentAccessService::open(dataset, storage_root, actors)?)
        })
        .await
        .map_err(|e| ServerError::Config(e.to_string()))??;
        let state = AppState {
            service: Arc::new(service),
            fetcher: Arc::new(fetcher),
            profiles: Arc::new(profiles),
            max_upload_bytes: config.max_upload_bytes,
            max_import_bytes: config.max_import_bytes,
        };
        let app = router(state.clone(), config.static_root.as_deref());
        let listener = TcpListener::bind(config.bind).await.map_err(|source| ServerError::Bind {
            addr: config.bind,
            source,
        })?;
        Ok(WebCasServer {
            listener,
            acceptor: TlsAcceptor::from(tls),
            app,
            state,
        })
    }

    pub fn local_addr(&self) -> SocketAddr {
        self.listener.local_addr().expect("bound listener has an address")
    }

    pub fn service(&self) -> Arc<ContentAccessService> {
        self.state.service.clone()
    }

    /// Accepts connections until `shutdown` completes. Connections already
    /// in flight are left to finish on their own.
    pub async fn serve(self, shutdown: impl Future<Output = ()>) {
        tracing::info!(addr = %self.local_addr(), "listening");
        tokio::pin!(shutdown);
        loop {
            let (tcp, peer) = tokio::select! {
                _ = &mut shutdown => break,
                accepted = self.listener.accept() => match accepted {
                    Ok(conn) => conn,
                    Err(e) => {
                        tracing::warn!(error = %e, "accept failed");
                        continue;
                    }
                },
            };
            let acceptor = self.acceptor.clone();
            let app = self.app.clone();
            tokio::spawn(async move {
                let tls = match tokio::time::timeout(HANDSHAKE_TIMEOUT, acceptor.accept(tcp)).await {
                    Ok(Ok(tls)) => tls,
                    Ok(Err(e)) => {
                        tracing::debug!(%peer, error = %e, "TLS handshake failed");
                        return;
                    }
                    Err(_) => {
                        tracing::debug!(%peer, "TLS handshake timed out");
                        return;
                    }
                };
                let cert = tls
                    .get_ref()
                    .1
                    .peer_certificates()
                    .and_then(|chain| chain.first())
                    .map(|c| Arc::new(c.as_ref().to_vec()));
                let peer_cert = PeerCertificate(cert);
                let service = hyper::service::service_fn(move |mut req: Request<Incoming>| {
                    req.extensions_mut().insert(peer_cert.clone());
                    let app = app.clone();
                    async move { Ok::<_, Infallible>(app.oneshot(req).await.unwrap_or_else(|e| match e {})) }
                });
                if let Err(e) = auto::Builder::new(TokioExecutor::new())
                    .serve_connection(TokioIo::new(tls), service)
                    .await
                {
                    tracing::debug!(%peer, error = %e, "connection closed with error");
                }
            });
        }
        tracing::info!("stopped accepting connections");
    }
}

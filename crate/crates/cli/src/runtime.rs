use std::net::SocketAddr;
use std::sync::mpsc;
use std::thread::JoinHandle;

use tokio::sync::oneshot;
use webcas_server::{ServerConfig, WebCasServer};

use crate::CliError;

fn runtime() -> Result<tokio::runtime::Runtime, CliError> {
    tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| CliError::io("tokio runtime", e))
}

/// Runs the server in the foreground until Ctrl-C.
pub fn serve(config: &ServerConfig) -> Result<(), CliError> {
    let rt = runtime()?;
    rt.block_on(async {
        let server = WebCasServer::bind(config).await?;
        tracing::info!(addr = %server.local_addr(), actors = config.actors.len(), "serving");
        server
            .serve(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await;
        Ok(())
    })
}

/// A server running on its own thread and runtime, stopped on drop.
pub struct BackgroundServer {
    addr: SocketAddr,
    shutdown: Option<oneshot::Sender<()>>,
    thread: Option<JoinHandle<()>>,
}

impl BackgroundServer {
    pub fn start(config: &ServerConfig) -> Result<Self, CliError> {
        let rt = runtime()?;
        let config = config.clone();
        let (ready_tx, ready_rx) = mpsc::channel();
        let (shutdown_tx, shutdown_rx) = oneshot::channel::<()>();
        let thread = std::thread::Builder::new()
            .name("webcas-server".into())
            .spawn(move || {
                rt.block_on(async move {
                    match WebCasServer::bind(&config).await {
                        Ok(server) => {
                            let _ = ready_tx.send(Ok(server.local_addr()));
                            server
                                .serve(async {
                                    let _ = shutdown_rx.await;
                                })
                                .await;
                        }
                        Err(e) => {
                            let _ = ready_tx.send(Err(e));
                        }
                    }
                });
            })
            .map_err(|e| CliError::io("server thread", e))?;
        let addr = match ready_rx.recv() {
            Ok(Ok(addr)) => addr,
            Ok(Err(e)) => {
                let _ = thread.join();
                return Err(e.into());
            }
            Err(_) => {
                let _ = thread.join();
                return Err(CliError::Config("server thread exited before binding".into()));
            }
        };
        Ok(BackgroundServer {
            addr,
            shutdown: Some(shutdown_tx),
            thread: Some(thread),
        })
    }

    pub fn addr(&self) -> SocketAddr {
        self.addr
    }
}

impl Drop for BackgroundServer {
    fn drop(&mut self) {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }
}

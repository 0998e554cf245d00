#![allow(dead_code)]

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;
use std::sync::OnceLock;

use tokio::sync::oneshot;
use webcas_core::cas::ContentAccessService;
use webcas_core::rdf::Iri;
use webcas_core::webid::{generate_identity, issue_certificate, Identity, Validity};
use webcas_server::config::{ActorConfig, ServerConfig};
use webcas_server::tls::generate_server_certificate;
use webcas_server::WebCasServer;

pub const ACTORS: [(&str, &str, &str, &str); 3] = [
    ("student", "http://example.org/Student", "student", "Student"),
    ("hbsc", "http://hbsc.example.org/actor", "hbsc", "Hbsc"),
    ("hmsc", "http://hmsc.example.org/actor", "hmsc", "Hmsc"),
];

pub fn iri(s: &str) -> Iri {
    Iri::new(s).unwrap()
}

pub fn webid_of(name: &str) -> Iri {
    iri(&format!("https://localhost/webid/{name}#id"))
}

/// Key generation is the slow part, so identities are shared by all tests
/// in a binary.
pub fn identities() -> &'static HashMap<&'static str, Identity> {
    static IDS: OnceLock<HashMap<&'static str, Identity>> = OnceLock::new();
    IDS.get_or_init(|| {
        ACTORS
            .iter()
            .map(|(name, ..)| (*name, generate_identity(name, &webid_of(name), 2048).unwrap()))
            .collect()
    })
}

/// Client credentials: PEM with private key and certificate.
#[derive(Clone)]
pub struct Credentials {
    pub pem: Vec<u8>,
    pub webid: Option<Iri>,
}

impl Credentials {
    pub fn of(id: &Identity) -> Self {
        Credentials {
            pem: format!("{}{}", id.private_key_pem, id.certificate_pem).into_bytes(),
            webid: Some(id.webid.clone()),
        }
    }
}

pub struct TestServer {
    pub addr: SocketAddr,
    pub dir: tempfile::TempDir,
    pub service: Arc<ContentAccessService>,
    pub server_cert_pem: String,
    pub outsider: Identity,
    pub config: ServerConfig,
    shutdown: Option<oneshot::Sender<()>>,
    profile_host: Option<oneshot::Sender<()>>,
}

impl Drop for TestServer {
    fn drop(&mut self) {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        if let Some(tx) = self.profile_host.take() {
            let _ = tx.send(());
        }
    }
}

pub struct Options {
    pub max_upload_bytes: usize,
    pub static_root: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            max_upload_bytes: 1 << 20,
            static_root: true,
        }
    }
}

/// An identity with no graph on the server. Its profile is served as
/// text/turtle over plain HTTP at `/card` on another port.
async fn host_outsider() -> (Identity, oneshot::Sender<()>) {
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let webid = iri(&format!("http://{}/card#me", listener.local_addr().unwrap()));
    let outsider = generate_identity("outsider", &webid, 2048).unwrap();
    let body = outsider.profile_turtle();
    let app = axum::Router::new().route(
        "/card",
        axum::routing::get(move || {
            let body = body.clone();
            async move { ([(axum::http::header::CONTENT_TYPE, "text/turtle")], body) }
        }),
    );
    let (tx, rx) = oneshot::channel::<()>();
    tokio::spawn(async move {
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = rx.await;
            })
            .await
            .unwrap();
    });
    (outsider, tx)
}

pub async fn start() -> TestServer {
    start_with(Options::default()).await
}

pub async fn start_with(options: Options) -> TestServer {
    let ids = identities();
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let (cert, key) = generate_server_certificate(&["localhost".into()]).unwrap();
    std::fs::write(root.join("server.crt"), &cert).unwrap();
    std::fs::write(root.join("server.key"), &key).unwrap();
    std::fs::create_dir_all(root.join("static")).unwrap();
    std::fs::write(root.join("static/index.html"), "<!doctype html><title>webcas</title>").unwrap();
    let mut actors = Vec::new();
    for (name, graph, vocabulary, class) in ACTORS {
        let profile = root.join(format!("{name}.ttl"));
        std::fs::write(&profile, ids[name].profile_turtle()).unwrap();
        actors.push(ActorConfig {
            name: name.into(),
            iri: graph.into(),
            vocabulary: vocabulary.into(),
            class: class.into(),
            webid: webid_of(name).as_str().into(),
            profile,
        });
    }
    let config = ServerConfig {
        bind: "127.0.0.1:0".parse().unwrap(),
        tls_cert: root.join("server.crt"),
        tls_key: root.join("server.key"),
        dataset: root.join("data/dataset.nq"),
        storage_root: root.join("data/files"),
        static_root: options.static_root.then(|| root.join("static")),
        max_upload_bytes: options.max_upload_bytes,
        max_import_bytes: 8 << 20,
        remote_profiles: true,
        fetch_timeout_secs: 5,
        actors,
    };
    let (outsider, profile_host) = host_outsider().await;
    let server = WebCasServer::bind(&config).await.unwrap();
    let addr = server.local_addr();
    let service = server.service();
    let (tx, rx) = oneshot::channel::<()>();
    tokio::spawn(server.serve(async {
        let _ = rx.await;
    }));
    TestServer {
        addr,
        dir,
        service,
        server_cert_pem: cert,
        outsider,
        config,
        shutdown: Some(tx),
        profile_host: Some(profile_host),
    }
}

impl TestServer {
    pub fn url(&self, path: &str) -> String {
        format!("https://localhost:{}{}", self.addr.port(), path)
    }

    pub fn client(&self, credentials: Option<&Credentials>) -> reqwest::Client {
        let mut builder = reqwest::Client::builder()
            .tls_certs_only([reqwest::Certificate::from_pem(self.server_cert_pem.as_bytes()).unwrap()])
            .resolve("localhost", self.addr);
        if let Some(c) = credentials {
            builder = builder.identity(reqwest::Identity::from_pem(&c.pem).unwrap());
        }
        builder.build().unwrap()
    }

    pub fn anonymous(&self) -> reqwest::Client {
        self.client(None)
    }

    pub fn actor(&self, name: &str) -> reqwest::Client {
        self.client(Some(&Credentials::of(&identities()[name])))
    }

    pub fn outsider(&self) -> reqwest::Client {
        self.client(Some(&Credentials::of(&self.outsider)))
    }

    /// A certificate naming `name`'s WebID but carrying a different key.
    pub fn forger(&self, name: &str) -> reqwest::Client {
        let stranger = generate_identity("forger", &iri("https://forger.invalid/#me"), 2048).unwrap();
        let (_, pem) = issue_certificate(&stranger.private_key_pem, "forger", &[webid_of(name)], Validity::one_year())
            .unwrap();
        self.client(Some(&Credentials {
            pem: format!("{}{}", stranger.private_key_pem, pem).into_bytes(),
            webid: None,
        }))
    }

    pub fn storage_root(&self) -> PathBuf {
        self.config.storage_root.clone()
    }
}

pub fn pdf_form(name: &str, bytes: Vec<u8>) -> reqwest::multipart::Form {
    reqwest::multipart::Form::new().part(
        "file",
        reqwest::multipart::Part::bytes(bytes)
            .file_name(name.to_owned())
            .mime_str("application/pdf")
            .unwrap(),
    )
}

pub async fn json(resp: reqwest::Response) -> serde_json::Value {
    let status = resp.status();
    let text = resp.text().await.unwrap();
    serde_json::from_str(&text).unwrap_or_else(|e| panic!("{status}: {e}: {text}"))
}

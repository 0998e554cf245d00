//! A self-contained directory holding everything the demo workflow needs:
//! server configuration, TLS material, the three actor identities and the
//! data directory.
//!
//! ```text
//! config.toml
//! tls/server.crt, tls/server.key
//! identities/<actor>/{key.pem,cert.pem,profile.ttl}
//! data/dataset.nq, data/files/
//! ```

use std::fs;
use std::net::{Ipv4Addr, SocketAddr, TcpListener};
use std::path::{Path, PathBuf};

use webcas_server::config::{ActorConfig, ServerConfig};
use webcas_server::tls::generate_server_certificate;

use crate::identity::{gen_identity, StoredIdentity, PROFILE_FILE};
use crate::CliError;

/// Name, graph IRI, vocabulary and class of the three workflow actors.
pub const ACTORS: [(&str, &str, &str, &str); 3] = [
    ("student", "http://example.org/Student", "student", "Student"),
    ("hbsc", "http://hbsc.example.org/actor", "hbsc", "Hbsc"),
    ("hmsc", "http://hmsc.example.org/actor", "hmsc", "Hmsc"),
];

pub const CONFIG_FILE: &str = "config.toml";

pub struct Workdir {
    pub root: PathBuf,
    pub config: ServerConfig,
}

impl Workdir {
    /// Loads the workdir, creating it first if it has no configuration.
    /// The port chosen at creation is kept for later runs so WebIDs stay
    /// stable.
    pub fn prepare(root: &Path, key_bits: u32) -> Result<Self, CliError> {
        let config_path = root.join(CONFIG_FILE);
        if !config_path.exists() {
            create(root, key_bits)?;
        }
        let config = ServerConfig::load(&config_path)?;
        for (name, ..) in ACTORS {
            if !config.actors.iter().any(|a| a.name == name) {
                return Err(CliError::Config(format!("{}: no actor named {name}", config_path.display())));
            }
        }
        Ok(Workdir {
            root: root.to_owned(),
            config,
        })
    }

    pub fn identity_dir(&self, actor: &str) -> PathBuf {
        self.root.join("identities").join(actor)
    }

    pub fn identity(&self, actor: &str) -> Result<StoredIdentity, CliError> {
        StoredIdentity::load(&self.identity_dir(actor))
    }

    pub fn webid(&self, actor: &str) -> Result<String, CliError> {
        self.actor(actor).map(|a| a.webid.clone())
    }

    pub fn actor(&self, actor: &str) -> Result<&ActorConfig, CliError> {
        self.config
            .actors
            .iter()
            .find(|a| a.name == actor)
            .ok_or_else(|| CliError::Config(format!("no actor named {actor}")))
    }

    pub fn server_cert_pem(&self) -> Result<Vec<u8>, CliError> {
        fs::read(&self.config.tls_cert).map_err(|e| CliError::io(&self.config.tls_cert, e))
    }
}

fn free_port() -> Result<u16, CliError> {
    let probe = TcpListener::bind((Ipv4Addr::LOCALHOST, 0)).map_err(|e| CliError::io("127.0.0.1:0", e))?;
    probe
        .local_addr()
        .map(|a| a.port())
        .map_err(|e| CliError::io("127.0.0.1:0", e))
}

fn create(root: &Path, key_bits: u32) -> Result<(), CliError> {
    let port = free_port()?;
    let tls = root.join("tls");
    fs::create_dir_all(&tls).map_err(|e| CliError::io(&tls, e))?;
    let (cert, key) = generate_server_certificate(&["localhost".to_owned()])?;
    for (file, pem) in [("server.crt", &cert), ("server.key", &key)] {
        let path = tls.join(file);
        fs::write(&path, pem).map_err(|e| CliError::io(&path, e))?;
    }

    let mut actors = Vec::new();
    for (name, iri, vocabulary, class) in ACTORS {
        let webid = format!("https://localhost:{port}/webid/{name}#id");
        let dir = root.join("identities").join(name);
        // A previous attempt may have stopped before writing the config.
        gen_identity(name, &webid, &dir, key_bits, true)?;
        actors.push(ActorConfig {
            name: name.into(),
            iri: iri.into(),
            vocabulary: vocabulary.into(),
            class: class.into(),
            webid,
            profile: PathBuf::from("identities").join(name).join(PROFILE_FILE),
        });
    }

    let config = ServerConfig {
        bind: SocketAddr::from((Ipv4Addr::LOCALHOST, port)),
        tls_cert: "tls/server.crt".into(),
        tls_key: "tls/server.key".into(),
        dataset: "data/dataset.nq".into(),
        storage_root: "data/files".into(),
        static_root: None,
        max_upload_bytes: 16 << 20,
        max_import_bytes: 64 << 20,
        remote_profiles: true,
        fetch_timeout_secs: 5,
        actors,
    };
    // Written last: its presence marks a complete workdir.
    let path = root.join(CONFIG_FILE);
    fs::write(&path, config.to_toml()).map_err(|e| CliError::io(&path, e))
}
